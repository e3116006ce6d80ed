#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "hydro/model.hpp"
#include "hydro/relaxation.hpp"
#include "hydro/scalar_pde.hpp"

namespace hydro {

using json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";

ModelSpec model_from_json(const json& doc);
json model_to_json(const ModelSpec& spec);
ModelSpec parse_model(const std::string& text);
ModelSpec load_model(const std::string& path);

std::string config_hash(const json& config);
std::string format_number(double x);

struct CsvMeta {
  std::string schema;
  std::string config_hash;
  std::uint64_t seed = 0;
};

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const CsvMeta& meta, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& cells);
  void row(std::initializer_list<double> values);

 private:
  std::ofstream out_;
  std::size_t width_;
};

struct CsvTable {
  std::map<std::string, std::string> meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

// Density schema: t,x,lane,rho with lane an index or "total".
void write_density(CsvWriter& out, const DensityField& field, const std::string& lane);
void write_lane_state(CsvWriter& out, const LaneSystemState& state);

struct DensitySnapshot {
  double t = 0.0;
  std::map<std::string, DensityField> lanes;
};

std::vector<DensitySnapshot> read_density(const CsvTable& table);
DensityField read_scalar_field(const std::string& path);
LaneSystemState read_lane_state(const std::string& path, int lanes);

void write_manifest(const std::string& output, const json& manifest);

}  // namespace hydro
