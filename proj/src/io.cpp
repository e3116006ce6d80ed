#include "hydro/io.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "hydro/error.hpp"

namespace hydro {

namespace {

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, column = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

Eigen::VectorXd vector_field(const json& doc, const char* key, int n) {
  if (!doc.contains(key)) {
    if (std::string(key) == "l") return Eigen::VectorXd::Zero(n);
    throw Error(ErrorCode::ConfigInvalid, std::string("model is missing \"") + key + "\"");
  }
  const auto& arr = doc.at(key);
  if (!arr.is_array() || static_cast<int>(arr.size()) != n) {
    throw Error(ErrorCode::ConfigInvalid, std::string("\"") + key + "\" must be an array of length n");
  }
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = arr.at(i).get<double>();
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

ModelSpec model_from_json(const json& doc) {
  ModelSpec spec;
  try {
    if (!doc.is_object()) throw Error(ErrorCode::ConfigInvalid, "model document must be a JSON object");
    spec.n = doc.at("n").get<int>();
    if (spec.n < 1) throw Error(ErrorCode::ConfigInvalid, "\"n\" must be at least 1");
    spec.d = vector_field(doc, "d", spec.n);
    spec.l = vector_field(doc, "l", spec.n);
    spec.q = Eigen::MatrixXd::Zero(spec.n, spec.n);
    if (doc.contains("q")) {
      const auto& q = doc.at("q");
      if (!q.is_array() || static_cast<int>(q.size()) != spec.n) {
        throw Error(ErrorCode::ConfigInvalid, "\"q\" must be an n x n array");
      }
      for (int i = 0; i < spec.n; ++i) {
        if (!q.at(i).is_array() || static_cast<int>(q.at(i).size()) != spec.n) {
          throw Error(ErrorCode::ConfigInvalid, "\"q\" must be an n x n array");
        }
        for (int j = 0; j < spec.n; ++j) spec.q(i, j) = q.at(i).at(j).get<double>();
      }
    }
    if (doc.contains("theta")) {
      const auto& theta = doc.at("theta");
      const std::string mode = theta.value("mode", "linear");
      if (mode == "linear") {
        spec.theta = ThetaMode::linear();
      } else if (mode == "power") {
        spec.theta = ThetaMode::power(theta.at("a").get<double>());
      } else {
        throw Error(ErrorCode::ConfigInvalid, "unknown theta mode \"" + mode + "\"");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  return validate_model(spec);
}

json model_to_json(const ModelSpec& spec) {
  json doc;
  doc["n"] = spec.n;
  doc["d"] = std::vector<double>(spec.d.data(), spec.d.data() + spec.n);
  doc["l"] = std::vector<double>(spec.l.data(), spec.l.data() + spec.n);
  json q = json::array();
  for (int i = 0; i < spec.n; ++i) {
    json row = json::array();
    for (int j = 0; j < spec.n; ++j) row.push_back(spec.q(i, j));
    q.push_back(row);
  }
  doc["q"] = q;
  if (spec.theta.kind == ThetaMode::Kind::Linear) {
    doc["theta"] = {{"mode", "linear"}};
  } else {
    doc["theta"] = {{"mode", "power"}, {"a", spec.theta.exponent}};
  }
  return doc;
}

ModelSpec parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::ostringstream msg;
    msg << "malformed model JSON at line " << line << ", column " << column;
    throw Error(ErrorCode::ConfigInvalid, msg.str());
  }
  return model_from_json(doc);
}

ModelSpec load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read model file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

std::string config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const CsvMeta& meta, const std::vector<std::string>& header)
    : out_(path), width_(header.size()) {
  if (!out_) throw Error(ErrorCode::IoError, "cannot write " + path);
  out_ << "# hydro schema=" << meta.schema << " version=" << kSchemaVersion << " config_hash=" << meta.config_hash
       << " seed=" << meta.seed << "\n";
  for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw Error(ErrorCode::SchemaMismatch, "row width does not match the header");
  for (std::size_t k = 0; k < cells.size(); ++k) out_ << (k ? "," : "") << cells[k];
  out_ << "\n";
}

void CsvWriter::row(std::initializer_list<double> values) {
  std::vector<std::string> cells;
  for (double v : values) cells.push_back(format_number(v));
  row(cells);
}

int CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorCode::SchemaMismatch, "missing column \"" + name + "\"");
  return static_cast<int>(it - header.begin());
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  CsvTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream words(line.substr(1));
      std::string word;
      while (words >> word) {
        const auto eq = word.find('=');
        if (eq != std::string::npos) table.meta[word.substr(0, eq)] = word.substr(eq + 1);
      }
      continue;
    }
    if (table.header.empty()) {
      table.header = split(line, ',');
      continue;
    }
    auto cells = split(line, ',');
    if (cells.size() != table.header.size()) {
      throw Error(ErrorCode::SchemaMismatch, "row width does not match the header in " + path);
    }
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) throw Error(ErrorCode::SchemaMismatch, "missing header row in " + path);
  return table;
}

void write_density(CsvWriter& out, const DensityField& field, const std::string& lane) {
  for (Eigen::Index k = 0; k < field.cells(); ++k) {
    out.row({format_number(field.t), format_number(field.center(k)), lane, format_number(field.values(k))});
  }
}

void write_lane_state(CsvWriter& out, const LaneSystemState& state) {
  const DensityField total = state.total();
  for (Eigen::Index k = 0; k < state.cells(); ++k) {
    const std::string t = format_number(state.t), x = format_number(state.center(k));
    for (int i = 0; i < state.lanes(); ++i) {
      out.row({t, x, std::to_string(i), format_number(state.rho(k, i)), format_number(total.values(k))});
    }
  }
}

namespace {

DensityField field_from_points(std::vector<std::pair<double, double>> points, double t) {
  std::sort(points.begin(), points.end());
  DensityField f;
  f.t = t;
  f.dx = points.size() > 1 ? (points.back().first - points.front().first) / static_cast<double>(points.size() - 1)
                           : 1.0;
  f.x0 = points.front().first - 0.5 * f.dx;
  f.values.resize(static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) f.values(static_cast<Eigen::Index>(k)) = points[k].second;
  return f;
}

}  // namespace

std::vector<DensitySnapshot> read_density(const CsvTable& table) {
  const int ct = table.column("t"), cx = table.column("x"), cl = table.column("lane"), cr = table.column("rho");
  std::map<double, std::map<std::string, std::vector<std::pair<double, double>>>> grouped;
  for (const auto& row : table.rows) {
    grouped[std::stod(row[ct])][row[cl]].emplace_back(std::stod(row[cx]), std::stod(row[cr]));
  }
  std::vector<DensitySnapshot> out;
  for (auto& [t, lanes] : grouped) {
    DensitySnapshot snap;
    snap.t = t;
    for (auto& [lane, points] : lanes) snap.lanes[lane] = field_from_points(points, t);
    out.push_back(std::move(snap));
  }
  return out;
}

DensityField read_scalar_field(const std::string& path) {
  const CsvTable table = read_csv(path);
  const int cx = table.column("x"), cu = table.column("u");
  std::vector<std::pair<double, double>> points;
  for (const auto& row : table.rows) points.emplace_back(std::stod(row[cx]), std::stod(row[cu]));
  if (points.empty()) throw Error(ErrorCode::SchemaMismatch, "no data rows in " + path);
  return field_from_points(points, 0.0);
}

LaneSystemState read_lane_state(const std::string& path, int lanes) {
  const auto snaps = read_density(read_csv(path));
  if (snaps.empty()) throw Error(ErrorCode::SchemaMismatch, "no data rows in " + path);
  const auto& first = snaps.front();
  LaneSystemState state;
  for (int i = 0; i < lanes; ++i) {
    const auto it = first.lanes.find(std::to_string(i));
    if (it == first.lanes.end()) throw Error(ErrorCode::SchemaMismatch, "missing lane " + std::to_string(i));
    const DensityField& f = it->second;
    if (i == 0) {
      state.x0 = f.x0;
      state.dx = f.dx;
      state.t = 0.0;
      state.rho.resize(f.cells(), lanes);
    } else if (f.cells() != state.cells()) {
      throw Error(ErrorCode::SchemaMismatch, "lanes have different grids");
    }
    state.rho.col(i) = f.values.matrix();
  }
  return state;
}

void write_manifest(const std::string& output, const json& manifest) {
  std::ofstream out(output + ".manifest.json");
  if (!out) throw Error(ErrorCode::IoError, "cannot write manifest for " + output);
  out << manifest.dump(2) << "\n";
}

}  // namespace hydro
