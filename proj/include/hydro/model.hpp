#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "hydro/error.hpp"

namespace hydro {

struct ThetaMode {
  enum class Kind { Linear, Power };
  Kind kind = Kind::Linear;
  double exponent = 1.0;

  static ThetaMode linear() { return {}; }
  static ThetaMode power(double a) { return {Kind::Power, a}; }
};

// Parameters of the n-lane process: right/left jump rates per lane and
// the interlane kernel q(i,j), i != j.
struct ModelSpec {
  int n = 0;
  Eigen::VectorXd d;
  Eigen::VectorXd l;
  Eigen::MatrixXd q;
  ThetaMode theta;

  Eigen::VectorXd drift() const { return d - l; }
  double max_rate() const;
};

struct ClassDecomposition {
  // classes[alpha] lists lanes of Gamma_alpha in increasing order.
  std::vector<std::vector<int>> classes;
  // lambda[alpha][k] is the weight of lane classes[alpha][k]; min over the class is 1.
  std::vector<Eigen::VectorXd> lambda;
  std::vector<int> class_of;
  std::vector<int> index_in_class;

  int count() const { return static_cast<int>(classes.size()); }
  int size(int alpha) const { return static_cast<int>(classes[alpha].size()); }
  // N_alpha = sum of sizes of classes after alpha; tail(-1) = n, tail(m-1) = 0.
  int tail(int alpha) const;
  double weight(int lane) const { return lambda[class_of[lane]][index_in_class[lane]]; }
};

struct CouplingExponents {
  int n_star = 0;
  int m_star = 0;
};

ModelSpec validate_model(ModelSpec raw);
ClassDecomposition irreducibility_classes(const ModelSpec& spec);
CouplingExponents coupling_exponents(const ModelSpec& spec);
int m_star_from_diameter(int n_star);
std::int64_t theta_schedule(std::int64_t N, const ThetaMode& mode, int m_star);

// Convenience constructors used throughout tests and the CLI.
ModelSpec two_lane_model(double d0, double d1, double p, double q, double l0 = 0.0, double l1 = 0.0);
// Nearest-neighbour chain with q(i,i+1) = up, q(i+1,i) = down.
ModelSpec chain_model(const Eigen::VectorXd& d, double up, double down);

}  // namespace hydro
