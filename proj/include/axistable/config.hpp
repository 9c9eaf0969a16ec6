#pragma once

// Plain-text run configuration: INI-style sections of key = value lines,
// strict parsing (unknown sections or keys are errors), and a serializer
// whose output re-parses to the same resolved run (the manifest contract).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "axistable/potential.hpp"

namespace axistable {

struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  static ConfigFile parse_string(const std::string& text);
  static ConfigFile parse_file(const std::string& path);
  std::string serialize() const;
};

struct PotentialBlock {
  std::string family = "product_polynomial";
  int dimension = 1;
  double alpha = 1.0;
  std::vector<double> epsilons{2.0};
  std::vector<std::string> coefficients;  // variable order expressions

  Potential build() const;
};

struct CriteriaBlock {
  double gamma = 0.0;  // 0: default 0.5 * min(alpha, 1)
  double r_min = 1.0;
  double ladder_span = 1048576.0;
  int shells_per_decade = 7;
  int directions = 0;
  double phi_target = 0.0;
};

struct RatesBlock {
  double s_lo = 1e-3;
  double s_hi = 1e-1;
  int points_per_decade = 8;
  double c1 = 1.0;
  double c2 = 1.0;
  double c = 1.0;
  double eps_slack = -1.0;
};

struct FormBlock {
  std::string kind = "poincare";  // poincare|super_poincare|local_super|entropy|weak
  double s = 0.1;
  double r = 1.0;
  double t = 0.1;
  double constant = 1.0;
  int battery = 8;   // random test functions
  int battery_dim = 0;  // 0: potential dimension
};

struct LyapunovBlock {
  double gamma = 0.0;  // 0: default 0.5 * min(alpha, 1)
  double r_min = 1.0;
  double r_max = 1e3;
  int steps = 16;
  int directions = 0;
};

struct GapBlock {
  std::vector<double> boxes{25.0, 50.0, 100.0};
  int n = 4096;
};

struct SimulateBlock {
  double horizon = 1e3;
  int trajectories = 10000;
  double delta = 1.0;
  int points_per_decade = 12;
  double t_min_fraction = 1e-3;
  int f_axis = 0;
  double f_center = 0.0;
  double f_radius = 2.0;
};

struct RunConfig {
  std::string task;
  PotentialBlock potential;
  CriteriaBlock criteria;
  RatesBlock rates;
  FormBlock form;
  LyapunovBlock lyapunov;
  GapBlock gap;
  SimulateBlock simulate;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  double tol = 0.0;  // 0: module defaults
  int threads = 1;

  // strict load; `task` must match the [run] section when present
  static RunConfig load(const std::string& path, const std::string& task);
  std::string manifest() const;

  double gamma_or_default(double block_gamma) const;
};

}  // namespace axistable
