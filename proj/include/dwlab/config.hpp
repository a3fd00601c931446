#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "dwlab/grid.hpp"
#include "dwlab/solver.hpp"

namespace dwlab {

// Experiment description parsed from an INI-style file with sections
// [grid], [model], [run], [data] and [suite].  Parsing is total: any unknown
// or malformed key fails with a message naming it.  Numeric gates (lambda in
// (0,1], L >= L0, grid validity) are enforced in to_run_config before any
// computation starts.
struct ExperimentConfig {
  // [grid]
  int dim = 1;
  int n = 257;
  double half_width = 20;
  int stencil_order = 4;

  // [model]
  std::string profile = "uniform";  // uniform | radial_step | radial_step_aniso
  double b0 = 1;
  double r0 = 0.5;
  double R = 2;
  double eps = 0;
  std::array<double, 3> dir{1, 0, 0};
  std::uint64_t tensor_seed = 0;
  double tensor_strength = 0;  // 0 -> no quadratic term

  // [run]
  double lambda = 1;
  double dt = 0;  // <= 0 picks cfl_safety * stability limit
  double cfl_safety = 0.9;
  double t_final = 1;
  std::int64_t sample_every = 1;
  int L = 4;
  double smallness_budget = 1e-4;
  double blowup_sup = 1e8;

  // [data]
  std::string u0_family = "zero";  // zero | bump | odd_bump | gaussian | ...
  std::string u1_family = "bump";
  double u0_amplitude = 0;
  double u1_amplitude = 1e-2;
  std::uint64_t data_seed = 1;
  double data_radius = 0;  // 0 -> half_width / 2

  // [suite]
  int mu_max = 0;       // tracked time-derivative orders beyond 0
  int samples = 100;    // sampled-inequality suite size
  std::string checks = "auto";  // inequality selection, or dimension default
  double window_t1 = 0;  // 0 -> max(1, T/10)
  double window_t2 = 0;  // 0 -> T
  double slack = 0.3;
  double c1 = 0.25;  // coercivity constant fed to the modified energy
  bool run_fits = true;
  bool run_ledger = true;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Serializes exactly the keys parse_config_text understands (round-trip).
std::string config_text(const ExperimentConfig& c);

// Builds and validates the solver configuration (grid, damping, tensor).
RunConfig to_run_config(const ExperimentConfig& c);

struct InitialData {
  Field u0, u1;
  bool odd_certificate = false;  // analytic mean-zero construction
};

InitialData make_initial_data(const ExperimentConfig& c, const Grid& g);

}  // namespace dwlab
