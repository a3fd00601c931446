#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dwlab/grid.hpp"
#include "dwlab/model.hpp"

// Time integration of the damped quasilinear wave system
//
//   (d_t^2 - Lap + B(x) d_t) u = N[u,u]
//
// by a staggered leapfrog scheme whose damping term is implicit at the half
// step: each velocity update solves the pointwise d x d system
// (I + (dt/2) B(x)) v_new = explicit rhs.  The scheme is second order and,
// for N = 0, dissipates the discrete energy exactly up to round-off.

namespace dwlab {

struct State {
  Field u;
  Field udot;
  double t = 0;

  State() = default;
  State(Field u_, Field udot_, double t_ = 0);
  const Grid& grid() const { return u.grid(); }
};

// Sobolev index L0 = floor(d/2) + 3 used by the smallness bookkeeping.
int l0_for_dim(int dim);

struct RunConfig {
  Grid grid;
  DampingSpec damping;      // rescaling factor already composed in
  NonlinearTensor tensor;   // may be zero
  double lambda = 1.0;      // bookkeeping copy of the rescaling factor
  double dt = 0.0;          // <= 0 selects cfl_safety * stability_dt(grid)
  double t_final = 1.0;
  std::int64_t sample_every = 1;
  int L = 4;                // highest spatial derivative order tracked
  double cfl_safety = 0.9;
  double smallness_budget = 1e-4;  // bound demanded of E_{L0} samples
  double blowup_sup = 1e8;

  int L0() const { return l0_for_dim(grid.dim); }
  double step_size() const;  // resolved dt
};

// Validates config invariants (dt within the CFL budget, L >= L0, matching
// dimensions); throws std::invalid_argument with the offending field.
void validate(const RunConfig& cfg);

// Largest stable dt for the linear system at unit wave speed:
// h/sqrt(d) for the second-order stencil, (sqrt(3)/2) h/sqrt(d) for fourth.
double stability_dt(const Grid& g);

struct StepDiagnostics {
  double t = 0;                  // time after the step
  double stag_energy = 0;        // staggered discrete energy at the half step
  double diss_power = 0;         // <udot, B udot> at the step's base time
  double nl_power = 0;           // <udot, N[u,u]> at the step's base time
  double identity_residual = 0;  // discrete energy-rate identity defect
  double cfl_eff = 1;            // 1 + |N|_1 * sup|grad u| speed factor
  double sup_u = 0;
};

struct Sample {
  double t = 0;
  State state;
  double e_l0 = 0;           // E_{L0}: sum_{|a|<L0} E(grad^a u)
  double edge_fraction = 0;  // L2 mass fraction within the boundary band
};

struct Trajectory {
  std::vector<Sample> samples;       // strictly increasing times from 0
  std::vector<StepDiagnostics> steps;
  double dt = 0;
  std::int64_t nsteps = 0;
  bool smallness_ok = true;          // every e_l0 <= smallness_budget
  double max_e_l0 = 0;
  double max_cfl_eff = 1;
  double max_identity_residual = 0;
  double max_edge_fraction = 0;

  const Sample& final_sample() const { return samples.back(); }
};

// Raised when the solution exceeds the blow-up threshold or goes non-finite.
class BlowupError : public std::runtime_error {
 public:
  BlowupError(double t, const std::string& what);
  double time() const { return t_; }

 private:
  double t_;
};

// Raised when dt violates the (monitored, quasilinear-adjusted) CFL budget.
class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One full step of the colocated map (u^n, udot^n) -> (u^{n+1}, udot^{n+1}).
// Composing step() n times reproduces the staggered scheme exactly.
State step(const State& state, const RunConfig& cfg);

// Advances data (u0, u1) to t_final, sampling every sample_every steps
// (plus the initial and final states) and recording per-step diagnostics.
Trajectory simulate(const RunConfig& cfg, const State& data);

// Time derivatives through the equation: returns dt^nu u for nu = 0..mu+1,
// using dt^nu u = Lap dt^{nu-2} u - B dt^{nu-1} u
//                 + sum_k binom(nu-2,k) N[dt^k u, dt^{nu-2-k} u].
std::vector<Field> time_derivatives(const State& state, const RunConfig& cfg,
                                    int mu);

struct OracleResult {
  Field u;
  bool boundary_contact = false;  // support touched the domain edge
};

// Traveling-wave solution u(t,x) = (f(x+t) + f(x-t))/2 of the undamped
// linear scalar problem in one dimension, for data (f, 0).
OracleResult linear_oracle_1d(const Grid& g,
                              const std::function<double(double)>& profile,
                              double support_radius, double t);

struct RescaleReport {
  double lambda = 1;
  double max_rel_l2_diff = 0;  // max over matched sample times
  double data_norm = 0;          // H^{L0} x H^{L0-1} squared sum of (u0,u1)
  double data_norm_rescaled = 0;  // same for the rescaled data
  double nominal_factor = 1;      // lambda^{-d-1}
  double ratio = 1;               // data_norm_rescaled / data_norm
  bool inequality_holds = true;   // ratio <= nominal_factor * (1 + 1%)
  bool matched_grids = true;      // node-exact comparison path was taken
};

// Runs the original system with data (u0, u1) and the rescaled system with
// data (u0(lam x)/lam, u1(lam x)), then compares lam * v(t/lam, x/lam)
// against u(t, x) at every matched sample time.  n_rescaled = 0 keeps the
// node count (matched lattices, node-exact comparison); any other value
// compares through multilinear interpolation.
RescaleReport rescaling_roundtrip(const RunConfig& cfg, const State& data,
                                  double lambda, int n_rescaled = 0);

}  // namespace dwlab
