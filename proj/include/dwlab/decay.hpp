#pragma once

#include <span>
#include <string>
#include <vector>

#include "dwlab/grid.hpp"
#include "dwlab/inequalities.hpp"
#include "dwlab/model.hpp"
#include "dwlab/solver.hpp"

namespace dwlab {

// Classification of the forcing profile f = B u0 + u1 against the
// integrability / moment / mean-zero hypotheses that select the sharp decay
// branch.  H1 and H2 are gated to d >= 3, H3 to d in {1, 2}.  Mean-zero is
// declared only through an analytic certificate (odd-symmetric construction),
// never from a near-zero lattice sum.
struct HypothesisReport {
  int dim = 1;
  std::vector<double> p_grid;   // admissible integrability exponents scanned
  std::vector<double> f_lp;     // ||f||_p per scanned p
  double weighted_l2 = 0;       // || |x| f ||_2
  double weighted_l1 = 0;       // || |x| f ||_1
  std::vector<double> mean;     // integral of f, per component
  bool odd_certificate = false;
  bool h1 = false, h2 = false, h3 = false;

  // Transfer of the hypotheses to the rescaled profile B_lam v0 + v1.
  double rescale_lambda = 1;
  std::vector<double> mean_rescaled;
  bool transfer_ok = false;

  DataHypothesis best() const;
};

HypothesisReport classify_data(const Field& u0, const Field& u1,
                               const DampingSpec& spec, double lambda,
                               bool odd_certificate);

// Least-squares power-law fit: slope of log q against log(1 + t).
struct DecayFit {
  std::string quantity;
  double t1 = 0, t2 = 0;     // fit window
  int count = 0;             // samples inside the window
  double slope = 0;
  double intercept = 0;      // fitted log-prefactor
  double residual_rms = 0;   // RMS of log-residuals
  double target = 0;         // required exponent (upper bound)
  double slack = 0.3;
  bool trivial = false;      // quantity vanishes identically on the window
  bool pass = false;
  std::vector<double> ts, qs;  // full series, for plotting/CSV export
};

// Fits q ~ (1+t)^slope on [t1, t2]; passes when slope <= target + slack.
// Requires t2 > t1 >= 1 and at least 20 window samples; nonpositive q in the
// window is an error unless the whole window is numerically zero (trivial
// decay, which passes).
DecayFit fit_decay(std::span<const double> t, std::span<const double> q,
                   double t1, double t2, double target, double slack = 0.3,
                   std::string quantity = "series");

// Fit window; nonpositive entries request the default [max(1, T/10), T].
struct RateWindow {
  double t1 = 0;
  double t2 = 0;
  double slack = 0.3;
};

// One fit per monitored quantity and time-derivative order mu <= mu_max:
//   sobolev_sq_mu{m}: |d_t^m u|_{H^{L-m}}^2 + |d_t^{m+1} u|_{H^{L-m-1}}^2,
//                     target -(2m+1)
//   energy_mu{m}:     E(d_t^m u), target -(2m+2)
//   sup_sq_mu{m}:     |d_t^m u|_inf^2, target -(2m+1)
//   laplacian_sq:     |lap u|_2^2, target -3 (emitted when L > L0)
//   l2_sq:            |u|_2^2, target -1
// Without hypothesis data the targets relax to 0 for l2_sq and -1 for
// energy_mu0, and only those two fits are emitted.
std::vector<DecayFit> verify_rates(const Trajectory& traj, const RunConfig& cfg,
                                   int mu_max, bool hypothesis_data,
                                   const RateWindow& window = {});

}  // namespace dwlab
