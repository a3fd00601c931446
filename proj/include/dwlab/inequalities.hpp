#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dwlab/grid.hpp"
#include "dwlab/model.hpp"

namespace dwlab {

// Outcome of one sampled functional-inequality check.  `ratios` holds the
// per-sample LHS/RHS quotients on the base grid; `max_ratio` is the empirical
// constant; a second run on a refined grid measures `refinement_drift`.
struct InequalityReport {
  std::string name;
  int samples = 0;    // ratios actually measured on the base grid
  int skipped = 0;    // degenerate samples (zero denominator) left out
  std::vector<double> ratios;
  double max_ratio = 0;
  double max_ratio_fine = 0;         // empirical constant on the refined grid
  std::vector<double> sweep_values;  // parameter sweep (lambda, exponent, ...)
  std::vector<double> sweep_max;     // max ratio per sweep value
  double refinement_drift = 0;       // |fine - coarse| / coarse
  double constant = 0;               // value handed to downstream consumers
  double origin_deficit = 0;         // bound for any excluded origin node
  bool pass = false;
  std::string detail;
};

// Relative drift between constants measured at two resolutions.
double relative_drift(double coarse, double fine);

// Sup-norm control by the Sobolev norm of order floor(d/2) + 1:
// ratio = ||f||_inf / ||f||_{H^{d/2+1}}.  support_radius <= 0 picks a
// default of half the domain extent.
InequalityReport sobolev_check(const Grid& g, int nsamples, std::uint64_t seed,
                               double support_radius = 0);

// Product estimate ||D^b f D^c g||_2 <= C(||f||_inf ||g||_{H^k} +
// ||f||_{H^k} ||g||_inf) over every split |b| + |c| = k.
InequalityReport gnm_check(const Grid& g, int k, int nsamples,
                           std::uint64_t seed);

// Single split ratio for the product estimate, with k = |b| + |c|.
double gnm_ratio(const Field& f, const Field& g2, const MultiIndex& b,
                 const MultiIndex& c);

// Damping-form coercivity sweep: C(f, lambda) =
// ||f||_2^2 / (<f, B_lambda f>/lambda + ||grad f||_2^2/lambda^2), maximized
// over samples and the lambda sweep; `constant` is that max floored at 1/4.
InequalityReport poincare_check(const DampingSpec& spec, const Grid& g,
                                std::span<const double> lambda_sweep,
                                int nsamples, std::uint64_t seed);

// Radial-weight inequality ||f/|x|||_2 <= 2/(d-2) ||grad f||_2, gridded only
// for d = 3.  A nonzero value at the origin node excludes the node and
// records an analytic bound for the excluded ball in origin_deficit.
InequalityReport hardy_check(const Grid& g, int nsamples, std::uint64_t seed);

// Scale-invariant embedding ||f||_p <= C ||grad f||_q with 1/p = 1/q - 1/d;
// the gridded case is d = 3, q = 2, p = 6.  Mismatched exponents throw.
InequalityReport gn_check(const Grid& g, int p, int q, int nsamples,
                          std::uint64_t seed);

// Integrability/moment hypotheses on the forcing profile f = B u0 + u1 that
// select the sharp decay branch; names follow the report registry.
enum class DataHypothesis { none, h1, h2, h3 };
std::string hypothesis_name(DataHypothesis h);

// Pairing bound <g, f> <= E0 ||grad g||_{H^{L0-2}} measured over sampled g.
// h1/h2 require d >= 3; h3 requires d in {1,2} and a mean-zero certificate
// coming from the analytic construction (odd symmetry), never from a
// near-zero lattice sum.  The report's refinement_drift stays 0; callers
// compare two resolutions with relative_drift().
InequalityReport pairing_check(const Field& f, DataHypothesis branch,
                               bool mean_zero_certified, int nsamples,
                               std::uint64_t seed);

}  // namespace dwlab
