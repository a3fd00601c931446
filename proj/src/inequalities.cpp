#include "dwlab/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dwlab/kernels.hpp"
#include "dwlab/solver.hpp"

namespace dwlab {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kDriftBudget = 0.20;

constexpr SampleKind kFamilies[3] = {SampleKind::bump, SampleKind::band_limited,
                                     SampleKind::shell};

SampleKind family(int i) { return kFamilies[i % 3]; }

double default_radius(const Grid& g, double requested) {
  return requested > 0 ? requested : 0.5 * g.half_width;
}

Grid refined(const Grid& g) {
  return make_grid(g.dim, 2 * g.n - 1, g.half_width, g.stencil_order);
}

double max_of(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, x);
  return m;
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x) || x < 0) return false;
  return true;
}

// ||a * b||_2 with the pointwise componentwise product.
double product_l2(const Field& a, const Field& b) {
  const Grid& g = a.grid();
  const std::int64_t np = g.npoints();
  const int nc = g.dim;
  const double* pa = a.data();
  const double* pb = b.data();
  const double s = kernels::reduce_sum(np, [=](std::int64_t i) {
    double acc = 0;
    for (int c = 0; c < nc; ++c) {
      const double v = pa[c * np + i] * pb[c * np + i];
      acc += v * v;
    }
    return acc;
  });
  return std::sqrt(s * g.cell_volume());
}

double grad_l2(const Field& f) { return std::sqrt(grad_sobolev_norm_sq(f, 0)); }

// Shared finalization: empirical constants at both resolutions -> verdict.
void finish(InequalityReport& rep, double coarse, double fine,
            bool extra_ok = true) {
  rep.max_ratio = coarse;
  rep.max_ratio_fine = fine;
  rep.refinement_drift = relative_drift(coarse, fine);
  rep.pass = extra_ok && rep.samples > 0 && all_finite(rep.ratios) &&
             std::isfinite(fine) && rep.refinement_drift <= kDriftBudget;
}

}  // namespace

double relative_drift(double coarse, double fine) {
  return std::fabs(fine - coarse) / std::max(std::fabs(coarse), kTiny);
}

InequalityReport sobolev_check(const Grid& g, int nsamples, std::uint64_t seed,
                               double support_radius) {
  if (nsamples < 1) throw std::invalid_argument("need at least one sample");
  const double radius = default_radius(g, support_radius);
  const int k = g.dim / 2 + 1;

  InequalityReport rep;
  rep.name = "sobolev";
  rep.detail = "sup norm vs Sobolev order " + std::to_string(k);

  auto run = [&](const Grid& grid, bool record) {
    double best = 0;
    for (int i = 0; i < nsamples; ++i) {
      const Field f = sample_function(grid, seed + i, family(i), radius);
      const double den = std::sqrt(sobolev_norm_sq(f, k));
      if (den <= kTiny) {
        if (record) ++rep.skipped;
        continue;
      }
      const double ratio = sup_norm(f) / den;
      if (record) {
        rep.ratios.push_back(ratio);
        ++rep.samples;
      }
      best = std::max(best, ratio);
    }
    return best;
  };

  const double coarse = run(g, true);
  const double fine = run(refined(g), false);
  finish(rep, coarse, fine);
  rep.constant = rep.max_ratio;
  return rep;
}

double gnm_ratio(const Field& f, const Field& g2, const MultiIndex& b,
                 const MultiIndex& c) {
  const int k = b.order() + c.order();
  const double lhs = product_l2(deriv(f, b), deriv(g2, c));
  const double hf = std::sqrt(sobolev_norm_sq(f, k));
  const double hg = std::sqrt(sobolev_norm_sq(g2, k));
  const double rhs = sup_norm(f) * hg + hf * sup_norm(g2);
  if (rhs <= kTiny) return 0;
  return lhs / rhs;
}

InequalityReport gnm_check(const Grid& g, int k, int nsamples,
                           std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("product estimate needs k >= 1");
  if (nsamples < 1) throw std::invalid_argument("need at least one sample");
  const double radius = default_radius(g, 0);
  const auto indices = multi_indices(g.dim, k);

  InequalityReport rep;
  rep.name = "gnm";
  rep.detail = "derivative product estimate at k = " + std::to_string(k);
  for (int j = 0; j <= k; ++j) rep.sweep_values.push_back(j);
  rep.sweep_max.assign(rep.sweep_values.size(), 0.0);

  auto run = [&](const Grid& grid, bool record) {
    double best = 0;
    for (int i = 0; i < nsamples; ++i) {
      const Field f =
          sample_function(grid, seed + 2 * i, family(i), radius);
      const Field g2 =
          sample_function(grid, seed + 2 * i + 1, family(i + 1), radius);
      const auto tf = derivative_table(f, k);
      const auto tg = derivative_table(g2, k);
      const double supf = sup_norm(f), supg = sup_norm(g2);
      const double hf = std::sqrt(sobolev_norm_sq(f, k));
      const double hg = std::sqrt(sobolev_norm_sq(g2, k));
      const double rhs = supf * hg + hf * supg;
      if (rhs <= kTiny) {
        if (record) ++rep.skipped;
        continue;
      }
      double sample_best = 0;
      for (std::size_t ib = 0; ib < indices.size(); ++ib) {
        const int ob = indices[ib].order();
        for (std::size_t ic = 0; ic < indices.size(); ++ic) {
          if (ob + indices[ic].order() != k) continue;
          const double ratio = product_l2(tf[ib], tg[ic]) / rhs;
          sample_best = std::max(sample_best, ratio);
          if (record)
            rep.sweep_max[static_cast<std::size_t>(ob)] =
                std::max(rep.sweep_max[static_cast<std::size_t>(ob)], ratio);
        }
      }
      if (record) {
        rep.ratios.push_back(sample_best);
        ++rep.samples;
      }
      best = std::max(best, sample_best);
    }
    return best;
  };

  const double coarse = run(g, true);
  const double fine = run(refined(g), false);
  finish(rep, coarse, fine);
  rep.constant = rep.max_ratio;
  return rep;
}

InequalityReport poincare_check(const DampingSpec& spec, const Grid& g,
                                std::span<const double> lambda_sweep,
                                int nsamples, std::uint64_t seed) {
  if (lambda_sweep.empty())
    throw std::invalid_argument("lambda sweep must be nonempty");
  for (double lam : lambda_sweep)
    if (!(lam > 0) || lam > 1)
      throw std::invalid_argument("sweep values must lie in (0, 1]");
  if (nsamples < 1) throw std::invalid_argument("need at least one sample");
  const double radius = default_radius(g, 0);

  InequalityReport rep;
  rep.name = "poincare";
  rep.detail = "damping-form coercivity constant";
  rep.sweep_values.assign(lambda_sweep.begin(), lambda_sweep.end());
  rep.sweep_max.assign(lambda_sweep.size(), 0.0);

  auto run = [&](const Grid& grid, bool record) {
    double best = 0;
    for (std::size_t il = 0; il < lambda_sweep.size(); ++il) {
      const double lam = lambda_sweep[il];
      const DampingField bl(spec.rescaled(lam), grid);
      for (int i = 0; i < nsamples; ++i) {
        const Field f = sample_function(grid, seed + i, family(i), radius);
        const double num = l2_norm_sq(f);
        const double den = bl.inner(f, f) / lam +
                           grad_sobolev_norm_sq(f, 0) / (lam * lam);
        if (den <= kTiny) {
          if (record) ++rep.skipped;
          continue;
        }
        const double ratio = num / den;
        if (record) {
          rep.ratios.push_back(ratio);
          ++rep.samples;
          rep.sweep_max[il] = std::max(rep.sweep_max[il], ratio);
        }
        best = std::max(best, ratio);
      }
    }
    return best;
  };

  const double coarse = run(g, true);
  const double fine = run(refined(g), false);
  finish(rep, coarse, fine);
  rep.constant = std::max(0.25, rep.max_ratio);
  return rep;
}

InequalityReport hardy_check(const Grid& g, int nsamples, std::uint64_t seed) {
  if (g.dim != 3)
    throw std::invalid_argument("radial-weight inequality is gridded for d=3 only");
  if (nsamples < 1) throw std::invalid_argument("need at least one sample");
  const double radius = default_radius(g, 0);
  const double bound = 2.0;  // 2/(d-2) at d = 3

  InequalityReport rep;
  rep.name = "hardy";
  rep.detail = "radial-weight bound, constant 2/(d-2)";

  auto run = [&](const Grid& grid, bool record) {
    const std::int64_t origin = grid.origin_index();
    double best = 0;
    for (int i = 0; i < nsamples; ++i) {
      const Field f = sample_function(grid, seed + i, family(i), radius);
      const std::int64_t np = grid.npoints();
      const int nc = grid.dim;
      const double* pf = f.data();
      const double num_sq =
          grid.cell_volume() *
          kernels::reduce_sum(np, [&](std::int64_t idx) {
            if (idx == origin) return 0.0;
            const auto x = grid.point(idx);
            const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            double s = 0;
            for (int c = 0; c < nc; ++c) {
              const double v = pf[c * np + idx];
              s += v * v;
            }
            return s / r2;
          });
      double f0_sq = 0;
      for (int c = 0; c < nc; ++c) {
        const double v = pf[c * np + origin];
        f0_sq += v * v;
      }
      if (record && f0_sq > 0) {
        // excluded ball |x| <= h/2: integral of f^2/|x|^2 <= sup f^2 * 2 pi h
        rep.origin_deficit =
            std::max(rep.origin_deficit,
                     2 * std::numbers::pi * grid.spacing() * f0_sq);
      }
      const double den = grad_l2(f);
      if (den <= kTiny) {
        if (record) ++rep.skipped;
        continue;
      }
      const double ratio = std::sqrt(num_sq) / den;
      if (record) {
        rep.ratios.push_back(ratio);
        ++rep.samples;
      }
      best = std::max(best, ratio);
    }
    return best;
  };

  const double coarse = run(g, true);
  const double fine = run(refined(g), false);
  finish(rep, coarse, fine, coarse <= bound + 0.05);
  rep.constant = rep.max_ratio;
  return rep;
}

InequalityReport gn_check(const Grid& g, int p, int q, int nsamples,
                          std::uint64_t seed) {
  const int d = g.dim;
  if (q < 1 || q >= d)
    throw std::invalid_argument("gradient exponent must satisfy 1 <= q < d");
  if (p * (d - q) != q * d)
    throw std::invalid_argument("exponents must satisfy 1/p = 1/q - 1/d");
  if (q != 2) throw std::invalid_argument("only q = 2 is gridded");
  if (nsamples < 1) throw std::invalid_argument("need at least one sample");
  const double radius = default_radius(g, 0);

  InequalityReport rep;
  rep.name = "gn";
  rep.detail = "embedding L^" + std::to_string(p) + " from gradient L^" +
               std::to_string(q);
  rep.sweep_values = {static_cast<double>(p), static_cast<double>(q)};

  auto run = [&](const Grid& grid, bool record) {
    double best = 0;
    for (int i = 0; i < nsamples; ++i) {
      const Field f = sample_function(grid, seed + i, family(i), radius);
      const double den = grad_l2(f);
      if (den <= kTiny) {
        if (record) ++rep.skipped;
        continue;
      }
      const double ratio = lp_norm(f, p) / den;
      if (record) {
        rep.ratios.push_back(ratio);
        ++rep.samples;
      }
      best = std::max(best, ratio);
    }
    return best;
  };

  const double coarse = run(g, true);
  const double fine = run(refined(g), false);
  finish(rep, coarse, fine);
  rep.constant = rep.max_ratio;
  return rep;
}

std::string hypothesis_name(DataHypothesis h) {
  switch (h) {
    case DataHypothesis::none: return "none";
    case DataHypothesis::h1: return "H1";
    case DataHypothesis::h2: return "H2";
    case DataHypothesis::h3: return "H3";
  }
  throw std::invalid_argument("unknown hypothesis branch");
}

InequalityReport pairing_check(const Field& f, DataHypothesis branch,
                               bool mean_zero_certified, int nsamples,
                               std::uint64_t seed) {
  const Grid& g = f.grid();
  const int d = g.dim;
  switch (branch) {
    case DataHypothesis::none:
      throw std::invalid_argument("pairing bound needs a hypothesis branch");
    case DataHypothesis::h1:
    case DataHypothesis::h2:
      if (d < 3)
        throw std::invalid_argument(hypothesis_name(branch) +
                                    " requires d >= 3");
      break;
    case DataHypothesis::h3:
      if (d > 2)
        throw std::invalid_argument("H3 requires d in {1, 2}");
      if (!mean_zero_certified)
        throw std::invalid_argument(
            "H3 requires a mean-zero certificate from the data construction");
      break;
  }
  if (nsamples < 1) throw std::invalid_argument("need at least one sample");
  const double radius = default_radius(g, 0);
  const int sob_order = l0_for_dim(d) - 2;

  InequalityReport rep;
  rep.name = "pairing";
  rep.detail = "pairing constant, branch " + hypothesis_name(branch);

  for (int i = 0; i < nsamples; ++i) {
    const Field g2 = sample_function(g, seed + i, family(i), radius);
    const double den = std::sqrt(grad_sobolev_norm_sq(g2, sob_order));
    if (den <= kTiny) {
      ++rep.skipped;
      continue;
    }
    const double ratio = std::fabs(l2_inner(g2, f)) / den;
    rep.ratios.push_back(ratio);
    ++rep.samples;
  }
  rep.max_ratio = max_of(rep.ratios);
  rep.max_ratio_fine = rep.max_ratio;
  rep.constant = rep.max_ratio;
  rep.pass = rep.samples > 0 && all_finite(rep.ratios);
  return rep;
}

}  // namespace dwlab
