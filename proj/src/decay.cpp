#include "dwlab/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dwlab/kernels.hpp"

namespace dwlab {

namespace {

constexpr double kTrivial = 1e-280;  // below this a series counts as zero

// || |x| f ||_2 and || |x| f ||_1 with the pointwise Euclidean magnitude.
void weighted_norms(const Field& f, double& l2, double& l1) {
  const Grid& g = f.grid();
  const std::int64_t np = g.npoints();
  const int nc = g.dim;
  const double* pf = f.data();
  auto mag_sq = [&](std::int64_t i) {
    double s = 0;
    for (int c = 0; c < nc; ++c) {
      const double v = pf[c * np + i];
      s += v * v;
    }
    return s;
  };
  auto r_sq = [&](std::int64_t i) {
    const auto x = g.point(i);
    double s = 0;
    for (int a = 0; a < nc; ++a) s += x[static_cast<std::size_t>(a)] *
                                      x[static_cast<std::size_t>(a)];
    return s;
  };
  const double s2 = kernels::reduce_sum(
      np, [&](std::int64_t i) { return r_sq(i) * mag_sq(i); });
  const double s1 = kernels::reduce_sum(np, [&](std::int64_t i) {
    return std::sqrt(r_sq(i) * mag_sq(i));
  });
  l2 = std::sqrt(s2 * g.cell_volume());
  l1 = s1 * g.cell_volume();
}

std::vector<double> component_means(const Field& f) {
  const Grid& g = f.grid();
  std::vector<double> out(static_cast<std::size_t>(g.dim));
  for (int c = 0; c < g.dim; ++c) {
    const auto comp = f.comp(c);
    out[static_cast<std::size_t>(c)] =
        g.cell_volume() * kernels::reduce_sum(g.npoints(), [&](std::int64_t i) {
          return comp[static_cast<std::size_t>(i)];
        });
  }
  return out;
}

// f = B u0 + u1 on the nodes of u0's grid.
Field forcing_profile(const Field& u0, const Field& u1,
                      const DampingSpec& spec) {
  Field f(u0.grid());
  if (!spec.is_zero()) {
    const DampingField b(spec, u0.grid());
    b.matvec(u0, f);
  }
  f += u1;
  return f;
}

struct Flags {
  bool h1, h2, h3;
};

Flags flags_for(const Field& f, int d, bool odd_certificate,
                const std::vector<double>& f_lp, double weighted_l2,
                double weighted_l1) {
  const bool finite = f.finite();
  bool lp_finite = finite;
  for (double v : f_lp) lp_finite = lp_finite && std::isfinite(v);
  Flags fl{};
  fl.h1 = d >= 3 && lp_finite;
  fl.h2 = d >= 3 && finite && std::isfinite(weighted_l2);
  fl.h3 = d <= 2 && odd_certificate && std::isfinite(weighted_l1);
  return fl;
}

}  // namespace

DataHypothesis HypothesisReport::best() const {
  if (h3) return DataHypothesis::h3;
  if (h2) return DataHypothesis::h2;
  if (h1) return DataHypothesis::h1;
  return DataHypothesis::none;
}

HypothesisReport classify_data(const Field& u0, const Field& u1,
                               const DampingSpec& spec, double lambda,
                               bool odd_certificate) {
  const Grid& g = u0.grid();
  if (!(u1.grid() == g))
    throw std::invalid_argument("data fields must share one grid");
  if (!(lambda > 0) || lambda > 1)
    throw std::invalid_argument("rescale factor must lie in (0, 1]");

  HypothesisReport rep;
  rep.dim = g.dim;
  rep.odd_certificate = odd_certificate;
  rep.rescale_lambda = lambda;

  const Field f = forcing_profile(u0, u1, spec);

  const double pmax = 2.0 * g.dim / (g.dim + 2);
  if (pmax > 1) {
    for (int i = 0; i < 5; ++i)
      rep.p_grid.push_back(1 + (pmax - 1) * i / 4);
  } else {
    rep.p_grid.push_back(1);
  }
  for (double p : rep.p_grid) rep.f_lp.push_back(lp_norm(f, p));
  weighted_norms(f, rep.weighted_l2, rep.weighted_l1);
  rep.mean = component_means(f);

  const Flags base = flags_for(f, g.dim, odd_certificate, rep.f_lp,
                               rep.weighted_l2, rep.weighted_l1);
  rep.h1 = base.h1;
  rep.h2 = base.h2;
  rep.h3 = base.h3;

  // Rescaled profile on the stretched lattice y = x / lambda: the nodes
  // coincide with the base lattice scaled by 1/lambda, so v0 = u0/lambda and
  // v1 = u1 transfer exactly.
  const Grid gv = make_grid(g.dim, g.n, g.half_width / lambda, g.stencil_order);
  Field v0(gv), v1(gv);
  {
    const double inv = 1.0 / lambda;
    const double* p0 = u0.data();
    const double* p1 = u1.data();
    double* q0 = v0.data();
    double* q1 = v1.data();
    kernels::parallel_for(u0.size(), [=](std::int64_t i) {
      q0[i] = inv * p0[i];
      q1[i] = p1[i];
    });
  }
  const Field fl = forcing_profile(v0, v1, spec.rescaled(lambda));
  rep.mean_rescaled = component_means(fl);

  std::vector<double> fl_lp;
  for (double p : rep.p_grid) fl_lp.push_back(lp_norm(fl, p));
  double wl2 = 0, wl1 = 0;
  weighted_norms(fl, wl2, wl1);
  const Flags resc =
      flags_for(fl, g.dim, odd_certificate, fl_lp, wl2, wl1);

  // Moment identity: integral of the rescaled profile = lambda^{-d} integral.
  const double scale = std::pow(lambda, -g.dim);
  double moment_err = 0, moment_mag = 0;
  for (std::size_t c = 0; c < rep.mean.size(); ++c) {
    moment_err += std::fabs(rep.mean_rescaled[c] - scale * rep.mean[c]);
    moment_mag += std::fabs(scale * rep.mean[c]);
  }
  const double tol = 1e-10 * std::max(1.0, moment_mag);
  rep.transfer_ok = resc.h1 == rep.h1 && resc.h2 == rep.h2 &&
                    resc.h3 == rep.h3 && moment_err <= tol;
  return rep;
}

DecayFit fit_decay(std::span<const double> t, std::span<const double> q,
                   double t1, double t2, double target, double slack,
                   std::string quantity) {
  if (t.size() != q.size())
    throw std::invalid_argument("series lengths differ");
  if (!(t1 >= 1) || !(t2 > t1))
    throw std::invalid_argument("fit window needs t2 > t1 >= 1");

  DecayFit fit;
  fit.quantity = std::move(quantity);
  fit.t1 = t1;
  fit.t2 = t2;
  fit.target = target;
  fit.slack = slack;
  fit.ts.assign(t.begin(), t.end());
  fit.qs.assign(q.begin(), q.end());

  std::vector<double> xs, ys;
  double window_max = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t1 || t[i] > t2) continue;
    ++fit.count;
    window_max = std::max(window_max, std::fabs(q[i]));
    xs.push_back(std::log1p(t[i]));
    ys.push_back(q[i]);
  }
  if (fit.count < 20)
    throw std::runtime_error("fit window holds fewer than 20 samples");

  if (window_max <= kTrivial) {
    fit.trivial = true;
    fit.pass = true;
    return fit;
  }
  for (double& y : ys) {
    if (!(y > 0))
      throw std::runtime_error("nonpositive values in the fit window");
    y = std::log(y);
  }

  const auto n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double det = n * sxx - sx * sx;
  if (std::fabs(det) <= 0)
    throw std::runtime_error("degenerate fit window (no time spread)");
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / n;
  double rss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    rss += r * r;
  }
  fit.residual_rms = std::sqrt(rss / n);
  fit.pass = fit.slope <= fit.target + fit.slack;
  return fit;
}

std::vector<DecayFit> verify_rates(const Trajectory& traj, const RunConfig& cfg,
                                   int mu_max, bool hypothesis_data,
                                   const RateWindow& window) {
  if (traj.samples.empty())
    throw std::runtime_error("trajectory holds no samples");
  if (mu_max < 0 || mu_max > cfg.L - cfg.L0())
    throw std::invalid_argument("mu_max must lie in [0, L - L0]");

  const double t_end = traj.samples.back().t;
  const double t2 = window.t2 > 0 ? window.t2 : t_end;
  const double t1 = window.t1 > 0 ? window.t1 : std::max(1.0, t2 / 10);
  if (!(t2 > t1))
    throw std::runtime_error("trajectory too short for the fit window");

  const std::size_t S = traj.samples.size();
  std::vector<double> t(S);

  struct Series {
    std::string name;
    double target;
    std::vector<double> q;
  };
  std::vector<Series> series;
  auto add = [&](std::string name, double target) {
    series.push_back({std::move(name), target, std::vector<double>(S)});
  };

  if (hypothesis_data) {
    for (int mu = 0; mu <= mu_max; ++mu) {
      add("sobolev_sq_mu" + std::to_string(mu), -(2.0 * mu + 1));
      add("energy_mu" + std::to_string(mu), -(2.0 * mu + 2));
      add("sup_sq_mu" + std::to_string(mu), -(2.0 * mu + 1));
    }
    if (cfg.L > cfg.L0()) add("laplacian_sq", -3.0);
    add("l2_sq", -1.0);
  } else {
    add("l2_sq", 0.0);
    add("energy_mu0", -1.0);
  }

  for (std::size_t s = 0; s < S; ++s) {
    const Sample& smp = traj.samples[s];
    t[s] = smp.t;
    const int need = hypothesis_data ? mu_max : 0;
    const auto td = time_derivatives(smp.state, cfg, need);
    std::size_t k = 0;
    if (hypothesis_data) {
      for (int mu = 0; mu <= mu_max; ++mu) {
        const auto m = static_cast<std::size_t>(mu);
        series[k++].q[s] = sobolev_norm_sq(td[m], cfg.L - mu) +
                           sobolev_norm_sq(td[m + 1], cfg.L - mu - 1);
        series[k++].q[s] = energy_pair(td[m], td[m + 1]);
        const double sup = sup_norm(td[m]);
        series[k++].q[s] = sup * sup;
      }
      if (cfg.L > cfg.L0())
        series[k++].q[s] = l2_norm_sq(laplacian(smp.state.u));
      series[k++].q[s] = l2_norm_sq(smp.state.u);
    } else {
      series[k++].q[s] = l2_norm_sq(smp.state.u);
      series[k++].q[s] = energy_pair(td[0], td[1]);
    }
  }

  std::vector<DecayFit> fits;
  fits.reserve(series.size());
  for (auto& sr : series)
    fits.push_back(
        fit_decay(t, sr.q, t1, t2, sr.target, window.slack, sr.name));
  return fits;
}

}  // namespace dwlab
