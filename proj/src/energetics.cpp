#include "dwlab/energetics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dwlab/kernels.hpp"

namespace dwlab {

namespace {

constexpr double kTiny = 1e-300;

// sum_c sum_p a_c[p] w[p] b_c[p] * cell_volume, w a scalar lattice weight.
double weighted_inner(const Field& a, std::span<const double> w,
                      const Field& b) {
  const Grid& g = a.grid();
  const std::int64_t np = g.npoints();
  const int nc = g.dim;
  const double* pa = a.data();
  const double* pb = b.data();
  const double* pw = w.data();
  const double s = kernels::reduce_sum(np, [=](std::int64_t i) {
    double acc = 0;
    for (int c = 0; c < nc; ++c) acc += pa[c * np + i] * pb[c * np + i];
    return acc * pw[i];
  });
  return s * g.cell_volume();
}

// Derivative of the quadratic interpolant through three (t, g) points,
// evaluated at te (handles nonuniform spacing at the trajectory ends).
double deriv3(double t0, double g0, double t1, double g1, double t2, double g2,
              double te) {
  const double l0 = (2 * te - t1 - t2) / ((t0 - t1) * (t0 - t2));
  const double l1 = (2 * te - t0 - t2) / ((t1 - t0) * (t1 - t2));
  const double l2 = (2 * te - t0 - t1) / ((t2 - t0) * (t2 - t1));
  return g0 * l0 + g1 * l1 + g2 * l2;
}

std::vector<double> time_derivative_series(const std::vector<double>& t,
                                           const std::vector<double>& g) {
  const std::size_t n = t.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) return d;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i == 0 ? 1 : (i == n - 1 ? n - 2 : i);
    d[i] = deriv3(t[j - 1], g[j - 1], t[j], g[j], t[j + 1], g[j + 1], t[i]);
  }
  return d;
}

std::vector<double> cumtrap(const std::vector<double>& t,
                            const std::vector<double>& f) {
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t i = 1; i < t.size(); ++i)
    out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
  return out;
}

std::vector<double> running_sup(const std::vector<double>& f) {
  std::vector<double> out(f.size(), 0.0);
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.size(); ++i) {
    m = std::max(m, f[i]);
    out[i] = m;
  }
  return out;
}

// Relative growth of q over the last quarter of the time window.
double plateau_growth(const std::vector<double>& t,
                      const std::vector<double>& q) {
  if (t.size() < 2) return 0.0;
  const double tq = t.back() - (t.back() - t.front()) / 4;
  std::size_t iq = 0;
  while (iq + 1 < t.size() && t[iq] < tq) ++iq;
  const double base = q[iq];
  if (q.back() == base) return 0.0;
  return (q.back() - base) / std::max(std::fabs(base), kTiny);
}

}  // namespace

FunctionalParams make_functional_params(const RunConfig& cfg, double C1) {
  FunctionalParams p;
  p.L = cfg.L;
  p.L0 = cfg.L0();
  p.lambda = cfg.lambda;
  p.b0 = cfg.damping.b0;
  p.R = cfg.damping.R;
  p.B_sup = cfg.damping.base_sup_norm();
  p.C1 = std::max(C1, 0.25);
  p.delta_sq = cfg.smallness_budget;
  const double d = cfg.grid.dim;
  p.C0 = std::max({4.0 * (p.b0 * p.R * d * d + p.C1 * p.b0 * (2 * d - 1) / 2),
                   d, 16.0 * p.B_sup * p.b0 * p.R * p.R});
  return p;
}

double energy(const State& s) { return energy_pair(s.u, s.udot); }

FunctionalEvaluator::FunctionalEvaluator(const State& s, const RunConfig& cfg,
                                         int mu_max)
    : grid_(cfg.grid), cfg_(cfg), mu_max_(mu_max) {
  tders_ = time_derivatives(s, cfg, mu_max);
  if (!cfg.damping.is_zero()) {
    bfield_ = DampingField(cfg.damping, grid_);
    const MultiplierSpec mult{cfg.damping.b0, cfg.damping.R,
                              cfg.damping.lambda, grid_.dim};
    h_ = mult.h_field(grid_);
  }
}

void FunctionalEvaluator::require_mu(int mu) const {
  if (mu < 0 || mu > mu_max_)
    throw std::invalid_argument("mu outside the evaluator's derivative stack");
}

const Field& FunctionalEvaluator::time_deriv(int nu) const {
  if (nu < 0 || nu > mu_max_ + 1)
    throw std::invalid_argument("nu outside the evaluator's derivative stack");
  return tders_[static_cast<std::size_t>(nu)];
}

double FunctionalEvaluator::l2_time_deriv(int nu) const {
  return std::sqrt(l2_norm_sq(time_deriv(nu)));
}

double FunctionalEvaluator::plain_energy(int mu) const {
  require_mu(mu);
  return energy_pair(tders_[static_cast<std::size_t>(mu)],
                     tders_[static_cast<std::size_t>(mu + 1)]);
}

double FunctionalEvaluator::damping_quad(int nu) const {
  if (bfield_.empty()) return 0.0;
  const Field& f = time_deriv(nu);
  return bfield_.inner(f, f);
}

double FunctionalEvaluator::higher_energy(int Lbar, int mu) const {
  require_mu(mu);
  if (Lbar - mu < 1)
    throw std::invalid_argument("higher energy needs Lbar - mu >= 1");
  return higher_energy_pair(tders_[static_cast<std::size_t>(mu)],
                            tders_[static_cast<std::size_t>(mu + 1)],
                            Lbar - mu);
}

double FunctionalEvaluator::tilde_E(int Lbar, int mu) const {
  double out = higher_energy(Lbar, mu);
  if (cfg_.tensor.is_zero()) return out;
  const auto table =
      derivative_table(tders_[static_cast<std::size_t>(mu)], Lbar - mu - 1);
  for (const Field& a : table)
    out += trilinear_form(cfg_.tensor, a, a, tders_[0]);
  return out;
}

double FunctionalEvaluator::D(int Lbar, int mu) const {
  require_mu(mu);
  auto e_half = [&](int nu, int order) {
    return std::sqrt(higher_energy_pair(tders_[static_cast<std::size_t>(nu)],
                                        tders_[static_cast<std::size_t>(nu + 1)],
                                        order));
  };
  double s = 0;
  for (int nu = 0; nu <= mu; ++nu)
    s += e_half(mu - nu, cfg_.L0()) * e_half(nu, Lbar - nu);
  return e_half(mu, Lbar - mu) * s;
}

GBreakdown FunctionalEvaluator::G(int Lbar, int mu,
                                  const FunctionalParams& p) const {
  require_mu(mu);
  GBreakdown g;
  g.scaled_tilde = (p.C0 / p.lambda) * tilde_E(Lbar, mu);
  const auto ta =
      derivative_table(tders_[static_cast<std::size_t>(mu)], Lbar - mu - 1);
  const auto tb =
      derivative_table(tders_[static_cast<std::size_t>(mu + 1)], Lbar - mu - 1);
  double cross = 0, damp = 0, mult = 0;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    cross += l2_inner(ta[i], tb[i]);
    if (!bfield_.empty()) damp += bfield_.inner(ta[i], ta[i]);
    if (h_.grid().npoints() > 0 && !cfg_.damping.is_zero())
      for (int axis = 0; axis < grid_.dim; ++axis)
        mult += weighted_inner(tb[i], h_.comp(axis),
                               deriv(ta[i], MultiIndex::unit(axis)));
  }
  const double d = grid_.dim;
  g.cross = p.b0 * (2 * d - 1) / 4 * cross;
  g.damping = p.b0 * (2 * d - 1) / 8 * damp;
  g.multiplier = mult;
  return g;
}

double higher_energy(const State& s, const RunConfig& cfg, int Lbar, int mu) {
  return FunctionalEvaluator(s, cfg, mu).higher_energy(Lbar, mu);
}

double tilde_E(const State& s, const RunConfig& cfg, int Lbar, int mu) {
  return FunctionalEvaluator(s, cfg, mu).tilde_E(Lbar, mu);
}

double D_functional(const State& s, const RunConfig& cfg, int Lbar, int mu) {
  return FunctionalEvaluator(s, cfg, mu).D(Lbar, mu);
}

GBreakdown G_functional(const State& s, const RunConfig& cfg, int Lbar, int mu,
                        const FunctionalParams& p) {
  return FunctionalEvaluator(s, cfg, mu).G(Lbar, mu, p);
}

IntegratedField::IntegratedField(const Grid& g, int L0)
    : L0_(L0), w_(g), prev_u_(g) {
  if (L0 < 2) throw std::invalid_argument("L0 must be at least 2");
}

void IntegratedField::add(const State& s) {
  if (has_prev_) {
    const double dt = s.t - prev_t_;
    if (dt < 0)
      throw std::invalid_argument("samples must arrive in time order");
    Field mid = prev_u_;
    mid += s.u;
    w_.add_scaled(mid, dt / 2);
  }
  prev_u_ = s.u;
  prev_t_ = s.t;
  has_prev_ = true;
  w_energy_ = higher_energy_pair(w_, s.u, L0_ - 1);
  m_sup_ = std::max(m_sup_, w_energy_);
}

bool Ledger::all_pass() const {
  for (const auto& e : entries)
    if (e.applicable && !e.pass) return false;
  return true;
}

const LedgerEntry* Ledger::find(const std::string& tag) const {
  for (const auto& e : entries)
    if (e.tag == tag) return &e;
  return nullptr;
}

Ledger build_ledger(const Trajectory& traj, const RunConfig& cfg,
                    const FunctionalParams& params,
                    const std::vector<int>& mu_list, bool hypothesis_data) {
  if (traj.samples.empty())
    throw std::invalid_argument("ledger needs at least one sample");
  if (params.L != cfg.L || params.L0 != cfg.L0())
    throw std::invalid_argument("functional params disagree with the config");
  for (std::size_t k = 0; k < mu_list.size(); ++k) {
    if (mu_list[k] < 1 || mu_list[k] > cfg.L - cfg.L0())
      throw std::invalid_argument("mu_list entries must lie in [1, L - L0]");
    if (k > 0 && mu_list[k] <= mu_list[k - 1])
      throw std::invalid_argument("mu_list must be strictly increasing");
  }

  const int L = params.L;
  const int mu_max = mu_list.empty() ? 0 : mu_list.back();
  const std::size_t S = traj.samples.size();

  Ledger led;
  led.params = params;
  led.mu_list = mu_list;
  led.hypothesis_data = hypothesis_data;
  led.rows.resize(S);

  std::vector<double> t(S);
  std::vector<std::vector<double>> g_series(
      static_cast<std::size_t>(mu_max) + 1, std::vector<double>(S));
  std::vector<std::vector<double>> eh(static_cast<std::size_t>(mu_max) + 1,
                                      std::vector<double>(S));
  std::vector<std::vector<double>> l2td(static_cast<std::size_t>(mu_max) + 1,
                                        std::vector<double>(S));
  std::vector<std::vector<double>> plain_e(static_cast<std::size_t>(mu_max) + 1,
                                           std::vector<double>(S));
  std::vector<std::vector<double>> dquad(static_cast<std::size_t>(mu_max) + 2,
                                         std::vector<double>(S));
  std::vector<std::vector<double>> d_series(static_cast<std::size_t>(mu_max) + 1,
                                            std::vector<double>(S));
  std::vector<double> sob31(S);

  IntegratedField wacc(cfg.grid, params.L0);

  for (std::size_t s = 0; s < S; ++s) {
    const Sample& smp = traj.samples[s];
    const FunctionalEvaluator ev(smp.state, cfg, mu_max);
    LedgerRow& row = led.rows[s];
    row.t = smp.t;
    t[s] = smp.t;
    row.E = ev.plain_energy(0);
    row.Etilde = ev.tilde_E(L, 0);
    row.l2_u = ev.l2_time_deriv(0);
    row.l2_udot = ev.l2_time_deriv(1);
    row.linf_u = sup_norm(smp.state.u);
    row.diss = ev.damping_quad(1);

    for (int mu = 0; mu <= mu_max; ++mu) {
      const auto m = static_cast<std::size_t>(mu);
      eh[m][s] = ev.higher_energy(L, mu);
      g_series[m][s] = ev.G(L, mu, params).total();
      d_series[m][s] = ev.D(L, mu);
      l2td[m][s] = ev.l2_time_deriv(mu);
      plain_e[m][s] = ev.plain_energy(mu);
      dquad[m][s] = ev.damping_quad(mu);
    }
    dquad[static_cast<std::size_t>(mu_max) + 1][s] =
        ev.damping_quad(mu_max + 1);
    row.E_L = eh[0][s];
    row.G = g_series[0][s];
    row.D = d_series[0][s];
    sob31[s] = sobolev_norm_sq(smp.state.u, params.L0) +
               sobolev_norm_sq(smp.state.udot, params.L0 - 1);

    row.per_mu.resize(4 * mu_list.size());
    for (std::size_t k = 0; k < mu_list.size(); ++k) {
      const auto m = static_cast<std::size_t>(mu_list[k]);
      row.per_mu[4 * k + 0] = eh[m][s];
      row.per_mu[4 * k + 1] = g_series[m][s];
      row.per_mu[4 * k + 2] = d_series[m][s];
    }

    wacc.add(smp.state);
    led.w_energy.push_back(wacc.w_energy());
  }

  const double h = cfg.grid.spacing();
  const double dt = traj.dt > 0 ? traj.dt : h;
  led.eps_num = 10.0 * (h * h + dt * dt) * (params.C0 / params.lambda) *
                led.rows[0].E_L;

  // Residual series for each tracked mu.
  std::vector<std::vector<double>> dg(static_cast<std::size_t>(mu_max) + 1);
  for (int mu = 0; mu <= mu_max; ++mu)
    dg[static_cast<std::size_t>(mu)] =
        time_derivative_series(t, g_series[static_cast<std::size_t>(mu)]);

  std::vector<double> r29(S, 0.0);
  if (S >= 3)
    for (std::size_t s = 0; s < S; ++s)
      r29[s] = dg[0][s] + params.b0 / 8 * eh[0][s];
  for (std::size_t s = 0; s < S; ++s) led.rows[s].resid_eq29 = r29[s];

  auto add_entry = [&led](std::string tag, std::string statement,
                          double measured, double budget, double plateau,
                          bool applicable, bool pass) {
    led.entries.push_back(LedgerEntry{std::move(tag), std::move(statement),
                                      measured, budget, plateau, applicable,
                                      pass});
  };

  // eq18: implied-constant form of the energy-rate estimate.
  {
    double sup_c = 0;
    for (int mu = 0; mu <= mu_max; ++mu) {
      const auto m = static_cast<std::size_t>(mu);
      if (S < 3) break;
      for (std::size_t s = 0; s < S; ++s) {
        const double resid = dg[m][s] + params.b0 / 2 * eh[m][s];
        const double known = params.C0 > 0
                                 ? 2 * params.B_sup * params.b0 * params.b0 *
                                       params.R * params.R / params.C0 *
                                       eh[m][s]
                                 : 0;
        const double denom =
            params.lambda * eh[m][s] + d_series[m][s] / params.lambda;
        if (denom > kTiny)
          sup_c = std::max(sup_c, (resid - known) / denom);
      }
    }
    add_entry("eq18",
              "d/dt G + (b0/2) E_{L-mu} <= lam C E + (C/lam) D + "
              "(2|B| b0^2 R^2 / C0) E, measured C",
              sup_c, 0, 0, true, std::isfinite(sup_c));
  }

  // eq29: master differential inequality at mu = 0.
  {
    const double measured =
        S >= 3 ? *std::max_element(r29.begin(), r29.end()) : 0.0;
    add_entry("eq29", "d/dt G_{L,0} + (b0/8) E_L <= 0 within eps_num",
              measured, led.eps_num, 0, true, measured <= led.eps_num);
  }

  // eq30 / eq31: integrated boundedness with measured C*.
  {
    std::vector<double> s30(S), el(S);
    for (std::size_t s = 0; s < S; ++s) {
      s30[s] = led.rows[s].l2_u * led.rows[s].l2_u + eh[0][s];
      el[s] = eh[0][s];
    }
    const auto int_el = cumtrap(t, el);
    double cstar = 0;
    for (std::size_t s = 0; s < S; ++s)
      if (s30[0] > kTiny)
        cstar = std::max(cstar, (s30[s] + int_el[s]) / s30[0]);
    const double p30 = std::max(plateau_growth(t, running_sup(s30)),
                                plateau_growth(t, int_el));
    add_entry("eq30",
              "|v|_2^2 + E_L + int E_L ds <= C* (initial), plateau check",
              cstar, 0.01, p30, true, std::isfinite(cstar) && p30 <= 0.01);

    double c31 = 0;
    for (std::size_t s = 0; s < S; ++s)
      if (sob31[0] > kTiny) c31 = std::max(c31, sob31[s] / sob31[0]);
    const double p31 = plateau_growth(t, running_sup(sob31));
    add_entry("eq31",
              "|v|_{H^{L0}}^2 + |dt v|_{H^{L0-1}}^2 bounded by C* (initial)",
              c31, 0.01, p31, true, std::isfinite(c31) && p31 <= 0.01);
  }

  // eq36 / eq37: weighted sup + integral monitors per time-derivative order.
  {
    double m36 = 0, p36 = 0, m37 = 0, p37 = 0;
    for (int i = 0; i <= mu_max; ++i) {
      const auto mi = static_cast<std::size_t>(i);
      std::vector<double> part36(S), integ36(S), part37(S), integ37(S);
      for (std::size_t s = 0; s < S; ++s) {
        const double w1 = std::pow(1 + t[s], 2 * i + 1);
        const double w2 = std::pow(1 + t[s], 2 * i + 2);
        part36[s] = w1 * (l2td[mi][s] * l2td[mi][s] + eh[mi][s]);
        integ36[s] = w1 * eh[mi][s];
        part37[s] = w2 * plain_e[mi][s];
        integ37[s] = w2 * dquad[mi + 1][s];
      }
      const auto i36 = cumtrap(t, integ36);
      const auto i37 = cumtrap(t, integ37);
      std::vector<double> q36(S), q37(S);
      for (std::size_t s = 0; s < S; ++s) {
        q36[s] = part36[s] + i36[s];
        q37[s] = part37[s] + i37[s];
      }
      m36 = std::max(m36, *std::max_element(q36.begin(), q36.end()));
      m37 = std::max(m37, *std::max_element(q37.begin(), q37.end()));
      p36 = std::max(p36, plateau_growth(t, running_sup(part36)));
      p37 = std::max(p37, plateau_growth(t, running_sup(part37)));
    }
    add_entry("eq36",
              "(1+t)^{2i+1}(|dt^i v|_2^2 + E_{L-i}) + weighted integral <= E0",
              m36, 0.05, p36, hypothesis_data,
              std::isfinite(m36) && p36 <= 0.05);
    add_entry("eq37",
              "(1+t)^{2i+2} E(dt^i v) + weighted dissipation integral <= E0",
              m37, 0.05, p37, hypothesis_data,
              std::isfinite(m37) && p37 <= 0.05);
  }

  // eq42: integrated L2 mass plateaus under the decay hypotheses.
  {
    std::vector<double> l2sq(S);
    for (std::size_t s = 0; s < S; ++s)
      l2sq[s] = led.rows[s].l2_u * led.rows[s].l2_u;
    const auto i42 = cumtrap(t, l2sq);
    const double p42 = plateau_growth(t, i42);
    add_entry("eq42", "int |v|_2^2 ds <= E0, plateau check", i42.back(), 0.01,
              p42, hypothesis_data, std::isfinite(i42.back()) && p42 <= 0.01);
  }

  // eq47 / eq48 / eq52: first-order weighted energies.
  {
    std::vector<double> st47(S), int47(S), st48(S), int48(S);
    for (std::size_t s = 0; s < S; ++s) {
      const double w1 = 1 + t[s];
      st47[s] = w1 * (led.rows[s].l2_u * led.rows[s].l2_u + eh[0][s]);
      int47[s] = w1 * eh[0][s];
      st48[s] = w1 * w1 * led.rows[s].E;
      int48[s] = w1 * w1 * led.rows[s].diss;
    }
    const auto i47 = cumtrap(t, int47);
    const auto i48 = cumtrap(t, int48);
    double m47 = 0, m48 = 0;
    for (std::size_t s = 0; s < S; ++s) {
      m47 = std::max(m47, st47[s] + i47[s]);
      m48 = std::max(m48, st48[s] + i48[s]);
    }
    const double p47 = plateau_growth(t, running_sup(st47));
    const double p48 = plateau_growth(t, running_sup(st48));
    add_entry("eq47", "(1+t)(|v|_2^2 + E_L) + int (1+s) E_L ds <= E0", m47,
              0.05, p47, hypothesis_data, std::isfinite(m47) && p47 <= 0.05);
    add_entry("eq48", "(1+t)^2 E + int (1+s)^2 <dt v, B dt v> ds <= E0", m48,
              0.05, p48, hypothesis_data, std::isfinite(m48) && p48 <= 0.05);

    led.m0 = running_sup(st48);
    const double p52 = plateau_growth(t, led.m0);
    add_entry("eq52", "M0(t) = sup (1+s)^2 E(v(s)) bounded along the run",
              led.m0.back(), 0.05, p52, hypothesis_data,
              std::isfinite(led.m0.back()) && p52 <= 0.05);
  }

  // eq54: higher-mu master inequality with measured E0.
  {
    double e0 = 0;
    bool pass = true;
    for (std::size_t k = 0; k < mu_list.size(); ++k) {
      const int mu = mu_list[k];
      const auto m = static_cast<std::size_t>(mu);
      const double eps_mu = 10.0 * (h * h + dt * dt) *
                            (params.C0 / params.lambda) * eh[m][0];
      for (std::size_t s = 0; s < S; ++s) {
        const double r54 =
            S >= 3 ? dg[m][s] + params.b0 / 8 * eh[m][s] : 0.0;
        led.rows[s].per_mu[4 * k + 3] = r54;
        double rhs = 0;
        for (int nu = 1; nu <= mu; ++nu)
          rhs += eh[static_cast<std::size_t>(nu)][s] *
                 std::pow(1 + t[s], -2 * (mu - nu) - 1);
        if (rhs > kTiny)
          e0 = std::max(e0, (r54 - eps_mu) / rhs);
        else if (r54 > eps_mu)
          pass = false;
      }
    }
    add_entry("eq54",
              "d/dt G_{L,mu} + (b0/8) E_{L-mu} <= E0 sum_nu E_{L-nu} "
              "(1+t)^{-2(mu-nu)-1}, measured E0",
              e0, 0, 0, !mu_list.empty(), pass && std::isfinite(e0));
  }

  return led;
}

}  // namespace dwlab
