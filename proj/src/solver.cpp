#include "dwlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "dwlab/kernels.hpp"

namespace dwlab {

namespace {

constexpr double kCflSlack = 1.0 + 1e-9;

double binomial(int n, int k) {
  double c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

double grad_sup(const Field& u) {
  double m = 0;
  for (int axis = 0; axis < u.grid().dim; ++axis)
    m = std::max(m, sup_norm(deriv(u, MultiIndex::unit(axis))));
  return m;
}

// Fraction of the squared L2 mass within kEdgeBand cells of any face.
constexpr int kEdgeBand = 4;

double edge_mass_fraction(const Field& u) {
  const Grid& g = u.grid();
  const std::int64_t np = g.npoints();
  const int dim = g.dim;
  const int n = g.n;
  const double* p = u.data();
  auto sq_at = [&](std::int64_t i) {
    double s = 0;
    for (int c = 0; c < dim; ++c) s += p[c * np + i] * p[c * np + i];
    return s;
  };
  const double total = kernels::reduce_sum(np, sq_at);
  if (total <= 0) return 0;
  const double band = kernels::reduce_sum(np, [&](std::int64_t i) {
    for (int axis = 0; axis < dim; ++axis) {
      const int c = g.coord_index(i, axis);
      if (c < kEdgeBand || c >= n - kEdgeBand) return sq_at(i);
    }
    return 0.0;
  });
  return band / total;
}

Field damping_matvec(const DampingField& b, const Field& f) {
  Field out(f.grid());
  b.matvec(f, out);
  return out;
}

}  // namespace

State::State(Field u_, Field udot_, double t_)
    : u(std::move(u_)), udot(std::move(udot_)), t(t_) {
  if (!(u.grid() == udot.grid()))
    throw std::invalid_argument("state fields must share a grid");
}

int l0_for_dim(int dim) { return dim / 2 + 3; }

double RunConfig::step_size() const {
  return dt > 0 ? dt : cfl_safety * stability_dt(grid);
}

double stability_dt(const Grid& g) {
  const double c = g.stencil_order == 2 ? 1.0 : std::sqrt(3.0) / 2.0;
  return c * g.spacing() / std::sqrt(static_cast<double>(g.dim));
}

void validate(const RunConfig& cfg) {
  make_grid(cfg.grid.dim, cfg.grid.n, cfg.grid.half_width,
            cfg.grid.stencil_order);
  if (cfg.damping.dim != cfg.grid.dim)
    throw std::invalid_argument("damping dimension does not match the grid");
  if (!cfg.tensor.is_zero() && cfg.tensor.dim() != cfg.grid.dim)
    throw std::invalid_argument("tensor dimension does not match the grid");
  if (!(cfg.lambda > 0 && cfg.lambda <= 1))
    throw std::invalid_argument("rescaling factor must lie in (0, 1]");
  if (!cfg.damping.is_zero() && cfg.damping.lambda != cfg.lambda)
    throw std::invalid_argument(
        "damping rescaling factor disagrees with the run's");
  if (!(cfg.cfl_safety > 0 && cfg.cfl_safety < 1))
    throw std::invalid_argument("cfl_safety must lie in (0, 1)");
  if (cfg.dt > 0 && cfg.dt > cfg.cfl_safety * stability_dt(cfg.grid) * kCflSlack)
    throw StepSizeError("dt exceeds the CFL budget cfl_safety * stability_dt");
  if (!(cfg.t_final >= 0))
    throw std::invalid_argument("t_final must be nonnegative");
  if (cfg.sample_every < 1)
    throw std::invalid_argument("sample_every must be at least 1");
  if (cfg.L < cfg.L0())
    throw std::invalid_argument("L must be at least L0 = floor(d/2) + 3");
  if (!(cfg.smallness_budget > 0))
    throw std::invalid_argument("smallness budget must be positive");
  if (!(cfg.blowup_sup > 0))
    throw std::invalid_argument("blow-up threshold must be positive");
}

BlowupError::BlowupError(double t, const std::string& what)
    : std::runtime_error(what), t_(t) {}

namespace {

Field nonlinear_or_zero(const RunConfig& cfg, const Field& u) {
  if (cfg.tensor.is_zero()) return Field(u.grid());
  return nonlinear_term(cfg.tensor, u, u);
}

void check_cfl_monitor(const RunConfig& cfg, double dt, double eff) {
  if (dt * eff > stability_dt(cfg.grid) * kCflSlack)
    throw StepSizeError(
        "quasilinear CFL monitor tripped: dt * (1 + |N|_1 sup|grad u|) "
        "exceeds the stability limit");
}

void check_alive(const State& s, double sup_u, double blowup_sup) {
  if (!s.u.finite() || !s.udot.finite())
    throw BlowupError(s.t, "solution lost finiteness (blow-up) at t = " +
                               std::to_string(s.t));
  if (sup_u > blowup_sup)
    throw BlowupError(s.t, "solution exceeded the blow-up threshold at t = " +
                               std::to_string(s.t));
}

}  // namespace

State step(const State& state, const RunConfig& cfg) {
  validate(cfg);
  if (!(state.grid() == cfg.grid))
    throw std::invalid_argument("state grid does not match config grid");
  const double dt = cfg.step_size();
  const bool damped = !cfg.damping.is_zero();
  const DampingField bfield =
      damped ? DampingField(cfg.damping, cfg.grid) : DampingField();
  const ImplicitDampingSolve solve =
      damped ? ImplicitDampingSolve(cfg.damping, cfg.grid, dt / 2)
             : ImplicitDampingSolve();

  if (!cfg.tensor.is_zero())
    check_cfl_monitor(cfg, dt, 1.0 + cfg.tensor.l1_norm() * grad_sup(state.u));

  // Half-step velocity reconstruction (equivalent to the Taylor ghost start).
  Field v = state.udot;
  {
    Field a = laplacian(state.u);
    a += nonlinear_or_zero(cfg, state.u);
    if (damped) a.add_scaled(damping_matvec(bfield, state.udot), -1.0);
    v.add_scaled(a, dt / 2);
  }

  State next;
  next.t = state.t + dt;
  next.u = state.u;
  next.u.add_scaled(v, dt);

  Field rhs = v;
  if (damped) rhs.add_scaled(damping_matvec(bfield, v), -dt / 2);
  rhs.add_scaled(laplacian(next.u), dt);
  rhs.add_scaled(nonlinear_or_zero(cfg, next.u), dt);

  Field vnew(cfg.grid);
  if (damped)
    solve.apply(rhs, vnew);
  else
    vnew = rhs;

  next.udot = v;
  next.udot += vnew;
  next.udot *= 0.5;

  check_alive(next, sup_norm(next.u), cfg.blowup_sup);
  return next;
}

Trajectory simulate(const RunConfig& cfg, const State& data) {
  validate(cfg);
  if (!(data.grid() == cfg.grid))
    throw std::invalid_argument("data grid does not match config grid");
  if (!data.u.finite() || !data.udot.finite())
    throw std::invalid_argument("initial data must be finite");

  const Grid& g = cfg.grid;
  const double dt = cfg.step_size();
  const bool damped = !cfg.damping.is_zero();
  const bool nonlinear = !cfg.tensor.is_zero();
  const int L0 = cfg.L0();

  Trajectory traj;
  traj.dt = dt;
  traj.nsteps = cfg.t_final <= 0
                    ? 0
                    : static_cast<std::int64_t>(
                          std::ceil(cfg.t_final / dt - 1e-9));
  traj.steps.reserve(static_cast<std::size_t>(traj.nsteps));

  const DampingField bfield = damped ? DampingField(cfg.damping, g)
                                     : DampingField();
  const ImplicitDampingSolve solve =
      damped ? ImplicitDampingSolve(cfg.damping, g, dt / 2)
             : ImplicitDampingSolve();

  Field u = data.u;
  Field udot = data.udot;
  const double t0 = data.t;

  auto record_sample = [&](double t) {
    Sample s;
    s.t = t;
    s.state = State(u, udot, t);
    s.e_l0 = higher_energy_pair(u, udot, L0);
    s.edge_fraction = edge_mass_fraction(u);
    traj.max_e_l0 = std::max(traj.max_e_l0, s.e_l0);
    traj.max_edge_fraction = std::max(traj.max_edge_fraction, s.edge_fraction);
    if (s.e_l0 > cfg.smallness_budget) traj.smallness_ok = false;
    traj.samples.push_back(std::move(s));
  };
  record_sample(t0);
  if (traj.nsteps == 0) return traj;

  Field lap = laplacian(u);
  Field nl = nonlinear_or_zero(cfg, u);

  // v holds the staggered velocity half a step ahead of u.
  Field v = udot;
  {
    Field a = lap;
    a += nl;
    if (damped) a.add_scaled(damping_matvec(bfield, udot), -1.0);
    v.add_scaled(a, dt / 2);
  }

  double prev_stag = 0;
  for (std::int64_t n = 0; n < traj.nsteps; ++n) {
    StepDiagnostics d;
    d.t = t0 + static_cast<double>(n + 1) * dt;
    d.diss_power = damped ? bfield.inner(udot, udot) : 0.0;
    d.nl_power = nonlinear ? l2_inner(udot, nl) : 0.0;
    d.cfl_eff = nonlinear ? 1.0 + cfg.tensor.l1_norm() * grad_sup(u) : 1.0;
    check_cfl_monitor(cfg, dt, d.cfl_eff);
    traj.max_cfl_eff = std::max(traj.max_cfl_eff, d.cfl_eff);

    // Staggered energy at the half step ahead, using pre-drift u and lap.
    d.stag_energy = 0.5 * l2_norm_sq(v) -
                    0.5 * (l2_inner(lap, u) + dt * l2_inner(lap, v));
    if (n > 0) {
      d.identity_residual = d.stag_energy - prev_stag +
                            dt * d.diss_power - dt * d.nl_power;
      traj.max_identity_residual = std::max(traj.max_identity_residual,
                                            std::fabs(d.identity_residual));
    }
    prev_stag = d.stag_energy;

    u.add_scaled(v, dt);
    lap = laplacian(u);
    if (nonlinear) nl = nonlinear_term(cfg.tensor, u, u);

    Field rhs = v;
    if (damped) rhs.add_scaled(damping_matvec(bfield, v), -dt / 2);
    rhs.add_scaled(lap, dt);
    if (nonlinear) rhs.add_scaled(nl, dt);

    Field vnew(g);
    if (damped)
      solve.apply(rhs, vnew);
    else
      vnew = rhs;

    udot = v;
    udot += vnew;
    udot *= 0.5;
    v = std::move(vnew);

    d.sup_u = sup_norm(u);
    traj.steps.push_back(d);
    check_alive(State(u, udot, d.t), d.sup_u, cfg.blowup_sup);

    if ((n + 1) % cfg.sample_every == 0 || n + 1 == traj.nsteps)
      record_sample(d.t);
  }
  return traj;
}

std::vector<Field> time_derivatives(const State& state, const RunConfig& cfg,
                                    int mu) {
  validate(cfg);
  if (!(state.grid() == cfg.grid))
    throw std::invalid_argument("state grid does not match config grid");
  if (mu < 0 || mu > cfg.L - cfg.L0())
    throw std::invalid_argument("mu must lie in [0, L - L0]");

  const bool damped = !cfg.damping.is_zero();
  const DampingField bfield = damped ? DampingField(cfg.damping, cfg.grid)
                                     : DampingField();

  std::vector<Field> out;
  out.reserve(static_cast<std::size_t>(mu) + 2);
  out.push_back(state.u);
  out.push_back(state.udot);
  for (int nu = 2; nu <= mu + 1; ++nu) {
    Field f = laplacian(out[static_cast<std::size_t>(nu - 2)]);
    if (damped)
      f.add_scaled(damping_matvec(bfield, out[static_cast<std::size_t>(nu - 1)]),
                   -1.0);
    if (!cfg.tensor.is_zero())
      for (int k = 0; k <= nu - 2; ++k)
        f.add_scaled(nonlinear_term(cfg.tensor,
                                    out[static_cast<std::size_t>(k)],
                                    out[static_cast<std::size_t>(nu - 2 - k)]),
                     binomial(nu - 2, k));
    out.push_back(std::move(f));
  }
  return out;
}

OracleResult linear_oracle_1d(const Grid& g,
                              const std::function<double(double)>& profile,
                              double support_radius, double t) {
  if (g.dim != 1)
    throw std::invalid_argument("the traveling-wave oracle is one-dimensional");
  OracleResult res;
  res.boundary_contact = support_radius + std::fabs(t) > g.half_width;
  res.u = make_field(g, [&](const std::array<double, kMaxDim>& x, int) {
    return 0.5 * (profile(x[0] + t) + profile(x[0] - t));
  });
  return res;
}

RescaleReport rescaling_roundtrip(const RunConfig& cfg, const State& data,
                                  double lambda, int n_rescaled) {
  validate(cfg);
  if (!(lambda > 0 && lambda <= 1))
    throw std::invalid_argument("rescaling factor must lie in (0, 1]");

  const Grid& gu = cfg.grid;
  const int L0 = cfg.L0();

  RescaleReport rep;
  rep.lambda = lambda;
  rep.nominal_factor = std::pow(lambda, -(gu.dim + 1));
  rep.data_norm =
      sobolev_norm_sq(data.u, L0) + sobolev_norm_sq(data.udot, L0 - 1);

  const int nv = n_rescaled > 0 ? n_rescaled : gu.n;
  rep.matched_grids = nv == gu.n;
  const Grid gv =
      make_grid(gu.dim, nv, gu.half_width / lambda, gu.stencil_order);

  Field v0(gv), v1(gv);
  if (rep.matched_grids) {
    const std::int64_t total =
        gv.npoints() * static_cast<std::int64_t>(gv.dim);
    const double* pu0 = data.u.data();
    const double* pu1 = data.udot.data();
    double* p0 = v0.data();
    double* p1 = v1.data();
    const double inv = 1.0 / lambda;
    kernels::parallel_for(total, [=](std::int64_t i) {
      p0[i] = pu0[i] * inv;
      p1[i] = pu1[i];
    });
  } else {
    v0 = make_field(gv, [&](const std::array<double, kMaxDim>& x, int c) {
      std::array<double, kMaxDim> y{};
      for (int j = 0; j < gv.dim; ++j)
        y[static_cast<std::size_t>(j)] =
            lambda * x[static_cast<std::size_t>(j)];
      return interpolate(data.u, c, y) / lambda;
    });
    v1 = make_field(gv, [&](const std::array<double, kMaxDim>& x, int c) {
      std::array<double, kMaxDim> y{};
      for (int j = 0; j < gv.dim; ++j)
        y[static_cast<std::size_t>(j)] =
            lambda * x[static_cast<std::size_t>(j)];
      return interpolate(data.udot, c, y);
    });
  }

  rep.data_norm_rescaled =
      sobolev_norm_sq(v0, L0) + sobolev_norm_sq(v1, L0 - 1);
  rep.ratio = rep.data_norm > 0 ? rep.data_norm_rescaled / rep.data_norm : 1.0;
  rep.inequality_holds = rep.ratio <= rep.nominal_factor * 1.01;

  RunConfig vcfg = cfg;
  vcfg.grid = gv;
  vcfg.damping = cfg.damping.rescaled(lambda);
  vcfg.lambda = cfg.lambda * lambda;
  vcfg.dt = cfg.step_size() / lambda;
  vcfg.t_final = cfg.t_final / lambda;

  const Trajectory tu = simulate(cfg, data);
  const Trajectory tv = simulate(vcfg, State(v0, v1, 0.0));
  const std::size_t ns = std::min(tu.samples.size(), tv.samples.size());

  for (std::size_t s = 0; s < ns; ++s) {
    const Field& us = tu.samples[s].state.u;
    const Field& vs = tv.samples[s].state.u;
    double diff_sq = 0;
    if (rep.matched_grids) {
      const std::int64_t total =
          gu.npoints() * static_cast<std::int64_t>(gu.dim);
      const double* pu = us.data();
      const double* pv = vs.data();
      diff_sq = gu.cell_volume() *
                kernels::reduce_sum(total, [=](std::int64_t i) {
                  const double d = lambda * pv[i] - pu[i];
                  return d * d;
                });
    } else {
      Field pulled = make_field(
          gu, [&](const std::array<double, kMaxDim>& x, int c) {
            std::array<double, kMaxDim> y{};
            for (int j = 0; j < gu.dim; ++j)
              y[static_cast<std::size_t>(j)] =
                  x[static_cast<std::size_t>(j)] / lambda;
            return lambda * interpolate(vs, c, y);
          });
      pulled.add_scaled(us, -1.0);
      diff_sq = l2_norm_sq(pulled);
    }
    const double base_sq = l2_norm_sq(us);
    const double rel = base_sq > 0 ? std::sqrt(diff_sq / base_sq)
                                   : std::sqrt(diff_sq);
    rep.max_rel_l2_diff = std::max(rep.max_rel_l2_diff, rel);
  }
  return rep;
}

}  // namespace dwlab
