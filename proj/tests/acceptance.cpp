// Acceptance gate: one self-contained check per shipped guarantee, each
// printing exactly one PASS/FAIL line.  The process exits nonzero when any
// check fails.  All tolerances are fixed here, not read from anywhere else.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dwlab/decay.hpp"
#include "dwlab/energetics.hpp"
#include "dwlab/grid.hpp"
#include "dwlab/inequalities.hpp"
#include "dwlab/model.hpp"
#include "dwlab/solver.hpp"

using namespace dwlab;

namespace {

int g_failures = 0;

using Outcome = std::pair<bool, std::string>;

// budget_s <= 0 means the check carries no wall-clock budget.  Budgeted
// checks fail when they run over, and every line reports elapsed time.
void run_check(int idx, const std::string& what,
               const std::function<Outcome()>& body, double budget_s = 0.0) {
  bool ok = false;
  std::string detail;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto [pass, note] = body();
    ok = pass;
    detail = note;
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (budget_s > 0 && elapsed > budget_s) {
    ok = false;
    detail += (detail.empty() ? "" : "; ") + std::string("over budget ") +
              std::to_string(budget_s) + "s";
  }
  std::printf("[%2d] %s  %s%s%s  [%.1fs]\n", idx, ok ? "PASS" : "FAIL",
              what.c_str(), detail.empty() ? "" : " -- ", detail.c_str(),
              elapsed);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

DampingSpec no_damping() {
  return make_damping(DampingProfile::uniform, 1, 0.0, 0.0, 0.0);
}

// ---------------------------------------------------------------------------
// 1. Second-order convergence against the exact traveling-wave solution.

Outcome check_linear_convergence() {
  const double support = 3.0;
  auto profile = [support](double s) {
    const double q = s / support;
    return std::abs(q) < 1.0 ? std::exp(-1.0 / (1.0 - q * q)) : 0.0;
  };

  std::vector<double> errs;
  for (int n : {1025, 2049, 4097}) {
    RunConfig cfg;
    cfg.grid = make_grid(1, n, 15.0, 2);
    cfg.damping = no_damping();
    cfg.tensor = NonlinearTensor::zero(1);
    cfg.t_final = 10.0;
    cfg.sample_every = 512;
    cfg.smallness_budget = 1e9;
    const Field u0 = make_field(
        cfg.grid,
        [&](const std::array<double, kMaxDim>& x, int) { return profile(x[0]); });
    const Trajectory traj = simulate(cfg, State(u0, Field(cfg.grid)));

    double err = 0;
    for (const Sample& smp : traj.samples) {
      const OracleResult oracle =
          linear_oracle_1d(cfg.grid, profile, support, smp.t);
      if (oracle.boundary_contact)
        return {false, "oracle support reached the domain edge"};
      Field diff = smp.state.u;
      diff -= oracle.u;
      err = std::max(err, sup_norm(diff));
    }
    errs.push_back(err);
  }

  const double r1 = errs[0] / errs[1];
  const double r2 = errs[1] / errs[2];
  const bool ok = r1 >= 2.8 && r1 <= 5.2 && r2 >= 2.8 && r2 <= 5.2;
  return {ok, "error ratios per refinement " + fmt(r1) + ", " + fmt(r2)};
}

// ---------------------------------------------------------------------------
// 2. Discrete energy identity under uniform damping: the per-step defect of
//    dE/dt + <udot, B udot> = 0, integrated over the run, stays below
//    1e-3 E(0), and the sampled energy never increases.

Outcome check_energy_identity() {
  RunConfig cfg;
  cfg.grid = make_grid(1, 513, 12.0, 4);
  cfg.damping = make_damping(DampingProfile::uniform, 1, 1.0, 0.5, 2.0);
  cfg.tensor = NonlinearTensor::zero(1);
  cfg.t_final = 50.0;
  cfg.sample_every = 25;
  cfg.smallness_budget = 1e9;

  const Field u0 = sample_function(cfg.grid, 3, SampleKind::bump, 4.0);
  Field u1 = sample_function(cfg.grid, 4, SampleKind::bump, 3.0);
  u1 *= 0.5;
  const Trajectory traj = simulate(cfg, State(u0, u1));

  const double e0 = energy(traj.samples.front().state);
  double integrated = 0;
  for (const StepDiagnostics& d : traj.steps)
    integrated += std::abs(d.identity_residual) * traj.dt;

  bool monotone = true;
  double prev = e0;
  for (const Sample& smp : traj.samples) {
    const double e = energy(smp.state);
    if (e > prev * (1.0 + 1e-12)) monotone = false;
    prev = e;
  }

  const bool ok = integrated <= 1e-3 * e0 && monotone && e0 > 0;
  return {ok, "integrated defect " + fmt(integrated) + " vs budget " +
                  fmt(1e-3 * e0) + (monotone ? ", samples monotone"
                                             : ", sampled energy increased")};
}

// ---------------------------------------------------------------------------
// 3. Rescaling roundtrip at lambda = 1/2 on matched lattices, plus the
//    data-norm scaling factor lambda^{-d-1} reproduced to 1% on a Gaussian
//    tuned so the continuum factor is exactly 4.

Outcome check_rescaling() {
  // sigma solves  sum_k lam^{2k-3} m_k = 4 sum_k m_k  for the Gaussian
  // derivative moments m_k = (2k-1)!! (sigma^-2 / 2)^k, k = 0..3, lam = 1/2.
  const double sigma = 1.2238476953018853;

  RunConfig cfg;
  cfg.grid = make_grid(1, 2049, 16.0, 4);
  cfg.damping = make_damping(DampingProfile::radial_step, 1, 1.0, 0.5, 2.0);
  cfg.tensor = NonlinearTensor::zero(1);
  cfg.t_final = 10.0;
  cfg.sample_every = 16;
  cfg.smallness_budget = 1e9;

  const Field u0 = make_field(
      cfg.grid, [sigma](const std::array<double, kMaxDim>& x, int) {
        return std::exp(-x[0] * x[0] / (2.0 * sigma * sigma));
      });
  const RescaleReport rep =
      rescaling_roundtrip(cfg, State(u0, Field(cfg.grid)), 0.5);

  const double factor_err = std::abs(rep.ratio / rep.nominal_factor - 1.0);
  const bool ok = rep.matched_grids && rep.max_rel_l2_diff <= 1e-2 &&
                  factor_err <= 1e-2;
  return {ok, "max_rel_l2_diff " + fmt(rep.max_rel_l2_diff) +
                  ", norm factor " + fmt(rep.ratio) + " (nominal " +
                  fmt(rep.nominal_factor) + ")"};
}

// ---------------------------------------------------------------------------
// 4. Damping-form coercivity sweep: the empirical constant over 100 samples
//    and lambda in {1, 1/2, 1/4} is finite, drifts <= 20% under grid
//    refinement, and respects the 1/4 floor.

double g_c1_constant = 0.25;  // refined value feeds the ledger checks below

Outcome check_poincare() {
  const DampingSpec spec =
      make_damping(DampingProfile::radial_step, 1, 1.0, 0.5, 2.0);
  const std::array<double, 3> sweep{1.0, 0.5, 0.25};
  const InequalityReport coarse =
      poincare_check(spec, make_grid(1, 257, 8.0), sweep, 100, 11);
  const InequalityReport fine =
      poincare_check(spec, make_grid(1, 513, 8.0), sweep, 100, 11);

  const double drift = relative_drift(coarse.constant, fine.constant);
  const bool ok = coarse.pass && fine.pass && std::isfinite(fine.constant) &&
                  drift <= 0.2 && fine.constant >= 0.25;
  if (ok) g_c1_constant = fine.constant;
  return {ok, "constant " + fmt(fine.constant) + ", refinement drift " +
                  fmt(drift)};
}

// ---------------------------------------------------------------------------
// 5. Multiplier field facts at 10^4 sampled points per (dim, lambda):
//    |h| <= b0 R / lambda, |grad h|_op <= 2 b0, div h = d b0 inside the
//    transition radius and (d-1) phi(r) outside, all to round-off.

Outcome check_multiplier() {
  const double b0 = 1.3, R = 2.0;
  double worst = 0;
  for (int dim : {1, 2, 3}) {
    for (double lambda : {1.0, 0.25}) {
      const MultiplierSpec m{b0, R, lambda, dim};
      const double edge = R / lambda;
      std::mt19937_64 rng(1000 * dim + (lambda < 1 ? 1 : 0));
      std::uniform_real_distribution<double> box(-3.0 * edge, 3.0 * edge);
      for (int k = 0; k < 10000; ++k) {
        std::array<double, kMaxDim> x{0, 0, 0};
        double r2 = 0;
        for (int a = 0; a < dim; ++a) {
          x[static_cast<std::size_t>(a)] = box(rng);
          x[static_cast<std::size_t>(a)] *= (a == 0 ? 1.0 : 0.5);
          r2 += x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
        }
        const double r = std::sqrt(r2);
        if (std::abs(r - edge) <= 1e-9 * edge) continue;  // branch boundary

        std::array<double, 3> h{};
        SymMat jac;
        double div = 0;
        m.eval(x, &h, &jac, &div);

        double habs2 = 0;
        for (int a = 0; a < dim; ++a)
          habs2 += h[static_cast<std::size_t>(a)] * h[static_cast<std::size_t>(a)];
        const double habs = std::sqrt(habs2);
        const double scale = b0 * std::max(1.0, edge);

        worst = std::max(worst, (habs - m.sup_h()) / scale);
        worst = std::max(worst, (jac.op_norm() - 2.0 * b0) / scale);
        if (r < edge) {
          worst = std::max(worst, std::abs(div - dim * b0) / scale);
          for (int a = 0; a < dim; ++a)
            worst = std::max(
                worst, std::abs(h[static_cast<std::size_t>(a)] -
                                b0 * x[static_cast<std::size_t>(a)]) /
                           scale);
        } else {
          worst =
              std::max(worst, std::abs(div - (dim - 1) * m.phi(r)) / scale);
          worst = std::max(worst, std::abs(habs - m.sup_h()) / scale);
        }
      }
    }
  }
  return {worst <= 1e-12, "worst scaled deviation " + fmt(worst)};
}

// ---------------------------------------------------------------------------
// Shared long run for checks 6, 7 and 11: quintic-step damping at
// lambda = 1/4, a small symmetrized quadratic term, analytically odd data
// scaled so the order-L0 energy starts at 1e-4, tracked to T = 100 at three
// resolutions (the middle one carries the reported ledger).

struct ResidualSeries {
  std::vector<double> t;
  std::vector<double> r29;
};

struct PrimaryArtifacts {
  bool ready = false;
  std::string error;
  Ledger ledger;              // from the middle resolution
  ResidualSeries coarse, mid, fine;
};

PrimaryArtifacts g_primary;

RunConfig primary_config(int n, double dt) {
  RunConfig cfg;
  // The box outlives the light cone (112 > data support + t_final), so the
  // multiplier identity never sees the lattice edge; contact there shows up
  // as a resolution-amplified residual spike.
  cfg.grid = make_grid(1, n, 112.0, 4);
  cfg.damping =
      make_damping(DampingProfile::radial_step, 1, 1.0, 0.5, 2.0).rescaled(0.25);
  cfg.tensor = NonlinearTensor::random_symmetrized(1, 42, 0.05);
  cfg.lambda = 0.25;
  cfg.dt = dt;
  cfg.t_final = 100.0;
  cfg.sample_every = 8;
  cfg.L = 5;
  cfg.smallness_budget = 2e-4;
  return cfg;
}

// Odd analytic velocity profile with a vanishing first moment.  Oddness
// supplies the mean-zero certificate; killing the dipole moment as well
// silences the slowest damped channel, so the integrated-mass ledger
// plateaus deep inside its budget by t_final.  An entire function (no
// mollifier edge layer) keeps every order-5 lattice derivative resolved,
// which makes the residual genuinely truncation-dominated across the
// refinement ladder.
Field primary_profile(const Grid& g) {
  return make_field(g, [](const std::array<double, kMaxDim>& x, int) {
    return x[0] * (27.0 - x[0] * x[0]) * std::exp(-x[0] * x[0] / 18.0);
  });
}

const PrimaryArtifacts& primary_artifacts() {
  if (g_primary.ready || !g_primary.error.empty()) return g_primary;
  try {
    // Amplitude fixed once on the finest lattice: E_{L0}(0) = 1e-4.
    const RunConfig cfg_fine = primary_config(8961, 5.0 / 512.0);
    const double e_unit = higher_energy(
        State(Field(cfg_fine.grid), primary_profile(cfg_fine.grid)), cfg_fine,
        cfg_fine.L0(), 0);
    const double alpha = std::sqrt(1e-4 / e_unit);

    auto run_one = [&](int n, double dt, bool keep_ledger) {
      const RunConfig cfg = primary_config(n, dt);
      Field u1 = primary_profile(cfg.grid);
      u1 *= alpha;

      const HypothesisReport hyp =
          classify_data(Field(cfg.grid), u1, cfg.damping, cfg.lambda, true);
      if (hyp.best() != DataHypothesis::h3)
        throw std::runtime_error("data lost its mean-zero certificate");

      const Trajectory traj = simulate(cfg, State(Field(cfg.grid), u1));
      const FunctionalParams params =
          make_functional_params(cfg, g_c1_constant);
      Ledger led = build_ledger(traj, cfg, params, {1}, true);

      ResidualSeries series;
      for (const LedgerRow& row : led.rows) {
        series.t.push_back(row.t);
        series.r29.push_back(row.resid_eq29);
      }
      if (keep_ledger) g_primary.ledger = std::move(led);
      return series;
    };

    g_primary.coarse = run_one(2241, 5.0 / 128.0, false);
    g_primary.mid = run_one(4481, 5.0 / 256.0, true);
    g_primary.fine = run_one(8961, 5.0 / 512.0, false);
    g_primary.ready = true;
  } catch (const std::exception& e) {
    g_primary.error = e.what();
  }
  return g_primary;
}

// Max |a - b| over interior rows, where series b has double a's cadence.
double interior_gap(const ResidualSeries& a, const ResidualSeries& b) {
  double gap = 0;
  for (std::size_t j = 2; j + 2 < a.t.size(); ++j) {
    const std::size_t jb = 2 * j;
    if (jb >= b.t.size()) break;
    if (std::abs(a.t[j] - b.t[jb]) > 1e-9)
      throw std::runtime_error("sample times failed to align across runs");
    gap = std::max(gap, std::abs(a.r29[j] - b.r29[jb]));
  }
  return gap;
}

// 6. Master-inequality residual: within the pinned numeric budget at every
//    sample, and second-order small (ratio ~4 between refinement levels).

Outcome check_residual_budget() {
  const PrimaryArtifacts& art = primary_artifacts();
  if (!art.ready) return {false, art.error};

  const LedgerEntry* e29 = art.ledger.find("eq29");
  if (e29 == nullptr) return {false, "ledger entry eq29 missing"};

  const double q1 = interior_gap(art.coarse, art.mid);
  const double q2 = interior_gap(art.mid, art.fine);
  const double ratio = q2 > 0 ? q1 / q2 : 0.0;

  const bool ok = e29->applicable && e29->pass && ratio >= 2.8 && ratio <= 5.8;
  return {ok, "max residual " + fmt(e29->measured) + " vs budget " +
                  fmt(e29->budget) + ", refinement ratio " + fmt(ratio)};
}

// 7. Boundedness ledger: state + integrated higher energy plateau (eq30) and
//    the integrated L2 mass plateaus for certified data (eq42), both <= 1%.

Outcome check_boundedness_plateaus() {
  const PrimaryArtifacts& art = primary_artifacts();
  if (!art.ready) return {false, art.error};

  const LedgerEntry* e30 = art.ledger.find("eq30");
  const LedgerEntry* e42 = art.ledger.find("eq42");
  if (e30 == nullptr || e42 == nullptr) return {false, "ledger entry missing"};

  const bool ok = e30->applicable && e30->pass && e42->applicable && e42->pass;
  return {ok, "last-quarter growth: eq30 " + fmt(e30->plateau_growth) +
                  ", eq42 " + fmt(e42->plateau_growth) + " (budget 0.01)"};
}

// ---------------------------------------------------------------------------
// Shared decay runs for checks 8 and 9.

struct DecayArtifacts {
  bool ready = false;
  std::string error;
  std::vector<DecayFit> certified;  // analytically mean-zero data
  std::vector<DecayFit> baseline;   // generic data, no certificate
};

DecayArtifacts g_decay;

const DecayArtifacts& decay_artifacts() {
  if (g_decay.ready || !g_decay.error.empty()) return g_decay;
  try {
    RunConfig cfg;
    cfg.grid = make_grid(1, 3201, 80.0, 4);
    cfg.damping = make_damping(DampingProfile::radial_step, 1, 1.0, 0.5, 2.0);
    cfg.tensor = NonlinearTensor::zero(1);
    cfg.t_final = 200.0;
    cfg.sample_every = 8;
    cfg.L = 4;

    const RateWindow window{20.0, 200.0, 0.3};

    Field odd = sample_function(cfg.grid, 7, SampleKind::odd_bump, 2.0);
    odd *= 1e-3;
    const Trajectory traj_h3 = simulate(cfg, State(Field(cfg.grid), odd));
    g_decay.certified = verify_rates(traj_h3, cfg, 1, true, window);

    Field bump = sample_function(cfg.grid, 7, SampleKind::bump, 2.0);
    bump *= 1e-3;
    const Trajectory traj_base = simulate(cfg, State(Field(cfg.grid), bump));
    g_decay.baseline = verify_rates(traj_base, cfg, 1, false, window);

    g_decay.ready = true;
  } catch (const std::exception& e) {
    g_decay.error = e.what();
  }
  return g_decay;
}

const DecayFit* find_fit(const std::vector<DecayFit>& fits,
                         const std::string& quantity) {
  for (const DecayFit& f : fits)
    if (f.quantity == quantity) return &f;
  return nullptr;
}

// 8. Fitted decay exponents for analytically mean-zero data over [20, 200]:
//    full Sobolev mass <= -0.7, energy <= -1.7, first-time-derivative
//    energy <= -3.6, Laplacian mass <= -2.6.

Outcome check_decay_slopes() {
  const DecayArtifacts& art = decay_artifacts();
  if (!art.ready) return {false, art.error};

  struct Want {
    const char* quantity;
    double bound;
  };
  const Want wants[] = {{"sobolev_sq_mu0", -0.7},
                        {"energy_mu0", -1.7},
                        {"energy_mu1", -3.6},
                        {"laplacian_sq", -2.6}};
  bool ok = true;
  std::string detail;
  for (const Want& w : wants) {
    const DecayFit* f = find_fit(art.certified, w.quantity);
    if (f == nullptr) return {false, std::string("missing fit ") + w.quantity};
    if (!(f->slope <= w.bound)) ok = false;
    if (!detail.empty()) detail += ", ";
    detail += std::string(w.quantity) + " " + fmt(f->slope) + " (need <= " +
              fmt(w.bound) + ")";
  }
  return {ok, detail};
}

// 9. Contrast run without the mean-zero certificate: the energy still decays
//    (slope <= -0.7) while the L2 mass decays at least 0.5 slower than the
//    certified run's.

Outcome check_decay_contrast() {
  const DecayArtifacts& art = decay_artifacts();
  if (!art.ready) return {false, art.error};

  const DecayFit* e_base = find_fit(art.baseline, "energy_mu0");
  const DecayFit* l2_base = find_fit(art.baseline, "l2_sq");
  const DecayFit* l2_h3 = find_fit(art.certified, "l2_sq");
  if (e_base == nullptr || l2_base == nullptr || l2_h3 == nullptr)
    return {false, "missing baseline fit"};

  const double gap = l2_base->slope - l2_h3->slope;
  const bool ok = e_base->slope <= -0.7 && gap >= 0.5;
  return {ok, "baseline energy slope " + fmt(e_base->slope) + ", L2 slopes " +
                  fmt(l2_base->slope) + " vs " + fmt(l2_h3->slope) +
                  " (gap " + fmt(gap) + ")"};
}

// ---------------------------------------------------------------------------
// 10. Sampled functional-inequality suites in three dimensions, with
//     refinement-stable constants, plus all three pairing branches.

Outcome check_inequality_suites() {
  const Grid g3 = make_grid(3, 49, 6.0);

  bool ok = true;
  std::string detail;
  // The suite checks refine their own lattice internally (49^3 -> 97^3) and
  // evaluate the same sample set at both resolutions, so refinement_drift is
  // a like-for-like comparison of the measured constant.
  auto note = [&](const std::string& name, const InequalityReport& rep) {
    if (!(rep.pass && rep.refinement_drift <= 0.2)) ok = false;
    if (!detail.empty()) detail += ", ";
    detail +=
        name + " " + fmt(rep.max_ratio) + " (drift " + fmt(rep.refinement_drift) + ")";
  };

  note("sobolev", sobolev_check(g3, 20, 21));
  note("products", gnm_check(g3, 2, 20, 22));
  note("embedding", gn_check(g3, 6, 2, 20, 23));

  const InequalityReport hardy = hardy_check(g3, 20, 24);
  if (hardy.max_ratio > 2.05 || hardy.max_ratio_fine > 2.05) ok = false;
  note("radial-weight", hardy);

  // Pairing branches: moment and integrability splits on annular data in
  // three dimensions, mean-zero certificate branch in one dimension.  The
  // pairing measurement lives on a single lattice, so refine caller-side
  // with identical sample sets; its constant converges ~h^2 with a large
  // envelope-layer constant, so the comparison needs the finer pair.
  const Grid gp = make_grid(3, 81, 6.0);
  const Grid gpf = make_grid(3, 129, 6.0);
  const Field shell_c = sample_function(gp, 5, SampleKind::shell, 4.0);
  const Field shell_f = sample_function(gpf, 5, SampleKind::shell, 4.0);
  const DampingSpec spec3 =
      make_damping(DampingProfile::radial_step, 3, 1.0, 0.5, 2.0);
  const HypothesisReport hyp =
      classify_data(Field(gp), shell_c, spec3, 0.5, false);
  if (!(hyp.h1 && hyp.h2)) ok = false;

  auto pair_note = [&](const std::string& name, DataHypothesis branch) {
    const InequalityReport c = pairing_check(shell_c, branch, false, 10, 25);
    const InequalityReport f = pairing_check(shell_f, branch, false, 10, 25);
    const double drift = relative_drift(c.max_ratio, f.max_ratio);
    if (!(c.pass && f.pass && drift <= 0.2)) ok = false;
    detail += ", " + name + " " + fmt(f.max_ratio) + " (drift " + fmt(drift) + ")";
  };
  pair_note("pairing-moment", DataHypothesis::h1);
  pair_note("pairing-lp", DataHypothesis::h2);

  const Grid g1 = make_grid(1, 257, 8.0);
  const Grid g1f = make_grid(1, 513, 8.0);
  const InequalityReport h3c = pairing_check(
      sample_function(g1, 5, SampleKind::odd_bump, 3.0), DataHypothesis::h3,
      true, 100, 26);
  const InequalityReport h3f = pairing_check(
      sample_function(g1f, 5, SampleKind::odd_bump, 3.0), DataHypothesis::h3,
      true, 100, 26);
  const double h3drift = relative_drift(h3c.max_ratio, h3f.max_ratio);
  if (!(h3c.pass && h3f.pass && h3drift <= 0.2)) ok = false;
  detail += ", pairing-meanzero " + fmt(h3f.max_ratio) + " (drift " +
            fmt(h3drift) + ")";

  return {ok, detail};
}

// 11. Weighted-energy ledger on the certified long run: the (1+t)- and
//     (1+t)^2-weighted state suprema stabilize (<= 5% last-quarter growth)
//     and the running weighted-energy sup stays bounded.

Outcome check_weighted_plateaus() {
  const PrimaryArtifacts& art = primary_artifacts();
  if (!art.ready) return {false, art.error};

  const LedgerEntry* e47 = art.ledger.find("eq47");
  const LedgerEntry* e48 = art.ledger.find("eq48");
  const LedgerEntry* e52 = art.ledger.find("eq52");
  if (e47 == nullptr || e48 == nullptr || e52 == nullptr)
    return {false, "ledger entry missing"};

  const bool ok = e47->applicable && e47->pass && e48->applicable &&
                  e48->pass && e52->applicable && e52->pass;
  return {ok, "last-quarter growth: eq47 " + fmt(e47->plateau_growth) +
                  ", eq48 " + fmt(e48->plateau_growth) + ", eq52 " +
                  fmt(e52->plateau_growth) + " (budget 0.05)"};
}

}  // namespace

int main() {
  run_check(1, "traveling-wave oracle convergence", check_linear_convergence,
            30.0);
  run_check(2, "energy identity under uniform damping", check_energy_identity);
  run_check(3, "rescaling roundtrip and data-norm factor", check_rescaling);
  run_check(4, "damping-form coercivity constant", check_poincare);
  run_check(5, "multiplier bounds and divergence identities", check_multiplier);
  run_check(6, "master-inequality residual budget and refinement",
            check_residual_budget, 120.0);
  run_check(7, "boundedness ledger plateaus", check_boundedness_plateaus);
  run_check(8, "decay exponents for certified data", check_decay_slopes,
            300.0);
  run_check(9, "decay contrast without certificate", check_decay_contrast);
  run_check(10, "functional-inequality suites", check_inequality_suites,
            180.0);
  run_check(11, "weighted-energy plateaus", check_weighted_plateaus);

  if (g_failures > 0) {
    std::printf("ACCEPTANCE: %d of 11 checks failed\n", g_failures);
    return 1;
  }
  std::printf("ACCEPTANCE: all 11 checks passed\n");
  return 0;
}
