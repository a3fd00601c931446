#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "dwlab/decay.hpp"
#include "dwlab/grid.hpp"
#include "dwlab/model.hpp"
#include "dwlab/solver.hpp"

using namespace dwlab;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] =
        a + (b - a) * static_cast<double>(i) / (n - 1);
  return out;
}

const DecayFit* find_fit(const std::vector<DecayFit>& fits,
                         const std::string& name) {
  for (const DecayFit& f : fits)
    if (f.quantity == name) return &f;
  return nullptr;
}

}  // namespace

TEST_CASE("power-law fits recover exact exponents") {
  const std::vector<double> t = linspace(1.0, 300.0, 400);
  std::vector<double> q(t.size()), q5(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    q[i] = std::pow(1.0 + t[i], -2.0);
    q5[i] = 5.0 * q[i];
  }
  const DecayFit fit = fit_decay(t, q, 2.0, 300.0, -2.0, 0.3, "exact");
  CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(fit.pass);
  CHECK(fit.residual_rms <= 1e-10);
  CHECK(fit.quantity == "exact");
  CHECK(fit.count >= 20);

  // A constant prefactor moves only the intercept.
  const DecayFit fit5 = fit_decay(t, q5, 2.0, 300.0, -2.0, 0.3, "scaled");
  CHECK(fit5.slope == doctest::Approx(fit.slope).epsilon(1e-9));
  CHECK(fit5.intercept ==
        doctest::Approx(fit.intercept + std::log(5.0)).epsilon(1e-9));
}

TEST_CASE("oscillating prefactors stay near the underlying rate") {
  const std::vector<double> t = linspace(1.0, 250.0, 1200);
  std::vector<double> q(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    q[i] = (2.0 + std::sin(t[i])) / (2.0 * (1.0 + t[i]));
  const DecayFit fit = fit_decay(t, q, 20.0, 200.0, -1.0, 0.3, "wavy");
  CHECK(std::fabs(fit.slope - (-1.0)) <= 0.15);
  CHECK(fit.pass);
  CHECK(fit.residual_rms > 0);
}

TEST_CASE("fit validation and the trivial branch") {
  const std::vector<double> t = linspace(1.0, 100.0, 200);
  std::vector<double> q(t.size(), 1e-290);

  SUBCASE("windows below t = 1 are rejected") {
    CHECK_THROWS_AS((void)fit_decay(t, q, 0.5, 50.0, -1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)fit_decay(t, q, 10.0, 10.0, -1.0),
                    std::invalid_argument);
  }
  SUBCASE("mismatched series lengths are rejected") {
    std::vector<double> short_q(10, 1.0);
    CHECK_THROWS_AS((void)fit_decay(t, short_q, 1.0, 50.0, -1.0),
                    std::invalid_argument);
  }
  SUBCASE("too few window samples is a runtime error") {
    CHECK_THROWS_AS((void)fit_decay(t, q, 99.0, 100.0, -1.0),
                    std::runtime_error);
  }
  SUBCASE("an identically tiny window passes as trivial decay") {
    const DecayFit fit = fit_decay(t, q, 2.0, 90.0, -1.0);
    CHECK(fit.trivial);
    CHECK(fit.pass);
  }
  SUBCASE("nonpositive values that are not tiny are an error") {
    std::vector<double> bad = q;
    for (auto& v : bad) v = 1.0;
    bad[100] = -1.0;
    CHECK_THROWS_AS((void)fit_decay(t, bad, 2.0, 90.0, -1.0),
                    std::runtime_error);
  }
}

TEST_CASE("forcing-profile classification selects the dimensional branch") {
  SUBCASE("odd one-dimensional data certifies the mean-zero branch") {
    const Grid g = make_grid(1, 257, 10.0);
    const DampingSpec spec =
        make_damping(DampingProfile::radial_step, 1, 1.0, 0.5, 2.0);
    const Field u0(g);  // zero: forcing reduces to u1
    const Field u1 = sample_function(g, 41, SampleKind::odd_bump, 3.0);

    const HypothesisReport rep = classify_data(u0, u1, spec, 0.5, true);
    CHECK(rep.dim == 1);
    CHECK(rep.h3);
    CHECK(!rep.h1);
    CHECK(!rep.h2);
    CHECK(rep.best() == DataHypothesis::h3);
    REQUIRE(rep.mean.size() == 1);
    CHECK(std::fabs(rep.mean[0]) <= 1e-13 * (1 + rep.weighted_l1));
    CHECK(rep.weighted_l1 > 0);
    CHECK(rep.transfer_ok);
    CHECK(rep.rescale_lambda == 0.5);
    // In one dimension only p = 1 is scanned.
    REQUIRE(rep.p_grid.size() == 1);
    CHECK(rep.p_grid[0] == 1.0);
  }

  SUBCASE("even data with mass has no certified branch in one dimension") {
    const Grid g = make_grid(1, 257, 10.0);
    const DampingSpec spec =
        make_damping(DampingProfile::radial_step, 1, 1.0, 0.5, 2.0);
    const Field u0(g);
    const Field u1 = sample_function(g, 43, SampleKind::bump, 3.0);
    const HypothesisReport rep = classify_data(u0, u1, spec, 0.5, false);
    CHECK(!rep.h3);
    CHECK(rep.best() == DataHypothesis::none);
    CHECK(rep.transfer_ok);
  }

  SUBCASE("three-dimensional data activates the integrability branches") {
    const Grid g = make_grid(3, 49, 8.0);
    const DampingSpec spec =
        make_damping(DampingProfile::radial_step, 3, 1.0, 0.5, 2.0);
    const Field u0 = sample_function(g, 45, SampleKind::bump, 3.0);
    const Field u1 = sample_function(g, 46, SampleKind::shell, 3.0);
    const HypothesisReport rep = classify_data(u0, u1, spec, 0.5, false);
    CHECK(rep.dim == 3);
    CHECK(rep.h1);
    CHECK(rep.h2);
    CHECK(!rep.h3);
    CHECK(rep.best() == DataHypothesis::h2);  // moment branch outranks L^p
    REQUIRE(rep.p_grid.size() == 5);
    CHECK(rep.p_grid.front() == 1.0);
    CHECK(rep.p_grid.back() == doctest::Approx(6.0 / 5.0).epsilon(1e-12));
    CHECK(rep.f_lp.size() == rep.p_grid.size());
    CHECK(rep.transfer_ok);
  }
}

TEST_CASE("rate verification emits the advertised fit families") {
  const Grid g = make_grid(1, 129, 6.0);
  RunConfig cfg;
  cfg.grid = g;
  cfg.damping = make_damping(DampingProfile::radial_step, 1, 1.0, 0.5, 2.0);
  cfg.L = 5;  // one spare order: the curvature family appears
  cfg.t_final = 30.0;
  cfg.sample_every = 4;

  Field u1 = sample_function(g, 47, SampleKind::odd_bump, 2.0);
  u1 *= 1e-3;
  const Trajectory tr = simulate(cfg, State(Field(g), u1, 0.0));

  SUBCASE("with hypothesis data: full family, ordered targets") {
    const std::vector<DecayFit> fits = verify_rates(tr, cfg, 1, true);
    const DecayFit* s0 = find_fit(fits, "sobolev_sq_mu0");
    const DecayFit* s1 = find_fit(fits, "sobolev_sq_mu1");
    const DecayFit* e0 = find_fit(fits, "energy_mu0");
    const DecayFit* e1 = find_fit(fits, "energy_mu1");
    const DecayFit* p0 = find_fit(fits, "sup_sq_mu0");
    const DecayFit* lap = find_fit(fits, "laplacian_sq");
    const DecayFit* l2 = find_fit(fits, "l2_sq");
    REQUIRE(s0 != nullptr);
    REQUIRE(s1 != nullptr);
    REQUIRE(e0 != nullptr);
    REQUIRE(e1 != nullptr);
    REQUIRE(p0 != nullptr);
    REQUIRE(lap != nullptr);
    REQUIRE(l2 != nullptr);
    CHECK(s0->target == -1.0);
    CHECK(s1->target == -3.0);
    CHECK(e0->target == -2.0);
    CHECK(e1->target == -4.0);
    CHECK(p0->target == -1.0);
    CHECK(lap->target == -3.0);
    CHECK(l2->target == -1.0);
    // Default window [max(1, T/10), T] with T the last sampled time.
    CHECK(s0->t2 == doctest::Approx(tr.samples.back().t).epsilon(1e-12));
    CHECK(s0->t1 == doctest::Approx(s0->t2 / 10).epsilon(1e-12));
    for (const DecayFit& f : fits) {
      CHECK(f.count >= 20);
      CHECK(!f.ts.empty());
      CHECK(f.ts.size() == f.qs.size());
    }
  }

  SUBCASE("without hypothesis data: only the unconditional pair") {
    const std::vector<DecayFit> fits = verify_rates(tr, cfg, 1, false);
    REQUIRE(fits.size() == 2);
    const DecayFit* l2 = find_fit(fits, "l2_sq");
    const DecayFit* e0 = find_fit(fits, "energy_mu0");
    REQUIRE(l2 != nullptr);
    REQUIRE(e0 != nullptr);
    CHECK(l2->target == 0.0);
    CHECK(e0->target == -1.0);
  }

  SUBCASE("explicit windows are honored") {
    RateWindow w;
    w.t1 = 5.0;
    w.t2 = 25.0;
    w.slack = 0.5;
    const std::vector<DecayFit> fits = verify_rates(tr, cfg, 0, false, w);
    for (const DecayFit& f : fits) {
      CHECK(f.t1 == 5.0);
      CHECK(f.t2 == 25.0);
      CHECK(f.slack == 0.5);
    }
  }
}
