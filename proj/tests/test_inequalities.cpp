#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <doctest.h>

#include "dwlab/grid.hpp"
#include "dwlab/inequalities.hpp"
#include "dwlab/model.hpp"

using namespace dwlab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("relative drift is a guarded relative difference") {
  CHECK(relative_drift(1.0, 1.1) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(relative_drift(2.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(relative_drift(0.0, 0.0) == 0.0);
}

TEST_CASE("sup-norm control by the data-space Sobolev norm") {
  const Grid g = make_grid(1, 257, 8.0);
  const InequalityReport rep = sobolev_check(g, 30, 7);
  CHECK(rep.pass);
  CHECK(rep.samples == 30);
  CHECK(static_cast<int>(rep.ratios.size()) == rep.samples);
  CHECK(rep.max_ratio > 0);
  CHECK(rep.max_ratio_fine > 0);
  CHECK(rep.refinement_drift <= 0.20);

  // Narrow supports concentrate derivative mass; the constant stays bounded.
  const InequalityReport narrow = sobolev_check(g, 10, 7, 1.0);
  CHECK(narrow.pass);
  CHECK(narrow.max_ratio <= 2.0 * std::max(rep.max_ratio, 1.0));
}

TEST_CASE("product estimate: sampled splits and the constant-factor bound") {
  const Grid g = make_grid(1, 257, 8.0);
  const InequalityReport rep = gnm_check(g, 2, 12, 11);
  CHECK(rep.pass);
  CHECK(rep.samples > 0);
  REQUIRE(rep.sweep_values.size() == 3);  // splits |b| = 0, 1, 2
  double sweep_top = 0;
  for (double v : rep.sweep_max) sweep_top = std::max(sweep_top, v);
  CHECK(rep.max_ratio == doctest::Approx(sweep_top).epsilon(1e-14));

  // A factor that is exactly constant on the other factor's support makes
  // the estimate an identity up to the unused positive term: ratio <= 1.
  const Field f = sample_function(g, 5, SampleKind::bump, 1.5);
  const Field plateau = sample_function(g, 6, SampleKind::plateau_bump, 6.0);
  const MultiIndex b = MultiIndex::unit(0).plus(0);  // second derivative
  const MultiIndex c0 = MultiIndex::zero();
  CHECK(gnm_ratio(f, plateau, b, c0) <= 1.0 + 1e-12);

  // Swapping the split on equal factors swaps nothing.
  CHECK(gnm_ratio(f, f, b, c0) ==
        doctest::Approx(gnm_ratio(f, f, c0, b)).epsilon(1e-15));
}

TEST_CASE("damping-form coercivity sweep") {
  const Grid g = make_grid(1, 257, 10.0);
  const DampingSpec spec =
      make_damping(DampingProfile::radial_step, 1, 1.0, 0.5, 2.0);
  const std::array<double, 3> sweep{1.0, 0.5, 0.25};

  const InequalityReport rep = poincare_check(spec, g, sweep, 20, 3);
  CHECK(rep.pass);
  CHECK(rep.constant >= 0.25);
  CHECK(rep.constant >= rep.max_ratio);
  REQUIRE(rep.sweep_values.size() == 3);
  CHECK(rep.sweep_values[0] == 1.0);
  for (double v : rep.sweep_max) CHECK(v > 0);

  SUBCASE("a wide dead zone keeps the constant domain-scale bounded") {
    const Grid wide = make_grid(1, 257, 12.0);
    const DampingSpec lazy =
        make_damping(DampingProfile::radial_step, 1, 1.0, 3.0, 4.0);
    const std::array<double, 1> one{1.0};
    const InequalityReport r2 = poincare_check(lazy, wide, one, 20, 9);
    CHECK(r2.pass);
    CHECK(r2.constant <= 4.0 * 4.0 * 4.0);  // well under (2 half_width)^2
  }

  SUBCASE("sweep values outside (0, 1] are rejected") {
    const std::array<double, 1> bad{1.5};
    CHECK_THROWS_AS((void)poincare_check(spec, g, bad, 4, 1),
                    std::invalid_argument);
    const std::array<double, 1> zero{0.0};
    CHECK_THROWS_AS((void)poincare_check(spec, g, zero, 4, 1),
                    std::invalid_argument);
  }
}

TEST_CASE("radial-weight inequality in three dimensions") {
  SUBCASE("sampled fields sit under the sharp constant") {
    const Grid g = make_grid(3, 49, 8.0);
    const InequalityReport rep = hardy_check(g, 6, 13);
    CHECK(rep.pass);
    CHECK(rep.max_ratio > 0);
    CHECK(rep.max_ratio <= 2.05);
    CHECK(rep.refinement_drift <= 0.20);
  }

  SUBCASE("the Gaussian ratio 2/sqrt(3) is reproduced") {
    const Grid g = make_grid(3, 97, 8.0);
    const Field f = make_field(
        g, [](const std::array<double, kMaxDim>& x, int c) {
          if (c != 0) return 0.0;
          const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
          return std::exp(-r2 / 2);
        });
    double weighted = 0;
    const auto vals = f.comp(0);
    for (std::int64_t i = 0; i < g.npoints(); ++i) {
      const auto x = g.point(i);
      const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
      if (r2 == 0.0) continue;
      const double v = vals[static_cast<std::size_t>(i)];
      weighted += v * v / r2;
    }
    weighted *= g.cell_volume();
    const double ratio =
        std::sqrt(weighted) / std::sqrt(grad_sobolev_norm_sq(f, 0));
    CHECK(ratio == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(5e-2));
    CHECK(ratio < 2.0);
  }

  SUBCASE("dimension gate") {
    const Grid line = make_grid(1, 65, 4.0);
    CHECK_THROWS_AS((void)hardy_check(line, 2, 1), std::invalid_argument);
  }
}

TEST_CASE("scale-invariant embedding in three dimensions") {
  const Grid g = make_grid(3, 97, 8.0);

  SUBCASE("sampled fields pass") {
    const Grid small = make_grid(3, 49, 8.0);
    const InequalityReport rep = gn_check(small, 6, 2, 6, 17);
    CHECK(rep.pass);
    CHECK(rep.max_ratio > 0);
  }

  SUBCASE("the Gaussian value is reproduced") {
    const Field f = make_field(
        g, [](const std::array<double, kMaxDim>& x, int c) {
          if (c != 0) return 0.0;
          const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
          return std::exp(-r2 / 2);
        });
    const double ratio =
        lp_norm(f, 6) / std::sqrt(grad_sobolev_norm_sq(f, 0));
    const double expect =
        std::pow(kPi / 3.0, 0.25) / (std::sqrt(1.5) * std::pow(kPi, 0.75));
    CHECK(ratio == doctest::Approx(expect).epsilon(2e-2));
  }

  SUBCASE("exponent relation is enforced") {
    CHECK_THROWS_AS((void)gn_check(g, 4, 2, 2, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)gn_check(g, 3, 1, 2, 1), std::invalid_argument);
    const Grid line = make_grid(1, 65, 4.0);
    CHECK_THROWS_AS((void)gn_check(line, 6, 2, 2, 1), std::invalid_argument);
  }
}

TEST_CASE("pairing bound: branch gates and measured constants") {
  const Grid line = make_grid(1, 257, 8.0);
  const Field odd = sample_function(line, 19, SampleKind::odd_bump, 3.0);

  SUBCASE("mean-zero branch needs its certificate") {
    const InequalityReport rep = pairing_check(odd, DataHypothesis::h3, true,
                                               10, 23);
    CHECK(rep.pass);
    CHECK(rep.samples > 0);
    CHECK(rep.refinement_drift == 0.0);  // single-resolution by design
    CHECK_THROWS_AS((void)pairing_check(odd, DataHypothesis::h3, false, 4, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)pairing_check(odd, DataHypothesis::none, true, 4, 1),
                    std::invalid_argument);
  }

  SUBCASE("integrability branches require three dimensions") {
    CHECK_THROWS_AS((void)pairing_check(odd, DataHypothesis::h1, false, 4, 1),
                    std::invalid_argument);
    const Grid g3 = make_grid(3, 49, 8.0);
    const Field shell = sample_function(g3, 29, SampleKind::shell, 3.0);
    const InequalityReport r1 = pairing_check(shell, DataHypothesis::h1, false,
                                              6, 31);
    const InequalityReport r2 = pairing_check(shell, DataHypothesis::h2, false,
                                              6, 31);
    CHECK(r1.pass);
    CHECK(r2.pass);

    // Caller-side refinement: the measured constant converges ~h^2 with a
    // large constant from the samples' envelope edge layers, so the drift
    // budget needs lattices past the preasymptotic range.
    const Grid mid = make_grid(3, 81, 8.0);
    const Grid fine = make_grid(3, 129, 8.0);
    const InequalityReport r1m = pairing_check(
        sample_function(mid, 29, SampleKind::shell, 3.0), DataHypothesis::h1,
        false, 6, 31);
    const InequalityReport r1f = pairing_check(
        sample_function(fine, 29, SampleKind::shell, 3.0), DataHypothesis::h1,
        false, 6, 31);
    CHECK(relative_drift(r1m.max_ratio, r1f.max_ratio) <= 0.20);
  }

  SUBCASE("a constant shift does not feed the mean-zero pairing") {
    // <g + c, f> = <g, f> when f has zero mean; the lattice sum of an odd
    // sample is zero to round-off, so the shift term is negligible.
    const Field ones = make_field(
        line, [](const std::array<double, kMaxDim>&, int) { return 1.0; });
    const double mean_term = l2_inner(ones, odd);
    CHECK(std::fabs(mean_term) <= 1e-13 * std::sqrt(l2_norm_sq(odd)));
  }

  SUBCASE("hypothesis names are stable registry identifiers") {
    CHECK(hypothesis_name(DataHypothesis::none) == "none");
    CHECK(hypothesis_name(DataHypothesis::h1) == "H1");
    CHECK(hypothesis_name(DataHypothesis::h2) == "H2");
    CHECK(hypothesis_name(DataHypothesis::h3) == "H3");
  }
}
