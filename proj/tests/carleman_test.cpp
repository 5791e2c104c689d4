#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "mfguc/carleman.hpp"
#include "mfguc/errors.hpp"
#include "mfguc/manufactured.hpp"
#include "support.hpp"

using namespace mfguc;
using namespace mfguc::carleman;

namespace {

Theorem2Input pair_input(const mfg::PairFixture& fx) {
  return {fx.coeffs,
          fx.reference.u,
          fx.reference.v,
          fx.perturbed.u - fx.reference.u,
          fx.perturbed.v - fx.reference.v,
          fx.perturbed.F - fx.reference.F,
          fx.perturbed.G - fx.reference.G};
}

Lemma1Input bump_input(const disc::GridPtr& g) {
  return {mfg::compact_bump(g, {0.5, 0.5}, 0.3, 0.6 * g->delta()), disc::constant_field(g, 1.0), {}};
}

}  // namespace

TEST_CASE("B vanishes for zero and compactly supported fields") {
  const auto g = test::make_grid(test::unit_interval(), 33, 33);
  const auto w = test::default_weights(*g);
  BoundaryFunctionalParams p;
  p.C_B = 1.0;
  CHECK(eval_B(disc::constant_field(g, 0.0), 2.0, w, p).total().is_zero());
  const auto bump = bump_input(g).f;
  CHECK(bump.max_abs() > 0.1);
  CHECK(eval_B(bump, 2.0, w, p).total().to_double() < 1e-24);
}

TEST_CASE("B against closed-form and quadrature oracles") {
  // f = (1 + x + x^2) e^{t - t0}; Gamma = {x = 0}, unobserved face x = 1
  const auto g = test::make_grid(test::unit_interval(), 65, 65);
  const auto w = test::default_weights(*g);
  const double t0 = g->t0(), delta = g->delta(), s = 1.0;
  const auto f = disc::sample(g, [&](geometry::Point x, double t) {
    return (1.0 + x.x1 + x.x1 * x.x1) * std::exp(t - t0);
  });
  BoundaryFunctionalParams p;
  p.C_B = 1.0;
  const auto B = eval_B(f, s, w, p);
  const double time_int = std::exp(2 * delta) - std::exp(-2 * delta);  // 2 int e^{2 tau}
  const double gamma = std::exp(p.C_B * s) * time_int;
  const double complement = s * s * s * std::exp(2 * s) * 27.0 * time_int / 2.0;
  const auto phi_low = [&](double x) { return geometry::eval_phi(1.0 - x, t0 - delta, w).phi; };
  const double slices = s * s * (std::exp(-2 * delta) + std::exp(2 * delta)) *
                        test::simpson(
                            [&](double x) {
                              const double q = 1 + x + x * x, qx = 1 + 2 * x;
                              return (q * q + qx * qx) * std::exp(2 * s * phi_low(x));
                            },
                            0.0, 1.0, 2000);
  CHECK(std::abs(B.gamma.to_double() - gamma) / gamma < 5e-3);
  CHECK(std::abs(B.complement.to_double() - complement) / complement < 5e-3);
  CHECK(std::abs(B.slices.to_double() - slices) / slices < 5e-3);

  p.include_slices = false;
  CHECK(eval_B(f, s, w, p).slices.is_zero());
}

TEST_CASE("B on a 2D sin product matches an 8x finer grid") {
  const auto fn = [](geometry::Point x, double t) {
    return std::exp(t) * (std::sin(2.0 * x.x1) + 0.5) * std::cos(1.5 * x.x2);
  };
  BoundaryFunctionalParams p;
  p.C_B = 1.0;
  const auto total = [&](int n, int nt) {
    const auto g = test::make_grid(test::unit_square(), n, nt);
    return eval_B(disc::sample(g, fn), 1.0, test::default_weights(*g), p).total().to_double();
  };
  const double coarse = total(33, 33);
  const double fine = total(8 * 32 + 1, 8 * 32 + 1);
  CHECK(std::abs(coarse - fine) / fine < 5e-3);
}

TEST_CASE("Lemma 1 on the zero field has no ratio") {
  const auto g = test::make_grid(test::unit_interval(), 17, 17);
  const auto w = test::default_weights(*g);
  const auto z = disc::constant_field(g, 0.0);
  const auto row = eval_lemma1(1, z, disc::constant_field(g, 1.0), {}, 3.0, w);
  CHECK(row.lhs.is_zero());
  CHECK(row.rhs_source.is_zero());
  CHECK_FALSE(row.ratio.has_value());

  std::ostringstream csv;
  CarlemanReport rep;
  rep.rows = {row};
  write_report_csv(csv, rep, "# header\n");
  CHECK(csv.str().find("s,lhs,rhs_source,B1,B2,B3,ratio,normalizer") != std::string::npos);
  CHECK(csv.str().find(",NA,") != std::string::npos);
}

TEST_CASE("Lemma 1 with k = 2 is Lemma 1 with k = 1 on the reversed field") {
  const auto g = test::make_grid(test::unit_interval(), 33, 33);
  const auto w = test::default_weights(*g);
  const auto f = disc::sample(g, [](geometry::Point x, double t) { return std::exp(2 * t) * x.x1 * (1.3 - x.x1); });
  const auto a = disc::sample(g, [](geometry::Point x, double t) { return 1.0 + 0.3 * x.x1 + 0.1 * t; });
  BoundaryFunctionalParams p;
  p.C_B = 2.0;
  for (double s : {1.0, 10.0, 40.0}) {
    const auto k2 = eval_lemma1(2, f, a, {}, s, w, p);
    const auto k1 = eval_lemma1(1, disc::time_reversed(f), disc::time_reversed(a), {}, s, w, p);
    REQUIRE(k1.ratio);
    REQUIRE(k2.ratio);
    CHECK(*k1.ratio == doctest::Approx(*k2.ratio).epsilon(1e-12));
    CHECK(disc::ratio(k1.lhs, k2.lhs) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(disc::ratio(k1.B.total(), k2.B.total()) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("Lemma 1 is homogeneous of degree two") {
  const auto g = test::make_grid(test::unit_interval(), 33, 33);
  const auto w = test::default_weights(*g);
  const auto in = bump_input(g);
  const auto r1 = eval_lemma1(1, in.f, in.a, {}, 5.0, w);
  const auto r2 = eval_lemma1(1, in.f * 3.0, in.a, {}, 5.0, w);
  CHECK(disc::ratio(r2.lhs, r1.lhs) == doctest::Approx(9.0));
  CHECK(disc::ratio(r2.rhs_source, r1.rhs_source) == doctest::Approx(9.0));
  CHECK(*r2.ratio == doctest::Approx(*r1.ratio));
}

TEST_CASE("overflow guard") {
  const auto g = test::make_grid(test::unit_interval(), 65, 65);
  const auto w = test::default_weights(*g);
  const double smax = max_admissible_s(*g, w);
  // phi_max = e^{lambda d1} at t0, phi_min = e^{-lambda beta delta^2} at x = 1, t = t0 -+ delta
  const double phi_span = std::exp(w.lambda * w.d1) - std::exp(-w.lambda * w.beta * w.delta * w.delta);
  CHECK(smax == doctest::Approx(300.0 / phi_span));
  CHECK_NOTHROW(check_overflow_guard(*g, w, smax));
  try {
    eval_lemma1(1, bump_input(g).f, disc::constant_field(g, 1.0), {}, 1.01 * smax, w);
    FAIL("expected OverflowGuardError");
  } catch (const OverflowGuardError& e) {
    CHECK(e.max_admissible_s() == doctest::Approx(smax));
  }
  CHECK_THROWS_AS(eval_lemma1(1, bump_input(g).f, disc::constant_field(g, 1.0), {}, 0.0, w), ConfigError);
}

TEST_CASE("Theorem 2 on trivial inputs and homogeneity of the source term") {
  const auto g = test::make_grid(test::unit_interval(), 33, 33);
  const auto w = test::default_weights(*g);
  const auto fx = mfg::make_pair_fixture("1d-nonlinear", mfg::Perturbation::gamma_flat, g, g->t0());
  auto zero = pair_input(fx);
  zero.y = zero.z = zero.dF = zero.dG = disc::constant_field(g, 0.0);
  const auto r0 = eval_theorem2(zero, 2.0, w);
  CHECK(r0.lhs.is_zero());
  CHECK(r0.rhs_source.is_zero());
  CHECK_FALSE(r0.ratio.has_value());

  auto in = pair_input(fx);
  const auto base = eval_theorem2(in, 2.0, w);
  in.dF = in.dF * 2.0;
  in.dG = in.dG * 2.0;
  in.residual_tol = std::numeric_limits<double>::infinity();
  const auto doubled = eval_theorem2(in, 2.0, w);
  CHECK(disc::ratio(doubled.rhs_source, base.rhs_source) == doctest::Approx(4.0).epsilon(1e-13));

  in.residual_tol = 1e-8;
  CHECK_THROWS_AS(eval_theorem2(in, 2.0, w), PreconditionError);
}

TEST_CASE("Gamma-flat pairs contribute nothing on Gamma") {
  const auto g = test::make_grid(test::unit_interval(), 33, 33);
  const auto w = test::default_weights(*g);
  const auto in = pair_input(mfg::make_pair_fixture("1d-nonlinear", mfg::Perturbation::gamma_flat, g, g->t0()));
  BoundaryFunctionalParams p;
  p.C_B = 1.0;
  const auto By = eval_B(in.y, 2.0, w, p);
  CHECK(By.gamma.to_double() < 1e-25);
  CHECK(By.complement.to_double() > 0.0);
}

TEST_CASE("sweeps: flags, errors and stability under refinement") {
  CHECK_THROWS_AS(sweep_s(Estimate::lemma1_k1, bump_input(test::make_grid(test::unit_interval(), 9, 9)), {},
                          test::default_weights(*test::make_grid(test::unit_interval(), 9, 9))),
                  ConfigError);
  CHECK(parse_estimate("theorem2") == Estimate::theorem2);
  CHECK_THROWS_AS(parse_estimate("lemma3"), ConfigError);

  for (auto est : {Estimate::lemma1_k1, Estimate::theorem2}) {
    CAPTURE(to_string(est));
    std::vector<double> c;
    for (int n : {33, 65}) {
      const auto g = test::make_grid(test::unit_interval(), n, n);
      const auto w = test::default_weights(*g);
      const auto s_grid = linear_s_grid(1.0, 50.0, 25);
      const EstimateInput in =
          est == Estimate::theorem2
              ? EstimateInput(pair_input(mfg::make_pair_fixture("1d-nonlinear", mfg::Perturbation::gamma_flat, g, g->t0())))
              : EstimateInput(bump_input(g));
      const auto rep = sweep_s(est, in, s_grid, w);
      CHECK(rep.all_finite);
      CHECK(rep.bounded);
      CHECK(rep.rows.size() == s_grid.size());
      REQUIRE(rep.C_emp);
      c.push_back(*rep.C_emp);

      const auto parallel = sweep_s(est, in, s_grid, w, {}, 3);
      for (std::size_t i = 0; i < rep.rows.size(); ++i) CHECK(*parallel.rows[i].ratio == *rep.rows[i].ratio);
    }
    CHECK(std::abs(c[1] - c[0]) / c[0] < 0.25);
  }
}
