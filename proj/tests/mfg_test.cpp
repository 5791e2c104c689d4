#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mfguc/errors.hpp"
#include "mfguc/manufactured.hpp"
#include "mfguc/operators.hpp"
#include "mfguc/quadrature.hpp"
#include "support.hpp"

using namespace mfguc;
using namespace mfguc::mfg;
using std::numbers::pi;

namespace {

double interior_time_error(const disc::Field& got, const disc::Field& exact) {
  const auto& g = got.grid();
  double m = 0.0;
  for (int it = 1; it + 1 < g.nt(); ++it) {
    for (std::size_t p = 0; p < g.space_size(); ++p) {
      if (!g.on_boundary(p)) m = std::max(m, std::abs(got.at(p, it) - exact.at(p, it)));
    }
  }
  return m;
}

double l2(const disc::Field& f) { return std::sqrt(disc::integrate(disc::square(f), disc::full_region(f.grid()))); }

}  // namespace

TEST_CASE("P_k on trivial inputs") {
  const auto g = test::make_grid(test::unit_interval(), 17, 9);
  const auto one = disc::constant_field(g, 1.0);
  const auto zero = disc::constant_field(g, 0.0);
  const auto R = linear_lower_order(disc::constant_field(g, 2.0), {disc::constant_field(g, -1.0)});
  for (int k : {1, 2}) {
    CHECK(apply_P(k, one, zero, R).value.max_abs() == 0.0);
    const auto t = disc::sample(g, [](geometry::Point, double t) { return t; });
    const auto p = apply_P(k, one, t).value;
    CHECK(test::max_abs_interior(p - one) < 1e-12);
  }
}

TEST_CASE("P_k on e^{-t} sin(pi x) against its analytic image") {
  // P_1 f = f_t - Lap f, P_2 f = f_t + Lap f
  const auto f_fn = [](geometry::Point x, double t) { return std::exp(-t) * std::sin(pi * x.x1); };
  double prev[2] = {0.0, 0.0};
  for (int n : {17, 33, 65}) {
    const auto g = test::make_grid(test::unit_interval(), n, n);
    const auto f = disc::sample(g, f_fn);
    const auto one = disc::constant_field(g, 1.0);
    for (int k : {1, 2}) {
      const double sign = k == 1 ? 1.0 : -1.0;
      const auto exact = disc::sample(g, [&](geometry::Point x, double t) {
        return -f_fn(x, t) + sign * pi * pi * f_fn(x, t);
      });
      const double err = interior_time_error(apply_P(k, one, f).value, exact);
      if (prev[k - 1] > 0.0) CHECK(prev[k - 1] / err == doctest::Approx(4.0).epsilon(0.1));
      prev[k - 1] = err;
    }
  }
}

TEST_CASE("zero data gives zero solutions") {
  const auto g = test::make_grid(test::unit_interval(), 17, 17);
  MFGProblem p{constant_coefficients(g, 1.0, 1.0, 0.0, 0.0), disc::constant_field(g, 0.0),
               disc::constant_field(g, 0.0), disc::constant_field(g, 0.0), disc::constant_field(g, 0.0)};
  const auto u = solve_u(p);
  CHECK(u.solution.max_abs() == 0.0);
  CHECK(solve_v(p, u.solution).solution.max_abs() == 0.0);

  const auto mc = make_manufactured("zero", g);
  CHECK(mc.u_exact.max_abs() == 0.0);
  CHECK(mc.problem.F.max_abs() == 0.0);
  CHECK(mc.problem.G.max_abs() == 0.0);
}

TEST_CASE("catalogue sources against hand-derived formulas") {
  const auto g = test::make_grid(test::unit_interval(), 9, 5);
  const double t0 = g->t0();
  const auto mc = make_manufactured("1d-nonlinear", g);
  for (std::size_t i = 0; i < mc.problem.F.size(); ++i) {
    const double x = g->point(g->space_of(i)).x1;
    const double tau = g->t(g->time_of(i)) - t0;
    const double eu = std::exp(tau), ev = std::exp(-tau);
    const double F = -pi * pi * eu * std::sin(pi * x) - 0.5 * pi * pi * eu * eu * std::pow(std::cos(pi * x), 2);
    const double v = ev * std::cos(pi * x / 2), vx = -pi / 2 * ev * std::sin(pi * x / 2);
    const double ux = pi * eu * std::cos(pi * x), uxx = -pi * pi * eu * std::sin(pi * x);
    const double G = -v + pi * pi / 4 * v - (vx * ux + v * uxx);
    CHECK(mc.problem.F.values()[i] == doctest::Approx(F));
    CHECK(mc.problem.G.values()[i] == doctest::Approx(G));
  }

  const auto g2 = test::make_grid(test::unit_square(), 9, 5);
  const auto m2 = make_manufactured("2d-smooth", g2);
  for (std::size_t i = 0; i < m2.problem.F.size(); ++i) {
    const auto x = g2->point(g2->space_of(i));
    const double eu = std::exp(g2->t(g2->time_of(i)) - t0);
    const double sx = std::sin(pi * x.x1), sy = std::sin(pi * x.x2), cx = std::cos(pi * x.x1), cy = std::cos(pi * x.x2);
    const double F = -2 * pi * pi * eu * sx * sy - 0.5 * pi * pi * eu * eu * (cx * cx * sy * sy + sx * sx * cy * cy);
    CHECK(m2.problem.F.values()[i] == doctest::Approx(F));
  }

  CHECK_THROWS_AS(make_manufactured("2d-smooth", g), ConfigError);
  CHECK_THROWS_AS(make_manufactured("no-such-case", g), ConfigError);
}

TEST_CASE("manufactured solutions converge at second order") {
  for (const char* id : {"1d-nonlinear", "1d-nonlinear-a2", "1d-linear"}) {
    CAPTURE(id);
    double prev_u = 0.0, prev_v = 0.0;
    for (int k = 0; k < 3; ++k) {
      const auto g = test::make_grid(test::unit_interval(), 16 * (1 << k) + 1, 16 * (1 << (2 * k)) + 1);
      const auto mc = make_manufactured(id, g);
      const auto u = solve_u(mc.problem).solution;
      const auto v = solve_v(mc.problem, u).solution;
      const double eu = l2(u - mc.u_exact), ev = l2(v - mc.v_exact);
      if (k > 0) {
        CHECK(std::log2(prev_u / eu) == doctest::Approx(2.0).epsilon(0.15));
        CHECK(std::log2(prev_v / ev) == doctest::Approx(2.0).epsilon(0.15));
      }
      prev_u = eu;
      prev_v = ev;
    }
  }
}

TEST_CASE("two-dimensional case converges") {
  double prev = 0.0;
  for (int k = 0; k < 2; ++k) {
    const auto g = test::make_grid(test::unit_square(), 8 * (1 << k) + 1, 8 * (1 << (2 * k)) + 1);
    const auto mc = make_manufactured("2d-smooth", g);
    const auto u = solve_u(mc.problem).solution;
    const double e = l2(u - mc.u_exact);
    if (k > 0) CHECK(std::log2(prev / e) > 1.7);
    prev = e;
  }
}

TEST_CASE("strong coupling on a coarse grid fails with a residual history") {
  const auto g = test::make_grid(test::unit_interval(), 9, 9);
  auto mc = make_manufactured("1d-nonlinear", g);
  CHECK_NOTHROW(solve_u(mc.problem));
  mc.problem.coeffs.kappa = disc::constant_field(g, 50.0);
  try {
    solve_u(mc.problem);
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(!e.history().empty());
  }
}

TEST_CASE("difference residual of identical pairs vanishes") {
  const auto g = test::make_grid(test::unit_interval(), 17, 17);
  const auto fx = make_pair_fixture("1d-nonlinear", Perturbation::gamma_flat, g, g->t0());
  const auto zero = disc::constant_field(g, 0.0);
  const auto d = difference_residual(fx.coeffs, fx.reference.u, fx.reference.v, zero, zero, zero, zero);
  CHECK(d.line1.max_abs() == 0.0);
  CHECK(d.line2.max_abs() == 0.0);

  const auto r = mfg_residual(fx.coeffs, fx.perturbed.u, fx.perturbed.v, fx.perturbed.F, fx.perturbed.G);
  CHECK(r.relative1 < 1e-12);
  CHECK(r.relative2 < 1e-12);
  const auto diff = difference_residual(fx.coeffs, fx.reference.u, fx.reference.v, fx.perturbed.u - fx.reference.u,
                                        fx.perturbed.v - fx.reference.v, fx.perturbed.F - fx.reference.F,
                                        fx.perturbed.G - fx.reference.G);
  CHECK(diff.relative1 < 1e-10);
  CHECK(diff.relative2 < 1e-10);
  for (double c : diff.c0) CHECK(std::isfinite(c));
}
