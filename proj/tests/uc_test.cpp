#include <doctest.h>

#include <cmath>

#include "mfguc/carleman.hpp"
#include "mfguc/errors.hpp"
#include "mfguc/operators.hpp"
#include "mfguc/quadrature.hpp"
#include "mfguc/uc.hpp"
#include "support.hpp"

using namespace mfguc;
using namespace mfguc::uc;

namespace {

const mfg::ScalarFn zero_fn = [](geometry::Point, double) { return 0.0; };

DifferencePair pair_from(const disc::GridPtr& g, const mfg::ScalarFn& y, const mfg::ScalarFn& z) {
  const auto fx = mfg::make_pair_from("1d-nonlinear", g, g->t0(), y, z);
  return build_difference(fx.perturbed, fx.reference, fx.coeffs);
}

struct Solved {
  double error;
  ReconstructionResult result;
};

Solved reconstruct(int n, double eta, ReconstructionOptions opt = {}, std::uint64_t seed = 3) {
  const auto g = test::make_grid(test::unit_interval(), n, n);
  const auto w = test::default_weights(*g);
  const auto rc = mfg::make_reconstruction_case(g);
  const auto y = add_noise(disc::extract_cauchy(rc.y_exact), eta, seed);
  const auto z = add_noise(disc::extract_cauchy(rc.z_exact), eta, seed + 1);
  auto res = qr_reconstruct(y, z, rc.dF, rc.dG, rc.coeffs, rc.u_ref, rc.v_ref, w, opt);
  const double err = window_error(res.y, res.z, rc.y_exact, rc.z_exact, g->domain().epsilon_core, w.r);
  return {err, std::move(res)};
}

}  // namespace

TEST_CASE("identical pairs give a zero difference") {
  const auto g = test::make_grid(test::unit_interval(), 17, 17);
  const auto d = pair_from(g, zero_fn, zero_fn);
  CHECK(d.y.max_abs() == 0.0);
  CHECK(d.z.max_abs() == 0.0);
  CHECK(d.line1.max_abs() == 0.0);
  CHECK(d.line2.max_abs() == 0.0);
  const auto M = compute_mismatch(d);
  CHECK(M.M1 == 0.0);
  CHECK(M.M2 == 0.0);
}

TEST_CASE("build_difference rejects pairs that miss their equations") {
  const auto g = test::make_grid(test::unit_interval(), 17, 17);
  auto fx = mfg::make_pair_fixture("1d-nonlinear", mfg::Perturbation::gamma_flat, g, g->t0());
  fx.perturbed.F = fx.perturbed.F + disc::constant_field(g, 0.1);
  CHECK_THROWS_AS(build_difference(fx.perturbed, fx.reference, fx.coeffs), PreconditionError);
}

TEST_CASE("pairs vanishing on the unobserved face have M1 = 0") {
  const auto g = test::make_grid(test::unit_interval(), 33, 33);
  const auto d = pair_from(
      g, [](geometry::Point x, double t) { return (1 - x.x1) * (1 - x.x1) * std::exp(t); }, zero_fn);
  const auto M = compute_mismatch(d);
  CHECK(M.M1 < 1e-25);
  CHECK(M.M2 > 0.1);
}

TEST_CASE("mismatch constants against closed forms") {
  // y = (1 + x) e^{t - t0}, z = 0
  const auto g = test::make_grid(test::unit_interval(), 65, 65);
  const double t0 = g->t0(), delta = g->delta();
  const auto d = pair_from(g, [&](geometry::Point x, double t) { return (1 + x.x1) * std::exp(t - t0); }, zero_fn);
  const auto M = compute_mismatch(d);
  const double M1 = 9.0 * (std::exp(2 * delta) - std::exp(-2 * delta)) / 2.0;
  const double M2 = (7.0 / 3.0 + 1.0) * (std::exp(2 * delta) + std::exp(-2 * delta));
  CHECK(std::abs(M.M1 - M1) / M1 < 5e-3);
  CHECK(std::abs(M.M2 - M2) / M2 < 5e-3);
}

TEST_CASE("bound curve: zero mismatch, stationary point and decay") {
  const auto g = test::make_grid(test::unit_interval(), 33, 33);
  const auto w = test::default_weights(*g);
  const auto s_grid = carleman::linear_s_grid(1.0, 50.0, 491);

  const auto flat = eval_bound({0.0, 0.0}, w, 1.0, s_grid);
  for (double v : flat.value) CHECK(v == 0.0);

  // d/ds (s^2 e^{-2 g s}) = 0 at s = 1/g, where the curve peaks
  const double g_rate = w.mu2 - w.mu1;
  const auto curve = eval_bound({0.0, 1.0}, w, 1.0, s_grid);
  REQUIRE(curve.s_stationary);
  CHECK(*curve.s_stationary == doctest::Approx(1.0 / g_rate).epsilon(1e-6));
  const double h = 1e-4;
  const auto b = [&](double s) { return bound_at({0.0, 1.0}, w, 1.0, s); };
  CHECK(b(*curve.s_stationary) > b(*curve.s_stationary - h));
  CHECK(b(*curve.s_stationary) > b(*curve.s_stationary + h));
  CHECK(curve.s_star == doctest::Approx(50.0));
  CHECK(b(200.0) < b(100.0));
  CHECK(b(100.0) < b(50.0));
  CHECK(bound_at({3.0, 2.0}, w, 1.0, 400.0) < 1e-40);

  CHECK_THROWS_AS(eval_bound({-1.0, 0.0}, w, 1.0, s_grid), ConfigError);
  CHECK_THROWS_AS(eval_bound({0.0, 1.0}, w, 1.0, {}), ConfigError);
}

TEST_CASE("uc_verify on zero and Gamma-violating pairs") {
  const auto g = test::make_grid(test::unit_interval(), 17, 17);
  const auto w = test::default_weights(*g);
  const auto s_grid = carleman::linear_s_grid(1.0, 50.0, 50);
  const auto v = uc_verify(pair_from(g, zero_fn, zero_fn), w, 1.0, s_grid);
  CHECK(v.pass);
  CHECK(v.window_norm == 0.0);
  CHECK(v.bound == 0.0);

  const auto bad = pair_from(g, [](geometry::Point x, double) { return 1.0 - x.x1; }, zero_fn);
  CHECK_THROWS_AS(uc_verify(bad, w, 1.0, s_grid), PreconditionError);
}

TEST_CASE("layer pairs: window norm within the bound") {
  for (int n : {17, 33}) {
    const auto g = test::make_grid(test::unit_interval(), n, n);
    const auto w = test::default_weights(*g);
    const auto fx = mfg::make_pair_fixture("1d-nonlinear", mfg::Perturbation::boundary_layer, g, g->t0(), 1.0, 0.2);
    const auto d = build_difference(fx.perturbed, fx.reference, fx.coeffs);
    const auto v = uc_verify(d, w, 1.0, carleman::linear_s_grid(1.0, 50.0, 50));
    CHECK(v.gamma_trace < 1e-12);
    CHECK(v.M.M1 > 0.0);
    CHECK(v.pass);
  }
}

TEST_CASE("t0 sweep coverage") {
  const auto pass = [](double) {
    UCVerdict v;
    v.pass = true;
    return v;
  };
  const double T = 2.0, delta = 0.25, r = 0.25;
  const auto one = sweep_t0(pass, T, delta, r, 1);
  REQUIRE(one.cells.size() == 1);
  CHECK(one.cells[0].t0 == doctest::Approx(T / 2));

  const auto ten = sweep_t0(pass, T, delta, r, 10);
  CHECK(ten.target_lo == doctest::Approx((1 - r) * delta));
  CHECK(ten.target_hi == doctest::Approx(T - (1 - r) * delta));
  CHECK(std::abs(ten.union_lo - ten.target_lo) <= ten.granularity + 1e-12);
  CHECK(std::abs(ten.union_hi - ten.target_hi) <= ten.granularity + 1e-12);
  CHECK(ten.all_pass);

  const auto sparse = sweep_t0(pass, 10.0, delta, r, 3);
  CHECK_FALSE(sparse.contiguous);

  const auto mixed = sweep_t0([](double t0) {
    UCVerdict v;
    v.pass = t0 < 1.0;
    return v;
  }, T, delta, r, 10, 2);
  CHECK_FALSE(mixed.all_pass);
  CHECK_THROWS_AS(sweep_t0(pass, 0.5, delta, r, 4), ConfigError);
}

TEST_CASE("frozen residual of the analytic reconstruction case is O(h^2)") {
  double prev = 0.0;
  for (int n : {17, 33, 65}) {
    const auto g = test::make_grid(test::unit_interval(), n, n);
    const auto rc = mfg::make_reconstruction_case(g);
    const auto r = frozen_residual(rc.coeffs, rc.u_ref, rc.v_ref, rc.y_exact, rc.z_exact, rc.dF, rc.dG);
    double err = 0.0;
    for (int it = 1; it + 1 < g->nt(); ++it) {
      for (std::size_t p = 1; p + 1 < g->space_size(); ++p) {
        err = std::max({err, std::abs(r.line1.at(p, it)), std::abs(r.line2.at(p, it))});
      }
    }
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.15));
    prev = err;
  }
}

TEST_CASE("reconstruction from zero data is zero") {
  const auto g = test::make_grid(test::unit_interval(), 17, 17);
  const auto w = test::default_weights(*g);
  const auto rc = mfg::make_reconstruction_case(g);
  const auto zero = disc::constant_field(g, 0.0);
  const auto data = disc::extract_cauchy(zero);
  const auto res = qr_reconstruct(data, data, zero, zero, rc.coeffs, rc.u_ref, rc.v_ref, w);
  CHECK(res.y.max_abs() == 0.0);
  CHECK(res.z.max_abs() == 0.0);
  CHECK(res.functional == 0.0);
}

TEST_CASE("reconstruction converges under refinement and degrades with noise") {
  const double e17 = reconstruct(17, 0.0).error;
  const double e33 = reconstruct(33, 0.0).error;
  CHECK(e17 / e33 > 1.8);
  CHECK(reconstruct(17, 0.0, {}, 99).error == e17);

  double prev = reconstruct(33, 1e-1).error;
  for (double eta : {1e-2, 1e-3}) {
    const double e = reconstruct(33, eta).error;
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev > e33);
}

TEST_CASE("reconstruction options") {
  ReconstructionOptions ic;
  ic.preconditioner = Preconditioner::incomplete_cholesky;
  const auto a = reconstruct(17, 0.0);
  const auto b = reconstruct(17, 0.0, ic);
  CHECK(b.error == doctest::Approx(a.error).epsilon(1e-3));

  ReconstructionOptions starved;
  starved.max_iter = 1;
  starved.preconditioner = Preconditioner::incomplete_cholesky;
  try {
    reconstruct(17, 0.0, starved);
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(!e.history().empty());
  }

  ReconstructionOptions bad;
  bad.s = 0.0;
  CHECK_THROWS_AS(reconstruct(17, 0.0, bad), ConfigError);
}

TEST_CASE("noise is reproducible and scaled by eta") {
  const auto g = test::make_grid(test::unit_interval(), 17, 17);
  const auto data = disc::extract_cauchy(mfg::make_reconstruction_case(g).y_exact);
  const auto a = add_noise(data, 1e-2, 5);
  const auto b = add_noise(data, 1e-2, 5);
  const auto c = add_noise(data, 1e-1, 5);
  const auto same = add_noise(data, 0.0, 5);
  for (std::size_t k = 0; k < data.gamma[0].value.size(); ++k) {
    CHECK(a.gamma[0].value[k] == b.gamma[0].value[k]);
    CHECK(same.gamma[0].value[k] == data.gamma[0].value[k]);
    CHECK(c.gamma[0].value[k] - data.gamma[0].value[k] ==
          doctest::Approx(10.0 * (a.gamma[0].value[k] - data.gamma[0].value[k])));
  }
}
