#include "mfguc/manufactured.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "mfguc/errors.hpp"

namespace mfguc::mfg {

namespace {

using geometry::Point;
constexpr double pi = std::numbers::pi;

ScalarFn constant(double c) {
  return [c](Point, double) { return c; };
}

// u = e^tau sin(pi x), v = e^-tau cos(pi x / 2) with tau = t - t_ref.
double u1(Point x, double tau) { return std::exp(tau) * std::sin(pi * x.x1); }
double v1(Point x, double tau) { return std::exp(-tau) * std::cos(0.5 * pi * x.x1); }

double F_nonlinear_1d(Point x, double tau) {
  const double c = std::cos(pi * x.x1);
  return pi * pi * (-0.5 * std::exp(tau) * c * c - std::sin(pi * x.x1)) * std::exp(tau);
}

}  // namespace

std::vector<std::string> catalogue() { return {"zero", "1d-linear", "1d-nonlinear", "1d-nonlinear-a2", "2d-smooth"}; }

AnalyticCase analytic_case(std::string_view id, double t_ref) {
  AnalyticCase c;
  c.id = std::string(id);
  const auto shift = [t_ref](double (*f)(Point, double)) {
    return [f, t_ref](Point x, double t) { return f(x, t - t_ref); };
  };
  if (id == "zero") {
    c.dimension = 0;  // any
    c.u = c.v = c.F = c.G = constant(0.0);
    c.a1 = c.a2 = constant(1.0);
    c.kappa = c.h = constant(0.0);
    return c;
  }
  if (id == "1d-linear") {
    c.dimension = 1;
    c.u = shift(u1);
    c.v = shift(v1);
    c.a1 = constant(1.0);
    c.a2 = [](Point x, double) { return 1.0 + 0.5 * x.x1; };
    c.kappa = constant(0.0);
    c.h = constant(1.0);
    c.F = shift([](Point x, double tau) { return -pi * pi * std::exp(tau) * std::sin(pi * x.x1); });
    c.G = shift([](Point x, double tau) {
      const double s = std::sin(0.5 * pi * x.x1), co = std::cos(0.5 * pi * x.x1);
      return (pi * pi / 8.0 * (x.x1 + 2.0) * co + 0.5 * pi * s - co) * std::exp(-tau);
    });
    return c;
  }
  if (id == "1d-nonlinear") {
    c.dimension = 1;
    c.u = shift(u1);
    c.v = shift(v1);
    c.a1 = c.a2 = c.kappa = c.h = constant(1.0);
    c.F = shift(F_nonlinear_1d);
    c.G = shift([](Point x, double tau) {
      const double s = std::sin(0.5 * pi * x.x1), s3 = std::sin(1.5 * pi * x.x1), co = std::cos(0.5 * pi * x.x1);
      return 0.25 * (pi * pi * (s + 3.0 * s3) * std::exp(tau) - 4.0 * co + pi * pi * co) * std::exp(-tau);
    });
    return c;
  }
  if (id == "1d-nonlinear-a2") {
    c.dimension = 1;
    c.u = shift(u1);
    c.v = shift(v1);
    c.a1 = c.kappa = c.h = constant(1.0);
    c.a2 = [](Point x, double) { return 1.0 + 0.5 * x.x1; };
    c.F = shift(F_nonlinear_1d);
    c.G = shift([](Point x, double tau) {
      const double s = std::sin(0.5 * pi * x.x1), s3 = std::sin(1.5 * pi * x.x1), co = std::cos(0.5 * pi * x.x1);
      return 0.125 *
             (pi * pi * (x.x1 + 2.0) * co + 2.0 * pi * pi * (s + 3.0 * s3) * std::exp(tau) + 4.0 * pi * s - 8.0 * co) *
             std::exp(-tau);
    });
    return c;
  }
  if (id == "2d-smooth") {
    c.dimension = 2;
    c.u = shift([](Point x, double tau) { return std::exp(tau) * std::sin(pi * x.x1) * std::sin(pi * x.x2); });
    c.v = shift([](Point x, double tau) {
      return std::exp(-tau) * std::cos(0.5 * pi * x.x1) * std::cos(0.5 * pi * x.x2);
    });
    c.a1 = c.a2 = c.kappa = c.h = constant(1.0);
    c.F = shift([](Point x, double tau) {
      const double sx = std::sin(pi * x.x1), sy = std::sin(pi * x.x2);
      const double cx = std::cos(pi * x.x1), cy = std::cos(pi * x.x2);
      const double e = std::exp(tau);
      return 0.5 * pi * pi * (-e * sx * sx * cy * cy - e * sy * sy * cx * cx - 4.0 * sx * sy) * e;
    });
    c.G = shift([](Point x, double tau) {
      const auto s = [](double k, double q) { return std::sin(k * pi * q); };
      const double ch = std::cos(0.5 * pi * x.x1) * std::cos(0.5 * pi * x.x2);
      const double mix = 0.5 * s(0.5, x.x1) * s(0.5, x.x2) + s(0.5, x.x1) * s(1.5, x.x2) +
                         s(1.5, x.x1) * s(0.5, x.x2) + 1.5 * s(1.5, x.x1) * s(1.5, x.x2);
      return (0.5 * pi * pi * mix * std::exp(tau) - ch + 0.5 * pi * pi * ch) * std::exp(-tau);
    });
    return c;
  }
  throw ConfigError(fmt::format("unknown manufactured case '{}'", id));
}

ManufacturedCase make_manufactured(std::string_view id, const disc::GridPtr& grid) {
  return make_manufactured(id, grid, grid->t0());
}

ManufacturedCase make_manufactured(std::string_view id, const disc::GridPtr& grid, double t_ref) {
  const auto c = analytic_case(id, t_ref);
  if (c.dimension != 0 && c.dimension != grid->dimension()) {
    throw ConfigError(fmt::format("case '{}' needs a {}D grid", id, c.dimension));
  }
  using disc::FieldRole;
  MFGCoefficients coeffs{disc::sample(grid, c.a1, FieldRole::coefficient),
                         disc::sample(grid, c.a2, FieldRole::coefficient),
                         disc::sample(grid, c.kappa, FieldRole::coefficient),
                         disc::sample(grid, c.h, FieldRole::coefficient), 0.0};
  Field u = disc::sample(grid, c.u, FieldRole::u);
  Field v = disc::sample(grid, c.v, FieldRole::v);
  MFGProblem pb{coeffs, disc::sample(grid, c.F, FieldRole::source), disc::sample(grid, c.G, FieldRole::source),
                u, v};
  return {pb, u, v};
}

namespace {

double tangential_factor(const disc::SpaceTimeGrid& g, Point x) {
  if (g.dimension() == 1) return 1.0;
  // the unobserved face is normal to the axis along which d varies
  const auto& grad = g.aux().gradient();
  const int tangent = grad[0] != 0.0 ? 1 : 0;
  // (1 - r^2)^4 on the middle 60% of the face: identically zero next to the
  // observed side faces, so their discrete traces vanish exactly
  const double L = g.domain().extents[tangent];
  const double r = ((tangent == 0 ? x.x1 : x.x2) - 0.5 * L) / (0.3 * L);
  if (std::abs(r) >= 1.0) return 0.0;
  const double q = 1.0 - r * r;
  return q * q * q * q;
}

double shape_profile(Perturbation shape, const disc::SpaceTimeGrid& g, Point x, double layer) {
  const double d = g.aux()(x);
  if (shape == Perturbation::gamma_flat) {
    const double q = g.aux().max_value() - d;
    return q * q;
  }
  if (d >= layer) return 0.0;
  const double q = 1.0 - d / layer;
  return q * q * q * q;
}

}  // namespace

ScalarFn perturbation_y(Perturbation shape, const disc::SpaceTimeGrid& grid, double t_ref, double amplitude,
                        double layer) {
  return [shape, &grid, t_ref, amplitude, layer](Point x, double t) {
    return amplitude * shape_profile(shape, grid, x, layer) * tangential_factor(grid, x) * std::exp(t - t_ref);
  };
}

ScalarFn perturbation_z(Perturbation shape, const disc::SpaceTimeGrid& grid, double t_ref, double amplitude,
                        double layer) {
  return [shape, &grid, t_ref, amplitude, layer](Point x, double t) {
    return amplitude * shape_profile(shape, grid, x, layer) * tangential_factor(grid, x) *
           (1.0 + 0.5 * std::sin(t - t_ref));
  };
}

PairFixture make_pair_from(std::string_view case_id, const disc::GridPtr& grid, double t_ref, const ScalarFn& yfn,
                           const ScalarFn& zfn) {
  auto base = make_manufactured(case_id, grid, t_ref);
  const auto& c = base.problem.coeffs;
  const Field u_pert = (base.u_exact + disc::sample(grid, yfn)).with_role(disc::FieldRole::u);
  const Field v_pert = (base.v_exact + disc::sample(grid, zfn)).with_role(disc::FieldRole::v);
  auto src_ref = apply_mfg(c, base.u_exact, base.v_exact);
  auto src_per = apply_mfg(c, u_pert, v_pert);
  return {c,
          {u_pert, v_pert, src_per.line1.with_role(disc::FieldRole::source),
           src_per.line2.with_role(disc::FieldRole::source)},
          {base.u_exact, base.v_exact, src_ref.line1.with_role(disc::FieldRole::source),
           src_ref.line2.with_role(disc::FieldRole::source)}};
}

PairFixture make_pair_fixture(std::string_view case_id, Perturbation shape, const disc::GridPtr& grid,
                              double t_ref, double amplitude, double layer) {
  if (shape == Perturbation::boundary_layer && !(layer > 0.0)) {
    throw ConfigError("boundary-layer perturbation needs a positive layer width");
  }
  return make_pair_from(case_id, grid, t_ref, perturbation_y(shape, *grid, t_ref, amplitude, layer),
                        perturbation_z(shape, *grid, t_ref, amplitude, layer));
}

ReconstructionCase make_reconstruction_case(const disc::GridPtr& grid) {
  if (grid->dimension() != 1) throw ConfigError("the reconstruction fixture is one-dimensional");
  const double t_ref = grid->t0();
  auto base = make_manufactured("1d-nonlinear-a2", grid, t_ref);
  using disc::FieldRole;
  const auto yfn = [t_ref](Point x, double t) { return std::exp(t - t_ref) * std::cos(pi * x.x1); };
  const auto zfn = [t_ref](Point x, double t) {
    return std::exp(-(t - t_ref)) * (1.0 + x.x1) * std::sin(0.5 * pi * x.x1);
  };
  const auto dFfn = [t_ref](Point x, double t) {
    const double e = std::exp(t - t_ref);
    return pi * pi * (e * std::sin(pi * x.x1) - 1.0) * e * std::cos(pi * x.x1);
  };
  const auto dGfn = [t_ref](Point p, double t) {
    const double x = p.x1;
    const double em = std::exp(-(t - t_ref));
    const double sh = std::sin(0.5 * pi * x), chh = std::cos(0.5 * pi * x);
    const double s1 = std::sin(pi * x), c1 = std::cos(pi * x);
    const double pi2 = pi * pi;
    return pi2 / 8.0 * x * x * em * sh + pi2 * x * sh * s1 - 0.5 * pi2 * x * chh * c1 - x * em * sh +
           3.0 / 8.0 * pi2 * x * em * sh - pi * x * em * chh + 0.5 * pi2 * sh * s1 - pi * sh * c1 +
           0.5 * pi2 * chh * c1 - 2.0 * em * sh + 0.25 * pi2 * em * sh - 1.5 * pi * em * chh;
  };
  return {base.problem.coeffs,
          base.u_exact,
          base.v_exact,
          disc::sample(grid, yfn, FieldRole::y),
          disc::sample(grid, zfn, FieldRole::z),
          disc::sample(grid, dFfn, FieldRole::source),
          disc::sample(grid, dGfn, FieldRole::source)};
}

Field compact_bump(const disc::GridPtr& grid, geometry::Point centre, double radius, double time_radius) {
  const auto bump = [](double r) {
    if (std::abs(r) >= 1.0) return 0.0;
    const double q = 1.0 - r * r;
    return q * q * q * q;
  };
  const double t0 = grid->t0();
  const int dim = grid->dimension();
  return disc::sample(grid, [=](Point x, double t) {
    double v = bump((x.x1 - centre.x1) / radius) * bump((t - t0) / time_radius);
    if (dim == 2) v *= bump((x.x2 - centre.x2) / radius);
    return v;
  });
}

}  // namespace mfguc::mfg
