#include "mfguc/mfg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <fmt/format.h>

#include "mfguc/errors.hpp"
#include "mfguc/operators.hpp"

namespace mfguc::mfg {

using disc::FieldRole;
using disc::SpaceTimeGrid;

void MFGCoefficients::validate() const {
  for (const Field* f : {&a2, &kappa, &h}) disc::require_same_grid(a1, *f);
  for (const Field* f : {&a1, &a2, &kappa, &h}) {
    if (!f->finite()) throw ConfigError("MFG coefficients must be finite");
  }
  const auto positive = [](const Field& f) {
    return std::all_of(f.values().begin(), f.values().end(), [](double v) { return v > 0.0; });
  };
  if (!positive(a1)) throw ConfigError("a1 must be positive at every node");
  if (!positive(a2)) throw ConfigError("a2 must be positive at every node");
}

MFGCoefficients constant_coefficients(const disc::GridPtr& grid, double a1, double a2, double kappa,
                                      double h) {
  return {disc::constant_field(grid, a1, FieldRole::coefficient),
          disc::constant_field(grid, a2, FieldRole::coefficient),
          disc::constant_field(grid, kappa, FieldRole::coefficient),
          disc::constant_field(grid, h, FieldRole::coefficient), 0.0};
}

namespace {

// Coefficients of  c w - D Lap w + b . grad w = rhs  on one time level,
// with Dirichlet values on boundary nodes.
struct StepSystem {
  std::vector<double> c;
  std::vector<double> D;
  std::array<std::vector<double>, 2> b;
  std::vector<double> rhs;        // interior rows
  std::vector<double> boundary;   // Dirichlet values (boundary rows)
};

StepSystem make_system(const SpaceTimeGrid& g) {
  const std::size_t n = g.space_size();
  StepSystem s;
  s.c.assign(n, 0.0);
  s.D.assign(n, 0.0);
  s.b[0].assign(n, 0.0);
  s.b[1].assign(n, 0.0);
  s.rhs.assign(n, 0.0);
  s.boundary.assign(n, 0.0);
  return s;
}

std::vector<double> solve_tridiagonal(const SpaceTimeGrid& g, const StepSystem& s) {
  const int n = g.n1();
  const double h = g.h(0);
  std::vector<double> lower(n, 0.0), diag(n, 1.0), upper(n, 0.0), rhs(n, 0.0);
  rhs[0] = s.boundary[0];
  rhs[n - 1] = s.boundary[n - 1];
  for (int i = 1; i < n - 1; ++i) {
    const double diff = s.D[i] / (h * h);
    const double conv = s.b[0][i] / (2.0 * h);
    lower[i] = -diff - conv;
    diag[i] = s.c[i] + 2.0 * diff;
    upper[i] = -diff + conv;
    rhs[i] = s.rhs[i];
  }
  // Thomas algorithm
  for (int i = 1; i < n; ++i) {
    if (std::abs(diag[i - 1]) < 1e-300) throw NumericalError("singular linear system in time step");
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  if (std::abs(diag[n - 1]) < 1e-300) throw NumericalError("singular linear system in time step");
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (int i = n - 2; i >= 0; --i) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  return x;
}

std::vector<double> solve_sparse(const SpaceTimeGrid& g, const StepSystem& s) {
  const auto n = static_cast<int>(g.space_size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 5);
  Eigen::VectorXd rhs(n);
  const double hx = g.h(0), hy = g.h(1);
  for (int p = 0; p < n; ++p) {
    const auto pu = static_cast<std::size_t>(p);
    if (g.on_boundary(pu)) {
      trip.emplace_back(p, p, 1.0);
      rhs[p] = s.boundary[pu];
      continue;
    }
    const double dx = s.D[pu] / (hx * hx), dy = s.D[pu] / (hy * hy);
    const double cx = s.b[0][pu] / (2.0 * hx), cy = s.b[1][pu] / (2.0 * hy);
    const int n1 = g.n1();
    trip.emplace_back(p, p, s.c[pu] + 2.0 * dx + 2.0 * dy);
    trip.emplace_back(p, p - 1, -dx - cx);
    trip.emplace_back(p, p + 1, -dx + cx);
    trip.emplace_back(p, p - n1, -dy - cy);
    trip.emplace_back(p, p + n1, -dy + cy);
    rhs[p] = s.rhs[pu];
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw NumericalError("singular linear system in time step");
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw NumericalError("linear solve failed in time step");
  return {x.data(), x.data() + n};
}

std::vector<double> solve_step(const SpaceTimeGrid& g, const StepSystem& s) {
  return g.dimension() == 1 ? solve_tridiagonal(g, s) : solve_sparse(g, s);
}

// Central difference of a single time level at an interior space node.
double slice_partial(const SpaceTimeGrid& g, const std::vector<double>& w, std::size_t p, int axis) {
  const std::size_t stride = axis == 0 ? 1 : static_cast<std::size_t>(g.n1());
  return (w[p + stride] - w[p - stride]) / (2.0 * g.h(axis));
}

double interior_l2(const Field& f) {
  const auto& g = f.grid();
  double acc = 0.0;
  for (int it = 1; it < g.nt() - 1; ++it) {
    for (std::size_t p = 0; p < g.space_size(); ++p) {
      if (!g.on_boundary(p)) acc += f.at(p, it) * f.at(p, it);
    }
  }
  double cell = g.tau();
  for (int a = 0; a < g.dimension(); ++a) cell *= g.h(a);
  return std::sqrt(acc * cell);
}

double interior_max(const Field& f) {
  const auto& g = f.grid();
  double m = 0.0;
  for (int it = 1; it < g.nt() - 1; ++it) {
    for (std::size_t p = 0; p < g.space_size(); ++p) {
      if (!g.on_boundary(p)) m = std::max(m, std::abs(f.at(p, it)));
    }
  }
  return m;
}

void check_problem(const MFGProblem& pb) {
  pb.coeffs.validate();
  for (const Field* f : {&pb.F, &pb.G, &pb.u_data, &pb.v_data}) disc::require_same_grid(pb.coeffs.a1, *f);
}

}  // namespace

SolveResult solve_u(const MFGProblem& pb, const SolverOptions& options) {
  check_problem(pb);
  const auto& g = pb.coeffs.a1.grid();
  const std::size_t ns = g.space_size();
  const double tau = g.tau();
  Field u(pb.coeffs.a1.grid_ptr(), FieldRole::u);
  for (std::size_t p = 0; p < ns; ++p) u.at(p, g.nt() - 1) = pb.u_data.at(p, g.nt() - 1);

  int max_used = 0;
  std::vector<double> next(ns), w(ns);
  for (int it = g.nt() - 2; it >= 0; --it) {
    for (std::size_t p = 0; p < ns; ++p) {
      next[p] = u.at(p, it + 1);
      w[p] = g.on_boundary(p) ? pb.u_data.at(p, it) : next[p];
    }
    StepSystem s = make_system(g);
    for (std::size_t p = 0; p < ns; ++p) {
      s.c[p] = 1.0 / tau + pb.coeffs.h.at(p, it);
      s.D[p] = pb.coeffs.a1.at(p, it);
      s.rhs[p] = next[p] / tau - pb.F.at(p, it);
      s.boundary[p] = pb.u_data.at(p, it);
    }
    std::vector<double> history;
    bool converged = false;
    for (int k = 0; k < options.max_inner; ++k) {
      for (std::size_t p = 0; p < ns; ++p) {
        if (g.on_boundary(p)) continue;
        for (int a = 0; a < g.dimension(); ++a) {
          s.b[a][p] = 0.5 * pb.coeffs.kappa.at(p, it) * slice_partial(g, w, p, a);
        }
      }
      std::vector<double> w_new = solve_step(g, s);
      double diff = 0.0, scale = 1.0;
      for (std::size_t p = 0; p < ns; ++p) {
        diff = std::max(diff, std::abs(w_new[p] - w[p]));
        scale = std::max(scale, std::abs(w_new[p]));
      }
      w = std::move(w_new);
      history.push_back(diff);
      if (!std::isfinite(diff)) break;
      if (diff <= options.tol_inner * scale) {
        converged = true;
        max_used = std::max(max_used, k + 1);
        break;
      }
    }
    if (!converged) {
      throw NonConvergence(
          fmt::format("inner fixed-point iteration for u did not converge at t={} after {} iterations "
                      "(last increment {})",
                      g.t(it), history.size(), history.empty() ? 0.0 : history.back()),
          history);
    }
    for (std::size_t p = 0; p < ns; ++p) u.at(p, it) = w[p];
  }

  const auto res = mfg_residual(pb.coeffs, u, Field(u.grid_ptr()), pb.F, Field(u.grid_ptr()));
  return {u, interior_l2(res.line1), interior_max(res.line1), max_used};
}

SolveResult solve_v(const MFGProblem& pb, const Field& u, const SolverOptions&) {
  check_problem(pb);
  disc::require_same_grid(pb.coeffs.a1, u);
  const auto& g = pb.coeffs.a1.grid();
  const std::size_t ns = g.space_size();
  const double tau = g.tau();
  const auto& c = pb.coeffs;

  const auto grad_a2 = disc::gradient(c.a2);
  const auto lap_a2 = disc::laplacian(c.a2);
  const auto grad_k = disc::gradient(c.kappa);
  const auto grad_u = disc::gradient(u);
  const auto lap_u = disc::laplacian(u);
  const auto grad_k_dot_grad_u = disc::dot(grad_k, grad_u);

  Field v(u.grid_ptr(), FieldRole::v);
  for (std::size_t p = 0; p < ns; ++p) v.at(p, 0) = pb.v_data.at(p, 0);
  for (int it = 1; it < g.nt(); ++it) {
    StepSystem s = make_system(g);
    for (std::size_t p = 0; p < ns; ++p) {
      const double k = c.kappa.at(p, it);
      s.c[p] = 1.0 / tau - (lap_a2.at(p, it) + k * lap_u.at(p, it) + grad_k_dot_grad_u.at(p, it));
      s.D[p] = c.a2.at(p, it);
      for (int a = 0; a < g.dimension(); ++a) {
        s.b[a][p] = -(2.0 * grad_a2[a].at(p, it) + k * grad_u[a].at(p, it));
      }
      s.rhs[p] = pb.G.at(p, it) + v.at(p, it - 1) / tau;
      s.boundary[p] = pb.v_data.at(p, it);
    }
    const auto w = solve_step(g, s);
    for (std::size_t p = 0; p < ns; ++p) v.at(p, it) = w[p];
  }
  if (!v.finite()) throw NumericalError("forward solve produced non-finite values");

  const auto res = mfg_residual(c, u, v, pb.F, pb.G);
  return {v, interior_l2(res.line2), interior_max(res.line2), 1};
}

OperatorValues apply_mfg(const MFGCoefficients& c, const Field& u, const Field& v) {
  disc::require_same_grid(c.a1, u);
  disc::require_same_grid(c.a1, v);
  const auto grad_u = disc::gradient(u);
  const auto lap_u = disc::laplacian(u);
  Field line1 = disc::dt(u) + c.a1 * lap_u - 0.5 * (c.kappa * disc::squared_norm(grad_u)) - c.h * u;

  const auto grad_v = disc::gradient(v);
  const auto grad_a2 = disc::gradient(c.a2);
  const auto grad_k = disc::gradient(c.kappa);
  Field diffusion = c.a2 * disc::laplacian(v) + 2.0 * disc::dot(grad_a2, grad_v) + disc::laplacian(c.a2) * v;
  Field transport = c.kappa * v * lap_u + v * disc::dot(grad_k, grad_u) + c.kappa * disc::dot(grad_u, grad_v);
  Field line2 = disc::dt(v) - diffusion - transport;
  return {line1, line2};
}

SystemResidual mfg_residual(const MFGCoefficients& c, const Field& u, const Field& v, const Field& F,
                            const Field& G) {
  auto ops = apply_mfg(c, u, v);
  SystemResidual r{ops.line1 - F, ops.line2 - G, 0.0, 0.0};
  const auto rel = [](const Field& res, const Field& src, const Field& op) {
    const double scale = interior_l2(src) + interior_l2(op);
    const double n = interior_l2(res);
    return scale > 0.0 ? n / scale : n;
  };
  r.relative1 = rel(r.line1, F, ops.line1);
  r.relative2 = rel(r.line2, G, ops.line2);
  return r;
}

LowerOrder linear_lower_order(Field potential, VectorField drift) {
  return [potential = std::move(potential), drift = std::move(drift)](const Field& f, const VectorField& grad) {
    Field out = potential * f;
    for (std::size_t a = 0; a < drift.size() && a < grad.size(); ++a) out += drift[a] * grad[a];
    return out;
  };
}

double lower_order_ratio(const Field& r, const Field& f, const VectorField& grad_f) {
  double m = 0.0;
  for (std::size_t node = 0; node < f.size(); ++node) {
    double g2 = 0.0;
    for (const auto& c : grad_f) g2 += c[node] * c[node];
    const double denom = std::abs(f[node]) + std::sqrt(g2);
    const double num = std::abs(r[node]);
    if (denom > 0.0) {
      m = std::max(m, num / denom);
    } else if (num > 0.0) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return m;
}

POutput apply_P(int k, const Field& a, const Field& f, const LowerOrder& lower_order) {
  if (k != 1 && k != 2) throw PreconditionError(fmt::format("P_k is defined for k = 1, 2 only (got {})", k));
  disc::require_same_grid(a, f);
  const double sign = k == 1 ? -1.0 : 1.0;
  Field value = disc::dt(f) + sign * (a * disc::laplacian(f));
  double c0 = 0.0;
  if (lower_order) {
    const auto grad = disc::gradient(f);
    const Field r = lower_order(f, grad);
    value += r;
    c0 = lower_order_ratio(r, f, grad);
  }
  return {value, c0};
}

DifferenceResidual difference_residual(const MFGCoefficients& c, const Field& u_ref, const Field& v_ref,
                                       const Field& y, const Field& z, const Field& dF, const Field& dG) {
  const Field u = u_ref + y;
  const Field v = v_ref + z;
  const auto full = apply_mfg(c, u, v);
  const auto ref = apply_mfg(c, u_ref, v_ref);

  DifferenceResidual r{full.line1 - ref.line1 - dF,
                       full.line2 - ref.line2 - dG,
                       Field(y.grid_ptr()),
                       Field(y.grid_ptr()),
                       Field(y.grid_ptr()),
                       {},
                       0.0,
                       0.0};

  const auto grad_y = disc::gradient(y);
  const auto grad_z = disc::gradient(z);
  const auto grad_u = disc::gradient(u);
  const auto grad_uref = disc::gradient(u_ref);
  const auto grad_vref = disc::gradient(v_ref);
  const auto grad_a2 = disc::gradient(c.a2);
  const auto grad_k = disc::gradient(c.kappa);

  VectorField sum_grad;
  for (std::size_t a = 0; a < grad_u.size(); ++a) sum_grad.push_back(grad_u[a] + grad_uref[a]);
  r.R1 = -0.5 * (c.kappa * disc::dot(sum_grad, grad_y)) - c.h * y;
  r.R2 = -2.0 * disc::dot(grad_a2, grad_z) - disc::laplacian(c.a2) * z - c.kappa * z * disc::laplacian(u) -
         z * disc::dot(grad_k, grad_u) - c.kappa * disc::dot(grad_u, grad_z);
  VectorField w;
  for (std::size_t a = 0; a < grad_k.size(); ++a) w.push_back(v_ref * grad_k[a] + c.kappa * grad_vref[a]);
  r.R3 = disc::dot(w, grad_y);

  r.c0 = {lower_order_ratio(r.R1, y, grad_y), lower_order_ratio(r.R2, z, grad_z),
          lower_order_ratio(r.R3, y, grad_y)};

  const Field lap_y = disc::laplacian(y);
  const double scale1 = std::max({disc::dt(y).max_abs(), (c.a1 * lap_y).max_abs(), r.R1.max_abs(),
                                  dF.max_abs(), std::numeric_limits<double>::min()});
  const double scale2 = std::max({disc::dt(z).max_abs(), (c.a2 * disc::laplacian(z)).max_abs(), r.R2.max_abs(),
                                  (c.kappa * v_ref * lap_y).max_abs(), r.R3.max_abs(), dG.max_abs(),
                                  std::numeric_limits<double>::min()});
  r.relative1 = r.line1.max_abs() / scale1;
  r.relative2 = r.line2.max_abs() / scale2;
  return r;
}

}  // namespace mfguc::mfg
