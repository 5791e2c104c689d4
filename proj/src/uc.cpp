#include "mfguc/uc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "mfguc/errors.hpp"
#include "mfguc/operators.hpp"
#include "mfguc/parallel.hpp"
#include "mfguc/quadrature.hpp"

namespace mfguc::uc {

namespace {

using disc::SparseMatrix;
using Vector = Eigen::VectorXd;

Field h1_integrand(const Field& f, bool with_time) {
  Field out = disc::square(f) + disc::squared_norm(disc::gradient(f));
  if (with_time) out += disc::square(disc::dt(f));
  return out;
}

double slices_h1(const Field& f) {
  const auto& g = f.grid();
  const Field q = h1_integrand(f, false);
  return disc::integrate(q, disc::slice_region(g, 0)) + disc::integrate(q, disc::slice_region(g, g.nt() - 1));
}

}  // namespace

DifferencePair build_difference(const mfg::SolutionPair& a, const mfg::SolutionPair& b,
                                const mfg::MFGCoefficients& coeffs, double tol) {
  for (const auto* pair : {&a, &b}) {
    const auto res = mfg::mfg_residual(coeffs, pair->u, pair->v, pair->F, pair->G);
    if (!(res.relative1 <= tol) || !(res.relative2 <= tol)) {
      throw PreconditionError(fmt::format("input pair does not solve the system: relative residuals {} and {} "
                                          "exceed {}",
                                          res.relative1, res.relative2, tol));
    }
  }
  const Field y = (a.u - b.u).with_role(disc::FieldRole::y);
  const Field z = (a.v - b.v).with_role(disc::FieldRole::z);
  const auto r = mfg::difference_residual(coeffs, b.u, b.v, y, z, a.F - b.F, a.G - b.G);
  return {y, z, r.line1, r.line2, r.c0, r.relative1, r.relative2};
}

MismatchConstants compute_mismatch(const DifferencePair& pair) {
  const auto& g = pair.y.grid();
  const auto region = disc::complement_region(g);
  return {disc::integrate(h1_integrand(pair.y, true), region) + disc::integrate(h1_integrand(pair.z, true), region),
          slices_h1(pair.y) + slices_h1(pair.z)};
}

double bound_at(const MismatchConstants& M, const WeightConfig& cfg, double C_emp, double s) {
  const double a = M.M1 == 0.0 ? 0.0 : M.M1 * std::exp(-2.0 * s * (cfg.mu2 - 1.0));
  const double b = M.M2 == 0.0 ? 0.0 : M.M2 * std::exp(-2.0 * s * (cfg.mu2 - cfg.mu1));
  return C_emp * s * s * (a + b);
}

BoundCurve eval_bound(const MismatchConstants& M, const WeightConfig& cfg, double C_emp,
                      const std::vector<double>& s_grid) {
  geometry::compute_mu(cfg);
  if (s_grid.empty()) throw ConfigError("empty s grid");
  if (!(M.M1 >= 0.0) || !(M.M2 >= 0.0)) throw ConfigError("mismatch constants must be non-negative");
  if (!(C_emp >= 0.0)) throw ConfigError("C_emp must be non-negative");
  BoundCurve out;
  out.s = s_grid;
  out.value.reserve(s_grid.size());
  for (double s : s_grid) out.value.push_back(bound_at(M, cfg, C_emp, s));
  const auto best = static_cast<std::size_t>(std::min_element(out.value.begin(), out.value.end()) - out.value.begin());
  out.s_star = s_grid[best];
  out.min_value = out.value[best];
  if (out.min_value == 0.0 && *std::max_element(out.value.begin(), out.value.end()) == 0.0) return out;
  if (s_grid.size() < 2) return out;

  const auto f = [&](double s) { return bound_at(M, cfg, C_emp, s); };
  const auto refine = [&](std::size_t i, auto&& objective) {
    const double lo = s_grid[i == 0 ? 0 : i - 1];
    const double hi = s_grid[std::min(i + 1, s_grid.size() - 1)];
    return boost::math::tools::brent_find_minima(objective, lo, hi, std::numeric_limits<double>::digits / 2);
  };
  const auto [s_opt, v_opt] = refine(best, f);
  if (v_opt < out.min_value) {
    out.s_star = s_opt;
    out.min_value = v_opt;
  }
  const auto peak = static_cast<std::size_t>(std::max_element(out.value.begin(), out.value.end()) - out.value.begin());
  if (peak > 0 && peak + 1 < s_grid.size()) {
    out.s_stationary = refine(peak, [&](double s) { return -f(s); }).first;
  }
  return out;
}

double relative_gamma_trace(const DifferencePair& pair) {
  double trace = 0.0;
  double scale = 0.0;
  for (const Field* f : {&pair.y, &pair.z}) {
    const auto& g = f->grid();
    const auto grad = disc::gradient(*f);
    scale = std::max(scale, f->max_abs());
    for (auto face : g.domain().gamma_faces) {
      for (std::size_t p : g.face_nodes(face)) {
        for (int it = 0; it < g.nt(); ++it) {
          trace = std::max(trace, std::abs(f->at(p, it)));
          for (const auto& d : grad) trace = std::max(trace, std::abs(d.at(p, it)));
        }
      }
    }
  }
  return scale == 0.0 ? 0.0 : trace / scale;
}

UCVerdict uc_verify(const DifferencePair& pair, const WeightConfig& cfg, double C_emp,
                    const std::vector<double>& s_grid, const UCOptions& options) {
  UCVerdict v;
  v.gamma_trace = relative_gamma_trace(pair);
  if (v.gamma_trace > options.tol_gamma) {
    throw PreconditionError(
        fmt::format("Gamma-Cauchy data of the pair do not vanish: {} > tol {}", v.gamma_trace, options.tol_gamma));
  }
  const auto& g = pair.y.grid();
  v.window_norm = disc::integrate(disc::square(pair.y) + disc::square(pair.z),
                                  disc::window_region(g, options.epsilon_core, cfg.r));
  v.M = compute_mismatch(pair);
  const auto curve = eval_bound(v.M, cfg, C_emp, s_grid);
  v.bound = curve.min_value;
  v.s_star = curve.s_star;
  v.slack = options.slack_constant * (g.h_max() * g.h_max() + g.tau());
  v.pass = v.window_norm <= v.bound + v.slack;
  return v;
}

CoverageReport sweep_t0(const T0Experiment& experiment, double T, double delta, double r, int count,
                        unsigned workers) {
  if (!(T > 2.0 * delta)) throw ConfigError(fmt::format("time horizon T = {} must exceed 2 delta = {}", T, 2 * delta));
  if (count < 1) throw ConfigError("t0 sweep needs at least one centre");
  if (!(r > 0.0 && r < 1.0)) throw ConfigError("r must lie in (0, 1)");
  CoverageReport rep;
  rep.cells.resize(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    auto& c = rep.cells[k];
    c.t0 = delta + (T - 2.0 * delta) * (k + 0.5) / count;
    c.lo = c.t0 - r * delta;
    c.hi = c.t0 + r * delta;
  }
  parallel_for(rep.cells.size(), workers, [&](std::size_t k) { rep.cells[k].verdict = experiment(rep.cells[k].t0); });

  const double spacing = (T - 2.0 * delta) / count;
  rep.contiguous = count == 1 || spacing <= 2.0 * r * delta;
  rep.union_lo = rep.cells.front().lo;
  rep.union_hi = rep.cells.back().hi;
  rep.granularity = 0.5 * spacing;
  rep.target_lo = (1.0 - r) * delta;
  rep.target_hi = T - (1.0 - r) * delta;
  const double tol = 1e-12 * std::max(1.0, T);
  rep.covers = rep.contiguous && rep.union_lo - rep.target_lo <= rep.granularity + tol &&
               rep.target_hi - rep.union_hi <= rep.granularity + tol;
  rep.all_pass = std::all_of(rep.cells.begin(), rep.cells.end(), [](const T0Cell& c) { return c.verdict.pass; });
  return rep;
}

namespace {

struct Triplets {
  std::vector<Eigen::Triplet<double>> items;
  int rows = 0;

  /// Appends diag(row_scale) * M placed at column offset `col`, starting at
  /// the current row. Does not advance the row counter.
  void add(const SparseMatrix& m, const Vector& row_scale, int col) {
    for (int i = 0; i < m.outerSize(); ++i) {
      for (SparseMatrix::InnerIterator it(m, i); it; ++it) {
        const double v = row_scale[i] * it.value();
        if (v != 0.0) items.emplace_back(rows + i, col + static_cast<int>(it.col()), v);
      }
    }
  }
};

SparseMatrix diag(const Field& f) { return disc::diagonal_matrix(f); }

SparseMatrix gradient_term(const std::vector<Field>& coeff, const std::vector<SparseMatrix>& D) {
  SparseMatrix m = diag(coeff[0]) * D[0];
  for (std::size_t a = 1; a < D.size(); ++a) {
    const SparseMatrix term = diag(coeff[a]) * D[a];
    m += term;
  }
  return m;
}

struct FrozenOperators {
  SparseMatrix L1y;
  SparseMatrix L2y;
  SparseMatrix L2z;
};

FrozenOperators frozen_operators(const mfg::MFGCoefficients& c, const Field& u_ref, const Field& v_ref) {
  const auto& g = u_ref.grid();
  const SparseMatrix Dt = disc::derivative_matrix(g, disc::Derivative::d_t);
  const SparseMatrix Lap = disc::laplacian_matrix(g);
  std::vector<SparseMatrix> D;
  D.push_back(disc::derivative_matrix(g, disc::Derivative::d_x1));
  if (g.dimension() == 2) D.push_back(disc::derivative_matrix(g, disc::Derivative::d_x2));

  const auto gu = disc::gradient(u_ref);
  const auto gv = disc::gradient(v_ref);
  const auto ga2 = disc::gradient(c.a2);
  const auto gk = disc::gradient(c.kappa);

  std::vector<Field> drift1, drift2, drift_y;
  Field potential2 = disc::laplacian(c.a2) + c.kappa * disc::laplacian(u_ref);
  for (std::size_t a = 0; a < D.size(); ++a) {
    drift1.push_back(c.kappa * gu[a]);
    drift2.push_back(2.0 * ga2[a] + c.kappa * gu[a]);
    drift_y.push_back(v_ref * gk[a] + c.kappa * gv[a]);
    potential2 += gk[a] * gu[a];
  }
  FrozenOperators op;
  const SparseMatrix a1_lap = diag(c.a1) * Lap;
  const SparseMatrix a2_lap = diag(c.a2) * Lap;
  const SparseMatrix kv_lap = diag(c.kappa * v_ref) * Lap;
  op.L1y = Dt + a1_lap;
  op.L1y -= gradient_term(drift1, D);
  op.L1y -= diag(c.h);
  op.L2z = Dt - a2_lap;
  op.L2z -= gradient_term(drift2, D);
  op.L2z -= diag(potential2);
  op.L2y = -kv_lap;
  op.L2y -= gradient_term(drift_y, D);
  return op;
}

/// Rows that reproduce face_trace: value and outward normal derivative.
void add_cauchy_rows(Triplets& A, std::vector<double>& b, const disc::SpaceTimeGrid& g,
                     const std::vector<disc::FaceTrace>& traces, double rho, int col) {
  std::vector<SparseMatrix> D;
  D.push_back(disc::derivative_matrix(g, disc::Derivative::d_x1));
  if (g.dimension() == 2) D.push_back(disc::derivative_matrix(g, disc::Derivative::d_x2));
  for (const auto& tr : traces) {
    disc::Region region = disc::gamma_region(g);
    region.faces = {tr.face};
    const auto q = disc::quadrature_nodes(g, region);
    const auto& Dn = D[geometry::normal_axis(tr.face)];
    const double sign = geometry::outward_sign(tr.face);
    for (std::size_t j = 0; j < q.size(); ++j) {
      const auto [node, w] = q[j];
      if (w == 0.0) continue;
      const double sw = std::sqrt(rho * w);
      A.items.emplace_back(A.rows, col + static_cast<int>(node), sw);
      b.push_back(sw * tr.value[j]);
      ++A.rows;
      for (SparseMatrix::InnerIterator it(Dn, static_cast<int>(node)); it; ++it) {
        A.items.emplace_back(A.rows, col + static_cast<int>(it.col()), sw * sign * it.value());
      }
      b.push_back(sw * tr.normal[j]);
      ++A.rows;
    }
  }
}

Vector to_vector(const Field& f) { return Eigen::Map<const Vector>(f.values().data(), static_cast<Eigen::Index>(f.size())); }

Field apply_matrix(const SparseMatrix& m, const Field& f) {
  const Vector x = to_vector(f);
  const Vector y = m * x;
  return Field(f.grid_ptr(), std::vector<double>(y.data(), y.data() + y.size()));
}

}  // namespace

FrozenResidual frozen_residual(const mfg::MFGCoefficients& coeffs, const Field& u_ref, const Field& v_ref,
                               const Field& y, const Field& z, const Field& dF, const Field& dG) {
  const auto op = frozen_operators(coeffs, u_ref, v_ref);
  return {apply_matrix(op.L1y, y) - dF, apply_matrix(op.L2y, y) + apply_matrix(op.L2z, z) - dG};
}

ReconstructionResult qr_reconstruct(const disc::CauchyData& y_data, const disc::CauchyData& z_data,
                                    const Field& dF, const Field& dG, const mfg::MFGCoefficients& coeffs,
                                    const Field& u_ref, const Field& v_ref, const WeightConfig& cfg,
                                    const ReconstructionOptions& options) {
  disc::require_same_grid(dF, u_ref);
  disc::require_same_grid(dG, u_ref);
  const auto& g = u_ref.grid();
  const double s = options.s;
  if (!(s > 0.0)) throw ConfigError("reconstruction needs s > 0");
  const double rho = options.rho.value_or(1e3 * s * s * s * s);
  if (!(rho >= 0.0) || !(options.tikhonov >= 0.0)) throw ConfigError("penalty weights must be non-negative");
  if (y_data.gamma.size() != g.domain().gamma_faces.size() || z_data.gamma.size() != y_data.gamma.size()) {
    throw ConfigError("Cauchy data do not match the observed faces");
  }

  const int n = static_cast<int>(g.size());
  const auto op = frozen_operators(coeffs, u_ref, v_ref);

  // sqrt of trapezoid weight times e^{s (phi - phi_max)}
  const Field phi = disc::phi_field(u_ref.grid_ptr(), cfg);
  const double phi_max = phi.max_abs();
  Vector w = Vector::Zero(n);
  for (const auto& [node, q] : disc::quadrature_nodes(g, disc::full_region(g))) {
    w[static_cast<Eigen::Index>(node)] = std::sqrt(q) * std::exp(s * (phi[node] - phi_max));
  }

  Triplets A;
  std::vector<double> b;
  b.reserve(static_cast<std::size_t>(2 * n));
  A.add(op.L1y, w, 0);
  for (int i = 0; i < n; ++i) b.push_back(w[i] * dF[static_cast<std::size_t>(i)]);
  A.rows += n;
  A.add(op.L2y, w, 0);
  A.add(op.L2z, w, n);
  for (int i = 0; i < n; ++i) b.push_back(w[i] * dG[static_cast<std::size_t>(i)]);
  A.rows += n;
  add_cauchy_rows(A, b, g, y_data.gamma, rho, 0);
  add_cauchy_rows(A, b, g, z_data.gamma, rho, n);
  if (options.tikhonov > 0.0) {
    const double t = std::sqrt(options.tikhonov);
    for (int i = 0; i < 2 * n; ++i) {
      A.items.emplace_back(A.rows + i, i, t);
      b.push_back(0.0);
    }
    A.rows += 2 * n;
  }

  Eigen::SparseMatrix<double> M(A.rows, 2 * n);
  M.setFromTriplets(A.items.begin(), A.items.end());
  const Vector rhs = Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size()));

  // column scaling
  Vector scale(2 * n);
  for (int j = 0; j < 2 * n; ++j) {
    const double c = M.col(j).norm();
    scale[j] = c > 0.0 ? 1.0 / c : 1.0;
  }
  M = M * scale.asDiagonal();

  // conjugate gradients on the normal equations, incomplete-Cholesky preconditioned
  ReconstructionResult out{Field(u_ref.grid_ptr(), disc::FieldRole::y), Field(u_ref.grid_ptr(), disc::FieldRole::z),
                           0.0, 0, {}};
  const Eigen::SparseMatrix<double> N = M.transpose() * M;
  const Vector g_rhs = M.transpose() * rhs;
  Vector x = Vector::Zero(2 * n);
  const double norm0 = g_rhs.norm();
  if (norm0 > 0.0) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> full;
    Eigen::IncompleteCholesky<double, Eigen::Lower, Eigen::AMDOrdering<int>> partial;
    std::function<Vector(const Vector&)> precondition;
    if (options.preconditioner == Preconditioner::cholesky) {
      full.compute(N);
      if (full.info() != Eigen::Success) throw NumericalError("Cholesky factorization of the normal matrix failed");
      precondition = [&full](const Vector& v) -> Vector { return full.solve(v); };
    } else {
      partial.compute(N);
      if (partial.info() != Eigen::Success) throw NumericalError("incomplete Cholesky factorization failed");
      precondition = [&partial](const Vector& v) -> Vector { return partial.solve(v); };
    }
    Vector res = g_rhs;
    Vector zv = precondition(res);
    Vector p = zv;
    double rz = res.dot(zv);
    bool converged = false;
    for (int k = 0; k < options.max_iter; ++k) {
      const Vector q = N * p;
      const double pq = p.dot(q);
      if (!(pq > 0.0)) break;
      const double alpha = rz / pq;
      x += alpha * p;
      res -= alpha * q;
      out.iterations = k + 1;
      out.residual_history.push_back(res.norm() / norm0);
      if (out.residual_history.back() < options.tol) {
        converged = true;
        break;
      }
      zv = precondition(res);
      const double rz_new = res.dot(zv);
      p = zv + (rz_new / rz) * p;
      rz = rz_new;
    }
    if (!converged) {
      throw NonConvergence(
          fmt::format("conjugate gradients did not reach {} within {} iterations", options.tol, options.max_iter),
          out.residual_history);
    }
  }
  const Vector r = rhs - M * x;
  out.functional = r.squaredNorm();
  x = scale.asDiagonal() * x;
  for (int i = 0; i < n; ++i) {
    out.y[static_cast<std::size_t>(i)] = x[i];
    out.z[static_cast<std::size_t>(i)] = x[n + i];
  }
  return out;
}

disc::CauchyData add_noise(disc::CauchyData data, double eta, std::uint64_t seed) {
  if (!(eta >= 0.0)) throw ConfigError("noise level must be non-negative");
  if (eta == 0.0) return data;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double amp = eta * data.gamma_max_abs();
  for (auto& tr : data.gamma) {
    for (double& v : tr.value) v += amp * normal(rng);
    for (double& v : tr.normal) v += amp * normal(rng);
  }
  return data;
}

double window_error(const Field& y, const Field& z, const Field& y_ref, const Field& z_ref, double eps, double r) {
  const auto region = disc::window_region(y.grid(), eps, r);
  const double err = disc::integrate(disc::square(y - y_ref) + disc::square(z - z_ref), region);
  const double ref = disc::integrate(disc::square(y_ref) + disc::square(z_ref), region);
  if (ref == 0.0) return std::sqrt(err);
  return std::sqrt(err / ref);
}

}  // namespace mfguc::uc
