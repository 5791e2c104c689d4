#pragma once

#include <array>
#include <functional>

#include "mfguc/field.hpp"

namespace mfguc::mfg {

using disc::Field;
using disc::VectorField;

/// Coefficients of the coupled system
///   u_t + a1 Lap u - 1/2 kappa |grad u|^2 - h u = F       (backward)
///   v_t - Lap(a2 v) - div(kappa v grad u)        = G       (forward)
struct MFGCoefficients {
  Field a1;
  Field a2;
  Field kappa;
  Field h;
  /// Declared bound for the lower-order terms; informational.
  double C0_estimate = 0.0;

  /// a1 > 0 and a2 > 0 at every node, all fields on one grid.
  void validate() const;
};

MFGCoefficients constant_coefficients(const disc::GridPtr& grid, double a1, double a2, double kappa,
                                      double h);

/// Dirichlet data are read from u_data / v_data on the spatial boundary and
/// on the terminal (u) or initial (v) time slice; other entries are ignored.
struct MFGProblem {
  MFGCoefficients coeffs;
  Field F;
  Field G;
  Field u_data;
  Field v_data;
};

struct SolverOptions {
  int max_inner = 50;
  double tol_inner = 1e-10;
};

struct SolveResult {
  Field solution;
  /// Discrete L2 norm over interior nodes of the equation residual, using
  /// central time differences (so it is O(h^2 + tau) for implicit Euler).
  double residual_l2 = 0.0;
  double residual_max = 0.0;
  /// Largest number of inner fixed-point iterations used by any step.
  int inner_iterations = 0;
};

/// Backward implicit Euler from t0 + delta with Picard linearization of the
/// gradient term. Throws NonConvergence when a step exceeds max_inner.
SolveResult solve_u(const MFGProblem& problem, const SolverOptions& options = {});

/// Forward implicit Euler from t0 - delta; Lap(a2 v) and div(kappa v grad u)
/// are expanded by the product rule.
SolveResult solve_v(const MFGProblem& problem, const Field& u, const SolverOptions& options = {});

struct OperatorValues {
  Field line1;
  Field line2;
};

/// Discrete left-hand sides of both equations at every node (one-sided
/// stencils on the boundary and at the time ends).
OperatorValues apply_mfg(const MFGCoefficients& coeffs, const Field& u, const Field& v);

struct SystemResidual {
  Field line1;
  Field line2;
  /// L2 norm of each residual over interior nodes relative to the L2 norm of
  /// the corresponding source plus operator value.
  double relative1 = 0.0;
  double relative2 = 0.0;
};

SystemResidual mfg_residual(const MFGCoefficients& coeffs, const Field& u, const Field& v, const Field& F,
                            const Field& G);

/// Lower-order term R(f, grad f) of P_k.
using LowerOrder = std::function<Field(const Field& f, const VectorField& grad)>;

/// R = potential * f + drift . grad f.
LowerOrder linear_lower_order(Field potential, VectorField drift);

struct POutput {
  Field value;
  /// max |R| / (|f| + |grad f|) over nodes with a nonzero denominator.
  double measured_c0 = 0.0;
};

/// P_k f = f_t + (-1)^k a Lap f + R(f). Defined at every node.
POutput apply_P(int k, const Field& a, const Field& f, const LowerOrder& lower_order = {});

/// Node-wise max |r| / (|f| + |grad f|).
double lower_order_ratio(const Field& r, const Field& f, const VectorField& grad_f);

/// Terms of the difference system for y = u - u~, z = v - v~ given the
/// reference pair (u~, v~):
///   y_t + a1 Lap y + R1(y)             = F - F~
///   z_t - a2 Lap z + R2(z)             = kappa v~ Lap y + R3(y) + G - G~
struct DifferenceResidual {
  Field line1;  // residual of the first line with the supplied dF
  Field line2;
  Field R1;
  Field R2;
  Field R3;
  /// measured constants |R_j| / (|.| + |grad .|), j = 1, 2, 3
  std::array<double, 3> c0{};
  /// max-norm of each residual relative to the largest term in its line
  double relative1 = 0.0;
  double relative2 = 0.0;
};

DifferenceResidual difference_residual(const MFGCoefficients& coeffs, const Field& u_ref, const Field& v_ref,
                                       const Field& y, const Field& z, const Field& dF, const Field& dG);

}  // namespace mfguc::mfg
