#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mfguc/cauchy.hpp"
#include "mfguc/manufactured.hpp"

namespace mfguc::uc {

using disc::Field;
using geometry::WeightConfig;

/// y = u - u~, z = v - v~ with the residuals of both difference lines.
struct DifferencePair {
  Field y;
  Field z;
  Field line1;
  Field line2;
  /// Measured lower-order constants for R1, R2, R3.
  std::array<double, 3> c0{};
  double relative1 = 0.0;
  double relative2 = 0.0;
};

/// Throws PreconditionError when either pair misses its own equations by
/// more than `tol` (relative interior L2 residual).
DifferencePair build_difference(const mfg::SolutionPair& a, const mfg::SolutionPair& b,
                                const mfg::MFGCoefficients& coeffs, double tol = 1e-8);

struct MismatchConstants {
  double M1 = 0.0;  // unobserved boundary, value and (x, t) gradient
  double M2 = 0.0;  // H^1(Omega) at t0 - delta and t0 + delta
};

MismatchConstants compute_mismatch(const DifferencePair& pair);

struct BoundCurve {
  std::vector<double> s;
  std::vector<double> value;
  /// Minimizer refined by Brent's method around the best grid point.
  double s_star = 0.0;
  double min_value = 0.0;
  /// Interior critical point of the bound when the grid maximum is interior;
  /// each s^2 e^{-cs} term peaks at s = 2/c and decays beyond it.
  std::optional<double> s_stationary;
};

/// C_emp s^2 (M1 e^{-2s(mu2-1)} + M2 e^{-2s(mu2-mu1)}) on s_grid.
BoundCurve eval_bound(const MismatchConstants& M, const WeightConfig& cfg, double C_emp,
                      const std::vector<double>& s_grid);
double bound_at(const MismatchConstants& M, const WeightConfig& cfg, double C_emp, double s);

struct UCOptions {
  double epsilon_core = 0.25;
  double tol_gamma = 1e-10;
  double slack_constant = 1.0;
};

struct UCVerdict {
  double window_norm = 0.0;
  double bound = 0.0;
  double s_star = 0.0;
  double slack = 0.0;
  double gamma_trace = 0.0;  // relative size of the Gamma-Cauchy data
  MismatchConstants M;
  bool pass = false;
};

/// Window norm over Omega_eps x [t0 - r delta, t0 + r delta] against the
/// minimum of the bound plus C (h^2 + tau).
UCVerdict uc_verify(const DifferencePair& pair, const WeightConfig& cfg, double C_emp,
                    const std::vector<double>& s_grid, const UCOptions& options = {});

/// Largest |value| or |grad| of y and z on Gamma x I relative to their maxima.
double relative_gamma_trace(const DifferencePair& pair);

struct T0Cell {
  double t0 = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  UCVerdict verdict;
};

struct CoverageReport {
  std::vector<T0Cell> cells;
  double union_lo = 0.0;
  double union_hi = 0.0;
  bool contiguous = false;
  double granularity = 0.0;
  double target_lo = 0.0;
  double target_hi = 0.0;
  bool covers = false;
  bool all_pass = false;
};

/// Runs one verification for a window centred at t0.
using T0Experiment = std::function<UCVerdict(double t0)>;

/// t0_k = delta + (T - 2 delta)(k + 1/2) / count, windows (t0 - r delta, t0 + r delta).
CoverageReport sweep_t0(const T0Experiment& experiment, double T, double delta, double r, int count,
                        unsigned workers = 1);

/// Residuals of the difference system with the nonlinear couplings frozen at
/// (u_ref, v_ref); the operator that qr_reconstruct inverts.
struct FrozenResidual {
  Field line1;
  Field line2;
};

FrozenResidual frozen_residual(const mfg::MFGCoefficients& coeffs, const Field& u_ref, const Field& v_ref,
                               const Field& y, const Field& z, const Field& dF, const Field& dG);

enum class Preconditioner { cholesky, incomplete_cholesky };

struct ReconstructionOptions {
  double s = 2.0;
  /// Cauchy penalty; defaults to 1e3 s^4.
  std::optional<double> rho;
  /// Zeroth-order Tikhonov weight on all unknowns.
  double tikhonov = 0.0;
  /// Preconditioner of the normal equations.
  Preconditioner preconditioner = Preconditioner::cholesky;
  int max_iter = 50000;
  /// Stop when |A^T r| / |A^T b| drops below this.
  double tol = 1e-10;
};

struct ReconstructionResult {
  Field y;
  Field z;
  double functional = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;
};

/// Minimizes the Carleman-weighted least-squares functional of the
/// difference system frozen at (u_ref, v_ref), fitting the Gamma-Cauchy data
/// of y and z. CG on the normal equations; throws NonConvergence with the history.
ReconstructionResult qr_reconstruct(const disc::CauchyData& y_data, const disc::CauchyData& z_data,
                                    const Field& dF, const Field& dG, const mfg::MFGCoefficients& coeffs,
                                    const Field& u_ref, const Field& v_ref, const WeightConfig& cfg,
                                    const ReconstructionOptions& options = {});

/// Adds eta * max|trace| * N(0, 1) to every Gamma value and normal entry.
disc::CauchyData add_noise(disc::CauchyData data, double eta, std::uint64_t seed);

/// L2 norm of (y - y_ref, z - z_ref) over Omega_eps x [t0 - r delta, t0 + r delta]
/// relative to the norm of (y_ref, z_ref) there.
double window_error(const Field& y, const Field& z, const Field& y_ref, const Field& z_ref, double eps, double r);

}  // namespace mfguc::uc
