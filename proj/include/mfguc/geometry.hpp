#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mfguc::geometry {

/// Boundary faces of an interval (x_lo, x_hi) or a rectangle (all four).
enum class Face { x_lo, x_hi, y_lo, y_hi };

std::string_view to_string(Face face);
/// Accepts "x0", "x1", "y0", "y1".
Face parse_face(std::string_view name);

/// Coordinate axis the face is normal to (0 or 1).
int normal_axis(Face face);
/// Sign of the outward normal along normal_axis(face).
int outward_sign(Face face);

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;
};

struct DomainSpec {
  int dimension = 1;
  std::array<double, 2> extents{1.0, 1.0};
  std::vector<Face> gamma_faces;
  double epsilon_core = 0.25;

  std::vector<Face> faces() const;
  bool is_gamma(Face face) const;
  std::vector<Face> complement_faces() const;
  /// Structural checks only (dimension, extents, face validity).
  void validate() const;
};

/// Result of checking the four admissibility conditions on sampled points.
struct AdmissibilityCheck {
  bool positive_inside = false;
  bool gradient_nonvanishing = false;
  bool zero_on_complement = false;
  bool normal_derivative_nonpositive = false;
  std::size_t points_checked = 0;

  bool ok() const {
    return positive_inside && gradient_nonvanishing && zero_on_complement &&
           normal_derivative_nonpositive;
  }
};

/// Affine auxiliary function d(x) = offset + slope . x, vanishing on the
/// unobserved face and positive inside the domain.
class AuxiliaryFunction {
 public:
  AuxiliaryFunction(double offset, std::array<double, 2> slope, double max_value,
                    AdmissibilityCheck check);

  double operator()(Point x) const { return offset_ + slope_[0] * x.x1 + slope_[1] * x.x2; }
  const std::array<double, 2>& gradient() const { return slope_; }
  /// max of d over the closed domain (d1).
  double max_value() const { return max_value_; }
  const AdmissibilityCheck& check() const { return check_; }

 private:
  double offset_;
  std::array<double, 2> slope_;
  double max_value_;
  AdmissibilityCheck check_;
};

/// Builds d for the supported configurations: 1D with one observed endpoint,
/// 2D rectangle with three observed faces. Throws GeometryError otherwise.
AuxiliaryFunction build_d(const DomainSpec& spec);

/// r = fraction * sqrt(d0 / d1).
double select_r(double d0, double d1, double fraction = 0.5);

struct BetaSelection {
  double beta = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  /// beta - lower and upper - beta; both positive for a valid choice.
  double lower_margin = 0.0;
  double upper_margin = 0.0;
  bool valid() const { return lower_margin > 0.0 && upper_margin > 0.0; }
};

/// Picks beta strictly inside ((d1-d0)/(delta^2(1-r^2)), d0/(r^2 delta^2)).
/// Without an explicit value the geometric mean of the bounds is used
/// (upper/2 when the lower bound is zero).
BetaSelection select_beta(double d0, double d1, double delta, double r,
                          std::optional<double> explicit_beta = std::nullopt);

struct WeightConfig {
  double lambda = 1.0;
  double beta = 0.0;
  double t0 = 0.0;
  double delta = 0.0;
  double r = 0.0;
  double d0 = 0.0;
  double d1 = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  bool r_valid = false;
  bool beta_valid = false;

  double beta_lower() const;
  double beta_upper() const;
};

struct MuPair {
  double mu1 = 0.0;
  double mu2 = 0.0;
};

/// mu1 = exp(lambda (d1 - beta delta^2)), mu2 = exp(lambda (d0 - beta r^2 delta^2)).
/// Throws ConstraintViolation unless mu2 > max(1, mu1).
MuPair compute_mu(const WeightConfig& cfg);

struct WeightParameters {
  double lambda = 1.0;
  std::optional<double> beta;
  double r_fraction = 0.5;
  double t0 = 0.5;
  double delta = 0.25;
};

/// Full constant ledger for a domain: d0 = epsilon_core, d1 = max d.
WeightConfig make_weight_config(const DomainSpec& spec, const AuxiliaryFunction& d,
                                const WeightParameters& params);

struct PhiValue {
  double phi = 0.0;
  double log_phi = 0.0;
};

/// phi = exp(lambda (d - beta (t - t0)^2)) given the value d = d(x).
PhiValue eval_phi(double d_value, double t, const WeightConfig& cfg);
PhiValue eval_phi(const AuxiliaryFunction& d, Point x, double t, const WeightConfig& cfg);

}  // namespace mfguc::geometry
