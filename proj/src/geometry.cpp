#include "mfguc/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mfguc/errors.hpp"

namespace mfguc::geometry {

std::string_view to_string(Face face) {
  switch (face) {
    case Face::x_lo: return "x0";
    case Face::x_hi: return "x1";
    case Face::y_lo: return "y0";
    case Face::y_hi: return "y1";
  }
  return "?";
}

Face parse_face(std::string_view name) {
  if (name == "x0") return Face::x_lo;
  if (name == "x1") return Face::x_hi;
  if (name == "y0") return Face::y_lo;
  if (name == "y1") return Face::y_hi;
  throw ConfigError(fmt::format("unknown boundary face '{}' (expected x0, x1, y0 or y1)", name));
}

int normal_axis(Face face) { return (face == Face::x_lo || face == Face::x_hi) ? 0 : 1; }

int outward_sign(Face face) { return (face == Face::x_lo || face == Face::y_lo) ? -1 : 1; }

std::vector<Face> DomainSpec::faces() const {
  if (dimension == 1) return {Face::x_lo, Face::x_hi};
  return {Face::x_lo, Face::x_hi, Face::y_lo, Face::y_hi};
}

bool DomainSpec::is_gamma(Face face) const {
  return std::find(gamma_faces.begin(), gamma_faces.end(), face) != gamma_faces.end();
}

std::vector<Face> DomainSpec::complement_faces() const {
  std::vector<Face> out;
  for (Face f : faces()) {
    if (!is_gamma(f)) out.push_back(f);
  }
  return out;
}

void DomainSpec::validate() const {
  if (dimension != 1 && dimension != 2) {
    throw ConfigError(fmt::format("dimension must be 1 or 2, got {}", dimension));
  }
  for (int a = 0; a < dimension; ++a) {
    if (!(extents[a] > 0.0) || !std::isfinite(extents[a])) {
      throw ConfigError(fmt::format("extent along axis {} must be positive", a));
    }
  }
  if (gamma_faces.empty()) throw ConfigError("observed subboundary must be non-empty");
  const auto all = faces();
  for (Face f : gamma_faces) {
    if (std::find(all.begin(), all.end(), f) == all.end()) {
      throw ConfigError(fmt::format("face {} does not exist in dimension {}", to_string(f), dimension));
    }
  }
}

AuxiliaryFunction::AuxiliaryFunction(double offset, std::array<double, 2> slope, double max_value,
                                     AdmissibilityCheck check)
    : offset_(offset), slope_(slope), max_value_(max_value), check_(check) {}

namespace {

// Samples each face and the interior and evaluates the four conditions.
AdmissibilityCheck check_admissible(const DomainSpec& spec, double offset,
                                    const std::array<double, 2>& slope) {
  constexpr int samples = 33;
  const auto d = [&](double x1, double x2) { return offset + slope[0] * x1 + slope[1] * x2; };
  const double L1 = spec.extents[0];
  const double L2 = spec.dimension == 2 ? spec.extents[1] : 0.0;
  const double scale = std::max(L1, L2);
  const double tol = 1e-13 * scale;

  AdmissibilityCheck c;
  c.positive_inside = true;
  c.zero_on_complement = true;
  c.normal_derivative_nonpositive = true;
  c.gradient_nonvanishing = std::hypot(slope[0], slope[1]) > 0.0;

  const int m2 = spec.dimension == 2 ? samples : 1;
  for (int j = 1; j < (spec.dimension == 2 ? samples - 1 : 2); ++j) {
    for (int i = 1; i < samples - 1; ++i) {
      const double x1 = L1 * i / (samples - 1);
      const double x2 = spec.dimension == 2 ? L2 * j / (m2 - 1) : 0.0;
      c.positive_inside = c.positive_inside && d(x1, x2) > tol;
      ++c.points_checked;
    }
  }
  for (Face f : spec.complement_faces()) {
    const int axis = normal_axis(f);
    const double fixed = outward_sign(f) > 0 ? spec.extents[axis] : 0.0;
    const int along = spec.dimension == 2 ? samples : 1;
    for (int k = 0; k < along; ++k) {
      const double other = spec.dimension == 2 ? spec.extents[1 - axis] * k / (samples - 1) : 0.0;
      const double x1 = axis == 0 ? fixed : other;
      const double x2 = axis == 0 ? other : fixed;
      c.zero_on_complement = c.zero_on_complement && std::abs(d(x1, x2)) <= tol;
      const double dn = outward_sign(f) * slope[axis];
      c.normal_derivative_nonpositive = c.normal_derivative_nonpositive && dn <= 0.0;
      ++c.points_checked;
    }
  }
  return c;
}

}  // namespace

AuxiliaryFunction build_d(const DomainSpec& spec) {
  spec.validate();
  const auto complement = spec.complement_faces();
  if (complement.size() != 1) {
    if (complement.empty()) {
      throw GeometryError(
          "no admissible affine d: unsupported configuration with the whole boundary observed");
    }
    throw GeometryError(fmt::format(
        "no admissible affine d: d must vanish on {} unobserved faces, which forces a degenerate "
        "gradient",
        complement.size()));
  }
  const Face f = complement.front();
  const int axis = normal_axis(f);
  const double L = spec.extents[axis];
  std::array<double, 2> slope{0.0, 0.0};
  double offset = 0.0;
  if (outward_sign(f) > 0) {  // d = L - x_axis
    slope[axis] = -1.0;
    offset = L;
  } else {  // d = x_axis
    slope[axis] = 1.0;
  }
  auto check = check_admissible(spec, offset, slope);
  if (!check.ok()) {
    throw GeometryError("no admissible affine d: constructed candidate fails the boundary checks");
  }
  return AuxiliaryFunction(offset, slope, L, check);
}

double select_r(double d0, double d1, double fraction) {
  if (!(d0 > 0.0) || !(d1 >= d0)) {
    throw GeometryError(fmt::format("invalid geometry: need 0 < d0 <= d1, got d0={}, d1={}", d0, d1));
  }
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError(fmt::format("r_fraction must lie in (0,1), got {}", fraction));
  }
  return fraction * std::sqrt(d0 / d1);
}

BetaSelection select_beta(double d0, double d1, double delta, double r,
                          std::optional<double> explicit_beta) {
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  if (!(d0 > 0.0) || !(d1 >= d0)) throw GeometryError("invalid geometry: need 0 < d0 <= d1");
  if (!(r > 0.0) || !(r * r < d0 / d1)) {
    throw ConstraintViolation(fmt::format("r={} violates 0 < r < sqrt(d0/d1)={}", r, std::sqrt(d0 / d1)),
                              0.0, std::sqrt(d0 / d1));
  }
  BetaSelection sel;
  const double d2 = delta * delta;
  sel.lower = (d1 - d0) / (d2 - r * r * d2);
  sel.upper = d0 / (r * r * d2);
  if (explicit_beta) {
    sel.beta = *explicit_beta;
  } else if (sel.lower > 0.0) {
    sel.beta = std::sqrt(sel.lower * sel.upper);
  } else {
    sel.beta = 0.5 * (sel.lower + sel.upper);
  }
  sel.lower_margin = sel.beta - sel.lower;
  sel.upper_margin = sel.upper - sel.beta;
  if (!sel.valid()) {
    throw ConstraintViolation(
        fmt::format("beta={} outside the admissible interval ({}, {})", sel.beta, sel.lower, sel.upper),
        sel.lower, sel.upper);
  }
  return sel;
}

double WeightConfig::beta_lower() const { return (d1 - d0) / (delta * delta * (1.0 - r * r)); }

double WeightConfig::beta_upper() const { return d0 / (r * r * delta * delta); }

MuPair compute_mu(const WeightConfig& cfg) {
  const double e1 = cfg.lambda * (cfg.d1 - cfg.beta * cfg.delta * cfg.delta);
  const double e2 = cfg.lambda * (cfg.d0 - cfg.beta * cfg.r * cfg.r * cfg.delta * cfg.delta);
  MuPair mu{std::exp(e1), std::exp(e2)};
  if (!(e2 > 0.0 && e2 > e1) || !(mu.mu2 > 1.0 && mu.mu2 > mu.mu1)) {
    throw ConstraintViolation(
        fmt::format("mu2={} does not exceed max(1, mu1={}); r/beta constraints were bypassed", mu.mu2,
                    mu.mu1),
        cfg.beta_lower(), cfg.beta_upper());
  }
  return mu;
}

WeightConfig make_weight_config(const DomainSpec& spec, const AuxiliaryFunction& d,
                                const WeightParameters& params) {
  if (!(params.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(params.delta > 0.0)) throw ConfigError("delta must be positive");
  WeightConfig cfg;
  cfg.lambda = params.lambda;
  cfg.t0 = params.t0;
  cfg.delta = params.delta;
  cfg.d0 = spec.epsilon_core;
  cfg.d1 = d.max_value();
  if (!(cfg.d0 > 0.0 && cfg.d0 < cfg.d1)) {
    throw GeometryError(
        fmt::format("epsilon_core={} must lie strictly between 0 and max d={}", cfg.d0, cfg.d1));
  }
  cfg.r = select_r(cfg.d0, cfg.d1, params.r_fraction);
  cfg.r_valid = true;
  const auto sel = select_beta(cfg.d0, cfg.d1, cfg.delta, cfg.r, params.beta);
  cfg.beta = sel.beta;
  cfg.beta_valid = sel.valid();
  const auto mu = compute_mu(cfg);
  cfg.mu1 = mu.mu1;
  cfg.mu2 = mu.mu2;
  return cfg;
}

PhiValue eval_phi(double d_value, double t, const WeightConfig& cfg) {
  const double dt = t - cfg.t0;
  const double log_phi = cfg.lambda * (d_value - cfg.beta * dt * dt);
  return {std::exp(log_phi), log_phi};
}

PhiValue eval_phi(const AuxiliaryFunction& d, Point x, double t, const WeightConfig& cfg) {
  return eval_phi(d(x), t, cfg);
}

}  // namespace mfguc::geometry
