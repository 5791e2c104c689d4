#pragma once

#include <array>
#include <functional>
#include <vector>

#include "mfguc/field.hpp"
#include "mfguc/geometry.hpp"

namespace mfguc::disc {

/// A non-negative quantity stored as value * exp(log_scale) so that heavily
/// weighted integrals stay representable.
struct WeightedValue {
  double value = 0.0;
  double log_scale = 0.0;

  /// value * exp(log_scale); may overflow to inf.
  double to_double() const;
  /// Same quantity expressed with a different scale.
  WeightedValue rescaled(double new_log_scale) const;
  WeightedValue scaled(double factor) const { return {value * factor, log_scale}; }
  /// Multiplies by exp(exponent).
  WeightedValue times_exp(double exponent) const { return {value, log_scale + exponent}; }
  bool is_zero() const { return value == 0.0; }
};

WeightedValue operator+(const WeightedValue& a, const WeightedValue& b);
/// a / b, computed without forming either value; b must be nonzero.
double ratio(const WeightedValue& a, const WeightedValue& b);

/// Integration region: either a space box times a time range, or a set of
/// boundary faces times a time range. A single-index time range with
/// integrate_time == false is a time slice.
struct Region {
  enum class Kind { box, faces };
  Kind kind = Kind::box;
  std::array<IndexRange, 2> space{};
  std::vector<geometry::Face> faces;
  IndexRange time{};
  bool integrate_time = true;
};

Region full_region(const SpaceTimeGrid& grid);
/// Omega_eps x [t0 - r delta, t0 + r delta] on grid nodes.
Region window_region(const SpaceTimeGrid& grid, double eps, double r);
Region gamma_region(const SpaceTimeGrid& grid);
Region complement_region(const SpaceTimeGrid& grid);
Region slice_region(const SpaceTimeGrid& grid, int it);

/// Trapezoidal quadrature weight of every node in the region (node, weight).
std::vector<std::pair<std::size_t, double>> quadrature_nodes(const SpaceTimeGrid& grid,
                                                             const Region& region);

/// Plain trapezoidal integral of f over the region.
double integrate(const Field& f, const Region& region);

/// Trapezoidal integral of f * exp(log_weight(node)), normalized by the
/// region maximum of log_weight. Throws on an empty region.
WeightedValue log_weighted_integral(const Field& f, const Region& region,
                                    const std::function<double(std::size_t)>& log_weight);

/// Integral of f * exp(2 s phi) over the region.
WeightedValue weighted_integral(const Field& f, double s, const geometry::WeightConfig& cfg,
                                const Region& region);

/// phi at every node of the grid.
Field phi_field(const GridPtr& grid, const geometry::WeightConfig& cfg);

}  // namespace mfguc::disc
