#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "mfguc/grid.hpp"

namespace mfguc::disc {

enum class FieldRole { generic, u, v, y, z, source, coefficient, weight };

std::string_view to_string(FieldRole role);

using GridPtr = std::shared_ptr<const SpaceTimeGrid>;

/// Nodal values on a space-time grid. Value semantics; the grid is shared
/// and immutable.
class Field {
 public:
  explicit Field(GridPtr grid, FieldRole role = FieldRole::generic);
  Field(GridPtr grid, std::vector<double> values, FieldRole role = FieldRole::generic);

  const SpaceTimeGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  FieldRole role() const { return role_; }
  Field& with_role(FieldRole role) {
    role_ = role;
    return *this;
  }

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t node) const { return values_[node]; }
  double& operator[](std::size_t node) { return values_[node]; }
  double at(std::size_t p, int it) const { return values_[grid_->index(p, it)]; }
  double& at(std::size_t p, int it) { return values_[grid_->index(p, it)]; }

  bool finite() const;
  double max_abs() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double c);
  /// Node-wise product.
  Field& operator*=(const Field& other);

 private:
  GridPtr grid_;
  std::vector<double> values_;
  FieldRole role_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(Field a, double c);
Field operator*(double c, Field a);
Field operator*(Field a, const Field& b);

/// One component per spatial axis.
using VectorField = std::vector<Field>;

Field constant_field(const GridPtr& grid, double value, FieldRole role = FieldRole::generic);
Field sample(const GridPtr& grid, const std::function<double(geometry::Point, double)>& fn,
             FieldRole role = FieldRole::generic);
/// g(x, t) = f(x, 2 t0 - t).
Field time_reversed(const Field& f);
/// |F|^2 node-wise.
Field squared_norm(const VectorField& F);
Field square(const Field& f);
/// a . b node-wise.
Field dot(const VectorField& a, const VectorField& b);

/// True when both fields live on the same grid object.
bool same_grid(const Field& a, const Field& b);
void require_same_grid(const Field& a, const Field& b);

}  // namespace mfguc::disc
