#include "mfguc/field.hpp"

#include <algorithm>
#include <cmath>

#include "mfguc/errors.hpp"

namespace mfguc::disc {

std::string_view to_string(FieldRole role) {
  switch (role) {
    case FieldRole::generic: return "generic";
    case FieldRole::u: return "u";
    case FieldRole::v: return "v";
    case FieldRole::y: return "y";
    case FieldRole::z: return "z";
    case FieldRole::source: return "source";
    case FieldRole::coefficient: return "coefficient";
    case FieldRole::weight: return "weight";
  }
  return "generic";
}

Field::Field(GridPtr grid, FieldRole role) : grid_(std::move(grid)), role_(role) {
  if (!grid_) throw Error("field requires a grid");
  values_.assign(grid_->size(), 0.0);
}

Field::Field(GridPtr grid, std::vector<double> values, FieldRole role)
    : grid_(std::move(grid)), values_(std::move(values)), role_(role) {
  if (!grid_) throw Error("field requires a grid");
  if (values_.size() != grid_->size()) throw Error("field value count does not match the grid");
}

bool Field::finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

Field& Field::operator*=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= other.values_[i];
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(Field a, double c) { return a *= c; }
Field operator*(double c, Field a) { return a *= c; }
Field operator*(Field a, const Field& b) { return a *= b; }

Field constant_field(const GridPtr& grid, double value, FieldRole role) {
  return Field(grid, std::vector<double>(grid->size(), value), role);
}

Field sample(const GridPtr& grid, const std::function<double(geometry::Point, double)>& fn,
             FieldRole role) {
  Field f(grid, role);
  for (int it = 0; it < grid->nt(); ++it) {
    const double t = grid->t(it);
    for (std::size_t p = 0; p < grid->space_size(); ++p) f.at(p, it) = fn(grid->point(p), t);
  }
  return f;
}

Field time_reversed(const Field& f) {
  const auto& g = f.grid();
  Field out(f.grid_ptr(), f.role());
  for (int it = 0; it < g.nt(); ++it) {
    for (std::size_t p = 0; p < g.space_size(); ++p) out.at(p, it) = f.at(p, g.nt() - 1 - it);
  }
  return out;
}

Field square(const Field& f) { return f * f; }

Field squared_norm(const VectorField& F) {
  Field out(F.front().grid_ptr());
  for (const auto& c : F) out += c * c;
  return out;
}

Field dot(const VectorField& a, const VectorField& b) {
  Field out(a.front().grid_ptr());
  for (std::size_t k = 0; k < a.size(); ++k) out += a[k] * b[k];
  return out;
}

bool same_grid(const Field& a, const Field& b) { return a.grid_ptr() == b.grid_ptr(); }

void require_same_grid(const Field& a, const Field& b) {
  if (!same_grid(a, b)) throw Error("fields live on different grids");
}

}  // namespace mfguc::disc
