#pragma once

#include <cmath>
#include <memory>

#include "mfguc/field.hpp"
#include "mfguc/geometry.hpp"
#include "mfguc/grid.hpp"

namespace mfguc::test {

inline geometry::DomainSpec unit_interval(double eps = 0.25) {
  geometry::DomainSpec d;
  d.dimension = 1;
  d.gamma_faces = {geometry::Face::x_lo};
  d.epsilon_core = eps;
  return d;
}

inline geometry::DomainSpec unit_square(double eps = 0.25) {
  geometry::DomainSpec d;
  d.dimension = 2;
  d.gamma_faces = {geometry::Face::x_lo, geometry::Face::y_lo, geometry::Face::y_hi};
  d.epsilon_core = eps;
  return d;
}

inline disc::GridPtr make_grid(const geometry::DomainSpec& dom, int n, int nt, double t0 = 0.5, double delta = 0.25) {
  return std::make_shared<const disc::SpaceTimeGrid>(dom, disc::GridSize{n, dom.dimension == 2 ? n : 1, nt}, t0, delta);
}

inline geometry::WeightConfig default_weights(const disc::SpaceTimeGrid& g) {
  geometry::WeightParameters p;
  p.t0 = g.t0();
  p.delta = g.delta();
  return geometry::make_weight_config(g.domain(), g.aux(), p);
}

inline double max_abs_interior(const disc::Field& f) {
  const auto& g = f.grid();
  double m = 0.0;
  for (int it = 0; it < g.nt(); ++it) {
    for (std::size_t p = 0; p < g.space_size(); ++p) {
      if (!g.on_boundary(p)) m = std::max(m, std::abs(f.at(p, it)));
    }
  }
  return m;
}

// Composite Simpson rule on [a, b] with an even number of panels.
template <class Fn>
double simpson(Fn&& fn, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double sum = fn(a) + fn(b);
  for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * fn(a + i * h);
  return sum * h / 3.0;
}

}  // namespace mfguc::test
