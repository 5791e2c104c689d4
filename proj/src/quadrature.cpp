#include "mfguc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfguc/errors.hpp"

namespace mfguc::disc {

double WeightedValue::to_double() const {
  if (value == 0.0) return 0.0;
  return value * std::exp(log_scale);
}

WeightedValue WeightedValue::rescaled(double new_log_scale) const {
  if (value == 0.0) return {0.0, new_log_scale};
  return {value * std::exp(log_scale - new_log_scale), new_log_scale};
}

WeightedValue operator+(const WeightedValue& a, const WeightedValue& b) {
  if (a.value == 0.0) return b;
  if (b.value == 0.0) return a;
  const double scale = std::max(a.log_scale, b.log_scale);
  return {a.rescaled(scale).value + b.rescaled(scale).value, scale};
}

double ratio(const WeightedValue& a, const WeightedValue& b) {
  if (b.value == 0.0) throw NumericalError("ratio with a zero denominator");
  if (a.value == 0.0) return 0.0;
  return (a.value / b.value) * std::exp(a.log_scale - b.log_scale);
}

namespace {

std::vector<double> trapezoid(const IndexRange& range, double h) {
  std::vector<double> w(static_cast<std::size_t>(range.size()), h);
  if (w.size() == 1) {
    w[0] = 0.0;
  } else if (!w.empty()) {
    w.front() *= 0.5;
    w.back() *= 0.5;
  }
  return w;
}

std::vector<double> time_weights(const SpaceTimeGrid& g, const Region& r) {
  if (!r.integrate_time) {
    if (r.time.size() != 1) throw Error("a non-integrated time range must be a single slice");
    return {1.0};
  }
  return trapezoid(r.time, g.tau());
}

}  // namespace

Region full_region(const SpaceTimeGrid& g) {
  Region r;
  r.space = g.full_box();
  r.time = g.all_times();
  return r;
}

Region window_region(const SpaceTimeGrid& g, double eps, double r) {
  Region reg;
  reg.space = g.core_box(eps);
  reg.time = g.window(r);
  return reg;
}

Region gamma_region(const SpaceTimeGrid& g) {
  Region r;
  r.kind = Region::Kind::faces;
  r.faces = g.domain().gamma_faces;
  r.time = g.all_times();
  return r;
}

Region complement_region(const SpaceTimeGrid& g) {
  Region r;
  r.kind = Region::Kind::faces;
  r.faces = g.domain().complement_faces();
  r.time = g.all_times();
  return r;
}

Region slice_region(const SpaceTimeGrid& g, int it) {
  Region r;
  r.space = g.full_box();
  r.time = {it, it};
  r.integrate_time = false;
  return r;
}

std::vector<std::pair<std::size_t, double>> quadrature_nodes(const SpaceTimeGrid& g,
                                                             const Region& region) {
  std::vector<std::pair<std::size_t, double>> out;
  const auto wt = time_weights(g, region);
  if (region.kind == Region::Kind::box) {
    const auto w1 = trapezoid(region.space[0], g.h(0));
    const auto w2 = g.dimension() == 2 ? trapezoid(region.space[1], g.h(1)) : std::vector<double>{1.0};
    for (int it = region.time.first; it <= region.time.last; ++it) {
      for (int j = 0; j < static_cast<int>(w2.size()); ++j) {
        for (int i = 0; i < static_cast<int>(w1.size()); ++i) {
          const std::size_t p = g.space_index(region.space[0].first + i,
                                              g.dimension() == 2 ? region.space[1].first + j : 0);
          out.emplace_back(g.index(p, it), wt[it - region.time.first] * w1[i] * w2[j]);
        }
      }
    }
    return out;
  }
  for (geometry::Face f : region.faces) {
    const auto& nodes = g.face_nodes(f);
    const int axis = geometry::normal_axis(f);
    const auto ws = g.dimension() == 2
                        ? trapezoid({0, static_cast<int>(nodes.size()) - 1}, g.h(1 - axis))
                        : std::vector<double>{1.0};
    for (int it = region.time.first; it <= region.time.last; ++it) {
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        out.emplace_back(g.index(nodes[k], it), wt[it - region.time.first] * ws[k]);
      }
    }
  }
  return out;
}

double integrate(const Field& f, const Region& region) {
  double acc = 0.0;
  for (const auto& [node, w] : quadrature_nodes(f.grid(), region)) acc += w * f[node];
  return acc;
}

WeightedValue log_weighted_integral(const Field& f, const Region& region,
                                    const std::function<double(std::size_t)>& log_weight) {
  const auto nodes = quadrature_nodes(f.grid(), region);
  if (nodes.empty()) throw Error("weighted integral over an empty region");
  double lmax = -std::numeric_limits<double>::infinity();
  for (const auto& [node, w] : nodes) lmax = std::max(lmax, log_weight(node));
  double acc = 0.0;
  for (const auto& [node, w] : nodes) acc += w * f[node] * std::exp(log_weight(node) - lmax);
  return {acc, lmax};
}

WeightedValue weighted_integral(const Field& f, double s, const geometry::WeightConfig& cfg,
                                const Region& region) {
  const auto& g = f.grid();
  return log_weighted_integral(f, region, [&](std::size_t node) {
    const auto phi = geometry::eval_phi(g.d(g.space_of(node)), g.t(g.time_of(node)), cfg);
    return 2.0 * s * phi.phi;
  });
}

Field phi_field(const GridPtr& grid, const geometry::WeightConfig& cfg) {
  Field out(grid, FieldRole::weight);
  for (int it = 0; it < grid->nt(); ++it) {
    for (std::size_t p = 0; p < grid->space_size(); ++p) {
      out.at(p, it) = geometry::eval_phi(grid->d(p), grid->t(it), cfg).phi;
    }
  }
  return out;
}

}  // namespace mfguc::disc
