#include "mfguc/grid.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mfguc/errors.hpp"

namespace mfguc::disc {

using geometry::Face;

SpaceTimeGrid::SpaceTimeGrid(geometry::DomainSpec domain, GridSize size, double t0, double delta)
    : domain_(std::move(domain)),
      d_(geometry::build_d(domain_)),
      size_(size),
      t0_(t0),
      delta_(delta) {
  if (domain_.dimension == 1) size_.n2 = 1;
  if (size_.n1 < 3 || (domain_.dimension == 2 && size_.n2 < 3) || size_.nt < 3) {
    throw ConfigError(fmt::format("degenerate grid: need at least 3 nodes per axis (n1={}, n2={}, nt={})",
                                  size_.n1, size_.n2, size_.nt));
  }
  if (size_.nt % 2 == 0) {
    throw ConfigError(fmt::format("nt must be odd so that t0 is a grid node, got {}", size_.nt));
  }
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  for (int a = 0; a < domain_.dimension; ++a) h_[a] = domain_.extents[a] / (n(a) - 1);
  tau_ = 2.0 * delta_ / (size_.nt - 1);

  const std::size_t ns = space_size();
  kinds_.assign(ns, NodeKind::interior);
  d_values_.resize(ns);
  for (std::size_t p = 0; p < ns; ++p) d_values_[p] = d_(point(p));

  for (Face f : domain_.faces()) {
    auto& nodes = face_nodes_[static_cast<int>(f)];
    const int axis = geometry::normal_axis(f);
    const int fixed = geometry::outward_sign(f) > 0 ? n(axis) - 1 : 0;
    const int along = domain_.dimension == 2 ? n(1 - axis) : 1;
    for (int k = 0; k < along; ++k) {
      const int i1 = axis == 0 ? fixed : k;
      const int i2 = axis == 0 ? k : fixed;
      nodes.push_back(space_index(i1, i2));
    }
  }
  // A node on two faces is a corner; otherwise its label follows its face.
  std::vector<int> face_count(ns, 0);
  for (Face f : domain_.faces()) {
    for (std::size_t p : face_nodes(f)) {
      ++face_count[p];
      kinds_[p] = domain_.is_gamma(f) ? NodeKind::gamma : NodeKind::complement;
    }
  }
  for (std::size_t p = 0; p < ns; ++p) {
    if (face_count[p] > 1) kinds_[p] = NodeKind::corner;
  }
}

double SpaceTimeGrid::h_max() const {
  return domain_.dimension == 2 ? std::max(h_[0], h_[1]) : h_[0];
}

geometry::Point SpaceTimeGrid::point(std::size_t p) const {
  return {coord(0, i1_of(p)), domain_.dimension == 2 ? coord(1, i2_of(p)) : 0.0};
}

const std::vector<std::size_t>& SpaceTimeGrid::face_nodes(Face face) const {
  return face_nodes_[static_cast<int>(face)];
}

IndexRange SpaceTimeGrid::window(double r) const {
  const int half = static_cast<int>(std::floor(r * delta_ / tau_ + 1e-9));
  const int c = center_index();
  return {c - std::min(half, c), c + std::min(half, c)};
}

std::array<IndexRange, 2> SpaceTimeGrid::full_box() const {
  return {IndexRange{0, size_.n1 - 1}, IndexRange{0, size_.n2 - 1}};
}

std::array<IndexRange, 2> SpaceTimeGrid::core_box(double eps) const {
  auto box = full_box();
  const auto& g = d_.gradient();
  const double tol = 1e-12 * std::max(1.0, d_.max_value());
  for (int a = 0; a < domain_.dimension; ++a) {
    if (g[a] == 0.0) continue;
    int first = n(a);
    int last = -1;
    for (int i = 0; i < n(a); ++i) {
      // d depends on this coordinate alone.
      geometry::Point x;
      (a == 0 ? x.x1 : x.x2) = coord(a, i);
      const double d = d_(x);
      if (d >= eps - tol) {
        first = std::min(first, i);
        last = std::max(last, i);
      }
    }
    box[a] = {first, last};
  }
  return box;
}

}  // namespace mfguc::disc
