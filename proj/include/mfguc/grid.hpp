#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "mfguc/geometry.hpp"

namespace mfguc::disc {

struct GridSize {
  int n1 = 33;
  int n2 = 1;
  int nt = 33;
};

/// Closed index range [first, last].
struct IndexRange {
  int first = 0;
  int last = -1;

  int size() const { return last >= first ? last - first + 1 : 0; }
  bool empty() const { return size() == 0; }
  bool contains(int i) const { return i >= first && i <= last; }
};

enum class NodeKind { interior, gamma, complement, corner };

/// Uniform tensor grid over the closure of Omega x (t0 - delta, t0 + delta).
///
/// Space nodes are numbered p = i1 + n1 * i2 and space-time nodes
/// it * space_size() + p. The number of time nodes must be odd so that t0 is
/// itself a node and every time window is symmetric about it.
class SpaceTimeGrid {
 public:
  SpaceTimeGrid(geometry::DomainSpec domain, GridSize size, double t0, double delta);

  int dimension() const { return domain_.dimension; }
  int n(int axis) const { return axis == 0 ? size_.n1 : size_.n2; }
  int n1() const { return size_.n1; }
  int n2() const { return size_.n2; }
  int nt() const { return size_.nt; }
  const GridSize& size_spec() const { return size_; }
  std::size_t space_size() const { return static_cast<std::size_t>(size_.n1) * size_.n2; }
  std::size_t size() const { return space_size() * size_.nt; }

  double h(int axis) const { return h_[axis]; }
  /// Largest spatial mesh width.
  double h_max() const;
  double tau() const { return tau_; }
  double t0() const { return t0_; }
  double delta() const { return delta_; }

  double coord(int axis, int i) const { return h_[axis] * i; }
  double t(int it) const { return t0_ - delta_ + tau_ * it; }
  geometry::Point point(std::size_t p) const;

  std::size_t space_index(int i1, int i2 = 0) const {
    return static_cast<std::size_t>(i1) + static_cast<std::size_t>(size_.n1) * i2;
  }
  int i1_of(std::size_t p) const { return static_cast<int>(p % size_.n1); }
  int i2_of(std::size_t p) const { return static_cast<int>(p / size_.n1); }
  std::size_t index(std::size_t p, int it) const { return static_cast<std::size_t>(it) * space_size() + p; }
  std::size_t space_of(std::size_t node) const { return node % space_size(); }
  int time_of(std::size_t node) const { return static_cast<int>(node / space_size()); }

  NodeKind kind(std::size_t p) const { return kinds_[p]; }
  bool on_boundary(std::size_t p) const { return kinds_[p] != NodeKind::interior; }
  /// Space nodes of a face, ordered along the face (corners included).
  const std::vector<std::size_t>& face_nodes(geometry::Face face) const;

  const geometry::DomainSpec& domain() const { return domain_; }
  const geometry::AuxiliaryFunction& aux() const { return d_; }
  /// d evaluated at space node p.
  double d(std::size_t p) const { return d_values_[p]; }

  int center_index() const { return (size_.nt - 1) / 2; }
  IndexRange all_times() const { return {0, size_.nt - 1}; }
  /// Time indices with |t - t0| <= r delta.
  IndexRange window(double r) const;
  /// Per-axis index ranges of the box {d >= eps}.
  std::array<IndexRange, 2> core_box(double eps) const;
  std::array<IndexRange, 2> full_box() const;

 private:
  geometry::DomainSpec domain_;
  geometry::AuxiliaryFunction d_;
  GridSize size_;
  double t0_;
  double delta_;
  std::array<double, 2> h_{1.0, 1.0};
  double tau_;
  std::vector<NodeKind> kinds_;
  std::vector<double> d_values_;
  std::array<std::vector<std::size_t>, 4> face_nodes_;
};

}  // namespace mfguc::disc
