#include "mfguc/operators.hpp"

#include <vector>

#include "mfguc/errors.hpp"

namespace mfguc::disc {

namespace {

Stencil make(std::initializer_list<int> offsets, std::initializer_list<double> weights, double scale) {
  Stencil s;
  auto o = offsets.begin();
  auto w = weights.begin();
  for (; o != offsets.end(); ++o, ++w, ++s.count) {
    s.offsets[s.count] = *o;
    s.weights[s.count] = *w * scale;
  }
  return s;
}

std::size_t stride(const SpaceTimeGrid& g, int axis) {
  // axis 2 is time
  if (axis == 0) return 1;
  if (axis == 1) return static_cast<std::size_t>(g.n1());
  return g.space_size();
}

int axis_index(const SpaceTimeGrid& g, std::size_t node, int axis) {
  const std::size_t p = g.space_of(node);
  if (axis == 0) return g.i1_of(p);
  if (axis == 1) return g.i2_of(p);
  return g.time_of(node);
}

std::size_t shifted(std::size_t node, std::ptrdiff_t offset) {
  return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(node) + offset);
}

int axis_count(const SpaceTimeGrid& g, int axis) { return axis == 2 ? g.nt() : g.n(axis); }

void require_axis(const SpaceTimeGrid& g, int axis) {
  if (axis < 0 || axis >= g.dimension()) throw Error("spatial axis out of range");
}

template <typename StencilFn>
Field apply(const Field& f, int axis, StencilFn stencil_at) {
  const auto& g = f.grid();
  Field out(f.grid_ptr());
  const auto st = static_cast<std::ptrdiff_t>(stride(g, axis));
  const int n = axis_count(g, axis);
  for (std::size_t node = 0; node < g.size(); ++node) {
    const Stencil s = stencil_at(axis_index(g, node, axis), n);
    double acc = 0.0;
    for (int k = 0; k < s.count; ++k) acc += s.weights[k] * f[shifted(node, s.offsets[k] * st)];
    out[node] = acc;
  }
  return out;
}

template <typename StencilFn>
SparseMatrix assemble(const SpaceTimeGrid& g, int axis, StencilFn stencil_at) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(g.size() * 4);
  const auto st = static_cast<std::ptrdiff_t>(stride(g, axis));
  const int n = axis_count(g, axis);
  for (std::size_t node = 0; node < g.size(); ++node) {
    const Stencil s = stencil_at(axis_index(g, node, axis), n);
    for (int k = 0; k < s.count; ++k) {
      triplets.emplace_back(static_cast<int>(node), static_cast<int>(shifted(node, s.offsets[k] * st)), s.weights[k]);
    }
  }
  SparseMatrix m(static_cast<int>(g.size()), static_cast<int>(g.size()));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

}  // namespace

Stencil first_derivative_stencil(int i, int n, double h) {
  const double c = 1.0 / (2.0 * h);
  if (i == 0) return make({0, 1, 2}, {-3.0, 4.0, -1.0}, c);
  if (i == n - 1) return make({0, -1, -2}, {3.0, -4.0, 1.0}, c);
  return make({-1, 1}, {-1.0, 1.0}, c);
}

Stencil second_derivative_stencil(int i, int n, double h) {
  const double c = 1.0 / (h * h);
  if (i == 0) {
    if (n >= 4) return make({0, 1, 2, 3}, {2.0, -5.0, 4.0, -1.0}, c);
    return make({0, 1, 2}, {1.0, -2.0, 1.0}, c);
  }
  if (i == n - 1) {
    if (n >= 4) return make({0, -1, -2, -3}, {2.0, -5.0, 4.0, -1.0}, c);
    return make({0, -1, -2}, {1.0, -2.0, 1.0}, c);
  }
  return make({-1, 0, 1}, {1.0, -2.0, 1.0}, c);
}

Stencil time_derivative_stencil(int it, int nt, double tau) {
  if (it == 0) return make({0, 1}, {-1.0, 1.0}, 1.0 / tau);
  if (it == nt - 1) return make({-1, 0}, {-1.0, 1.0}, 1.0 / tau);
  return make({-1, 1}, {-1.0, 1.0}, 1.0 / (2.0 * tau));
}

Field partial(const Field& f, int axis) {
  require_axis(f.grid(), axis);
  const double h = f.grid().h(axis);
  return apply(f, axis, [h](int i, int n) { return first_derivative_stencil(i, n, h); });
}

Field second_partial(const Field& f, int axis) {
  require_axis(f.grid(), axis);
  const double h = f.grid().h(axis);
  return apply(f, axis, [h](int i, int n) { return second_derivative_stencil(i, n, h); });
}

VectorField gradient(const Field& f) {
  VectorField out;
  for (int a = 0; a < f.grid().dimension(); ++a) out.push_back(partial(f, a));
  return out;
}

Field laplacian(const Field& f) {
  Field out = second_partial(f, 0);
  for (int a = 1; a < f.grid().dimension(); ++a) out += second_partial(f, a);
  return out;
}

Field divergence(const VectorField& F) {
  if (F.empty() || static_cast<int>(F.size()) != F.front().grid().dimension()) {
    throw Error("divergence needs one component per spatial axis");
  }
  Field out = partial(F[0], 0);
  for (std::size_t a = 1; a < F.size(); ++a) out += partial(F[a], static_cast<int>(a));
  return out;
}

Field dt(const Field& f) {
  const double tau = f.grid().tau();
  return apply(f, 2, [tau](int i, int n) { return time_derivative_stencil(i, n, tau); });
}

SparseMatrix derivative_matrix(const SpaceTimeGrid& g, Derivative which) {
  switch (which) {
    case Derivative::d_x1:
    case Derivative::d_x2: {
      const int axis = which == Derivative::d_x1 ? 0 : 1;
      require_axis(g, axis);
      const double h = g.h(axis);
      return assemble(g, axis, [h](int i, int n) { return first_derivative_stencil(i, n, h); });
    }
    case Derivative::d_x1x1:
    case Derivative::d_x2x2: {
      const int axis = which == Derivative::d_x1x1 ? 0 : 1;
      require_axis(g, axis);
      const double h = g.h(axis);
      return assemble(g, axis, [h](int i, int n) { return second_derivative_stencil(i, n, h); });
    }
    case Derivative::d_t: {
      const double tau = g.tau();
      return assemble(g, 2, [tau](int i, int n) { return time_derivative_stencil(i, n, tau); });
    }
  }
  throw Error("unknown derivative");
}

SparseMatrix laplacian_matrix(const SpaceTimeGrid& g) {
  SparseMatrix m = derivative_matrix(g, Derivative::d_x1x1);
  if (g.dimension() == 2) m += derivative_matrix(g, Derivative::d_x2x2);
  return m;
}

SparseMatrix diagonal_matrix(const Field& f) {
  const int n = static_cast<int>(f.size());
  SparseMatrix m(n, n);
  m.reserve(Eigen::VectorXi::Constant(n, 1));
  for (int i = 0; i < n; ++i) m.insert(i, i) = f[static_cast<std::size_t>(i)];
  m.makeCompressed();
  return m;
}

SparseMatrix identity_matrix(const SpaceTimeGrid& g) {
  const int n = static_cast<int>(g.size());
  SparseMatrix m(n, n);
  m.setIdentity();
  return m;
}

}  // namespace mfguc::disc
