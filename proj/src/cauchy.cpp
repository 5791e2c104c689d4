#include "mfguc/cauchy.hpp"

#include <algorithm>
#include <cmath>

#include "mfguc/operators.hpp"

namespace mfguc::disc {

double CauchyData::gamma_max_abs() const {
  double m = 0.0;
  for (const auto& tr : gamma) {
    for (double v : tr.value) m = std::max(m, std::abs(v));
    for (double v : tr.normal) m = std::max(m, std::abs(v));
  }
  return m;
}

FaceTrace face_trace(const Field& f, geometry::Face face) {
  const auto& g = f.grid();
  FaceTrace tr;
  tr.face = face;
  tr.nodes = g.face_nodes(face);
  const int axis = geometry::normal_axis(face);
  const double sign = geometry::outward_sign(face);
  const Field dn = partial(f, axis);
  const std::size_t m = tr.nodes.size();
  tr.value.resize(m * g.nt());
  tr.normal.resize(m * g.nt());
  for (int it = 0; it < g.nt(); ++it) {
    for (std::size_t k = 0; k < m; ++k) {
      tr.value[it * m + k] = f.at(tr.nodes[k], it);
      tr.normal[it * m + k] = sign * dn.at(tr.nodes[k], it);
    }
  }
  return tr;
}

namespace {

SliceTrace slice_trace(const Field& f, const VectorField& grad, int it) {
  const auto& g = f.grid();
  SliceTrace s;
  s.time_index = it;
  s.value.resize(g.space_size());
  s.gradient.assign(grad.size(), std::vector<double>(g.space_size()));
  for (std::size_t p = 0; p < g.space_size(); ++p) {
    s.value[p] = f.at(p, it);
    for (std::size_t a = 0; a < grad.size(); ++a) s.gradient[a][p] = grad[a].at(p, it);
  }
  return s;
}

}  // namespace

CauchyData extract_cauchy(const Field& f) {
  const auto& g = f.grid();
  CauchyData c;
  for (auto face : g.domain().gamma_faces) c.gamma.push_back(face_trace(f, face));
  for (auto face : g.domain().complement_faces()) c.complement.push_back(face_trace(f, face));
  const auto grad = gradient(f);
  c.lower = slice_trace(f, grad, 0);
  c.upper = slice_trace(f, grad, g.nt() - 1);
  return c;
}

}  // namespace mfguc::disc
