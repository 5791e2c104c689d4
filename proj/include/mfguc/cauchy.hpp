#pragma once

#include <vector>

#include "mfguc/field.hpp"

namespace mfguc::disc {

/// Value and outward normal derivative of a field on one face, for every
/// time node: entry [it * nodes.size() + k].
struct FaceTrace {
  geometry::Face face{};
  std::vector<std::size_t> nodes;
  std::vector<double> value;
  std::vector<double> normal;
};

/// Value and spatial gradient of a field on one time slice.
struct SliceTrace {
  int time_index = 0;
  std::vector<double> value;
  std::vector<std::vector<double>> gradient;  // [axis][space node]
};

struct CauchyData {
  std::vector<FaceTrace> gamma;
  std::vector<FaceTrace> complement;
  SliceTrace lower;  // t0 - delta
  SliceTrace upper;  // t0 + delta

  /// Largest |value| or |normal derivative| over the observed faces.
  double gamma_max_abs() const;
};

/// Normal derivatives use 3-point one-sided differences; slices are copied.
CauchyData extract_cauchy(const Field& f);

FaceTrace face_trace(const Field& f, geometry::Face face);

}  // namespace mfguc::disc
