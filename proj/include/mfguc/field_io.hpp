#pragma once

#include <iosfwd>
#include <string>

#include "mfguc/field.hpp"

namespace mfguc::disc {

/// CSV layout:
///   # mfguc-field v1
///   # config_hash=<hex>            (omitted when the hash is empty)
///   # dim=<d> n1=<n1> n2=<n2> nt=<nt> role=<role>
///   index,i1,i2,it,x1,x2,t,value
/// followed by one row per node in node order.
void write_field_csv(std::ostream& out, const Field& f, const std::string& config_hash = {});
/// Reads values back into a field on `grid`; dimensions must match.
Field read_field_csv(std::istream& in, const GridPtr& grid);

/// Binary layout (little-endian): "MFGF", u32 version=1, u32 dim, u32 n1,
/// u32 n2, u32 nt, then n1*n2*nt doubles in node order.
void write_field_binary(std::ostream& out, const Field& f);
Field read_field_binary(std::istream& in, const GridPtr& grid);

}  // namespace mfguc::disc
