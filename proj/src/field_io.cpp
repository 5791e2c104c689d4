#include "mfguc/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "mfguc/errors.hpp"

namespace mfguc::disc {

static_assert(std::endian::native == std::endian::little, "binary field format assumes little-endian");

void write_field_csv(std::ostream& out, const Field& f, const std::string& config_hash) {
  const auto& g = f.grid();
  out << "# mfguc-field v1\n";
  if (!config_hash.empty()) out << "# config_hash=" << config_hash << '\n';
  out << fmt::format("# dim={} n1={} n2={} nt={} role={}\n", g.dimension(), g.n1(), g.n2(), g.nt(),
                     to_string(f.role()));
  out << "index,i1,i2,it,x1,x2,t,value\n";
  for (std::size_t node = 0; node < g.size(); ++node) {
    const std::size_t p = g.space_of(node);
    const int it = g.time_of(node);
    const auto x = g.point(p);
    out << fmt::format("{},{},{},{},{},{},{},{}\n", node, g.i1_of(p), g.i2_of(p), it, x.x1, x.x2, g.t(it),
                       f[node]);
  }
}

Field read_field_csv(std::istream& in, const GridPtr& grid) {
  std::string line;
  int dim = 0, n1 = 0, n2 = 0, nt = 0;
  bool have_dims = false;
  FieldRole role = FieldRole::generic;
  while (std::getline(in, line)) {
    if (line.rfind("# dim=", 0) == 0) {
      if (std::sscanf(line.c_str(), "# dim=%d n1=%d n2=%d nt=%d", &dim, &n1, &n2, &nt) != 4) {
        throw ConfigError("malformed field CSV dimension header");
      }
      have_dims = true;
      if (const auto at = line.find(" role="); at != std::string::npos) {
        const auto name = line.substr(at + 6);
        for (auto r : {FieldRole::u, FieldRole::v, FieldRole::y, FieldRole::z, FieldRole::source,
                       FieldRole::coefficient, FieldRole::weight}) {
          if (name == to_string(r)) role = r;
        }
      }
    } else if (line.rfind("index,", 0) == 0) {
      break;
    } else if (line.empty() || line[0] != '#') {
      throw ConfigError("field CSV is missing its column header");
    }
  }
  if (!have_dims) throw ConfigError("field CSV is missing its dimension header");
  if (dim != grid->dimension() || n1 != grid->n1() || n2 != grid->n2() || nt != grid->nt()) {
    throw ConfigError("field CSV dimensions do not match the grid");
  }
  std::vector<double> values(grid->size());
  std::size_t count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto pos = line.rfind(',');
    if (pos == std::string::npos || count >= values.size()) throw ConfigError("malformed field CSV row");
    values[count++] = std::stod(line.substr(pos + 1));
  }
  if (count != values.size()) throw ConfigError("field CSV has the wrong number of rows");
  Field f(grid, std::move(values));
  f.with_role(role);
  return f;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw ConfigError("truncated binary field");
  return v;
}

}  // namespace

void write_field_binary(std::ostream& out, const Field& f) {
  const auto& g = f.grid();
  out.write("MFGF", 4);
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(g.dimension()));
  put_u32(out, static_cast<std::uint32_t>(g.n1()));
  put_u32(out, static_cast<std::uint32_t>(g.n2()));
  put_u32(out, static_cast<std::uint32_t>(g.nt()));
  out.write(reinterpret_cast<const char*>(f.values().data()),
            static_cast<std::streamsize>(f.size() * sizeof(double)));
}

Field read_field_binary(std::istream& in, const GridPtr& grid) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "MFGF", 4) != 0) throw ConfigError("not a binary field file");
  if (get_u32(in) != 1) throw ConfigError("unsupported binary field version");
  const auto dim = get_u32(in), n1 = get_u32(in), n2 = get_u32(in), nt = get_u32(in);
  if (static_cast<int>(dim) != grid->dimension() || static_cast<int>(n1) != grid->n1() ||
      static_cast<int>(n2) != grid->n2() || static_cast<int>(nt) != grid->nt()) {
    throw ConfigError("binary field dimensions do not match the grid");
  }
  std::vector<double> values(grid->size());
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!in) throw ConfigError("truncated binary field");
  return Field(grid, std::move(values));
}

}  // namespace mfguc::disc
