#include "mfguc/carleman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "mfguc/errors.hpp"
#include "mfguc/operators.hpp"
#include "mfguc/parallel.hpp"

namespace mfguc::carleman {

namespace {

using disc::Region;

constexpr double kGuardExponent = 600.0;

struct BoundaryPrep {
  std::vector<std::pair<Region, Field>> gamma;  // one integrand per observed face
  Region complement_region;
  Field complement;
  Region lower;
  Region upper;
  Field slices;
};

BoundaryPrep prepare_boundary(const Field& f) {
  const auto& g = f.grid();
  const auto grad = disc::gradient(f);
  const Field ft = disc::dt(f);
  const Field f2 = disc::square(f);
  const Field grad2 = disc::squared_norm(grad);

  BoundaryPrep b{{},
                 disc::complement_region(g),
                 f2 + grad2 + disc::square(ft),
                 disc::slice_region(g, 0),
                 disc::slice_region(g, g.nt() - 1),
                 f2 + grad2};
  for (geometry::Face face : g.domain().gamma_faces) {
    Region r = disc::gamma_region(g);
    r.faces = {face};
    Field integrand = f2 + disc::square(ft);
    if (g.dimension() == 2) integrand += disc::square(grad[1 - geometry::normal_axis(face)]);
    b.gamma.emplace_back(std::move(r), std::move(integrand));
  }
  return b;
}

BoundaryTerms boundary_terms(const BoundaryPrep& b, const Field& phi, double s,
                             const BoundaryFunctionalParams& params) {
  const auto& g = phi.grid();
  BoundaryTerms out;
  if (params.include_gamma) {
    double acc = 0.0;
    for (const auto& [region, integrand] : b.gamma) acc += disc::integrate(integrand, region);
    out.gamma = {acc, params.C_B * s};
  }
  if (params.include_complement) {
    if (params.phi_weighted_complement) {
      out.complement = disc::log_weighted_integral(b.complement, b.complement_region, [&](std::size_t node) {
                         return 2.0 * s * phi[node];
                       }).scaled(s * s * s);
    } else {
      out.complement = {s * s * s * disc::integrate(b.complement, b.complement_region), 2.0 * s};
    }
  }
  if (params.include_slices) {
    // both slices carry the weight of the lower one; phi is even about t0
    const auto log_w = [&](std::size_t node) { return 2.0 * s * phi.at(g.space_of(node), 0); };
    out.slices = (disc::log_weighted_integral(b.slices, b.lower, log_w) +
                  disc::log_weighted_integral(b.slices, b.upper, log_w))
                     .scaled(s * s);
  }
  return out;
}

WeightedValue weighted(const Field& integrand, const Field& phi, double s) {
  return disc::log_weighted_integral(integrand, disc::full_region(phi.grid()),
                                     [&](std::size_t node) { return 2.0 * s * phi[node]; });
}

std::optional<double> row_ratio(const WeightedValue& lhs, const WeightedValue& denom) {
  if (denom.is_zero()) return std::nullopt;
  return disc::ratio(lhs, denom);
}

struct Lemma1Prep {
  Field phi;
  Field dt_lap;  // |f_t|^2 + |Lap f|^2
  Field grad2;
  Field f2;
  Field p2;
  BoundaryPrep boundary;
};

Lemma1Prep prepare_lemma1(int k, const Field& f, const Field& a, const mfg::LowerOrder& R,
                          const WeightConfig& cfg) {
  const auto out = mfg::apply_P(k, a, f, R);
  return {disc::phi_field(f.grid_ptr(), cfg),
          disc::square(disc::dt(f)) + disc::square(disc::laplacian(f)),
          disc::squared_norm(disc::gradient(f)),
          disc::square(f),
          disc::square(out.value),
          prepare_boundary(f)};
}

CarlemanRow evaluate_lemma1(const Lemma1Prep& p, double s, const BoundaryFunctionalParams& params) {
  CarlemanRow row;
  row.s = s;
  row.lhs = weighted((1.0 / s) * p.dt_lap + s * p.grad2 + (s * s * s) * p.f2, p.phi, s);
  row.rhs_source = weighted(p.p2, p.phi, s).scaled(s * s * s * s);
  row.B = boundary_terms(p.boundary, p.phi, s, params);
  row.ratio = row_ratio(row.lhs, row.rhs_source + row.B.total());
  return row;
}

struct Theorem2Prep {
  Field phi;
  Field y_dt_lap, y_grad2, y2;
  Field z_dt_lap, z_grad2, z2;
  Field dF2, dG2;
  BoundaryPrep by, bz;
};

Theorem2Prep prepare_theorem2(const Theorem2Input& in, const WeightConfig& cfg) {
  check_difference_system(in);
  const auto dt_lap = [](const Field& f) { return disc::square(disc::dt(f)) + disc::square(disc::laplacian(f)); };
  return {disc::phi_field(in.y.grid_ptr(), cfg),
          dt_lap(in.y),
          disc::squared_norm(disc::gradient(in.y)),
          disc::square(in.y),
          dt_lap(in.z),
          disc::squared_norm(disc::gradient(in.z)),
          disc::square(in.z),
          disc::square(in.dF),
          disc::square(in.dG),
          prepare_boundary(in.y),
          prepare_boundary(in.z)};
}

BoundaryTerms scaled_sum(const BoundaryTerms& a, const BoundaryTerms& b, double c) {
  return {(a.gamma + b.gamma).scaled(c), (a.complement + b.complement).scaled(c), (a.slices + b.slices).scaled(c)};
}

CarlemanRow evaluate_theorem2(const Theorem2Prep& p, double s, const BoundaryFunctionalParams& params) {
  CarlemanRow row;
  row.s = s;
  const double s2 = s * s;
  row.lhs = weighted(p.y_dt_lap + s2 * p.y_grad2 + (s2 * s2) * p.y2 + (1.0 / s) * p.z_dt_lap + s * p.z_grad2 +
                         (s2 * s) * p.z2,
                     p.phi, s);
  row.rhs_source = weighted(s * p.dF2 + p.dG2, p.phi, s);
  row.B = scaled_sum(boundary_terms(p.by, p.phi, s, params), boundary_terms(p.bz, p.phi, s, params), s);
  row.ratio = row_ratio(row.lhs, row.rhs_source + row.B.total());
  return row;
}

void require_positive_s(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError(fmt::format("s must be positive, got {}", s));
}

}  // namespace

void BoundaryFunctionalParams::validate() const {
  if (!(C_B >= 0.0) || !std::isfinite(C_B)) throw ConfigError("C_B must be finite and non-negative");
}

BoundaryTerms eval_B(const Field& f, double s, const WeightConfig& cfg, const BoundaryFunctionalParams& params) {
  params.validate();
  require_positive_s(s);
  if (!f.finite()) throw PreconditionError("field has non-finite values; traces are unavailable");
  check_overflow_guard(f.grid(), cfg, s);
  return boundary_terms(prepare_boundary(f), disc::phi_field(f.grid_ptr(), cfg), s, params);
}

double max_admissible_s(const disc::SpaceTimeGrid& grid, const WeightConfig& cfg) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int it = 0; it < grid.nt(); ++it) {
    for (std::size_t p = 0; p < grid.space_size(); ++p) {
      const double phi = geometry::eval_phi(grid.d(p), grid.t(it), cfg).phi;
      lo = std::min(lo, phi);
      hi = std::max(hi, phi);
    }
  }
  if (hi <= lo) return std::numeric_limits<double>::infinity();
  return 0.5 * kGuardExponent / (hi - lo);
}

void check_overflow_guard(const disc::SpaceTimeGrid& grid, const WeightConfig& cfg, double s) {
  const double smax = max_admissible_s(grid, cfg);
  if (s > smax) {
    throw OverflowGuardError(fmt::format("s = {} exceeds the overflow guard; max admissible s = {}", s, smax), smax);
  }
}

double CarlemanRow::normalizer() const {
  double n = -std::numeric_limits<double>::infinity();
  for (const auto* w : {&lhs, &rhs_source, &B.gamma, &B.complement, &B.slices}) {
    if (!w->is_zero()) n = std::max(n, w->log_scale);
  }
  return std::isfinite(n) ? n : 0.0;
}

CarlemanRow eval_lemma1(int k, const Field& f, const Field& a, const mfg::LowerOrder& R, double s,
                        const WeightConfig& cfg, const BoundaryFunctionalParams& params) {
  params.validate();
  require_positive_s(s);
  check_overflow_guard(f.grid(), cfg, s);
  return evaluate_lemma1(prepare_lemma1(k, f, a, R, cfg), s, params);
}

mfg::DifferenceResidual check_difference_system(const Theorem2Input& in) {
  auto r = mfg::difference_residual(in.coeffs, in.u_ref, in.v_ref, in.y, in.z, in.dF, in.dG);
  if (!(r.relative1 <= in.residual_tol) || !(r.relative2 <= in.residual_tol)) {
    throw PreconditionError(fmt::format("(y, z) do not solve the difference system: relative residuals {} and {} "
                                        "exceed {}",
                                        r.relative1, r.relative2, in.residual_tol));
  }
  return r;
}

CarlemanRow eval_theorem2(const Theorem2Input& in, double s, const WeightConfig& cfg,
                          const BoundaryFunctionalParams& params) {
  params.validate();
  require_positive_s(s);
  check_overflow_guard(in.y.grid(), cfg, s);
  return evaluate_theorem2(prepare_theorem2(in, cfg), s, params);
}

std::string_view to_string(Estimate e) {
  switch (e) {
    case Estimate::lemma1_k1: return "lemma1-k1";
    case Estimate::lemma1_k2: return "lemma1-k2";
    case Estimate::theorem2: return "theorem2";
  }
  return "?";
}

Estimate parse_estimate(std::string_view name) {
  for (Estimate e : {Estimate::lemma1_k1, Estimate::lemma1_k2, Estimate::theorem2}) {
    if (to_string(e) == name) return e;
  }
  throw ConfigError(fmt::format("unknown estimate '{}'", name));
}

std::vector<double> linear_s_grid(double s_min, double s_max, int steps) {
  if (steps < 1) throw ConfigError("s grid needs at least one step");
  if (!(s_min > 0.0) || !(s_max >= s_min)) throw ConfigError("s grid needs 0 < s_min <= s_max");
  if (steps == 1) return {s_min};
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) out[i] = s_min + (s_max - s_min) * i / (steps - 1);
  out.back() = s_max;
  return out;
}

CarlemanReport sweep_s(Estimate estimate, const EstimateInput& input, const std::vector<double>& s_grid,
                       const WeightConfig& cfg, const BoundaryFunctionalParams& params, unsigned workers) {
  if (s_grid.empty()) throw ConfigError("empty s grid");
  params.validate();
  for (double s : s_grid) require_positive_s(s);
  std::vector<CarlemanRow> rows(s_grid.size());

  if (estimate == Estimate::theorem2) {
    const auto* in = std::get_if<Theorem2Input>(&input);
    if (!in) throw ConfigError("theorem2 needs a difference pair");
    check_overflow_guard(in->y.grid(), cfg, *std::max_element(s_grid.begin(), s_grid.end()));
    const auto prep = prepare_theorem2(*in, cfg);
    parallel_for(s_grid.size(), workers, [&](std::size_t i) { rows[i] = evaluate_theorem2(prep, s_grid[i], params); });
  } else {
    const auto* in = std::get_if<Lemma1Input>(&input);
    if (!in) throw ConfigError("lemma1 needs a single field");
    check_overflow_guard(in->f.grid(), cfg, *std::max_element(s_grid.begin(), s_grid.end()));
    const int k = estimate == Estimate::lemma1_k1 ? 1 : 2;
    const auto prep = prepare_lemma1(k, in->f, in->a, in->R, cfg);
    parallel_for(s_grid.size(), workers, [&](std::size_t i) { rows[i] = evaluate_lemma1(prep, s_grid[i], params); });
  }
  return summarize(estimate, std::move(rows));
}

CarlemanReport summarize(Estimate estimate, std::vector<CarlemanRow> rows) {
  CarlemanReport rep;
  rep.estimate = estimate;
  rep.rows = std::move(rows);
  const auto& r = rep.rows;
  const std::size_t n = r.size();
  rep.all_finite = n > 0 && std::all_of(r.begin(), r.end(), [](const CarlemanRow& row) {
                     return row.ratio && std::isfinite(*row.ratio);
                   });
  if (!rep.all_finite) return rep;

  const std::size_t tail = std::max<std::size_t>(1, (n + 3) / 4);
  const std::size_t head = n - tail;
  rep.nonincreasing = rep.nondecreasing = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = *r[i].ratio;
    rep.global_max = std::max(rep.global_max, q);
    (i < head ? rep.head_max : rep.tail_max) = std::max(i < head ? rep.head_max : rep.tail_max, q);
    if (i > 0) {
      if (q > *r[i - 1].ratio) rep.nonincreasing = false;
      if (q < *r[i - 1].ratio) rep.nondecreasing = false;
    }
  }
  rep.bounded = head == 0 || rep.tail_max <= 1.05 * rep.head_max;

  double running = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    running = std::max(running, *r[i].ratio);
    if (running >= 0.9 * rep.global_max) {
      rep.s_lo = r[i].s;
      double c = 0.0;
      for (std::size_t j = i; j < n; ++j) c = std::max(c, *r[j].ratio);
      rep.C_emp = c;
      break;
    }
  }
  return rep;
}

void write_report_csv(std::ostream& out, const CarlemanReport& report, const std::string& preamble) {
  out << preamble;
  out << "s,lhs,rhs_source,B1,B2,B3,ratio,normalizer\n";
  for (const auto& row : report.rows) {
    const double n = row.normalizer();
    const auto v = [n](const WeightedValue& w) { return w.rescaled(n).value; };
    out << fmt::format("{},{},{},{},{},{},{},{}\n", row.s, v(row.lhs), v(row.rhs_source), v(row.B.gamma),
                       v(row.B.complement), v(row.B.slices), row.ratio ? fmt::format("{}", *row.ratio) : "NA", n);
  }
}

}  // namespace mfguc::carleman
