#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mfguc/mfg.hpp"
#include "mfguc/quadrature.hpp"

namespace mfguc::carleman {

using disc::Field;
using disc::WeightedValue;
using geometry::WeightConfig;

struct BoundaryFunctionalParams {
  /// Constant in the e^{C s} factor of the Gamma term.
  double C_B = 0.0;
  bool include_gamma = true;
  bool include_complement = true;
  bool include_slices = true;
  /// Replace the constant e^{2s} on the unobserved boundary by e^{2 s phi}.
  bool phi_weighted_complement = false;

  void validate() const;
};

/// The three summands of B(f).
struct BoundaryTerms {
  WeightedValue gamma;       // e^{C_B s} |f|^2_{H^1(Gamma x I)}
  WeightedValue complement;  // s^3 e^{2s} int (|f|^2 + |grad_{x,t} f|^2)
  WeightedValue slices;      // s^2 int_Omega (...)(t0 -+ delta) e^{2 s phi(x, t0 - delta)}

  WeightedValue total() const { return gamma + complement + slices; }
};

BoundaryTerms eval_B(const Field& f, double s, const WeightConfig& cfg, const BoundaryFunctionalParams& params = {});

/// Largest s with 2 s (phi_max - phi_min) <= 600 on the grid.
double max_admissible_s(const disc::SpaceTimeGrid& grid, const WeightConfig& cfg);
/// Throws OverflowGuardError naming max_admissible_s when s exceeds it.
void check_overflow_guard(const disc::SpaceTimeGrid& grid, const WeightConfig& cfg, double s);

struct CarlemanRow {
  double s = 0.0;
  WeightedValue lhs;
  WeightedValue rhs_source;
  BoundaryTerms B;
  /// lhs / (rhs_source + B); empty when the denominator vanishes.
  std::optional<double> ratio;

  /// Common log scale used when the row is printed.
  double normalizer() const;
};

CarlemanRow eval_lemma1(int k, const Field& f, const Field& a, const mfg::LowerOrder& R, double s,
                        const WeightConfig& cfg, const BoundaryFunctionalParams& params = {});

struct Theorem2Input {
  mfg::MFGCoefficients coeffs;
  Field u_ref;
  Field v_ref;
  Field y;
  Field z;
  Field dF;
  Field dG;
  /// Largest accepted relative residual of the difference system.
  double residual_tol = 1e-8;
};

/// Throws PreconditionError unless (y, z) solve the difference system.
mfg::DifferenceResidual check_difference_system(const Theorem2Input& in);

CarlemanRow eval_theorem2(const Theorem2Input& in, double s, const WeightConfig& cfg,
                          const BoundaryFunctionalParams& params = {});

enum class Estimate { lemma1_k1, lemma1_k2, theorem2 };

std::string_view to_string(Estimate e);
Estimate parse_estimate(std::string_view name);

struct Lemma1Input {
  Field f;
  Field a;
  mfg::LowerOrder R;
};

using EstimateInput = std::variant<Lemma1Input, Theorem2Input>;

struct CarlemanReport {
  Estimate estimate = Estimate::lemma1_k1;
  std::vector<CarlemanRow> rows;
  std::optional<double> s_lo;
  std::optional<double> C_emp;
  /// Ratio maxima over all rows, over the rows before the last quartile and
  /// over the last quartile.
  double global_max = 0.0;
  double head_max = 0.0;
  double tail_max = 0.0;
  bool all_finite = false;
  bool nonincreasing = false;
  bool nondecreasing = false;
  /// Every ratio finite and tail_max <= 1.05 head_max.
  bool bounded = false;
};

/// Evenly spaced grid of `steps` values from s_min to s_max inclusive.
std::vector<double> linear_s_grid(double s_min, double s_max, int steps);

/// Rows are evaluated concurrently; the report does not depend on `workers`.
CarlemanReport sweep_s(Estimate estimate, const EstimateInput& input, const std::vector<double>& s_grid,
                       const WeightConfig& cfg, const BoundaryFunctionalParams& params = {},
                       unsigned workers = 1);

/// Derives s_lo, C_emp and the verdict flags from evaluated rows.
CarlemanReport summarize(Estimate estimate, std::vector<CarlemanRow> rows);

/// Columns s,lhs,rhs_source,B1,B2,B3,ratio,normalizer; values are scaled by
/// exp(-normalizer). An undefined ratio prints as NA.
void write_report_csv(std::ostream& out, const CarlemanReport& report, const std::string& preamble = {});

}  // namespace mfguc::carleman
