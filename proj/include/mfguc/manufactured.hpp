#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "mfguc/mfg.hpp"

namespace mfguc::mfg {

using ScalarFn = std::function<double(geometry::Point, double)>;

/// Closed-form solution pair and the data that makes it solve the system.
/// F and G come from symbolic substitution (tools/derive_sources.py).
struct AnalyticCase {
  std::string id;
  int dimension = 1;
  ScalarFn u, v, F, G, a1, a2, kappa, h;
};

/// Ids: zero, 1d-linear, 1d-nonlinear, 1d-nonlinear-a2, 2d-smooth.
std::vector<std::string> catalogue();
/// Time enters through t - t_ref.
AnalyticCase analytic_case(std::string_view id, double t_ref);

struct ManufacturedCase {
  MFGProblem problem;
  Field u_exact;
  Field v_exact;
};

/// Samples an analytic case on the grid (t_ref defaults to the grid's t0).
ManufacturedCase make_manufactured(std::string_view id, const disc::GridPtr& grid);
ManufacturedCase make_manufactured(std::string_view id, const disc::GridPtr& grid, double t_ref);

struct SolutionPair {
  Field u;
  Field v;
  Field F;
  Field G;
};

/// Shapes of the difference y = u - u~ used by the verification fixtures.
enum class Perturbation {
  /// (d1 - d)^2 profile: zero value and gradient on Gamma, nonzero elsewhere.
  gamma_flat,
  /// (1 - d/l)^4 on {d < l}: supported in a layer along the unobserved face.
  boundary_layer,
};

struct PairFixture {
  MFGCoefficients coeffs;
  SolutionPair perturbed;  // (u, v)
  SolutionPair reference;  // (u~, v~)
};

/// Reference pair from the catalogue case, perturbed pair = reference +
/// (amplitude * shape). Sources are the discrete operator values, so both
/// pairs solve the discrete system to rounding.
PairFixture make_pair_fixture(std::string_view case_id, Perturbation shape, const disc::GridPtr& grid,
                              double t_ref, double amplitude = 1.0, double layer = 0.1);

/// Reference pair from the catalogue case and perturbed pair = reference +
/// (y, z) sampled on the grid; sources as in make_pair_fixture.
PairFixture make_pair_from(std::string_view case_id, const disc::GridPtr& grid, double t_ref, const ScalarFn& y,
                           const ScalarFn& z);

/// Analytic perturbation shapes (y, z); the grid must outlive the result.
ScalarFn perturbation_y(Perturbation shape, const disc::SpaceTimeGrid& grid, double t_ref, double amplitude,
                        double layer);
ScalarFn perturbation_z(Perturbation shape, const disc::SpaceTimeGrid& grid, double t_ref, double amplitude,
                        double layer);

/// Linear difference system frozen at the reference pair of case
/// 1d-nonlinear-a2, with analytic solution (y, z) and analytic sources.
struct ReconstructionCase {
  MFGCoefficients coeffs;
  Field u_ref;
  Field v_ref;
  Field y_exact;
  Field z_exact;
  Field dF;
  Field dG;
};

ReconstructionCase make_reconstruction_case(const disc::GridPtr& grid);

/// Product of (1 - r^2)^4 bumps: compact support inside the space-time box,
/// centred at (centre, t0) with half-widths (radius, time_radius).
Field compact_bump(const disc::GridPtr& grid, geometry::Point centre, double radius, double time_radius);

}  // namespace mfguc::mfg
