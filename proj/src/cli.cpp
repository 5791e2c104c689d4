#include "mfguc/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "mfguc/carleman.hpp"
#include "mfguc/config.hpp"
#include "mfguc/errors.hpp"
#include "mfguc/field_io.hpp"
#include "mfguc/manufactured.hpp"
#include "mfguc/parallel.hpp"
#include "mfguc/uc.hpp"

namespace mfguc::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using config::ExperimentConfig;

struct Context {
  ExperimentConfig cfg;
  fs::path out_dir;
  std::string command;
  std::ostream& out;

  std::string preamble() const { return fmt::format("# mfguc config_hash={} command={}\n", cfg.hash(), command); }

  std::ofstream open(const std::string& name) const {
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) throw Error(fmt::format("cannot write {}", (out_dir / name).string()));
    return f;
  }

  void write_json(const std::string& name, json j) const {
    j["config_hash"] = cfg.hash();
    j["command"] = command;
    auto f = open(name);
    f << j.dump(2) << '\n';
  }
};

std::string num(double v) { return fmt::format("{}", v); }

disc::GridPtr make_grid(const ExperimentConfig& c, double t0, disc::GridSize size) {
  return std::make_shared<const disc::SpaceTimeGrid>(c.geometry.domain, size, t0, c.geometry.weight.delta);
}

disc::GridPtr make_grid(const ExperimentConfig& c, double t0) { return make_grid(c, t0, c.grid); }

geometry::WeightConfig make_weights(const ExperimentConfig& c, const disc::SpaceTimeGrid& g) {
  auto params = c.geometry.weight;
  params.t0 = g.t0();
  return geometry::make_weight_config(c.geometry.domain, g.aux(), params);
}

double l2_error(const disc::Field& a, const disc::Field& b) {
  return std::sqrt(disc::integrate(disc::square(a - b), disc::full_region(a.grid())));
}

// ---- solve ---------------------------------------------------------------

int cmd_solve(const Context& ctx) {
  const auto& c = ctx.cfg;
  const auto grid = make_grid(c, c.geometry.weight.t0);
  const auto mc = mfg::make_manufactured(c.case_id, grid);
  const auto su = mfg::solve_u(mc.problem, c.solver);
  const auto sv = mfg::solve_v(mc.problem, su.solution, c.solver);
  const auto hash = c.hash();
  {
    auto f = ctx.open("u.csv");
    disc::write_field_csv(f, su.solution, hash);
  }
  {
    auto f = ctx.open("v.csv");
    disc::write_field_csv(f, sv.solution, hash);
  }
  const double eu = l2_error(su.solution, mc.u_exact);
  const double ev = l2_error(sv.solution, mc.v_exact);
  auto f = ctx.open("residual.csv");
  f << ctx.preamble() << "field,residual_l2,residual_max,error_l2,inner_iterations\n";
  f << fmt::format("u,{},{},{},{}\n", su.residual_l2, su.residual_max, eu, su.inner_iterations);
  f << fmt::format("v,{},{},{},{}\n", sv.residual_l2, sv.residual_max, ev, sv.inner_iterations);
  ctx.out << fmt::format("solve {}: |u - u_exact| = {}, |v - v_exact| = {}\n", c.case_id, eu, ev);
  return ok;
}

// ---- mms -----------------------------------------------------------------

int cmd_mms(const Context& ctx) {
  const auto& c = ctx.cfg;
  struct Level {
    disc::GridSize size;
    double h = 0.0, tau = 0.0, eu = 0.0, ev = 0.0;
  };
  std::vector<Level> levels(static_cast<std::size_t>(c.mms_levels));
  for (int k = 0; k < c.mms_levels; ++k) {
    // h halves and tau quarters per level
    auto& L = levels[k];
    L.size.n1 = (c.grid.n1 - 1) * (1 << k) + 1;
    L.size.n2 = c.geometry.domain.dimension == 2 ? (c.grid.n2 - 1) * (1 << k) + 1 : 1;
    L.size.nt = (c.grid.nt - 1) * (1 << (2 * k)) + 1;
  }
  parallel_for(levels.size(), c.run.workers, [&](std::size_t k) {
    auto& L = levels[k];
    const auto grid = make_grid(c, c.geometry.weight.t0, L.size);
    const auto mc = mfg::make_manufactured(c.case_id, grid);
    const auto su = mfg::solve_u(mc.problem, c.solver);
    const auto sv = mfg::solve_v(mc.problem, su.solution, c.solver);
    L.h = grid->h_max();
    L.tau = grid->tau();
    L.eu = l2_error(su.solution, mc.u_exact);
    L.ev = l2_error(sv.solution, mc.v_exact);
  });
  auto f = ctx.open("mms.csv");
  f << ctx.preamble() << "level,n1,n2,nt,h,tau,err_u,err_v,order_u,order_v\n";
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const auto& L = levels[k];
    std::string pu = "NA", pv = "NA";
    if (k > 0) {
      const double ratio_h = levels[k - 1].h / L.h;
      pu = num(std::log(levels[k - 1].eu / L.eu) / std::log(ratio_h));
      pv = num(std::log(levels[k - 1].ev / L.ev) / std::log(ratio_h));
    }
    f << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", k, L.size.n1, L.size.n2, L.size.nt, L.h, L.tau, L.eu, L.ev, pu,
                     pv);
    ctx.out << fmt::format("level {}: h = {}, err_u = {}, err_v = {}, order_u = {}, order_v = {}\n", k, L.h, L.eu,
                           L.ev, pu, pv);
  }
  return ok;
}

// ---- carleman ------------------------------------------------------------

std::vector<double> carleman_grid(const ExperimentConfig& c, const disc::SpaceTimeGrid& g,
                                  const geometry::WeightConfig& w) {
  const double guard = carleman::max_admissible_s(g, w);
  const double s_max = c.carleman.s_max.value_or(guard);
  if (s_max > guard) {
    throw ConfigError(fmt::format("carleman.s_max = {} exceeds the overflow guard; max admissible s = {}", s_max, guard));
  }
  if (c.carleman.s_min > s_max) throw ConfigError("carleman.s_min exceeds the admissible s range");
  return carleman::linear_s_grid(c.carleman.s_min, s_max, c.carleman.s_steps);
}

carleman::Theorem2Input theorem2_input(const mfg::PairFixture& fx) {
  return {fx.coeffs,
          fx.reference.u,
          fx.reference.v,
          fx.perturbed.u - fx.reference.u,
          fx.perturbed.v - fx.reference.v,
          fx.perturbed.F - fx.reference.F,
          fx.perturbed.G - fx.reference.G};
}

json report_json(const carleman::CarlemanReport& rep) {
  json j;
  j["estimate"] = std::string(carleman::to_string(rep.estimate));
  j["s_lo"] = rep.s_lo ? json(*rep.s_lo) : json(nullptr);
  j["C_emp"] = rep.C_emp ? json(*rep.C_emp) : json(nullptr);
  j["global_max"] = rep.global_max;
  j["head_max"] = rep.head_max;
  j["tail_max"] = rep.tail_max;
  j["all_finite"] = rep.all_finite;
  j["nonincreasing"] = rep.nonincreasing;
  j["nondecreasing"] = rep.nondecreasing;
  j["bounded"] = rep.bounded;
  return j;
}

int cmd_carleman(const Context& ctx) {
  const auto& c = ctx.cfg;
  const auto& cb = c.carleman;
  const auto grid = make_grid(c, c.geometry.weight.t0);
  const auto w = make_weights(c, *grid);
  const auto s_grid = carleman_grid(c, *grid, w);

  const auto input = [&]() -> carleman::EstimateInput {
    if (cb.estimate == carleman::Estimate::theorem2) {
      if (cb.input != "pair") throw ConfigError("theorem2 needs carleman.input = pair");
      return theorem2_input(mfg::make_pair_fixture(c.case_id, mfg::Perturbation::gamma_flat, grid, grid->t0()));
    }
    auto f = [&] {
      if (cb.input == "bump") {
        const auto& L = c.geometry.domain.extents;
        const double radius = 0.3 * (c.geometry.domain.dimension == 2 ? std::min(L[0], L[1]) : L[0]);
        return mfg::compact_bump(grid, {0.5 * L[0], 0.5 * L[1]}, radius, 0.6 * grid->delta());
      }
      if (cb.input == "case") return mfg::make_manufactured(c.case_id, grid).u_exact;
      throw ConfigError("lemma1 estimates take carleman.input = bump or case");
    }();
    if (cb.time_reversed) f = disc::time_reversed(f);
    return carleman::Lemma1Input{f, disc::constant_field(grid, 1.0), {}};
  }();
  const auto rep = carleman::sweep_s(cb.estimate, input, s_grid, w, cb.boundary, c.run.workers);
  {
    auto f = ctx.open("carleman.csv");
    carleman::write_report_csv(f, rep, ctx.preamble());
  }
  auto j = report_json(rep);
  j["max_admissible_s"] = carleman::max_admissible_s(*grid, w);
  ctx.write_json("carleman_verdict.json", j);
  ctx.out << fmt::format("{}: C_emp = {}, bounded = {}\n", carleman::to_string(rep.estimate),
                         rep.C_emp ? num(*rep.C_emp) : "NA", rep.bounded);
  return ok;
}

// ---- uc ------------------------------------------------------------------

mfg::PairFixture uc_fixture(const ExperimentConfig& c, const disc::GridPtr& grid) {
  if (c.uc.perturbation == "zero") {
    const mfg::ScalarFn zero = [](geometry::Point, double) { return 0.0; };
    return mfg::make_pair_from(c.case_id, grid, grid->t0(), zero, zero);
  }
  return mfg::make_pair_fixture(c.case_id, mfg::Perturbation::boundary_layer, grid, grid->t0(), 1.0, c.uc.layer);
}

struct UCCell {
  uc::UCVerdict verdict;
  std::optional<double> C_emp;
  geometry::WeightConfig weights;
  std::vector<double> s_grid;
};

UCCell uc_cell(const ExperimentConfig& c, double t0) {
  const auto grid = make_grid(c, t0);
  UCCell cell;
  cell.weights = make_weights(c, *grid);
  const auto fx = uc_fixture(c, grid);
  const auto pair = uc::build_difference(fx.perturbed, fx.reference, fx.coeffs);
  const double guard = carleman::max_admissible_s(*grid, cell.weights);
  const auto fit = carleman::sweep_s(carleman::Estimate::theorem2, theorem2_input(fx),
                                     carleman::linear_s_grid(1.0, guard, c.carleman.s_steps), cell.weights,
                                     c.carleman.boundary);
  cell.C_emp = fit.C_emp;
  cell.s_grid = carleman::linear_s_grid(c.uc.s_min, c.uc.s_max, c.uc.s_steps);
  uc::UCOptions opt{c.geometry.domain.epsilon_core, c.uc.tol_gamma, c.uc.slack_constant};
  cell.verdict = uc::uc_verify(pair, cell.weights, cell.C_emp.value_or(1.0), cell.s_grid, opt);
  return cell;
}

json verdict_json(const uc::UCVerdict& v) {
  return {{"window_norm", v.window_norm}, {"bound", v.bound},   {"s_star", v.s_star},
          {"slack", v.slack},             {"M1", v.M.M1},       {"M2", v.M.M2},
          {"gamma_trace", v.gamma_trace}, {"pass", v.pass}};
}

int cmd_uc(const Context& ctx) {
  const auto& c = ctx.cfg;
  config::validate_horizon(c);
  const auto cell = uc_cell(c, c.geometry.weight.t0);
  const auto curve = uc::eval_bound(cell.verdict.M, cell.weights, cell.C_emp.value_or(1.0), cell.s_grid);
  {
    auto f = ctx.open("uc_bound.csv");
    f << ctx.preamble() << "s,bound\n";
    for (std::size_t i = 0; i < curve.s.size(); ++i) f << fmt::format("{},{}\n", curve.s[i], curve.value[i]);
  }

  json j;
  j["verdict"] = verdict_json(cell.verdict);
  j["C_emp"] = cell.C_emp ? json(*cell.C_emp) : json(nullptr);
  j["mu1"] = cell.weights.mu1;
  j["mu2"] = cell.weights.mu2;
  j["r"] = cell.weights.r;
  j["beta"] = cell.weights.beta;

  if (c.geometry.domain.dimension == 1) {
    const auto grid = make_grid(c, c.geometry.weight.t0);
    const auto rc = mfg::make_reconstruction_case(grid);
    const auto y_data = disc::extract_cauchy(rc.y_exact);
    const auto z_data = disc::extract_cauchy(rc.z_exact);
    uc::ReconstructionOptions opt;
    opt.s = c.uc.s_reconstruct;
    opt.rho = c.uc.rho;
    const auto& levels = c.uc.noise_levels;
    std::vector<uc::ReconstructionResult> results(levels.size(), {disc::Field(grid), disc::Field(grid), 0, 0, {}});
    std::vector<double> errors(levels.size());
    parallel_for(levels.size(), c.run.workers, [&](std::size_t k) {
      // common random numbers across levels
      results[k] = uc::qr_reconstruct(uc::add_noise(y_data, levels[k], c.run.seed),
                                      uc::add_noise(z_data, levels[k], c.run.seed + 1), rc.dF, rc.dG, rc.coeffs,
                                      rc.u_ref, rc.v_ref, cell.weights, opt);
      errors[k] = uc::window_error(results[k].y, results[k].z, rc.y_exact, rc.z_exact,
                                   c.geometry.domain.epsilon_core, cell.weights.r);
    });
    auto f = ctx.open("uc_reconstruction.csv");
    f << ctx.preamble() << "noise,window_error,iterations,functional\n";
    json rows = json::array();
    for (std::size_t k = 0; k < levels.size(); ++k) {
      f << fmt::format("{},{},{},{}\n", levels[k], errors[k], results[k].iterations, results[k].functional);
      rows.push_back({{"noise", levels[k]}, {"window_error", errors[k]}});
    }
    j["reconstruction"] = rows;
  } else {
    j["reconstruction"] = "not available in two dimensions";
  }
  ctx.write_json("uc_verdict.json", j);
  ctx.out << fmt::format("uc: window norm = {}, bound = {}, slack = {}, pass = {}\n", cell.verdict.window_norm,
                         cell.verdict.bound, cell.verdict.slack, cell.verdict.pass);
  return ok;
}

// ---- sweep-t0 ------------------------------------------------------------

int cmd_sweep_t0(const Context& ctx) {
  const auto& c = ctx.cfg;
  const double delta = c.geometry.weight.delta;
  if (!(c.uc.T > 2.0 * delta)) throw ConfigError(fmt::format("uc.T = {} must exceed 2 delta = {}", c.uc.T, 2 * delta));
  const double r = geometry::select_r(c.geometry.domain.epsilon_core, geometry::build_d(c.geometry.domain).max_value(),
                                      c.geometry.weight.r_fraction);
  const auto rep = uc::sweep_t0([&](double t0) { return uc_cell(c, t0).verdict; }, c.uc.T, delta, r, c.uc.t0_count,
                                c.run.workers);
  {
    auto f = ctx.open("sweep_t0.csv");
    f << ctx.preamble() << "t0,lo,hi,window_norm,bound,slack,M1,M2,pass\n";
    for (const auto& cell : rep.cells) {
      const auto& v = cell.verdict;
      f << fmt::format("{},{},{},{},{},{},{},{},{}\n", cell.t0, cell.lo, cell.hi, v.window_norm, v.bound, v.slack, v.M.M1,
                       v.M.M2, v.pass ? 1 : 0);
    }
  }
  ctx.write_json("sweep_t0.json", {{"union", {rep.union_lo, rep.union_hi}},
                                   {"target", {rep.target_lo, rep.target_hi}},
                                   {"granularity", rep.granularity},
                                   {"contiguous", rep.contiguous},
                                   {"covers", rep.covers},
                                   {"all_pass", rep.all_pass}});
  ctx.out << fmt::format("sweep-t0: union ({}, {}), target ({}, {}), covers = {}, all pass = {}\n", rep.union_lo,
                         rep.union_hi, rep.target_lo, rep.target_hi, rep.covers, rep.all_pass);
  return ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical laboratory for Carleman estimates of a mean-field-game system"};
  app.require_subcommand(1, 1);
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> output_dir;
  app.add_option("-c,--config", config_path, "INI configuration file");
  app.add_option("-s,--set", overrides, "override a key: section.key=value")->take_all();
  app.add_option("-o,--output-dir", output_dir, "output directory");

  using Command = int (*)(const Context&);
  const std::vector<std::pair<std::string, std::pair<std::string, Command>>> commands{
      {"solve", {"solve the manufactured case and dump u, v", cmd_solve}},
      {"carleman", {"sweep s for a Carleman estimate", cmd_carleman}},
      {"uc", {"unique-continuation check and reconstruction", cmd_uc}},
      {"sweep-t0", {"cover the time horizon with windows", cmd_sweep_t0}},
      {"mms", {"manufactured-solution refinement ladder", cmd_mms}},
  };
  for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : config_invalid;
  }

  std::string command;
  Command fn = nullptr;
  for (const auto& [name, entry] : commands) {
    if (app.got_subcommand(name)) {
      command = name;
      fn = entry.second;
    }
  }

  try {
    auto cfg = config::load(config_path, overrides);
    config::validate(cfg);
    fs::path dir = cfg.run.output_dir;
    if (const char* env = std::getenv("MFGUC_OUTPUT_DIR"); env && *env) dir = env;
    if (output_dir) dir = *output_dir;
    fs::create_directories(dir);
    const Context ctx{std::move(cfg), dir, command, out};
    return fn(ctx);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return config_invalid;
  } catch (const GeometryError& e) {
    err << "geometry error: " << e.what() << '\n';
    return config_invalid;
  } catch (const ConstraintViolation& e) {
    err << "constraint violation: " << e.what() << '\n';
    return config_invalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return numerical_failure;
  }
}

}  // namespace mfguc::cli
