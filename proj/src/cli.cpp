#include "porodarcy/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

#include "porodarcy/cases.hpp"
#include "porodarcy/error.hpp"
#include "porodarcy/io.hpp"
#include "porodarcy/verification.hpp"

namespace porodarcy {

namespace {

std::string output_path(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.output_dir) / name).string();
}

void apply_common(const RunConfig& c, ProblemSpec& p) {
  p.A = c.A;
  p.C = c.C;
  for (const auto& [e, a] : c.per_element_alpha0) p.element_alpha0[e] = a;
}

SolutionField solve_and_log(const ProblemSpec& problem, const RunConfig& c, std::ostream& log) {
  log << problem.name << ": " << problem.mesh->num_elements() << " elements, "
      << problem.mesh->num_nodes() << " nodes\n";
  SolutionField s = newton_solve(problem, c.newton);
  const auto old = log.precision(17);
  log << "iter residual_norm\n";
  for (size_t k = 0; k < s.history.residual_norms.size(); ++k)
    log << k << " " << s.history.residual_norms[k] << "\n";
  log.precision(old);
  auto h = open_output(output_path(c, "history.csv"));
  write_history_csv(s.history, h);
  write_vtk(s, *problem.mesh, output_path(c, problem.name + ".vtk"));
  return s;
}

void run_sweep(const ProblemSpec& base, const RunConfig& c, const std::string& flux_tag,
               std::ostream& log) {
  const auto rows = sweep(base, *c.sweep_parameter, c.sweep_values, c.newton, flux_tag);
  auto out = open_output(output_path(c, "flux_sweep.csv"));
  write_sweep_csv(rows, *c.sweep_parameter, out);
  write_sweep_csv(rows, *c.sweep_parameter, log);
}

ReservoirGeometry reservoir_geometry(const RunConfig& c) {
  ReservoirGeometry g;
  g.cells_per_unit = c.cells_per_unit;
  return g;
}

}  // namespace

void run_case(const RunConfig& c, std::ostream& log) {
  const DragModel drag = c.drag_model();
  const std::string& name = c.case_name;

  if (name == "oned") {
    const ExactSolution1D exact{drag.variant(), c.p1, c.p2, c.A, c.alpha0, drag.beta()};
    ProblemSpec p = build_strip_problem(exact, c.n);
    apply_common(c, p);
    const SolutionField s = solve_and_log(p, c, log);
    auto out = open_output(output_path(c, "oned.csv"));
    write_oned_csv(s, *p.mesh, exact, out);
    auto ex = open_output(output_path(c, "exact.csv"));
    write_exact_csv(exact, 200, ex);
  } else if (name == "five-spot") {
    ProblemSpec p = build_five_spot(c.n, c.kind, drag);
    apply_common(c, p);
    if (c.sweep_parameter) {
      run_sweep(p, c, "", log);
    } else {
      const SolutionField s = solve_and_log(p, c, log);
      log << "p_max " << s.pressure.maxCoeff() << "\n";
    }
  } else if (name == "reservoir") {
    const auto g = reservoir_geometry(c);
    ProblemSpec p = build_reservoir(drag, c.p_enh, g, c.kind);
    apply_common(c, p);
    if (c.sweep_parameter) {
      run_sweep(p, c, "production_well", log);
    } else {
      const SolutionField s = solve_and_log(p, c, log);
      const auto flux = total_flux(s, *p.mesh, "production_well");
      log.precision(17);
      log << "total flux at " << flux.tag << ": " << flux.value << "\n";
      std::vector<double> distances;
      const int half = static_cast<int>(std::lround(0.5 * g.width * g.cells_per_unit));
      for (int k = -half; k <= half; ++k) distances.push_back(static_cast<double>(k) / g.cells_per_unit);
      const auto cone = cone_profile(s, *p.mesh, c.cone_depths, 0.5 * g.width, distances, g.depth);
      auto out = open_output(output_path(c, "cone.csv"));
      write_cone_csv(cone, out);
    }
  } else if (name == "manufactured") {
    ProblemSpec p = build_manufactured_problem(
        std::make_shared<Mesh>(generate_structured(c.kind, c.n, c.n)), drag, c.A, c.C);
    apply_common(c, p);
    const SolutionField s = solve_and_log(p, c, log);
    const auto err = l2_error(s, *p.mesh, [&](const Point& x) {
      const auto m = manufactured_fields(x.x(), x.y(), drag, c.A, c.C);
      return std::make_pair(m.v, m.p);
    });
    log.precision(17);
    log << "L2 error: pressure " << err.err_p << ", velocity " << err.err_v << "\n";
  } else if (name == "convergence") {
    const auto table = manufactured_convergence(c.kind, c.levels, drag, c.newton);
    auto out = open_output(output_path(c, "convergence.csv"));
    write_convergence_csv(table, out);
    write_convergence_csv(table, log);
    for (size_t i = 0; i < table.pairwise_p.size(); ++i)
      log << "pairwise slope " << i << ": pressure " << table.pairwise_p[i] << ", velocity "
          << table.pairwise_v[i] << "\n";
    if (!table.complete) throw Error("convergence study aborted: " + table.failure);
  } else if (name == "mesh") {
    ProblemSpec p;
    p.name = std::filesystem::path(c.mesh_file).stem().string();
    p.mesh = std::make_shared<Mesh>(read_mesh(c.mesh_file));
    p.drag = drag;
    p.boundary = c.bcs;
    p.sources = c.sources;
    if (c.body != Point::Zero()) p.body_force = constant_body_force(c.body);
    apply_common(c, p);
    if (c.sweep_parameter) {
      run_sweep(p, c, "", log);
    } else {
      solve_and_log(p, c, log);
    }
  } else {
    throw ConfigError("unknown case '" + name + "'", "case", 0);
  }
}

namespace {

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const MeshError*>(&e)) return "mesh";
  if (dynamic_cast<const DragError*>(&e)) return "drag";
  if (dynamic_cast<const SingularSystemError*>(&e)) return "singular-system";
  if (dynamic_cast<const UnsupportedConstraintError*>(&e)) return "unsupported-constraint";
  if (dynamic_cast<const IncompatibleProblemError*>(&e)) return "incompatible-problem";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence";
  if (dynamic_cast<const InvalidArgument*>(&e)) return "invalid-argument";
  return "runtime";
}

struct CommonFlags {
  std::string drag;
  std::optional<double> beta;
  std::string initial_guess = "zero";
  std::string quadrature = "default";
  std::string kind = "q4";
};

void add_common(CLI::App* app, RunConfig& c, CommonFlags& f, const std::string& default_drag) {
  f.drag = default_drag;
  app->add_option("--drag", f.drag, "drag model: constant, linear or exponential")->capture_default_str();
  app->add_option("--beta", f.beta, "pressure coefficient beta");
  app->add_option("--alpha0", c.alpha0, "reference drag")->capture_default_str();
  app->add_option("--out", c.output_dir, "output directory")->capture_default_str();
  app->add_option("--rtol", c.newton.rtol, "relative Newton tolerance")->capture_default_str();
  app->add_option("--atol", c.newton.atol, "absolute Newton tolerance")->capture_default_str();
  app->add_option("--max-iter", c.newton.max_iter, "Newton iteration limit")->capture_default_str();
  app->add_option("--initial-guess", f.initial_guess, "zero or darcy-linear")->capture_default_str();
  app->add_flag("--line-search", c.newton.line_search, "halve steps while the residual grows");
  app->add_flag("--div-term", c.newton.assembly.div_stabilization, "add the divergence stabilization term");
  app->add_option("--quadrature", f.quadrature, "default or high")->capture_default_str();
}

void finish_common(RunConfig& c, const CommonFlags& f) {
  c.drag = drag_variant_from_string(f.drag);
  c.beta = f.beta;
  c.kind = element_kind_from_string(f.kind);
  c.newton.initial_guess = initial_guess_from_string(f.initial_guess);
  if (f.quadrature == "high") {
    c.newton.assembly.quadrature = QuadratureLevel::High;
  } else if (f.quadrature != "default") {
    throw InvalidArgument("--quadrature must be default or high");
  }
  c.newton.validate();
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stabilized mixed finite elements for Darcy flow with pressure-dependent drag",
               "porodarcy"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run the case described by a config file");
  run->add_option("config", config_path, "config file")->required();

  RunConfig oned_cfg;
  CommonFlags oned_flags;
  oned_cfg.case_name = "oned";
  oned_cfg.n = 100;
  auto* oned = app.add_subcommand("oned", "one-dimensional problem on a strip mesh");
  add_common(oned, oned_cfg, oned_flags, "constant");
  oned->add_option("--p1", oned_cfg.p1, "pressure at x = 0")->capture_default_str();
  oned->add_option("--p2", oned_cfg.p2, "pressure at x = 1")->capture_default_str();
  oned->add_option("--n", oned_cfg.n, "number of elements")->capture_default_str();
  oned->add_option("--A", oned_cfg.A, "drag group A")->capture_default_str();

  RunConfig five_cfg;
  CommonFlags five_flags;
  five_cfg.case_name = "five-spot";
  auto* five = app.add_subcommand("five-spot", "quarter five-spot problem");
  add_common(five, five_cfg, five_flags, "exponential");
  five->add_option("--kind", five_flags.kind, "q4 or t3")->capture_default_str();
  five->add_option("--n", five_cfg.n, "elements per side")->capture_default_str();

  RunConfig res_cfg;
  CommonFlags res_flags;
  res_cfg.case_name = "reservoir";
  res_flags.beta = 0.005;
  auto* res = app.add_subcommand("reservoir", "reservoir with a production-well notch");
  add_common(res, res_cfg, res_flags, "exponential");
  res->add_option("--kind", res_flags.kind, "q4 or t3")->capture_default_str();
  res->add_option("--p-enh", res_cfg.p_enh, "injection pressure")->capture_default_str();
  res->add_option("--cells-per-unit", res_cfg.cells_per_unit, "grid cells per unit length")
      ->capture_default_str();
  res->add_option("--depths", res_cfg.cone_depths, "cone sampling depths")->delimiter(',');

  RunConfig conv_cfg;
  CommonFlags conv_flags;
  conv_cfg.case_name = "convergence";
  conv_flags.beta = 2.0;
  auto* conv = app.add_subcommand("convergence", "h-convergence of the manufactured problem");
  add_common(conv, conv_cfg, conv_flags, "exponential");
  conv->add_option("--kind", conv_flags.kind, "q4 or t3")->capture_default_str();
  conv->add_option("--levels", conv_cfg.levels, "elements per side at each level")->delimiter(',');

  RunConfig sweep_cfg;
  CommonFlags sweep_flags;
  std::string sweep_case = "five-spot";
  std::string sweep_parameter = "beta";
  auto* sw = app.add_subcommand("sweep", "parameter sweep over beta or p_enh");
  add_common(sw, sweep_cfg, sweep_flags, "exponential");
  sw->add_option("--case", sweep_case, "five-spot or reservoir")->capture_default_str();
  sw->add_option("--parameter", sweep_parameter, "beta or p_enh")->capture_default_str();
  sw->add_option("--values", sweep_cfg.sweep_values, "comma-separated values")
      ->delimiter(',')
      ->required();
  sw->add_option("--kind", sweep_flags.kind, "q4 or t3")->capture_default_str();
  sw->add_option("--n", sweep_cfg.n, "elements per side (five-spot)")->capture_default_str();
  sw->add_option("--p-enh", sweep_cfg.p_enh, "injection pressure (reservoir)")->capture_default_str();
  sw->add_option("--cells-per-unit", sweep_cfg.cells_per_unit, "grid cells per unit length")
      ->capture_default_str();

  if (!args.empty() && !args[0].empty() && args[0][0] != '-' && !app.get_subcommand_no_throw(args[0])) {
    err << "error (usage): unknown subcommand '" << args[0] << "'\n" << app.help();
    return 2;
  }

  std::vector<const char*> argv;
  argv.push_back("porodarcy");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error (usage): " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    RunConfig cfg;
    if (run->parsed()) {
      cfg = parse_config(config_path);
    } else if (oned->parsed()) {
      finish_common(oned_cfg, oned_flags);
      cfg = oned_cfg;
    } else if (five->parsed()) {
      finish_common(five_cfg, five_flags);
      cfg = five_cfg;
    } else if (res->parsed()) {
      finish_common(res_cfg, res_flags);
      cfg = res_cfg;
    } else if (conv->parsed()) {
      finish_common(conv_cfg, conv_flags);
      cfg = conv_cfg;
    } else {
      finish_common(sweep_cfg, sweep_flags);
      if (sweep_case != "five-spot" && sweep_case != "reservoir")
        throw InvalidArgument("--case must be five-spot or reservoir");
      if (sweep_case == "reservoir" && !sweep_flags.beta) sweep_cfg.beta = 0.005;
      sweep_cfg.case_name = sweep_case;
      sweep_cfg.sweep_parameter = sweep_parameter_from_string(sweep_parameter);
      cfg = sweep_cfg;
    }
    run_case(cfg, out);
  } catch (const std::exception& e) {
    err << "error (" << error_kind(e) << "): " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace porodarcy
