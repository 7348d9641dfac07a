#include "eikfm_cli/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "eikfm/analytic.hpp"
#include "eikfm/convergence.hpp"
#include "eikfm/errors.hpp"
#include "eikfm/fast_marching.hpp"
#include "eikfm/field_io.hpp"
#include "eikfm/survey_io.hpp"
#include "eikfm/tomography.hpp"

namespace eikfm::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// "cgss2d" -> CGSS in 2D; "const1" is the unit-slowness 2D medium.
AnalyticCase parse_case(const std::string& name) {
  if (name == "const1") return default_params(CaseKind::kConstant, 2);
  if (name.size() < 3 || name.back() != 'd') {
    throw UsageError("unknown case '" + name + "'");
  }
  const char dim_char = name[name.size() - 2];
  if (dim_char != '2' && dim_char != '3') throw UsageError("unknown case '" + name + "'");
  try {
    return default_params(parse_case_kind(name.substr(0, name.size() - 2)),
                          dim_char - '0');
  } catch (const DomainError&) {
    throw UsageError("unknown case '" + name + "'");
  }
}

FmMode parse_mode(const std::string& mode) {
  if (mode == "factored") return FmMode::kFactored;
  if (mode == "plain") return FmMode::kPlain;
  throw UsageError("mode must be 'factored' or 'plain'");
}

MultiIndex parse_index(const std::string& text, int dim) {
  MultiIndex idx{0, 0, 0};
  std::istringstream is(text);
  std::string cell;
  int d = 0;
  while (std::getline(is, cell, ',')) {
    if (d == dim) throw UsageError("--source has too many components");
    try {
      idx[d++] = std::stoi(cell);
    } catch (const std::exception&) {
      throw UsageError("--source must be comma-separated integers");
    }
  }
  if (d != dim) throw UsageError("--source needs one index per axis");
  return idx;
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw DomainError("cannot open '" + path.string() + "' for writing");
  os << text;
}

struct SolveArgs {
  std::string case_name;
  std::string model;
  std::string source;
  double h = 0.025;
  int order = 1;
  std::string mode = "factored";
  bool enforce = false;
  std::string out;
};

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  if (a.case_name.empty() == a.model.empty()) {
    throw UsageError("solve needs exactly one of --case or --model");
  }
  FmConfig cfg;
  cfg.order = a.order;
  cfg.mode = parse_mode(a.mode);
  cfg.enforce_monotonicity = a.enforce;

  ScalarField m;
  SourceSpec src;
  std::optional<ScalarField> exact;
  if (!a.case_name.empty()) {
    const AnalyticCase c = parse_case(a.case_name);
    const RegularGrid grid = case_grid(c, a.h);
    AnalyticFields f = eval_case(c, grid);
    m = std::move(f.m);
    src = f.source;
    exact = std::move(f.tau);
  } else {
    m = read_field(fs::path(a.model));
    src.index = a.source.empty() ? MultiIndex{0, 0, 0}
                                 : parse_index(a.source, m.grid().dim());
  }

  ScalarField tau;
  ScalarField tau1;
  if (cfg.mode == FmMode::kFactored) {
    const DistanceFactor dist = build_distance_factor(m.grid(), src);
    const FmSolution sol = fm_solve(m, src, dist, cfg);
    tau = sol.travel_time(dist.tau0);
    tau1 = sol.tau1;
  } else {
    tau = fm_solve(m, src, cfg).tau1;
  }

  const RegularGrid& g = m.grid();
  out << "grid";
  for (int d = 0; d < g.dim(); ++d) out << (d ? "x" : " ") << g.count(d);
  out << " h=" << g.spacing() << " order=" << cfg.order << " mode=" << a.mode << '\n';
  if (exact) {
    out << "errors linf=" << sci(linf_error(tau, *exact))
        << " mean_l2=" << sci(mean_l2_error(tau, *exact)) << '\n';
  }
  if (!a.out.empty()) {
    write_field(fs::path(a.out + ".tau.fld"), tau);
    if (cfg.mode == FmMode::kFactored) write_field(fs::path(a.out + ".tau1.fld"), tau1);
  }
  return kOk;
}

struct ConvergenceArgs {
  std::string case_name;
  std::vector<double> hs;
  std::vector<int> orders{1, 2};
  std::string mode = "factored";
  bool enforce = false;
  bool no_work = false;
  std::string out;
};

int cmd_convergence(const ConvergenceArgs& a, std::ostream& out) {
  const AnalyticCase c = parse_case(a.case_name);
  for (int o : a.orders) {
    if (o != 1 && o != 2) throw UsageError("--orders accepts 1 and 2");
  }
  ConvergenceOptions opts;
  opts.mode = parse_mode(a.mode);
  opts.enforce_monotonicity = a.enforce;
  opts.measure_work = !a.no_work;
  const ConvergenceReport report = run_convergence(c, a.hs, a.orders, opts);

  out << std::left << std::setw(12) << "h" << std::setw(14) << "n" << std::setw(7)
      << "order" << std::setw(12) << "linf" << std::setw(12) << "mean_l2"
      << std::setw(12) << "seconds" << "work_units\n";
  for (const auto& r : report.rows) {
    out << std::setw(12) << r.h << std::setw(14) << r.dims_label() << std::setw(7)
        << r.order << std::setw(12) << sci(r.linf) << std::setw(12) << sci(r.mean_l2)
        << std::setw(12) << std::setprecision(4) << r.seconds << std::setprecision(6)
        << std::fixed << std::setprecision(1) << r.work_units << std::defaultfloat
        << std::setprecision(6) << '\n';
  }
  for (int o : a.orders) {
    const auto s2 = report.slope(o);
    const auto si = report.slope(o, true);
    out << "slope order " << o << ": mean_l2 "
        << (s2 ? std::to_string(*s2) : std::string("NA")) << ", linf "
        << (si ? std::to_string(*si) : std::string("NA")) << '\n';
  }
  if (!a.out.empty()) {
    std::ostringstream csv;
    write_convergence_csv(csv, report);
    write_text(fs::path(a.out), csv.str());
  }
  return kOk;
}

struct InvertArgs {
  std::string survey;
  std::string synthetic;
  std::string config;
  std::uint64_t seed = 7;
  double noise = 0.01;
  std::string init = "ref";
  std::string out = "invert";
};

int cmd_invert(const InvertArgs& a, std::ostream& out, std::ostream& err) {
  if (a.survey.empty() == a.synthetic.empty()) {
    throw UsageError("invert needs exactly one of --survey or --synthetic");
  }
  if (a.init != "ref" && a.init != "truth") {
    throw UsageError("--init must be 'ref' or 'truth'");
  }
  std::optional<InversionConfig> file_cfg;
  if (!a.config.empty()) {
    if (!fs::exists(a.config)) throw UsageError("config file '" + a.config + "' not found");
    file_cfg = read_inversion_config(fs::path(a.config));
  }

  Survey survey;
  InversionConfig cfg;
  std::optional<DataMatrix> clean;
  if (!a.synthetic.empty()) {
    if (a.synthetic != "desk64") {
      throw UsageError("unknown synthetic scenario '" + a.synthetic + "'");
    }
    if (a.noise < 0.0) throw UsageError("--noise must be >= 0");
    const DeskScenario desk = desk_scenario();
    SyntheticSurvey syn = synthesize_survey(desk.m_true, desk.geometry, a.noise, a.seed);
    survey = std::move(syn.survey);
    clean = std::move(syn.clean);
    if (file_cfg) {
      cfg = *file_cfg;
    } else {
      cfg.bound = desk.bound;
    }
    if (cfg.m_ref.size() == 0) cfg.m_ref = desk.m_ref;
    // Starting from the truth means the truth is also the reference model.
    if (a.init == "truth") cfg.m_ref = desk.m_true;
    write_field(fs::path(a.out + "_m_true.fld"), desk.m_true);
    write_survey(fs::path(a.out + "_survey.eiks"), survey);
  } else {
    if (!file_cfg) throw UsageError("--survey requires --config");
    if (a.init == "truth") throw UsageError("--init truth needs --synthetic");
    survey = read_survey(fs::path(a.survey));
    cfg = *file_cfg;
    if (cfg.m_ref.size() == 0) throw UsageError("config must name an m_ref field");
  }

  const InversionResult res =
      gauss_newton(survey, cfg, cfg.bound.inverse(cfg.m_ref));

  std::ostringstream hist;
  hist << std::setprecision(std::numeric_limits<double>::max_digits10);
  hist << "iteration,misfit,reg,mu,objective\n";
  for (const auto& r : res.history) {
    hist << r.iteration << ',' << r.misfit << ',' << r.regularization << ','
         << r.step << ',' << r.objective << '\n';
  }
  write_text(fs::path(a.out + "_history.csv"), hist.str());
  write_field(fs::path(a.out + "_m_final.fld"), res.m_final);

  DataMatrix residual = res.predicted;
  for (std::size_t j = 0; j < residual.values.size(); ++j) {
    residual.values[j] -= survey.d_obs.values[j];
  }
  const auto dump = [&](const std::string& suffix, const DataMatrix& d) {
    std::ostringstream os;
    write_data_csv(os, d);
    write_text(fs::path(a.out + suffix), os.str());
  };
  dump("_predicted.csv", res.predicted);
  dump("_observed.csv", survey.d_obs);
  dump("_residual.csv", residual);

  for (const auto& r : res.history) {
    out << "iter " << r.iteration << " misfit " << sci(r.misfit) << " reg "
        << sci(r.regularization) << " mu " << r.step
        << (r.line_search_failed ? " (line search failed)" : "") << '\n';
  }
  if (clean) {
    double floor = 0.0;
    for (std::size_t j = 0; j < clean->values.size(); ++j) {
      const double e = survey.d_obs.values[j] - clean->values[j];
      floor += 0.5 * e * e;
    }
    out << "noise floor misfit " << sci(floor) << '\n';
  }
  if (res.stopped_early) err << "warning: line search failed; returning best iterate\n";
  return kOk;
}

struct WorkUnitArgs {
  std::string grid;
  int repetitions = 5;
};

int cmd_workunit(const WorkUnitArgs& a, std::ostream& out) {
  std::vector<int> counts;
  std::istringstream is(a.grid);
  for (std::string n; std::getline(is, n, 'x');) {
    try {
      counts.push_back(std::stoi(n));
    } catch (const std::exception&) {
      throw UsageError("--grid must look like 1281x2561");
    }
  }
  if (counts.size() != 2 && counts.size() != 3) {
    throw UsageError("--grid must have 2 or 3 extents");
  }
  const WorkUnit wu = measure_work_unit(RegularGrid(counts, 1.0), a.repetitions);
  out << "work unit " << sci(wu.seconds) << " s (median of " << wu.repetitions << ")\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Factored fast marching eikonal solver and travel-time tomography"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Solve one point-source problem");
  s->add_option("--case", solve.case_name, "cgss2d, cgv3d, gauss2d, const1, ...");
  s->add_option("--model", solve.model, "Squared-slowness EIKFIELD file");
  s->add_option("--source", solve.source, "Source node indices, e.g. 0,40");
  s->add_option("--h", solve.h, "Grid spacing for --case")->check(CLI::PositiveNumber);
  s->add_option("--order", solve.order)->check(CLI::IsMember({1, 2}));
  s->add_option("--mode", solve.mode, "factored or plain");
  s->add_flag("--enforce-monotonicity", solve.enforce);
  s->add_option("--out", solve.out, "Output prefix for EIKFIELD files");

  ConvergenceArgs conv;
  auto* c = app.add_subcommand("convergence", "Error and timing table over several h");
  c->add_option("--case", conv.case_name)->required();
  c->add_option("--h", conv.hs, "Comma-separated spacings")
      ->required()
      ->delimiter(',');
  c->add_option("--orders", conv.orders)->delimiter(',');
  c->add_option("--mode", conv.mode);
  c->add_flag("--enforce-monotonicity", conv.enforce);
  c->add_flag("--no-work", conv.no_work, "Skip work-unit measurement");
  c->add_option("--out", conv.out, "CSV output path");

  InvertArgs inv;
  auto* i = app.add_subcommand("invert", "Gauss-Newton travel-time tomography");
  i->add_option("--survey", inv.survey, "EIKSURV file");
  i->add_option("--synthetic", inv.synthetic, "Built-in scenario (desk64)");
  i->add_option("--config", inv.config, "JSON inversion config");
  i->add_option("--seed", inv.seed);
  i->add_option("--noise", inv.noise, "Relative noise level");
  i->add_option("--init", inv.init, "ref or truth");
  i->add_option("--out", inv.out, "Output prefix");

  WorkUnitArgs wu;
  auto* w = app.add_subcommand("workunit", "Time one residual evaluation");
  w->add_option("--grid", wu.grid, "Node counts, e.g. 1281x2561")->required();
  w->add_option("--repetitions", wu.repetitions)->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  try {
    if (s->parsed()) return cmd_solve(solve, out);
    if (c->parsed()) return cmd_convergence(conv, out);
    if (i->parsed()) return cmd_invert(inv, out, err);
    if (w->parsed()) return cmd_workunit(wu, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kUsageError;
}

}  // namespace eikfm::cli
