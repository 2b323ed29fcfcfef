// zfaging: command-line front end for the uplink ZF analysis toolkit.
// Exit codes: 0 success, 1 numeric failure, 2 configuration error.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <zfaging/analytic.hpp>
#include <zfaging/harness/acceptance.hpp>
#include <zfaging/harness/figures.hpp>
#include <zfaging/harness/scenario_io.hpp>
#include <zfaging/harness/table.hpp>
#include <zfaging/montecarlo.hpp>

using namespace zfaging;
using namespace zfaging::harness;

namespace {

struct Globals {
  std::string scenario_path;
  std::uint64_t trials = 0;
  std::uint64_t seed = 1;
  std::string out;
  bool svg = false;
  unsigned workers = 0;
  std::string mc_mode = "scalar";
};

Scenario load(const Globals& g) {
  Scenario s = g.scenario_path.empty() ? reference_scenario() : load_scenario(g.scenario_path);
  s.aging.resolve([](const std::string& w) { std::cerr << "warning: " << w << "\n"; });
  return s;
}

RunOptions run_options(const Globals& g) { return RunOptions{g.trials, g.seed, parse_mc_mode(g.mc_mode), g.workers}; }

void emit(const Globals& g, const Table& t, const std::string& svg_default, const FigurePlot* plot = nullptr,
          const std::string& title = "") {
  if (g.out.empty()) {
    t.write_csv(std::cout);
  } else {
    write_text(g.out, t.csv());
  }
  if (g.svg && plot) {
    std::string path = svg_default;
    if (!g.out.empty()) {
      const auto dot = g.out.find_last_of('.');
      path = (dot == std::string::npos ? g.out : g.out.substr(0, dot)) + ".svg";
    }
    write_text(path, render_svg(t, plot->x, plot->y, plot->series, title, plot->log_y));
  }
}

std::vector<int> users_or_all(const DerivedStats& s, int user) {
  if (user >= 0) {
    if (user >= s.K) throw InvalidArgument("--user out of range");
    return {user};
  }
  std::vector<int> all;
  for (int k = 0; k < s.K; ++k) all.push_back(k);
  return all;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument("cannot parse number '" + item + "'");
    }
  }
  return out;
}

std::vector<std::string> parse_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

int cmd_derive(const Globals& g) {
  const Scenario sc = load(g);
  const DerivedStats s = derive_stats(sc);
  json j;
  j["alpha"] = s.alpha;
  j["p_r"] = s.p_r;
  j["p_tr"] = s.p_tr;
  j["hat_beta"] = s.hat_beta;
  j["C"] = s.C;
  j["a_diag"] = s.a_diag;
  j["trace_A"] = s.trace_A;
  j["spectrum"] = {{"mu", s.spectrum.mu}, {"multiplicity", s.spectrum.multiplicity}};
  const std::string text = j.dump(2) + "\n";
  if (g.out.empty()) {
    std::cout << text;
  } else {
    write_text(g.out, text);
  }
  return 0;
}

int cmd_rate(const Globals& g, const std::string& backend, int user) {
  const Scenario sc = load(g);
  const DerivedStats s = derive_stats(sc);
  if (backend != "closed" && backend != "distinct" && backend != "quadrature" && backend != "bound" && backend != "all") {
    throw InvalidArgument("--backend must be closed, distinct, quadrature, bound or all");
  }
  Table t{{"user", "backend", "bits_per_sym", "residual", "fallback"}, {}};
  auto y = std::make_shared<const YDist>(make_ydist(s));
  for (int k : users_or_all(s, user)) {
    const SinrModel m = make_model(s, k, y);
    auto add = [&](const RateResult& r, const std::string& name) {
      t.add({static_cast<long long>(k), name, r.bits_per_sym, r.residual, static_cast<long long>(r.fallback)});
    };
    if (backend == "closed" || backend == "all") add(rate_closed(m), "closed_form");
    if (backend == "distinct") add(rate_distinct(m), "distinct_case");
    if (backend == "quadrature" || backend == "all") add(rate_quadrature(m), "quadrature");
    if (backend == "bound" || backend == "all") {
      RateResult r;
      r.bits_per_sym = rate_lower_bound(m);
      add(r, "lower_bound");
    }
  }
  emit(g, t, "");
  return 0;
}

int cmd_outage(const Globals& g, const std::string& thresholds, int user) {
  const DerivedStats s = derive_stats(load(g));
  Table t{{"user", "gamma_th", "outage_closed", "outage_high_power"}, {}};
  auto y = std::make_shared<const YDist>(make_ydist(s));
  for (int k : users_or_all(s, user)) {
    const SinrModel m = make_model(s, k, y);
    for (double th : parse_list(thresholds)) t.add({static_cast<long long>(k), th, outage_closed(m, th), outage_high_power(m, th)});
  }
  emit(g, t, "");
  return 0;
}

int cmd_lowsnr(const Globals& g, int user) {
  const DerivedStats s = derive_stats(load(g));
  Table t{{"user", "ebn0_min", "ebn0_min_db", "wideband_slope", "wideband_slope_printed", "rate_slope", "rate_curvature"}, {}};
  for (int k : users_or_all(s, user)) {
    const LowSnrMetrics l = low_snr_metrics(s, k);
    t.add({static_cast<long long>(k), l.ebn0_min, l.ebn0_min_db(), l.wideband_slope, l.wideband_slope_printed, l.rate_slope,
           l.rate_curvature});
  }
  emit(g, t, "");
  return 0;
}

int cmd_asym(const Globals& g, int user, double kappa) {
  const Scenario sc = load(g);
  const DerivedStats s = derive_stats(sc);
  const double kap = kappa > 0.0 ? kappa : static_cast<double>(s.N) / s.K;
  Table t{{"user", "kappa", "sinr_limit", "rate_limit", "de_sinr", "de_rate", "power_scaled_limit"}, {}};
  for (int k : users_or_all(s, user)) {
    double lim = std::numeric_limits<double>::infinity();
    try {
      lim = sinr_limit_large_n(s, k);
    } catch (const UnboundedLimit&) {
    }
    const double E = sc.power.scaling == PowerScaling::inverse_sqrt_n ? sc.power.level : s.p_r * std::sqrt(static_cast<double>(s.N));
    const double ps = power_scaled_limit(s.own_beta(k), s.C[static_cast<std::size_t>(k)], s.alpha, sc.topology.tau, E);
    t.add({static_cast<long long>(k), kap, lim, std::log2(1.0 + lim), det_equiv_sinr(s, k, kap), det_equiv_rate(s, k, kap), ps});
  }
  emit(g, t, "");
  return 0;
}

int cmd_simulate(const Globals& g, int user, double gamma_th) {
  const Scenario sc = load(g);
  const TrialPlan plan{g.trials ? g.trials : 100000, g.seed, parse_mc_mode(g.mc_mode), user < 0 ? 0 : user, g.workers};
  const SinrSamples smp = simulate_sinr(sc, plan);
  const Estimate r = estimate_rate(smp);
  std::cerr << "mode=" << to_string(smp.mode) << " trials=" << smp.values.size() << " fingerprint=" << std::hex
            << smp.fingerprint << std::dec << " rate=" << format_cell(r.value) << " stderr=" << format_cell(r.std_err);
  if (gamma_th > 0.0) {
    const Estimate o = estimate_outage(smp, gamma_th);
    std::cerr << " outage=" << format_cell(o.value) << " outage_stderr=" << format_cell(o.std_err);
  }
  std::cerr << "\n";
  Table t{{"trial", "sinr"}, {}};
  for (std::size_t i = 0; i < smp.values.size(); ++i) t.add({static_cast<long long>(i), smp.values[i]});
  emit(g, t, "");
  return 0;
}

int cmd_figure(const Globals& g, const std::string& id) {
  const FigurePlot plot = figure_plot(id);
  const Table t = run_figure(id, run_options(g));
  emit(g, t, id + ".svg", &plot, id);
  return 0;
}

int cmd_sweep(const Globals& g, const std::string& axis, const std::string& grid, const std::string& outputs, double gamma_th) {
  SweepSpec spec;
  spec.axis = axis;
  spec.grid = parse_list(grid);
  spec.base = load(g);
  spec.outputs = parse_names(outputs);
  spec.gamma_th = gamma_th;
  spec.run = run_options(g);
  validate(spec);
  const Table t = run_sweep(spec);
  std::vector<std::string> ys;
  for (const auto& h : t.header) {
    if (h != axis && h != "se_mc_stderr") ys.push_back(h);
  }
  const FigurePlot plot{axis, ys, "", false};
  emit(g, t, "sweep.svg", &plot, "sweep over " + axis);
  return 0;
}

int cmd_validate(const Globals& g, const std::string& level, double tamper, const std::vector<int>& only) {
  AcceptanceOptions o;
  if (level == "quick") {
    o.level = Level::quick;
  } else if (level != "full") {
    throw InvalidArgument("--level must be quick or full");
  }
  o.hat_beta_tamper = tamper;
  if (g.seed != 1) o.seed = g.seed;
  o.workers = g.workers;
  json report = json::array();
  bool all = true;
  for (int id = 1; id <= criterion_count(); ++id) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const CriterionResult r = run_criterion(id, o);
    std::cout << format_result(r) << std::endl;
    report.push_back(result_json(r));
    all = all && r.passed;
  }
  if (!g.out.empty()) write_text(g.out, report.dump(2) + "\n");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uplink massive-MIMO zero-forcing analysis under pilot contamination and channel aging"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--scenario", g.scenario_path, "Scenario JSON file (default: the 7-cell reference setup)");
  app.add_option("--trials", g.trials, "Monte-Carlo trials (0 selects the default)");
  app.add_option("--seed", g.seed, "Monte-Carlo seed");
  app.add_option("--out", g.out, "Output path (CSV, or JSON for derive/validate)");
  app.add_flag("--svg", g.svg, "Also write an SVG line chart");
  app.add_option("--workers", g.workers, "Worker threads (0: hardware concurrency)");
  app.add_option("--mc-mode", g.mc_mode, "Monte-Carlo mode: scalar, matrix_equiv or full_pipeline");

  int user = -1;
  std::string backend = "all";
  std::string thresholds = "2";
  double gamma_th = 0.0;
  double kappa = 0.0;
  std::string fig;
  std::string axis;
  std::string grid;
  std::string outputs = "closed";
  std::string level = "full";
  double tamper = 1.0;
  std::vector<int> only;

  auto* derive = app.add_subcommand("derive", "Derived statistics as JSON");
  auto* rate = app.add_subcommand("rate", "Ergodic rate per user");
  rate->add_option("--backend", backend, "closed, distinct, quadrature, bound or all");
  rate->add_option("--user", user, "User index (default: all)");
  auto* outage = app.add_subcommand("outage", "Outage probability");
  outage->add_option("--gamma-th", thresholds, "Comma-separated SINR thresholds (linear)");
  outage->add_option("--user", user, "User index (default: all)");
  auto* lowsnr = app.add_subcommand("lowsnr", "Minimum Eb/N0 and wideband slope");
  lowsnr->add_option("--user", user, "User index (default: all)");
  auto* asym = app.add_subcommand("asym", "Large-N limits and deterministic equivalent");
  asym->add_option("--user", user, "User index (default: all)");
  asym->add_option("--kappa", kappa, "N/K for the deterministic equivalent (default: the scenario's)");
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo SINR samples");
  simulate->add_option("--user", user, "User index (default 0)");
  simulate->add_option("--gamma-th", gamma_th, "Also report the empirical outage at this threshold");
  auto* figure = app.add_subcommand("figure", "Reproduce a figure preset");
  figure->add_option("id", fig, "fig1..fig5")->required();
  auto* sweep = app.add_subcommand("sweep", "Parameter sweep");
  sweep->add_option("--axis", axis, "snr_db, alpha or N")->required();
  sweep->add_option("--grid", grid, "Comma-separated grid values")->required();
  sweep->add_option("--outputs", outputs, "Comma-separated evaluators: closed, bound, quad, mc, de, outage");
  sweep->add_option("--gamma-th", gamma_th, "Threshold for the outage evaluator");
  auto* validate_cmd = app.add_subcommand("validate", "Run the acceptance checks");
  validate_cmd->add_option("--level", level, "quick or full");
  validate_cmd->add_option("--tamper", tamper, "Scale factor applied to the reference Erlang scale");
  validate_cmd->add_option("--only", only, "Run only these criterion ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (derive->parsed()) return cmd_derive(g);
    if (rate->parsed()) return cmd_rate(g, backend, user);
    if (outage->parsed()) return cmd_outage(g, thresholds, user);
    if (lowsnr->parsed()) return cmd_lowsnr(g, user);
    if (asym->parsed()) return cmd_asym(g, user, kappa);
    if (simulate->parsed()) return cmd_simulate(g, user, gamma_th);
    if (figure->parsed()) return cmd_figure(g, fig);
    if (sweep->parsed()) return cmd_sweep(g, axis, grid, outputs, gamma_th > 0.0 ? gamma_th : 2.0);
    if (validate_cmd->parsed()) return cmd_validate(g, level, tamper, only);
  } catch (const InvalidArgument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
