#pragma once

// Figure presets (seven cells, ten terminals, T = 200, tau = 10, a = 0.1)
// and the generic parameter sweep.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <set>
#include <string>
#include <vector>

#include "../analytic.hpp"
#include "../montecarlo.hpp"
#include "table.hpp"

namespace zfaging::harness {

struct FigurePreset {
  std::string id;
  int L = 7;
  int K = 10;
  int T = 200;
  int tau = 10;
  double a = 0.1;
};

inline const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"fig1", "fig2", "fig3", "fig4", "fig5"};
  return ids;
}

inline FigurePreset figure_preset(const std::string& id) {
  const auto& ids = figure_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) throw InvalidArgument("unknown figure '" + id + "'");
  return FigurePreset{id};
}

inline Scenario preset_scenario(const FigurePreset& f, int N, double alpha, double p_r) {
  Scenario s;
  s.topology = CellTopology{f.L, f.K, N, f.T, f.tau};
  s.fading = build_simple_profile(f.L, f.K, f.a);
  s.aging = AgingSpec::direct(alpha);
  s.power = PowerSpec::fixed_snr(p_r);
  return s;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double v) { return 10.0 * std::log10(v); }

struct RunOptions {
  std::uint64_t trials = 0;  ///< 0 selects the preset default
  std::uint64_t seed = 1;
  McMode mc_mode = McMode::scalar;
  unsigned workers = 0;
};

/// Seed for grid row `row`, so rows use unrelated streams.
inline std::uint64_t row_seed(std::uint64_t seed, std::uint64_t row) {
  std::uint64_t s = seed ^ (row * 0x9E3779B97F4A7C15ULL);
  return splitmix64(s);
}

/// Runs one table row, tagging any failure with the row index.
template <class F>
void at_row(std::size_t row, F&& f) {
  try {
    f();
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string(e.what()) + " [row " + std::to_string(row) + "]");
  } catch (const std::exception& e) {
    throw NumericFailure(std::string(e.what()) + " [row " + std::to_string(row) + "]");
  }
}

struct SumSe {
  double value = 0.0;
  double std_err = 0.0;
};

inline double frame_factor(const Scenario& s) {
  return 1.0 - static_cast<double>(s.topology.tau) / s.topology.T;
}

/// Sum spectral efficiency from one analytic per-user evaluator.
template <class Eval>
double sum_se(const Scenario& sc, Eval&& eval) {
  const DerivedStats s = derive_stats(sc);
  return sum_spectral_efficiency(per_user_rates(s, eval), sc.topology);
}

/// Sum spectral efficiency by simulation; users sharing an SINR law reuse one sample set.
inline SumSe sum_se_mc(const Scenario& sc, std::uint64_t trials, std::uint64_t seed, McMode mode, unsigned workers) {
  const DerivedStats s = derive_stats(sc);
  const auto cls = user_classes(s);
  std::vector<Estimate> est(static_cast<std::size_t>(s.K));
  SumSe out;
  for (int k = 0; k < s.K; ++k) {
    const int c = cls[static_cast<std::size_t>(k)];
    if (c == k) {
      TrialPlan plan{trials, row_seed(seed, static_cast<std::uint64_t>(k)), mode, k, workers};
      est[static_cast<std::size_t>(k)] = estimate_rate(simulate_sinr(sc, plan));
    }
    out.value += est[static_cast<std::size_t>(c)].value;
    out.std_err += est[static_cast<std::size_t>(c)].std_err;
  }
  const double f = frame_factor(sc);
  out.value *= f;
  out.std_err *= f;
  return out;
}

inline double closed_rate(const SinrModel& m) { return rate_closed(m).bits_per_sym; }
inline double bound_rate(const SinrModel& m) { return rate_lower_bound(m); }
inline double quad_rate(const SinrModel& m) { return rate_quadrature(m).bits_per_sym; }

inline Table figure1(const RunOptions& o) {
  const FigurePreset f = figure_preset("fig1");
  const std::uint64_t trials = o.trials ? o.trials : 100000;
  Table t{{"snr_db", "N", "se_exact", "se_bound", "se_mc", "se_mc_stderr"}, {}};
  std::uint64_t row = 0;
  for (int N : {20, 50, 100}) {
    for (double db : {-10.0, -5.0, 0.0, 5.0, 10.0}) {
      at_row(row, [&] {
        const Scenario sc = preset_scenario(f, N, 0.9, db_to_linear(db));
        const SumSe mc = sum_se_mc(sc, trials, row_seed(o.seed, row), o.mc_mode, o.workers);
        t.add({db, static_cast<long long>(N), sum_se(sc, closed_rate), sum_se(sc, bound_rate), mc.value, mc.std_err});
      });
      ++row;
    }
  }
  return t;
}

inline Table figure2(const RunOptions& o) {
  const FigurePreset f = figure_preset("fig2");
  const std::uint64_t trials = o.trials ? o.trials : 100000;
  Table t{{"alpha", "N", "se_exact", "se_bound", "se_mc", "se_mc_stderr"}, {}};
  std::uint64_t row = 0;
  for (int N : {20, 50, 100}) {
    for (int i = 0; i <= 10; ++i) {
      const double alpha = 0.5 + 0.05 * i;
      at_row(row, [&] {
        const Scenario sc = preset_scenario(f, N, alpha, 1.0);
        const SumSe mc = sum_se_mc(sc, trials, row_seed(o.seed, row), o.mc_mode, o.workers);
        t.add({alpha, static_cast<long long>(N), sum_se(sc, closed_rate), sum_se(sc, bound_rate), mc.value, mc.std_err});
      });
      ++row;
    }
  }
  return t;
}

/// Per-terminal target of 1 bit/s/Hz, before the pilot-overhead factor.
inline Table figure3(const RunOptions&) {
  const FigurePreset f = figure_preset("fig3");
  const double target = 1.0;
  Table t{{"N", "alpha", "target", "p_req_db", "rate_at_p_req"}, {}};
  for (double alpha : {0.7, 0.9}) {
    for (int N : {32, 64, 128, 256}) {
      at_row(t.rows.size(), [&] {
        const Scenario sc = preset_scenario(f, N, alpha, 1.0);
        const double p = required_power(target, sc, 0);
        const double r = rate_quadrature(make_model(derive_stats(sc.with_snr(p)), 0)).bits_per_sym;
        t.add({static_cast<long long>(N), alpha, target, linear_to_db(p), r});
      });
    }
  }
  return t;
}

inline Table figure4(const RunOptions& o) {
  const FigurePreset f = figure_preset("fig4");
  const std::uint64_t trials = o.trials ? o.trials : 100000;
  Table t{{"N", "alpha", "scaling", "p_r", "se_quad", "se_mc", "se_mc_stderr", "se_limit"}, {}};
  std::uint64_t row = 0;
  for (const bool scaled : {false, true}) {
    for (double alpha : {0.7, 0.9, 1.0}) {
      for (int N : {20, 50, 100, 200, 400, 800, 1600}) {
        at_row(row, [&] {
          Scenario sc = preset_scenario(f, N, alpha, 1.0);
          if (scaled) sc.power.scaling = PowerScaling::inverse_sqrt_n;
          const DerivedStats s = derive_stats(sc);
          const SumSe mc = sum_se_mc(sc, trials, row_seed(o.seed, row), o.mc_mode, o.workers);
          const double C = s.C[0];
          const double lim_sinr = scaled ? power_scaled_limit(s.own_beta(0), C, alpha, sc.topology.tau, sc.power.level)
                                         : sinr_limit_large_n(s, 0);
          const double limit = frame_factor(sc) * s.K * std::log2(1.0 + lim_sinr);
          t.add({static_cast<long long>(N), alpha, std::string(scaled ? "inv_sqrt_n" : "fixed"), s.p_r,
                 sum_se(sc, quad_rate), mc.value, mc.std_err, limit});
        });
        ++row;
      }
    }
  }
  return t;
}

inline Table figure5(const RunOptions& o) {
  const FigurePreset f = figure_preset("fig5");
  const std::uint64_t trials = o.trials ? o.trials : 1000000;
  Table t{{"snr_db", "alpha", "gamma_th", "outage_closed", "outage_high_power", "outage_mc", "outage_mc_stderr"}, {}};
  std::uint64_t row = 0;
  for (double alpha : {0.9, 1.0}) {
    for (double db : {-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0}) {
      at_row(row, [&] {
        const Scenario sc = preset_scenario(f, 100, alpha, db_to_linear(db));
        const SinrModel m = make_model(derive_stats(sc), 0);
        const SinrSamples smp = simulate_sinr(sc, TrialPlan{trials, row_seed(o.seed, row), o.mc_mode, 0, o.workers});
        for (double g : {2.0, 3.0}) {
          const Estimate e = estimate_outage(smp, g);
          t.add({db, alpha, g, outage_closed(m, g), outage_high_power(m, g), e.value, e.std_err});
        }
      });
      ++row;
    }
  }
  return t;
}

inline Table run_figure(const std::string& id, const RunOptions& o) {
  if (id == "fig1") return figure1(o);
  if (id == "fig2") return figure2(o);
  if (id == "fig3") return figure3(o);
  if (id == "fig4") return figure4(o);
  if (id == "fig5") return figure5(o);
  throw InvalidArgument("unknown figure '" + id + "'");
}

/// Axis and y columns used when drawing a figure table.
struct FigurePlot {
  std::string x;
  std::vector<std::string> y;
  std::string series;
  bool log_y = false;
};

inline FigurePlot figure_plot(const std::string& id) {
  if (id == "fig1") return {"snr_db", {"se_exact", "se_bound", "se_mc"}, "N", false};
  if (id == "fig2") return {"alpha", {"se_exact", "se_bound", "se_mc"}, "N", false};
  if (id == "fig3") return {"N", {"p_req_db"}, "alpha", false};
  if (id == "fig4") return {"N", {"se_quad", "se_limit"}, "alpha", false};
  return {"snr_db", {"outage_closed", "outage_mc"}, "alpha", true};
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepSpec {
  std::string axis;
  std::vector<double> grid;
  Scenario base;
  std::vector<std::string> outputs;
  double gamma_th = 2.0;
  RunOptions run;
};

inline const std::set<std::string>& sweep_outputs() {
  static const std::set<std::string> names = {"closed", "bound", "quad", "mc", "de", "outage"};
  return names;
}

inline void validate(const SweepSpec& s) {
  if (s.axis != "snr_db" && s.axis != "alpha" && s.axis != "N") {
    throw InvalidArgument("sweep: axis must be one of snr_db, alpha, N");
  }
  if (s.grid.empty()) throw InvalidArgument("sweep: empty grid");
  bool inc = true;
  bool dec = true;
  for (std::size_t i = 1; i < s.grid.size(); ++i) {
    inc = inc && s.grid[i] > s.grid[i - 1];
    dec = dec && s.grid[i] < s.grid[i - 1];
  }
  if (!inc && !dec) throw InvalidArgument("sweep: grid must be strictly monotone");
  if (s.axis == "N") {
    for (double n : s.grid) {
      if (n != std::floor(n)) throw InvalidArgument("sweep: N grid values must be integers");
    }
  }
  if (s.outputs.empty()) throw InvalidArgument("sweep: no outputs requested");
  for (const auto& o : s.outputs) {
    if (!sweep_outputs().count(o)) throw InvalidArgument("sweep: unknown evaluator '" + o + "'");
  }
}

inline Scenario sweep_point(const SweepSpec& s, double v) {
  Scenario sc = s.base;
  if (s.axis == "snr_db") {
    sc.power.level = db_to_linear(v);
  } else if (s.axis == "alpha") {
    sc.aging = AgingSpec::direct(v);
  } else {
    sc.topology.N = static_cast<int>(v);
  }
  sc.validate();
  return sc;
}

inline Table run_sweep(const SweepSpec& spec) {
  validate(spec);
  Table t;
  t.header.push_back(spec.axis);
  for (const auto& o : spec.outputs) {
    if (o == "closed") t.header.push_back("se_exact");
    if (o == "bound") t.header.push_back("se_bound");
    if (o == "quad") t.header.push_back("se_quad");
    if (o == "mc") {
      t.header.push_back("se_mc");
      t.header.push_back("se_mc_stderr");
    }
    if (o == "de") t.header.push_back("se_de");
    if (o == "outage") t.header.push_back("outage");
  }
  const std::uint64_t trials = spec.run.trials ? spec.run.trials : 100000;
  for (std::size_t r = 0; r < spec.grid.size(); ++r) {
    at_row(r, [&] {
      const double v = spec.grid[r];
      const Scenario sc = sweep_point(spec, v);
      std::vector<Cell> row;
      if (spec.axis == "N") {
        row.push_back(static_cast<long long>(v));
      } else {
        row.push_back(v);
      }
      for (const auto& o : spec.outputs) {
        if (o == "closed") row.push_back(sum_se(sc, closed_rate));
        if (o == "bound") row.push_back(sum_se(sc, bound_rate));
        if (o == "quad") row.push_back(sum_se(sc, quad_rate));
        if (o == "mc") {
          const SumSe mc = sum_se_mc(sc, trials, row_seed(spec.run.seed, r), spec.run.mc_mode, spec.run.workers);
          row.push_back(mc.value);
          row.push_back(mc.std_err);
        }
        if (o == "de") {
          const DerivedStats s = derive_stats(sc);
          const double kappa = static_cast<double>(s.N) / s.K;
          std::vector<double> rates;
          for (int k = 0; k < s.K; ++k) rates.push_back(det_equiv_rate(s, k, kappa));
          row.push_back(sum_spectral_efficiency(rates, sc.topology));
        }
        if (o == "outage") row.push_back(outage_closed(derive_stats(sc), 0, spec.gamma_th));
      }
      t.add(std::move(row));
    });
  }
  return t;
}

}  // namespace zfaging::harness
