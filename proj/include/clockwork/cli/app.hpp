#ifndef CLOCKWORK_CLI_APP_HPP
#define CLOCKWORK_CLI_APP_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "clockwork/computation/compose.hpp"
#include "clockwork/crn/json_io.hpp"
#include "clockwork/dynamics/integrate.hpp"
#include "clockwork/error.hpp"
#include "clockwork/oscillator/basin.hpp"
#include "clockwork/oscillator/clock.hpp"
#include "clockwork/oscillator/manifold.hpp"
#include "clockwork/oscillator/models.hpp"
#include "clockwork/period/periods.hpp"

namespace clockwork::cli {

enum ExitCode { kOk = 0, kAnalysisFailure = 1, kInputError = 2, kNumericalFailure = 3 };

/// Fully resolved run settings. Defaults reproduce the canonical clock run.
struct ScenarioConfig {
  std::string scenario = "standard";
  osc::OscillatorConfig osc;
  double x0 = 5.0, y0 = 5.0, u0 = 0.0, v0 = 0.0;
  double t_end = 100.0;
  dynamics::SolverConfig solver;
  std::string out;
  std::string format = "csv";
};

namespace detail {

/// Flag values as given on the command line; unset flags fall back to the
/// config file, then to the scenario defaults.
struct CommonFlags {
  std::string config_file;
  std::optional<std::string> scenario, out, format;
  std::map<std::string, std::optional<double>> numbers{
      {"eps1", {}}, {"eps2", {}}, {"eta1", {}},    {"p", {}},       {"ell", {}},     {"x0", {}},
      {"y0", {}},   {"u0", {}},   {"v0", {}},      {"t-end", {}},   {"rel-tol", {}}, {"abs-tol", {}},
      {"sample", {}}};
};

inline void add_common(CLI::App& cmd, CommonFlags& f, bool with_scenario) {
  cmd.add_option("--config", f.config_file, "JSON file of flag values (flags win)");
  if (with_scenario)
    cmd.add_option("--scenario", f.scenario, "standard (4D clock) or vdp2d (driving pair only)")
        ->check(CLI::IsMember({"standard", "vdp2d"}));
  for (auto& [name, value] : f.numbers)
    cmd.add_option("--" + name, value);
  cmd.add_option("-o,--out", f.out, "output file (stdout if omitted)");
  cmd.add_option("--format", f.format, "trace format")->check(CLI::IsMember({"csv", "json"}));
}

inline nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open config file '" + path + "'");
  try {
    auto j = nlohmann::json::parse(in);
    if (!j.is_object())
      throw InputError("config file must hold a JSON object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("config file '" + path + "': " + e.what());
  }
}

/// Accepts "t-end", "t_end" and similar spellings in config files.
inline std::string normalize_key(std::string k) {
  std::replace(k.begin(), k.end(), '_', '-');
  return k;
}

inline ScenarioConfig resolve(const CommonFlags& f, const std::string& default_scenario = "standard") {
  ScenarioConfig c;
  c.scenario = default_scenario;
  std::map<std::string, double> values;
  if (!f.config_file.empty()) {
    const auto j = load_config_file(f.config_file);
    for (const auto& [key, val] : j.items()) {
      const auto k = normalize_key(key);
      if (k == "scenario" || k == "out" || k == "format") {
        if (!val.is_string())
          throw InputError("config key '" + key + "' must be a string");
        (k == "scenario" ? c.scenario : k == "out" ? c.out : c.format) = val.get<std::string>();
      } else if (f.numbers.count(k)) {
        if (!val.is_number())
          throw InputError("config key '" + key + "' must be a number");
        values[k] = val.get<double>();
      } else {
        throw InputError("unknown config key '" + key + "'");
      }
    }
  }
  for (const auto& [k, v] : f.numbers)
    if (v)
      values[k] = *v;
  if (f.scenario)
    c.scenario = *f.scenario;
  if (f.out)
    c.out = *f.out;
  if (f.format)
    c.format = *f.format;
  if (c.scenario != "standard" && c.scenario != "vdp2d")
    throw InputError("unknown scenario '" + c.scenario + "'");
  if (c.format != "csv" && c.format != "json")
    throw InputError("format must be csv or json");

  if (c.scenario == "vdp2d")
    c.osc.eta1 = 1.0; // the unscaled 2D model
  auto take = [&](const char* k, double& dst) {
    if (auto it = values.find(k); it != values.end())
      dst = it->second;
  };
  take("eps1", c.osc.eps1);
  take("eps2", c.osc.eps2);
  take("eta1", c.osc.eta1);
  take("p", c.osc.p);
  take("ell", c.osc.ell);
  take("x0", c.x0);
  take("y0", c.y0);
  take("u0", c.u0);
  take("v0", c.v0);
  take("t-end", c.t_end);
  take("rel-tol", c.solver.rel_tol);
  take("abs-tol", c.solver.abs_tol);
  take("sample", c.solver.sample_interval);
  c.osc.validate();
  c.solver.validate();
  if (!(c.t_end > 0.0) || !std::isfinite(c.t_end))
    throw InputError("t-end must be positive");
  for (double s : {c.x0, c.y0, c.u0, c.v0})
    if (!(s >= 0.0) || !std::isfinite(s))
      throw InputError("initial concentrations must be non-negative");
  return c;
}

/// Writes to the --out file, or to `fallback` when none was given.
template <class Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f)
    throw InputError("cannot write '" + path + "'");
  write(f);
}

inline void write_trace(const dynamics::Trace& tr, const ScenarioConfig& c, std::ostream& fallback) {
  emit(c.out, fallback, [&](std::ostream& o) {
    if (c.format == "json")
      o << dynamics::to_json(tr).dump() << '\n';
    else
      dynamics::write_csv(tr, o);
  });
}

inline void print_ranges(const dynamics::Trace& tr, std::ostream& o) {
  o << std::setprecision(6);
  for (const auto& r : dynamics::species_ranges(tr))
    o << r.name << ": min " << r.min << ", max " << r.max << '\n';
}

inline void warn_all(const std::vector<std::string>& ws, std::ostream& err) {
  for (const auto& w : ws)
    err << "warning: " << w << '\n';
}

inline dynamics::Trace simulate(const ScenarioConfig& c, std::ostream& err) {
  warn_all(c.osc.warnings(), err);
  if (std::hypot(c.x0 - c.osc.ell, c.y0 - osc::standard_geometry().phi(c.osc.ell)) < 1e-12)
    err << "warning: initial point is the unstable equilibrium\n";
  if (c.scenario == "vdp2d")
    return dynamics::integrate(osc::build_subsystem_xy(c.osc), std::vector<double>{c.x0, c.y0}, 0.0, c.t_end, c.solver);
  return dynamics::integrate(osc::build_oscillator(c.osc), std::vector<double>{c.x0, c.y0, c.u0, c.v0}, 0.0, c.t_end,
                             c.solver);
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size())
        throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("not a number list: '" + s + "'");
    }
  }
  if (out.empty())
    throw InputError("empty number list");
  return out;
}

inline std::size_t sweep_threads(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CRN_CLOCKWORK_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap > 0)
        n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
    } catch (const std::exception&) {
      throw InputError("CRN_CLOCKWORK_THREADS must be a positive integer");
    }
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

} // namespace detail

/// Runs one command line (without the program name). All output goes to
/// `out` / `err`; the return value is the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chemical relaxation oscillator clock toolkit", "crn_clockwork"};
  app.require_subcommand(1);

  detail::CommonFlags sim_f, ana_f, loop_f, term_f, sweep_f;

  auto* sim = app.add_subcommand("simulate", "integrate a scenario and write its trace");
  detail::add_common(*sim, sim_f, true);

  auto* ana = app.add_subcommand("analyze", "simulate, validate the clock and compare periods");
  detail::add_common(*ana, ana_f, false);
  osc::ClockThresholds th;
  ana->add_option("--abrupt-fraction", th.abrupt_fraction, "max transition width / period");
  ana->add_option("--low-factor", th.low_factor, "low level bound factor on eps1");
  ana->add_option("--low-floor", th.low_floor, "low level bound floor");
  ana->add_option("--high-fraction", th.high_fraction, "min high level / median high amplitude");
  double quad_tol = 1e-10;
  ana->add_option("--quad-tol", quad_tol, "quadrature error target");

  auto* cls = app.add_subcommand("classify", "basin region of an initial point");
  double cx = 0.0, cy = 0.0, ctol = 1e-9;
  bool csim = false;
  std::string cformat = "text";
  cls->add_option("--x0", cx)->required();
  cls->add_option("--y0", cy)->required();
  cls->add_option("--tol", ctol, "radius treated as the equilibrium");
  cls->add_flag("--simulate", csim, "also simulate and report the observed merge side");
  cls->add_option("--format", cformat)->check(CLI::IsMember({"text", "json"}));

  auto* rlz = app.add_subcommand("realize", "polynomial ODE JSON to reaction network JSON");
  std::string rin, rout;
  bool inverse = false;
  rlz->add_option("input", rin, "input JSON file")->required();
  rlz->add_option("-o,--out", rout);
  rlz->add_flag("--to-polynomials", inverse, "network JSON back to polynomial JSON");

  auto* loop = app.add_subcommand("demo-loop", "clock-driven loop s1 = s1 + s3");
  detail::add_common(*loop, loop_f, false);
  std::array<double, 3> s_init{0.0, 0.0, 1.0};
  std::size_t cycles = 5;
  std::string network_out;
  for (auto* cmd : {loop}) {
    cmd->add_option("--s1", s_init[0]);
    cmd->add_option("--s2", s_init[1]);
    cmd->add_option("--s3", s_init[2]);
    cmd->add_option("--network", network_out, "also write the full reaction network JSON");
  }
  loop->add_option("--cycles", cycles, "cycles reported in the staircase");

  auto* term = app.add_subcommand("demo-terminate", "loop terminated by the counter species W");
  detail::add_common(*term, term_f, false);
  std::array<double, 3> ts_init{0.0, 0.0, 1.0};
  double l = 4.0, w0 = 0.0, eta3 = 50.0;
  std::string term_network_out;
  term->add_option("--s1", ts_init[0]);
  term->add_option("--s2", ts_init[1]);
  term->add_option("--s3", ts_init[2]);
  term->add_option("--l", l, "iteration target");
  term->add_option("--w0", w0, "initial counter (default: l, or 1 when l = 0)");
  term->add_option("--eta3", eta3, "counter rate");
  term->add_option("--network", term_network_out, "also write the full reaction network JSON");

  auto* swp = app.add_subcommand("sweep", "predicted and measured periods over ell x eta1");
  detail::add_common(*swp, sweep_f, false);
  std::string ells = "2.5,3,3.5", eta1s = "0.1";
  swp->add_option("--ells", ells, "comma-separated ell values");
  swp->add_option("--eta1s", eta1s, "comma-separated eta1 values");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (sim->parsed()) {
      const auto c = detail::resolve(sim_f);
      const auto tr = detail::simulate(c, err);
      detail::write_trace(tr, c, out);
      detail::print_ranges(tr, c.out.empty() ? err : out);
      return kOk;
    }

    if (ana->parsed()) {
      const auto c = detail::resolve(ana_f);
      nlohmann::json report{{"config", osc::to_json(c.osc)}};
      const auto eq = osc::equilibrium_character(c.osc.ell);
      report["equilibrium"] = osc::to_json(eq);
      if (eq.kind != osc::EquilibriumKind::Oscillatory) {
        const std::string msg = eq.kind == osc::EquilibriumKind::Stable ? "no oscillation: stable equilibrium"
                                                                       : "no oscillation: fold-degenerate equilibrium";
        report["error"] = msg;
        detail::emit(c.out, out, [&](std::ostream& o) { o << report.dump(2) << '\n'; });
        err << msg << '\n';
        return kAnalysisFailure;
      }
      const auto tr = detail::simulate(c, err);
      const auto clock = osc::validate_clock(tr, c.osc, th);
      report["clock"] = osc::to_json(clock);
      const auto predicted = period::predict_periods(c.osc.ell, c.osc.eta1, quad_tol);
      try {
        const auto measured = period::measure_periods(tr, c.osc.p);
        report["periods"] = period::to_json(period::compare_periods(c.osc.ell, c.osc.eta1, measured, quad_tol));
      } catch (const AnalysisError& e) {
        report["periods"] = period::to_json(predicted);
        report["periods"]["error"] = e.what();
      }
      detail::emit(c.out, out, [&](std::ostream& o) { o << report.dump(2) << '\n'; });
      if (!clock.passes) {
        err << "clock validation failed: " << clock.reason << '\n';
        return kAnalysisFailure;
      }
      return kOk;
    }

    if (cls->parsed()) {
      const auto region = osc::classify_initial(cx, cy, osc::standard_geometry(), ctol);
      if (!csim) {
        if (cformat == "json")
          out << nlohmann::json{{"x0", cx}, {"y0", cy}, {"region", osc::to_string(region)}}.dump() << '\n';
        else
          out << osc::to_string(region) << '\n';
        return kOk;
      }
      if (region == osc::BasinRegion::Equilibrium)
        throw InputError("cannot simulate from the equilibrium");
      const auto b = osc::check_basin(cx, cy, osc::OscillatorConfig{});
      if (cformat == "json")
        out << osc::to_json(b).dump() << '\n';
      else
        out << osc::to_string(region) << " (merges "
            << (b.observed_branch ? osc::to_string(*b.observed_branch) : "nowhere") << ", first signal "
            << (b.first_signal.empty() ? "none" : b.first_signal) << ")\n";
      return kOk;
    }

    if (rlz->parsed()) {
      std::ifstream in(rin);
      if (!in)
        throw InputError("cannot open '" + rin + "'");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw InputError("'" + rin + "': " + e.what());
      }
      const nlohmann::json result = inverse ? crn::to_json(crn::network_to_polynomials(crn::network_from_json(j)))
                                            : crn::to_json(crn::realize_network(crn::polynomials_from_json(j)));
      detail::emit(rout, out, [&](std::ostream& o) { o << result.dump(2) << '\n'; });
      return kOk;
    }

    if (loop->parsed()) {
      const auto c = detail::resolve(loop_f);
      const auto sys = comp::compose_loop(c.osc, s_init, {c.x0, c.y0, c.u0, c.v0});
      detail::warn_all(sys.warnings, err);
      if (!network_out.empty())
        detail::emit(network_out, out, [&](std::ostream& o) { o << comp::to_json(sys).dump(2) << '\n'; });
      const auto tr = dynamics::integrate(sys.ode, sys.init, 0.0, c.t_end, c.solver);
      detail::write_trace(tr, c, out);
      const auto st = comp::staircase(tr, c.osc.p, s_init[2], cycles);
      (c.out.empty() ? err : out) << comp::to_json(st).dump() << '\n';
      return kOk;
    }

    if (term->parsed()) {
      const auto c = detail::resolve(term_f);
      const auto sys = comp::compose_terminating_loop(c.osc, ts_init, l, w0, eta3, {c.x0, c.y0, c.u0, c.v0});
      detail::warn_all(sys.warnings, err);
      if (!term_network_out.empty())
        detail::emit(term_network_out, out, [&](std::ostream& o) { o << comp::to_json(sys).dump(2) << '\n'; });
      const auto tr = dynamics::integrate(sys.ode, sys.init, 0.0, c.t_end, c.solver);
      detail::write_trace(tr, c, out);
      (c.out.empty() ? err : out) << comp::to_json(comp::termination(tr, l)).dump() << '\n';
      return kOk;
    }

    if (swp->parsed()) {
      const auto c = detail::resolve(sweep_f);
      std::vector<period::SweepRow> rows;
      for (double e : detail::parse_list(eta1s))
        for (double ell : detail::parse_list(ells)) {
          period::SweepRow r;
          r.ell = ell;
          r.eta1 = e;
          rows.push_back(r);
        }
      std::atomic<std::size_t> next{0};
      std::vector<std::string> problems(rows.size());
      auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
          auto& r = rows[i];
          auto cfg = c.osc;
          cfg.ell = r.ell;
          cfg.eta1 = r.eta1;
          try {
            cfg.validate();
            if (osc::equilibrium_character(r.ell).kind == osc::EquilibriumKind::Oscillatory) {
              const auto pred = period::predict_periods(r.ell, r.eta1);
              r.T_l_pred = pred.T_l;
              r.T_h_pred = pred.T_h;
            }
            const auto tr = dynamics::integrate(osc::build_oscillator(cfg),
                                                std::vector<double>{c.x0, c.y0, c.u0, c.v0}, 0.0, c.t_end, c.solver);
            const auto m = period::measure_periods(tr, cfg.p);
            r.T1_meas = m.T1;
            r.T2_meas = m.T2;
          } catch (const std::exception& ex) {
            problems[i] = ex.what();
          }
        }
      };
      const std::size_t n = detail::sweep_threads(rows.size());
      std::vector<std::thread> pool;
      for (std::size_t i = 1; i < n; ++i)
        pool.emplace_back(worker);
      worker();
      for (auto& t : pool)
        t.join();
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (!problems[i].empty())
          err << "warning: ell=" << rows[i].ell << " eta1=" << rows[i].eta1 << ": " << problems[i] << '\n';
      detail::emit(c.out, out, [&](std::ostream& o) { period::write_sweep_csv(rows, o); });
      return kOk;
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const AnalysisError& e) {
    err << "analysis failed: " << e.what() << '\n';
    return kAnalysisFailure;
  } catch (const IntegrationError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kOk;
}

} // namespace clockwork::cli

#endif
