// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "clockwork/computation/compose.hpp"
#include "clockwork/computation/modules.hpp"
#include "clockwork/crn/network.hpp"
#include "clockwork/crn/polynomial.hpp"
#include "clockwork/dynamics/crossings.hpp"
#include "clockwork/dynamics/integrate.hpp"
#include "clockwork/oscillator/basin.hpp"
#include "clockwork/oscillator/clock.hpp"
#include "clockwork/oscillator/manifold.hpp"
#include "clockwork/oscillator/models.hpp"
#include "clockwork/period/periods.hpp"

using namespace clockwork;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const osc::OscillatorConfig kStandard{};

const dynamics::Trace& standard_trace() {
  static const auto tr =
      dynamics::integrate(osc::build_oscillator(kStandard), std::vector<double>{5, 5, 0, 0}, 0.0, 100.0);
  return tr;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Verdict period_reproduction() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = period::predict_periods(3.0, 0.1);
  const double dt = seconds_since(t0);
  const bool ok = rel(p.T_l, 10.470) <= 0.005 && rel(p.T_h, 9.193) <= 0.005 && dt < 1.0;
  return {ok, fmt::format("T_l={:.4f} T_h={:.4f} vs (10.470, 9.193) tol 0.5%, {:.3f}s", p.T_l, p.T_h, dt)};
}

Verdict prediction_vs_measurement() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto tr = dynamics::integrate(osc::build_oscillator(kStandard), std::vector<double>{5, 5, 0, 0}, 0.0, 100.0);
  const auto r = period::compare_periods(3.0, 0.1, period::measure_periods(tr, kStandard.p));
  const double dt = seconds_since(t0);
  const bool ok = r.rel_error_T1 <= 0.10 && r.rel_error_T2 <= 0.10 && dt < 30.0;
  return {ok, fmt::format("T1={:.3f} (err {:.2f}%) T2={:.3f} (err {:.2f}%) tol 10%, {:.2f}s", r.measured.T1,
                          100 * r.rel_error_T1, r.measured.T2, 100 * r.rel_error_T2, dt)};
}

Verdict clock_validity() {
  const auto rep = osc::validate_clock(standard_trace(), kStandard);
  const bool ok = rep.passes && rep.max_low_residual <= rep.low_bound && rep.max_transition_fraction <= 0.02;
  return {ok, fmt::format("abrupt={} levels={} complementary={}, low residual {:.2e} <= {:.0e}, transition "
                          "{:.2f}% of period {:.3f}",
                          rep.abrupt, rep.levels, rep.complementary, rep.max_low_residual, rep.low_bound,
                          100 * rep.max_transition_fraction, rep.period)};
}

Verdict manifold_residuals() {
  const auto& tr = standard_trace();
  const double p = kStandard.p, eps1 = kStandard.eps1;
  double max_x = 0.0;
  for (const auto& s : tr.states())
    max_x = std::max(max_x, s[0]);
  const double bound = 10.0 * eps1 * std::max(p, max_x);
  // Diagnostic only: the linear identity away from the jumps, i.e. more than ten
  // u/v time constants from any crossing of x through p.
  const double settle = 10.0 * kStandard.eps2 / kStandard.eta1;
  const auto xs = tr.column("x");
  auto jumps = dynamics::crossing_times(tr.times(), xs, p, 0.5, dynamics::Direction::Rising);
  const auto down = dynamics::crossing_times(tr.times(), xs, p, 0.5, dynamics::Direction::Falling);
  jumps.insert(jumps.end(), down.begin(), down.end());
  auto near_jump = [&](double t) {
    return std::any_of(jumps.begin(), jumps.end(), [&](double j) { return std::abs(t - j) <= settle; });
  };
  double worst_residual = 0.0, worst_linear = 0.0, worst_linear_settled = 0.0, worst_t = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    if (tr.times()[k] < 1.0)
      continue;
    const auto& s = tr.states()[k];
    const auto r = osc::manifold_residuals(s[0], s[2], s[3], p, eps1);
    worst_residual = std::max({worst_residual, std::abs(r[0]), std::abs(r[1])});
    const double lin = std::abs(s[2] - s[3] - (p - s[0]));
    if (lin > worst_linear) {
      worst_linear = lin;
      worst_t = tr.times()[k];
    }
    if (!near_jump(tr.times()[k]))
      worst_linear_settled = std::max(worst_linear_settled, lin);
  }
  const bool residual_ok = worst_residual <= bound;
  const bool linear_ok = worst_linear <= 0.05;
  return {residual_ok && linear_ok,
          fmt::format("residuals {:.2e} <= {:.2e} [{}]; |u-v-(p-x)| max {:.3f} at t={:.2f} <= 0.05 [{}] "
                      "(beyond {:.2f} of a jump: {:.2e})",
                      worst_residual, bound, residual_ok ? "ok" : "fail", worst_linear, worst_t,
                      linear_ok ? "ok" : "fail", settle, worst_linear_settled)};
}

Verdict basin_control() {
  int bad = 0;
  std::string notes;
  for (auto [x, y, first] : {std::tuple{6.0, 6.0, "u"}, {2.0, 2.0, "u"}, {0.5, 0.5, "v"}, {4.0, 4.0, "v"}}) {
    const auto b = osc::check_basin(x, y, kStandard);
    if (b.first_signal != first || !b.consistent()) {
      ++bad;
      notes += fmt::format(" ({},{}) gave {}", x, y, b.first_signal);
    }
  }
  const auto& g = osc::standard_geometry();
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> box(0.2, 7.0);
  int n1 = 0, n2 = 0, random_bad = 0;
  while (n1 < 20 || n2 < 20) {
    const double x = box(rng), y = box(rng);
    if (std::hypot(x - 3.0, y - 3.0) < 0.3 || std::abs(y - g.y_low) < 0.1 || std::abs(y - g.y_high) < 0.1)
      continue;
    if (y > g.y_low && y < g.y_high && std::abs(x - g.repelling_inverse(y)) < 0.1)
      continue;
    int& n = osc::classify_initial(x, y) == osc::BasinRegion::A1 ? n1 : n2;
    if (n >= 20)
      continue;
    ++n;
    if (!osc::check_basin(x, y, kStandard).consistent()) {
      ++random_bad;
      notes += fmt::format(" ({:.2f},{:.2f})", x, y);
    }
  }
  return {bad == 0 && random_bad == 0,
          fmt::format("reference points {}/4, random A1+A2 {}/40 consistent{}", 4 - bad, 40 - random_bad, notes)};
}

Verdict loop_iteration() {
  const auto sys = comp::compose_loop(kStandard, {0, 0, 1});
  const auto tr = dynamics::integrate(sys.ode, sys.init, 0.0, 110.0);
  const auto st = comp::staircase(tr, kStandard.p, 1.0, 5);
  std::string values;
  for (double v : st.s1)
    values += fmt::format(" {:.4f}", v);
  return {st.within(0.01, 5), fmt::format("s1 after cycles 1..5:{}; max rel error {:.2f}% (tol 1%)", values,
                                          100 * st.max_rel_error)};
}

Verdict termination() {
  auto final_s1 = [](double eta3) {
    const auto sys = comp::compose_terminating_loop(kStandard, {0, 0, 1}, 4.0, 4.0, eta3);
    return comp::termination(dynamics::integrate(sys.ode, sys.init, 0.0, 100.0), 4.0).final_s1;
  };
  const double fast = final_s1(50.0), slow = final_s1(1.0);
  return {fast >= 3.96 && fast <= 4.10 && slow > 4.0,
          fmt::format("eta3=50: s1={:.4f} in [3.96, 4.10]; eta3=1: s1={:.4f} > 4", fast, slow)};
}

Verdict realization_round_trip() {
  const double eta1 = 0.1, eps1 = 1e-3;
  const auto ode = osc::xy_polynomials(kStandard);
  const auto net = crn::realize_network(ode);
  struct Expected {
    crn::Complex in, out;
    double rate;
  };
  const std::vector<Expected> want{
      {{{"x", 4}}, {{"x", 3}}, eta1 / eps1},        {{{"x", 3}}, {{"x", 4}}, 9.0 * (eta1 / eps1)},
      {{{"x", 2}}, {{"x", 1}}, 24.0 * (eta1 / eps1)}, {{{"x", 1}}, {{"x", 2}}, 21.0 * (eta1 / eps1)},
      {{{"x", 1}, {"y", 1}}, {{"y", 1}}, eta1 / eps1}, {{{"x", 1}, {"y", 1}}, {{"x", 1}, {"y", 2}}, eta1},
      {{{"y", 1}}, {}, 3.0 * eta1}};
  int matched = 0;
  for (const auto& w : want)
    for (const auto& r : net.reactions())
      if (r.reactants == w.in && r.products == w.out && r.rate == w.rate)
        ++matched;
  const bool exact = net.num_reactions() == 7 && matched == 7;
  const bool inverse = crn::network_to_polynomials(net) == ode;
  return {exact && inverse, fmt::format("{} reactions, {}/7 match with exact rates; inverse exact: {}",
                                        net.num_reactions(), matched, inverse)};
}

Verdict regime_map() {
  osc::OscillatorConfig stable = kStandard;
  stable.ell = 1.5;
  const auto st = dynamics::integrate(osc::build_oscillator(stable), std::vector<double>{5, 5, 0, 0}, 0.0, 200.0);
  const auto& end = st.states().back();
  const double dist = std::max(std::abs(end[0] - 1.5), std::abs(end[1] - osc::standard_geometry().phi(1.5)));

  const auto osc_tr =
      dynamics::integrate(osc::build_oscillator(kStandard), std::vector<double>{5, 5, 0, 0}, 0.0, 130.0);
  const auto ups = dynamics::crossing_times(osc_tr.times(), osc_tr.column("u"), period::phase_threshold(3.0),
                                            0.2 * period::phase_threshold(3.0), dynamics::Direction::Rising);
  const std::size_t periods = ups.empty() ? 0 : ups.size() - 1;
  return {dist <= 1e-3 && periods >= 5,
          fmt::format("ell=1.5: distance to (1.5, 1.875) at t=200 is {:.1e} (tol 1e-3); ell=3: {} full periods "
                      "by t=130 (need 5)",
                      dist, periods)};
}

Verdict property_suites() {
  std::mt19937 rng(11);
  std::string notes;
  bool ok = true;

  // Mass action never pushes a species below zero from the boundary.
  std::uniform_int_distribution<int> coeff(0, 2), pick(0, 3);
  std::uniform_real_distribution<double> value(0.0, 3.0), rate(0.1, 5.0);
  const std::vector<std::string> names{"a", "b", "c", "d"};
  double worst_boundary = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<crn::Reaction> rs;
    for (int j = 0; j < 5; ++j) {
      crn::Reaction r;
      for (const auto& n : names) {
        if (int c = coeff(rng))
          r.reactants[n] = c;
        if (int c = coeff(rng))
          r.products[n] = c;
      }
      if (r.reactants.empty() && r.products.empty())
        r.products["a"] = 1;
      r.rate = rate(rng);
      rs.push_back(r);
    }
    const crn::ReactionNetwork net(names, rs);
    std::vector<double> s(4);
    for (auto& v : s)
      v = value(rng);
    s[static_cast<std::size_t>(pick(rng))] = 0.0;
    const auto ds = crn::ode_rhs(net, s);
    for (std::size_t i = 0; i < 4; ++i)
      if (s[i] == 0.0)
        worst_boundary = std::min(worst_boundary, ds[i]);
  }
  ok &= worst_boundary >= 0.0;
  notes += fmt::format("boundary rhs min {:.1e}", worst_boundary);

  // Unclamped trajectories of the composed system stay nonnegative.
  dynamics::SolverConfig raw;
  raw.clamp_nonnegative = false;
  const auto term = comp::compose_terminating_loop(kStandard, {0, 0, 1}, 4.0);
  const auto tt = dynamics::integrate(term.ode, term.init, 0.0, 100.0, raw);
  double lowest = 0.0;
  for (const auto& s : tt.states())
    for (double v : s)
      lowest = std::min(lowest, v);
  ok &= lowest >= -dynamics::kUndershootTolerance;
  notes += fmt::format("; unclamped min {:.1e}", lowest);

  // Catalysts s3 and l are conserved.
  double drift = 0.0;
  for (const char* name : {"s3", "l"}) {
    const auto col = tt.column(name);
    for (double v : col)
      drift = std::max(drift, std::abs(v - col.front()));
  }
  ok &= drift <= 1e-10;
  notes += fmt::format("; s3/l drift {:.1e}", drift);

  // Counter against its closed form.
  dynamics::SolverConfig tight;
  tight.rel_tol = 1e-11;
  tight.abs_tol = 1e-13;
  double counter_err = 0.0;
  for (auto [l, s1, w0, eta3] : {std::tuple{4.0, 2.0, 1.0, 1.0}, {4.0, 4.0, 4.0, 50.0}, {1.0, 3.0, 1.0, 1.0}}) {
    auto spec = comp::ModuleSpec::standard(comp::ModuleKind::Counter);
    spec.eta3 = eta3;
    const auto ode = dynamics::from_polynomials(crn::network_to_polynomials(comp::build_module(spec)));
    const auto tr = dynamics::integrate(ode, std::vector<double>{l, w0, s1}, 0.0, 10.0, tight);
    const auto w = tr.column("w");
    for (std::size_t k = 0; k < tr.size(); ++k)
      counter_err = std::max(counter_err, std::abs(w[k] - comp::counter_closed_form(l, s1, w0, eta3, tr.times()[k])));
  }
  ok &= counter_err <= 1e-6;
  notes += fmt::format("; counter err {:.1e}", counter_err);

  // Adaptive quadrature against a fixed-grid Simpson rule on 10^6 intervals.
  auto density = [](double x, double ell) {
    const double phi = -x * x * x + 9 * x * x - 24 * x + 21;
    const double dphi = -3 * x * x + 18 * x - 24;
    return dphi / (0.1 * (x - ell) * phi);
  };
  auto simpson = [&](double a, double b, double ell) {
    constexpr std::size_t n = 1'000'000;
    const double h = (b - a) / n;
    double sum = density(a, ell) + density(b, ell);
    for (std::size_t i = 1; i < n; ++i)
      sum += (i % 2 ? 4.0 : 2.0) * density(a + h * static_cast<double>(i), ell);
    return sum * h / 3.0;
  };
  double quad_err = 0.0;
  for (double ell : {2.5, 3.0, 3.5}) {
    const auto p = period::predict_periods(ell, 0.1);
    quad_err = std::max({quad_err, rel(p.T_l, simpson(1.0, 2.0, ell)), rel(p.T_h, -simpson(4.0, 5.0, ell))});
  }
  ok &= quad_err <= 1e-6;
  notes += fmt::format("; quadrature rel err {:.1e}", quad_err);
  return {ok, notes};
}

} // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"period reproduction", period_reproduction},
      {"prediction vs measurement", prediction_vs_measurement},
      {"clock validity", clock_validity},
      {"manifold residuals", manifold_residuals},
      {"basin and order control", basin_control},
      {"loop iteration", loop_iteration},
      {"termination", termination},
      {"realization round trip", realization_round_trip},
      {"regime map", regime_map},
      {"property suites", property_suites},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    fmt::print("{} criterion {:>2} {}: {}\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail);
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
