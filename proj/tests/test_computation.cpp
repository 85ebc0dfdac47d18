#include <cmath>

#include <gtest/gtest.h>

#include "clockwork/computation/compose.hpp"
#include "clockwork/computation/modules.hpp"
#include "clockwork/crn/polynomial.hpp"
#include "clockwork/dynamics/crossings.hpp"
#include "clockwork/dynamics/integrate.hpp"
#include "clockwork/oscillator/models.hpp"

using namespace clockwork;
using namespace clockwork::comp;

namespace {

dynamics::Trace simulate_module(const ModuleSpec& spec, std::vector<double> s0, double t_end,
                                const dynamics::SolverConfig& solver = {}) {
  const auto ode = dynamics::from_polynomials(crn::network_to_polynomials(build_module(spec)));
  return dynamics::integrate(ode, s0, 0.0, t_end, solver);
}

dynamics::SolverConfig tight() {
  dynamics::SolverConfig s;
  s.rel_tol = 1e-11;
  s.abs_tol = 1e-13;
  return s;
}

const dynamics::Trace& loop_trace() {
  static const auto tr = [] {
    const auto sys = compose_loop(osc::OscillatorConfig{}, {0, 0, 1});
    return dynamics::integrate(sys.ode, sys.init, 0.0, 110.0);
  }();
  return tr;
}

std::string shape(const crn::Reaction& r) {
  const auto s = crn::format_reaction(r);
  return s.substr(0, s.find("  ("));
}

double final_value(const dynamics::Trace& tr, const std::string& s) { return tr.column(s).back(); }

} // namespace

TEST(Modules, ReactionLists) {
  const auto add = build_module(ModuleSpec::standard(ModuleKind::Addition));
  ASSERT_EQ(add.num_reactions(), 3u);
  EXPECT_EQ(shape(add.reactions()[0]), "s1 -> s1 + s2");
  EXPECT_EQ(shape(add.reactions()[2]), "s2 -> 0");

  const auto gated = build_module(ModuleSpec::standard(ModuleKind::GatedAddition, true));
  for (const auto& r : gated.reactions()) {
    EXPECT_EQ(r.reactants.at("u"), 1);
    EXPECT_EQ(r.products.at("u"), 1);
    EXPECT_EQ(r.reactants.at("w"), 1);
    EXPECT_EQ(r.products.at("w"), 1);
  }

  const auto load = build_module(ModuleSpec::standard(ModuleKind::GatedLoad));
  ASSERT_EQ(load.num_reactions(), 2u);
  EXPECT_EQ(shape(load.reactions()[0]), "s2 + v -> s1 + s2 + v");

  const auto counter = build_module(ModuleSpec::standard(ModuleKind::Counter));
  ASSERT_EQ(counter.num_reactions(), 3u);
  for (const auto& r : counter.reactions())
    EXPECT_EQ(r.rate, 50.0);
  EXPECT_EQ(shape(counter.reactions()[2]), "2w -> w");
}

TEST(Modules, AdditionEquilibrium) {
  const auto tr = simulate_module(ModuleSpec::standard(ModuleKind::Addition), {2, 0, 3}, 30.0);
  EXPECT_NEAR(final_value(tr, "s2"), 5.0, 1e-6);
}

TEST(Modules, LoadEquilibrium) {
  const auto tr = simulate_module(ModuleSpec::standard(ModuleKind::Load), {0, 7}, 30.0);
  EXPECT_NEAR(final_value(tr, "s1"), 7.0, 1e-6);
}

TEST(Modules, TruncatedSubtraction) {
  const auto spec = ModuleSpec::standard(ModuleKind::TruncatedSubtraction);
  // Species order p, x, u, v.
  EXPECT_NEAR(final_value(simulate_module(spec, {5, 2, 0, 0}, 200.0), "u"), 3.0, 0.01);
  // With x > p nothing removes V, so only u has a finite limit.
  EXPECT_NEAR(final_value(simulate_module(spec, {2, 5, 0, 0}, 200.0), "u"), 0.0, 0.01);
}

TEST(Modules, CounterSettlesAtDifference) {
  auto spec = ModuleSpec::standard(ModuleKind::Counter);
  spec.eta3 = 1.0;
  // Species order l, w, s1.
  const auto tr = simulate_module(spec, {4, 1, 2}, 30.0);
  EXPECT_NEAR(final_value(tr, "w"), 2.0, 1e-6);
}

TEST(Modules, Validation) {
  ModuleSpec missing = ModuleSpec::standard(ModuleKind::GatedAddition);
  missing.bindings.erase(Role::U);
  EXPECT_THROW(build_module(missing), InputError);
  ModuleSpec clash = ModuleSpec::standard(ModuleKind::Addition);
  clash.bindings[Role::S3] = "s1";
  EXPECT_THROW(build_module(clash), InputError);
  ModuleSpec bad_rate = ModuleSpec::standard(ModuleKind::Counter);
  bad_rate.eta3 = 0.0;
  EXPECT_THROW(build_module(bad_rate), InputError);
}

TEST(Modules, CustomBindings) {
  ModuleSpec spec;
  spec.kind = ModuleKind::Load;
  spec.bindings = {{Role::S1, "a"}, {Role::S2, "b"}};
  const auto net = build_module(spec);
  EXPECT_EQ(net.species_names(), (std::vector<std::string>{"a", "b"}));
}

TEST(CounterClosedForm, Examples) {
  EXPECT_NEAR(counter_closed_form(4, 2, 1, 1, 100.0), 2.0, 1e-12);
  EXPECT_NEAR(counter_closed_form(4, 4, 4, 50, 0.1), 4.0 / 21.0, 1e-12);
  EXPECT_NEAR(counter_closed_form(1, 3, 1, 1, 50.0), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(counter_closed_form(1, 3, 1, 1, 0.0), 1.0);
  EXPECT_TRUE(std::isfinite(counter_closed_form(1, 3, 1, 50, 1e3)));
  EXPECT_THROW(counter_closed_form(1, 1, -1, 1, 1), InputError);
}

TEST(CounterClosedForm, MatchesSimulation) {
  struct Case {
    double l, s1, w0, eta3;
  };
  for (const auto& c : {Case{4, 2, 1, 1}, Case{4, 2, 3, 1}, Case{4, 4, 4, 50}, Case{1, 3, 1, 1}, Case{5, 1, 0.5, 5}}) {
    auto spec = ModuleSpec::standard(ModuleKind::Counter);
    spec.eta3 = c.eta3;
    const auto tr = simulate_module(spec, {c.l, c.w0, c.s1}, 10.0, tight());
    const auto w = tr.column("w");
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k)
      worst = std::max(worst, std::abs(w[k] - counter_closed_form(c.l, c.s1, c.w0, c.eta3, tr.times()[k])));
    EXPECT_LE(worst, 1e-6) << c.l << " " << c.s1 << " " << c.w0 << " " << c.eta3;
  }
}

TEST(Compose, LoopSpeciesOrderAndWarnings) {
  const auto sys = compose_loop(osc::OscillatorConfig{}, {0, 0, 1});
  EXPECT_EQ(sys.names(), (std::vector<std::string>{"x", "y", "u", "v", "s1", "s2", "s3"}));
  EXPECT_TRUE(sys.warnings.empty());
  osc::OscillatorConfig stable;
  stable.ell = 1.5;
  EXPECT_FALSE(compose_loop(stable, {0, 0, 1}).warnings.empty());
  EXPECT_THROW(compose_loop(osc::OscillatorConfig{}, {0, 0, -1}), InputError);
}

TEST(Compose, CatalystsAreConserved) {
  const auto sys = compose_terminating_loop(osc::OscillatorConfig{}, {0, 0, 1}, 4.0);
  const auto tr = dynamics::integrate(sys.ode, sys.init, 0.0, 60.0);
  for (const char* s : {"s3", "l"}) {
    const auto col = tr.column(s);
    for (double v : col)
      ASSERT_NEAR(v, col.front(), 1e-10) << s;
  }
}

TEST(Compose, ModulesDoNotPerturbTheClock) {
  const osc::OscillatorConfig cfg;
  const auto sys = compose_loop(cfg, {0, 0, 1});
  const auto composed = dynamics::integrate(sys.ode, sys.init, 0.0, 50.0, tight());
  const auto alone =
      dynamics::integrate(osc::build_oscillator(cfg), std::vector<double>{5, 5, 0, 0}, 0.0, 50.0, tight());
  ASSERT_EQ(composed.size(), alone.size());
  // Compare away from the fast jumps, where a timing shift of one solver step is not a state error.
  const auto& g = osc::standard_geometry();
  for (std::size_t k = 0; k < alone.size(); ++k) {
    const auto& a = alone.states()[k];
    if (std::abs(a[1] - g.phi(a[0])) > 0.05)
      continue;
    for (std::size_t i = 0; i < 4; ++i)
      ASSERT_NEAR(composed.states()[k][i], a[i], 1e-6) << "t = " << alone.times()[k] << " species " << i;
  }
}

TEST(Compose, NothingToAdd) {
  const auto sys = compose_loop(osc::OscillatorConfig{}, {0, 0, 0});
  const auto tr = dynamics::integrate(sys.ode, sys.init, 0.0, 50.0);
  for (double v : tr.column("s1"))
    ASSERT_EQ(v, 0.0);
}

TEST(Compose, StaircaseClimbsMonotonically) {
  const auto st = staircase(loop_trace(), 3.0, 1.0, 5);
  ASSERT_EQ(st.s1.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k)
    EXPECT_NEAR(st.s1[k], static_cast<double>(k + 1), 0.05 * static_cast<double>(k + 1)) << "cycle " << k + 1;
  EXPECT_LE(st.max_decrease, 1e-3);
}

TEST(Compose, StaircaseIsLinearInIncrement) {
  const auto sys = compose_loop(osc::OscillatorConfig{}, {0, 0, 2});
  const auto tr = dynamics::integrate(sys.ode, sys.init, 0.0, 110.0);
  const auto one = staircase(loop_trace(), 3.0, 1.0, 5);
  const auto two = staircase(tr, 3.0, 2.0, 5);
  ASSERT_EQ(two.s1.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k)
    EXPECT_NEAR(two.s1[k] / one.s1[k], 2.0, 1e-4);
}

TEST(Compose, UGatesAddition) {
  // While v is high and u is off, s2 is held: the addition module is idle.
  const auto& tr = loop_trace();
  const auto& ts = tr.times();
  const auto u = tr.column("u"), v = tr.column("v"), s2 = tr.column("s2");
  std::size_t checked = 0;
  for (std::size_t k = 1; k < tr.size(); ++k)
    if (ts[k] > 25.0 && v[k] > 0.5 && u[k] < 1e-2) {
      ASSERT_LE(std::abs(s2[k] - s2[k - 1]) / (ts[k] - ts[k - 1]), 0.02) << "t = " << ts[k];
      ++checked;
    }
  EXPECT_GT(checked, 1000u);
}

TEST(Termination, FastCounterStopsAtTarget) {
  const auto sys = compose_terminating_loop(osc::OscillatorConfig{}, {0, 0, 1}, 4.0, 4.0, 50.0);
  const auto rep = termination(dynamics::integrate(sys.ode, sys.init, 0.0, 100.0), 4.0);
  EXPECT_GE(rep.final_s1, 3.96);
  EXPECT_LE(rep.final_s1, 4.10);
  EXPECT_LT(rep.final_w, 0.05);
}

TEST(Termination, SlowCounterOvershoots) {
  const auto sys = compose_terminating_loop(osc::OscillatorConfig{}, {0, 0, 1}, 4.0, 4.0, 1.0);
  const auto rep = termination(dynamics::integrate(sys.ode, sys.init, 0.0, 100.0), 4.0);
  EXPECT_GT(rep.final_s1, 4.0);
}

TEST(Termination, ZeroTargetNeverIncrements) {
  const auto sys = compose_terminating_loop(osc::OscillatorConfig{}, {0, 0, 1}, 0.0);
  EXPECT_EQ(sys.init[7], 1.0); // default w0 at l = 0
  const auto rep = termination(dynamics::integrate(sys.ode, sys.init, 0.0, 100.0), 0.0);
  EXPECT_LE(rep.max_s1, 0.05);
}

TEST(Termination, JsonReport) {
  const auto j = to_json(TerminationReport{4.0, 4.0, 0.0, 4.1, 4.0});
  EXPECT_EQ(j["final_s1"], 4.0);
  const auto sys = compose_terminating_loop(osc::OscillatorConfig{}, {0, 0, 1}, 4.0);
  const auto js = to_json(sys);
  EXPECT_EQ(js["iteration_target"], 4.0);
  EXPECT_EQ(js["eta3"], 50.0);
}
