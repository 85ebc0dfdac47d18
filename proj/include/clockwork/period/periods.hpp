#ifndef CLOCKWORK_PERIOD_PERIODS_HPP
#define CLOCKWORK_PERIOD_PERIODS_HPP

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include "clockwork/dynamics/crossings.hpp"
#include "clockwork/dynamics/trace.hpp"
#include "clockwork/error.hpp"
#include "clockwork/oscillator/geometry.hpp"

namespace clockwork::period {

struct PredictedPeriods {
  double T_l = 0.0;       // slow drift along the left branch, x from 1 to 2
  double T_h = 0.0;       // slow drift along the right branch, x from 5 to 4
  double error_estimate = 0.0;
};

/// dt = dy / (eta1 (x - ell) y) with y = phi(x), so dt/dx = phi'(x) / (eta1 (x - ell) phi(x)).
inline double slow_time_density(double x, double ell, double eta1, const osc::CubicGeometry& g) {
  return g.dphi(x) / (eta1 * (x - ell) * g.phi(x));
}

/// Time spent on each attracting branch of the singular orbit, by adaptive
/// Gauss-Kronrod quadrature. The fast jumps are taken as instantaneous.
inline PredictedPeriods predict_periods(double ell, double eta1, double quad_tol = 1e-10,
                                        const osc::CubicGeometry& g = osc::standard_geometry()) {
  if (!(ell > g.x_min_fold && ell < g.x_max_fold))
    throw InputError("predict_periods needs 2 < ell < 4 (no relaxation oscillation otherwise)");
  if (!(eta1 > 0.0) || !std::isfinite(eta1))
    throw InputError("eta1 must be positive");
  if (!(quad_tol > 0.0))
    throw InputError("quadrature tolerance must be positive");

  using boost::math::quadrature::gauss_kronrod;
  auto f = [&](double x) { return slow_time_density(x, ell, eta1, g); };
  PredictedPeriods out;
  double rel = quad_tol;
  for (int attempt = 0; attempt < 6; ++attempt, rel *= 0.1) {
    double err_l = 0.0, err_h = 0.0;
    out.T_l = gauss_kronrod<double, 15>::integrate(f, g.x_left, g.x_min_fold, 15, rel, &err_l);
    out.T_h = -gauss_kronrod<double, 15>::integrate(f, g.x_max_fold, g.x_right, 15, rel, &err_h);
    out.error_estimate = std::max(err_l * std::abs(out.T_l), err_h * std::abs(out.T_h));
    if (out.error_estimate <= quad_tol)
      break;
  }
  return out;
}

struct MeasuredPeriods {
  double T1 = 0.0; // mean u-high duration
  double T2 = 0.0; // mean v-high duration
  double period = 0.0;
  std::size_t u_phases = 0;
  std::size_t v_phases = 0;
};

/// Phase threshold: half the lowest high level of u and v, which is p - 2 for
/// u and 4 - p for v on the singular orbit.
inline double phase_threshold(double p) {
  const double t = 0.5 * std::min(p - 2.0, 4.0 - p);
  return t > 0.0 ? t : 0.5 * p;
}

namespace detail {

/// Mean length of [rise, next fall) intervals that start at or after `from`.
inline std::pair<double, std::size_t> mean_high(const std::vector<double>& rising,
                                                const std::vector<double>& falling, double from) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double r : rising) {
    if (r < from)
      continue;
    auto it = std::upper_bound(falling.begin(), falling.end(), r);
    if (it == falling.end())
      break;
    sum += *it - r;
    ++n;
  }
  return {n ? sum / static_cast<double>(n) : 0.0, n};
}

} // namespace detail

/// Empirical u-high and v-high durations. The first period (up to the second
/// rising edge of u) is dropped as transient.
inline MeasuredPeriods measure_periods(const dynamics::Trace& trace, double p) {
  if (!(p > 0.0))
    throw InputError("p must be positive");
  const double thr = phase_threshold(p);
  const double band = 0.2 * thr;
  using dynamics::Direction;
  const auto us = trace.column("u");
  const auto vs = trace.column("v");
  const auto& ts = trace.times();
  const auto u_up = dynamics::crossing_times(ts, us, thr, band, Direction::Rising);
  const auto u_down = dynamics::crossing_times(ts, us, thr, band, Direction::Falling);
  const auto v_up = dynamics::crossing_times(ts, vs, thr, band, Direction::Rising);
  const auto v_down = dynamics::crossing_times(ts, vs, thr, band, Direction::Falling);
  if (u_up.size() < 3)
    throw AnalysisError("insufficient oscillation: fewer than two full periods of u");

  MeasuredPeriods m;
  const double from = u_up[1];
  std::tie(m.T1, m.u_phases) = detail::mean_high(u_up, u_down, from);
  std::tie(m.T2, m.v_phases) = detail::mean_high(v_up, v_down, from);
  if (m.u_phases == 0 || m.v_phases == 0)
    throw AnalysisError("insufficient oscillation: no complete high phase after the transient");
  m.period = (u_up.back() - u_up[1]) / static_cast<double>(u_up.size() - 2);
  return m;
}

struct PeriodReport {
  double ell = 0.0;
  double eta1 = 0.0;
  PredictedPeriods predicted;
  MeasuredPeriods measured;
  double rel_error_T1 = 0.0;
  double rel_error_T2 = 0.0;
};

inline PeriodReport compare_periods(double ell, double eta1, const MeasuredPeriods& measured, double quad_tol = 1e-10) {
  PeriodReport r;
  r.ell = ell;
  r.eta1 = eta1;
  r.predicted = predict_periods(ell, eta1, quad_tol);
  r.measured = measured;
  r.rel_error_T1 = std::abs(measured.T1 - r.predicted.T_l) / r.predicted.T_l;
  r.rel_error_T2 = std::abs(measured.T2 - r.predicted.T_h) / r.predicted.T_h;
  return r;
}

inline nlohmann::json to_json(const PredictedPeriods& p) {
  return {{"T_l_pred", p.T_l}, {"T_h_pred", p.T_h}, {"quadrature_error", p.error_estimate}};
}

inline nlohmann::json to_json(const MeasuredPeriods& m) {
  return {{"T1_meas", m.T1}, {"T2_meas", m.T2}, {"period", m.period}, {"u_phases", m.u_phases},
          {"v_phases", m.v_phases}};
}

inline nlohmann::json to_json(const PeriodReport& r) {
  nlohmann::json j = to_json(r.predicted);
  j.update(to_json(r.measured));
  j["ell"] = r.ell;
  j["eta1"] = r.eta1;
  j["rel_error_T1"] = r.rel_error_T1;
  j["rel_error_T2"] = r.rel_error_T2;
  return j;
}

struct SweepRow {
  double ell = 0.0;
  double eta1 = 0.0;
  double T_l_pred = std::numeric_limits<double>::quiet_NaN();
  double T_h_pred = std::numeric_limits<double>::quiet_NaN();
  double T1_meas = std::numeric_limits<double>::quiet_NaN();
  double T2_meas = std::numeric_limits<double>::quiet_NaN();
};

inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  auto field = [](double v) { return std::isfinite(v) ? std::to_string(v) : std::string("nan"); };
  out << "ell,eta1,T_l_pred,T_h_pred,T1_meas,T2_meas\n";
  for (const auto& r : rows)
    out << field(r.ell) << ',' << field(r.eta1) << ',' << field(r.T_l_pred) << ',' << field(r.T_h_pred) << ','
        << field(r.T1_meas) << ',' << field(r.T2_meas) << '\n';
}

} // namespace clockwork::period

#endif
