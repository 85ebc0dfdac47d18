#ifndef CLOCKWORK_DYNAMICS_INTEGRATE_HPP
#define CLOCKWORK_DYNAMICS_INTEGRATE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_odeiv2.h>

#include "clockwork/dynamics/ode_system.hpp"
#include "clockwork/dynamics/trace.hpp"
#include "clockwork/error.hpp"

namespace clockwork::dynamics {

/// Accepted negative values down to this magnitude are clamped to zero.
inline constexpr double kUndershootTolerance = 1e-9;

struct SolverConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  /// 0 means no limit beyond the sample spacing.
  double max_step = 0.0;
  bool clamp_nonnegative = true;
  double sample_interval = 0.01;
  std::size_t max_steps = 20'000'000;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw InputError("solver tolerances must be positive");
    if (!(sample_interval > 0.0))
      throw InputError("sample interval must be positive");
    if (max_step < 0.0)
      throw InputError("max_step must be non-negative");
  }
};

namespace detail {

/// Carries the system through GSL's C callbacks. Exceptions cannot cross the
/// C frames, so the first one is parked here and rethrown by the caller.
struct GslContext {
  const OdeSystem* sys;
  std::size_t n;
  std::exception_ptr error;
  std::vector<double> base, bumped, xs;
};

inline int gsl_rhs(double t, const double y[], double dydt[], void* params) {
  auto* ctx = static_cast<GslContext*>(params);
  try {
    ctx->sys->rhs(t, {y, ctx->n}, {dydt, ctx->n});
    return GSL_SUCCESS;
  } catch (...) {
    ctx->error = std::current_exception();
    return GSL_EBADFUNC;
  }
}

inline int gsl_jacobian(double t, const double y[], double* dfdy, double dfdt[], void* params) {
  auto* ctx = static_cast<GslContext*>(params);
  const std::size_t n = ctx->n;
  try {
    std::fill(dfdt, dfdt + n, 0.0);
    if (ctx->sys->jacobian) {
      ctx->sys->jacobian(t, {y, n}, {dfdy, n * n});
      return GSL_SUCCESS;
    }
    ctx->base.resize(n);
    ctx->bumped.resize(n);
    ctx->xs.assign(y, y + n);
    ctx->sys->rhs(t, ctx->xs, ctx->base);
    for (std::size_t j = 0; j < n; ++j) {
      const double h = std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(y[j]));
      ctx->xs[j] = y[j] + h;
      ctx->sys->rhs(t, ctx->xs, ctx->bumped);
      ctx->xs[j] = y[j];
      for (std::size_t i = 0; i < n; ++i)
        dfdy[i * n + j] = (ctx->bumped[i] - ctx->base[i]) / h;
    }
    return GSL_SUCCESS;
  } catch (...) {
    ctx->error = std::current_exception();
    return GSL_EBADFUNC;
  }
}

struct GslHandles {
  gsl_odeiv2_step* step = nullptr;
  gsl_odeiv2_control* control = nullptr;
  gsl_odeiv2_evolve* evolve = nullptr;
  GslHandles(std::size_t n, double abs_tol, double rel_tol)
      : step(gsl_odeiv2_step_alloc(gsl_odeiv2_step_bsimp, n)),
        control(gsl_odeiv2_control_standard_new(abs_tol, rel_tol, 1.0, 0.0)),
        evolve(gsl_odeiv2_evolve_alloc(n)) {
    if (!step || !control || !evolve)
      throw IntegrationError("could not allocate solver workspace");
  }
  ~GslHandles() {
    if (evolve)
      gsl_odeiv2_evolve_free(evolve);
    if (control)
      gsl_odeiv2_control_free(control);
    if (step)
      gsl_odeiv2_step_free(step);
  }
  GslHandles(const GslHandles&) = delete;
  GslHandles& operator=(const GslHandles&) = delete;
  void reset() {
    gsl_odeiv2_evolve_reset(evolve);
    gsl_odeiv2_step_reset(step);
  }
};

inline void silence_gsl() {
  static const bool once = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)once;
}

} // namespace detail

/// Error-controlled stiff integration (implicit Bulirsch-Stoer with the
/// analytic Jacobian) sampled on t0, t0 + h, ..., t1. Steps never cross a
/// sample time, so samples are integrator states, not interpolants.
inline Trace integrate(const OdeSystem& sys, std::span<const double> s0, double t0, double t1,
                       const SolverConfig& cfg = {}) {
  cfg.validate();
  const std::size_t n = sys.dimension();
  if (s0.size() != n)
    throw InputError("initial state has " + std::to_string(s0.size()) + " entries, system has " +
                     std::to_string(n));
  if (!(t1 > t0))
    throw InputError("integration interval must satisfy t1 > t0");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(s0[i]))
      throw InputError("non-finite initial value for '" + sys.names[i] + "'");
    if (cfg.clamp_nonnegative && s0[i] < 0.0)
      throw InputError("negative initial concentration for '" + sys.names[i] + "'");
  }
  detail::silence_gsl();

  std::vector<double> sample_times;
  const double h = cfg.sample_interval;
  const auto steps = static_cast<std::size_t>(std::floor((t1 - t0) / h + 1e-9));
  for (std::size_t k = 0; k <= steps; ++k)
    sample_times.push_back(t0 + static_cast<double>(k) * h);
  if (t1 - sample_times.back() > 1e-9 * h)
    sample_times.push_back(t1);

  detail::GslContext ctx{&sys, n, nullptr, {}, {}, {}};
  gsl_odeiv2_system gsys{detail::gsl_rhs, detail::gsl_jacobian, n, &ctx};
  detail::GslHandles gsl(n, cfg.abs_tol, cfg.rel_tol);

  std::vector<double> x(s0.begin(), s0.end()), saved(n);

  IntegrationStats stats;
  std::vector<double> times{t0};
  std::vector<std::vector<double>> states{x};
  times.reserve(sample_times.size());
  states.reserve(sample_times.size());

  double t = t0;
  double dt = std::min(h, 1e-6 * std::max(1.0, t1 - t0));
  if (cfg.max_step > 0.0)
    dt = std::min(dt, cfg.max_step);

  for (std::size_t k = 1; k < sample_times.size(); ++k) {
    const double target = sample_times[k];
    while (t < target) {
      if (stats.accepted_steps + stats.rejected_steps >= cfg.max_steps)
        throw IntegrationError("step budget exhausted at t = " + std::to_string(t));
      const double min_dt = 1e-14 * std::max(1.0, std::abs(t));
      if (dt < min_dt)
        throw IntegrationError("step size underflow at t = " + std::to_string(t) + " (stiffness failure)");
      if (cfg.max_step > 0.0)
        dt = std::min(dt, cfg.max_step);

      const double natural_dt = dt;
      const bool clipped = t + dt >= target;
      const double t_before = t;
      saved = x;
      const std::size_t failures_before = gsl.evolve->failed_steps;

      const int status = gsl_odeiv2_evolve_apply(gsl.evolve, gsl.control, gsl.step, &gsys, &t, target, &dt, x.data());
      stats.rejected_steps += gsl.evolve->failed_steps - failures_before;
      if (ctx.error)
        std::rethrow_exception(ctx.error);
      if (status != GSL_SUCCESS) {
        if (status == GSL_FAILURE || status == GSL_ENOPROG)
          throw IntegrationError("step size underflow at t = " + std::to_string(t) + " (stiffness failure)");
        throw IntegrationError(std::string("solver failure at t = ") + std::to_string(t) + ": " +
                               gsl_strerror(status));
      }

      double raw_min = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(x[i]))
          throw IntegrationError("non-finite state for '" + sys.names[i] + "' at t = " + std::to_string(t));
        raw_min = std::min(raw_min, x[i]);
      }
      if (cfg.clamp_nonnegative && raw_min < -kUndershootTolerance) {
        dt = 0.5 * (t - t_before);
        t = t_before;
        x = saved;
        gsl.reset();
        ++stats.undershoot_retries;
        continue;
      }

      ++stats.accepted_steps;
      stats.min_unclamped = std::min(stats.min_unclamped, raw_min);
      if (cfg.clamp_nonnegative && raw_min < 0.0) {
        for (auto& v : x)
          v = std::max(v, 0.0);
        gsl.reset();
      }
      if (t >= target) {
        t = target;
        if (clipped)
          dt = std::max(dt, natural_dt);
      }
    }
    times.push_back(target);
    states.push_back(x);
  }
  return Trace(sys.names, std::move(times), std::move(states), stats);
}

inline Trace integrate(const OdeSystem& sys, const std::vector<double>& s0, double t0, double t1,
                       const SolverConfig& cfg = {}) {
  return integrate(sys, std::span<const double>(s0), t0, t1, cfg);
}

} // namespace clockwork::dynamics

#endif
