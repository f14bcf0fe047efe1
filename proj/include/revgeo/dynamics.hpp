#ifndef REVGEO_DYNAMICS_HPP
#define REVGEO_DYNAMICS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "revgeo/detail/dopri5.hpp"
#include "revgeo/error.hpp"
#include "revgeo/surface.hpp"

namespace revgeo {

/// Phase-space point of a geodesic: position (r, theta), velocity, affine time.
struct GeodesicState {
  double r = 0.0;
  double theta = 0.0;  // unwrapped
  double vr = 0.0;
  double vtheta = 0.0;
  double lambda = 0.0;
};

struct StateDerivative {
  double dr;
  double dtheta;
  double dvr;
  double dvtheta;
};

struct ConservedSet {
  double E;
  double ell;
  double clairaut;  // R sin(beta) = ell / sqrt(2E)
};

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = INFINITY;
  double max_lambda = 100.0;
  bool record_states = true;
};

enum class EventKind { OuterEquator, InnerEquator, TurningPoint };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::OuterEquator: return "outer-equator";
    case EventKind::InnerEquator: return "inner-equator";
    case EventKind::TurningPoint: return "turning-point";
  }
  return "unknown";
}

struct OrbitEvent {
  EventKind kind;
  double lambda;
  GeodesicState state;
};

enum class TraceStatus { Completed, Stopped, Captured, Failed };

inline const char* to_string(TraceStatus s) {
  switch (s) {
    case TraceStatus::Completed: return "completed";
    case TraceStatus::Stopped: return "stopped";
    case TraceStatus::Captured: return "captured";
    case TraceStatus::Failed: return "failed";
  }
  return "unknown";
}

struct OrbitTrace {
  std::vector<GeodesicState> states;
  std::vector<detail::DenseStep<4>> steps;
  std::vector<OrbitEvent> events;
  TraceStatus status = TraceStatus::Completed;
  std::string message;
  double max_energy_drift = 0.0;  // relative
  double max_ell_drift = 0.0;     // relative to max(|ell0|, 1e-300)

  double final_lambda() const { return steps.empty() ? 0.0 : steps.back().t1(); }

  /// Dense-output state at affine time lambda (clamped to the trace).
  GeodesicState at(double lambda) const {
    if (steps.empty()) return states.empty() ? GeodesicState{} : states.front();
    lambda = std::clamp(lambda, steps.front().t0, steps.back().t1());
    auto it = std::upper_bound(steps.begin(), steps.end(), lambda,
                               [](double l, const detail::DenseStep<4>& s) { return l < s.t0; });
    if (it != steps.begin()) --it;
    const auto y = (*it)(lambda);
    return {y[0], y[1], y[2], y[3], lambda};
  }

  std::vector<OrbitEvent> events_of(EventKind k) const {
    std::vector<OrbitEvent> out;
    for (const auto& e : events)
      if (e.kind == k) out.push_back(e);
    return out;
  }
};

/// Launch convention at the outer equator (r, theta) = (0, 0).
struct Launch {
  enum Mode { UnitSpeed, FixedEll } mode = UnitSpeed;
  double ell = 1.0;

  static Launch unit_speed() { return {}; }
  static Launch fixed_ell(double ell) { return {FixedEll, ell}; }
};

/// State at (r, theta) moving at angle beta from the meridian direction with
/// the given speed.
template <RevolutionProfile P>
GeodesicState state_at(const P& p, double r, double theta, double beta, double speed = 1.0) {
  const double R = p.radius(r);
  if (std::abs(R) < kAxisTolerance * p.length_scale()) {
    throw Error(ErrorKind::SingularAxis, "cannot launch from the symmetry axis");
  }
  return {r, theta, speed * std::cos(beta), speed * std::sin(beta) / R, 0.0};
}

template <RevolutionProfile P>
GeodesicState initial_state_from_angle(const P& p, double beta0, Launch launch = {}) {
  if (launch.mode == Launch::UnitSpeed) return state_at(p, 0.0, 0.0, beta0, 1.0);
  const double s = std::sin(beta0);
  if (std::abs(s) < 1e-15) {
    throw Error(ErrorKind::Degenerate, "degenerate-radial: fixed angular momentum needs sin(beta0) != 0");
  }
  const double R0 = p.radius(0.0);
  return state_at(p, 0.0, 0.0, beta0, launch.ell / (R0 * s));
}

template <RevolutionProfile P>
StateDerivative geodesic_rhs(const P& p, const GeodesicState& s) {
  if (on_axis(p, s.r)) {
    throw Error(ErrorKind::SingularAxis, "geodesic equations singular on the symmetry axis");
  }
  const double R = p.radius(s.r);
  const double Rp = p.radius_prime(s.r);
  return {s.vr, s.vtheta, Rp * R * s.vtheta * s.vtheta, -2.0 * (Rp / R) * s.vr * s.vtheta};
}

template <RevolutionProfile P>
ConservedSet conserved(const P& p, const GeodesicState& s) {
  const double R = p.radius(s.r);
  const double E = 0.5 * (s.vr * s.vr + R * R * s.vtheta * s.vtheta);
  if (!(E > 0.0)) throw Error(ErrorKind::Degenerate, "zero-speed state has no direction");
  const double ell = R * R * s.vtheta;
  return {E, ell, ell / std::sqrt(2.0 * E)};
}

/// Angle of the velocity from the meridian direction, in (-pi, pi].
template <RevolutionProfile P>
double velocity_angle(const P& p, const GeodesicState& s) {
  return std::atan2(p.radius(s.r) * s.vtheta, s.vr);
}

namespace detail {

inline GeodesicState to_state(const Vec<4>& y, double lambda) {
  return {y[0], y[1], y[2], y[3], lambda};
}

/// A switching function whose sign changes mark events.
struct Switch {
  std::function<double(const Vec<4>&)> g;
  std::function<EventKind(const Vec<4>&)> kind;
};

inline int sgn(double x) { return (x > 0.0) - (x < 0.0); }

/// Shared engine for all planar traces: integrates, records states and dense
/// steps, locates events by bisection on the interpolant, and tracks drift of
/// the two supplied invariants.
template <class Rhs, class Invariants, class Terminal>
OrbitTrace run_trace(Rhs&& rhs, const GeodesicState& s0, const IntegratorConfig& cfg,
                     const std::vector<Switch>& switches, Invariants&& invariants,
                     Terminal&& terminal, const std::function<bool(const OrbitEvent&)>& stop) {
  OrbitTrace trace;
  if (cfg.record_states) trace.states.push_back(s0);
  const Vec<4> y0{s0.r, s0.theta, s0.vr, s0.vtheta};
  const auto [E0, L0] = invariants(y0);
  const double Escale = std::max(std::abs(E0), 1e-300);
  const double Lscale = std::max(std::abs(L0), 1e-300);

  std::vector<double> gprev(switches.size());
  for (std::size_t i = 0; i < switches.size(); ++i) gprev[i] = switches[i].g(y0);

  StepControl ctl;
  ctl.rel_tol = cfg.rel_tol;
  ctl.abs_tol = cfg.abs_tol;
  ctl.max_step = cfg.max_step;

  auto on_step = [&](const DenseStep<4>& st) -> bool {
    trace.steps.push_back(st);
    // Scan a few interior points so that a pair of sign changes inside one
    // long step is not missed.
    constexpr int kSub = 4;
    std::vector<std::pair<double, OrbitEvent>> found;
    for (std::size_t i = 0; i < switches.size(); ++i) {
      double ta = st.t0, ga = gprev[i];
      for (int k = 1; k <= kSub; ++k) {
        const double tb = k == kSub ? st.t1() : st.t0 + st.h * k / kSub;
        const double gb = switches[i].g(st(tb));
        if (sgn(ga) != 0 && sgn(gb) != sgn(ga)) {
          double lo = ta, hi = tb;
          while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (sgn(switches[i].g(st(mid))) == sgn(ga)) lo = mid;
            else hi = mid;
          }
          const double tl = 0.5 * (lo + hi);
          const Vec<4> ye = st(tl);
          found.push_back({tl, OrbitEvent{switches[i].kind(ye), tl, to_state(ye, tl)}});
        }
        ta = tb;
        ga = gb;
      }
      gprev[i] = ga;
    }
    std::sort(found.begin(), found.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    const Vec<4> y1 = st(st.t1());
    if (cfg.record_states) trace.states.push_back(to_state(y1, st.t1()));
    const auto [E1, L1] = invariants(y1);
    trace.max_energy_drift = std::max(trace.max_energy_drift, std::abs(E1 - E0) / Escale);
    trace.max_ell_drift = std::max(trace.max_ell_drift, std::abs(L1 - L0) / Lscale);

    for (auto& [t, ev] : found) {
      trace.events.push_back(ev);
      if (stop && stop(ev)) {
        trace.status = TraceStatus::Stopped;
        return false;
      }
    }
    if (terminal(y1)) {
      trace.status = TraceStatus::Captured;
      return false;
    }
    return true;
  };

  auto f = [&](double, const Vec<4>& y) { return rhs(y); };
  try {
    const StepStatus st = dopri5<4>(f, s0.lambda, y0, s0.lambda + cfg.max_lambda, ctl, on_step);
    switch (st) {
      case StepStatus::Completed:
      case StepStatus::Stopped: break;
      case StepStatus::StepUnderflow:
        trace.status = TraceStatus::Failed;
        trace.message = "step size underflow";
        break;
      case StepStatus::MaxSteps:
        trace.status = TraceStatus::Failed;
        trace.message = "step budget exhausted";
        break;
      case StepStatus::NonFinite:
        trace.status = TraceStatus::Failed;
        trace.message = "non-finite state";
        break;
    }
  } catch (const Error& e) {
    trace.status = TraceStatus::Failed;
    trace.message = e.what();
  }
  return trace;
}

}  // namespace detail

/// Integrates the geodesic equations from s0 for cfg.max_lambda of affine time.
/// Events: outer/inner equator crossings (R' = 0 with R'' < 0 / > 0) and radial
/// turning points (vr = 0). `stop` may end the integration at any event.
/// On failure the partial trace is returned with status Failed.
template <RevolutionProfile P>
OrbitTrace integrate(const P& p, const GeodesicState& s0, const IntegratorConfig& cfg = {},
                     const std::function<bool(const OrbitEvent&)>& stop = {}) {
  std::vector<detail::Switch> sw;
  sw.push_back({[&p](const detail::Vec<4>& y) { return p.radius_prime(y[0]); },
                [&p](const detail::Vec<4>& y) {
                  return p.radius_second(y[0]) < 0.0 ? EventKind::OuterEquator
                                                     : EventKind::InnerEquator;
                }});
  sw.push_back({[](const detail::Vec<4>& y) { return y[2]; },
                [](const detail::Vec<4>&) { return EventKind::TurningPoint; }});
  auto rhs = [&p](const detail::Vec<4>& y) {
    const auto d = geodesic_rhs(p, detail::to_state(y, 0.0));
    return detail::Vec<4>{d.dr, d.dtheta, d.dvr, d.dvtheta};
  };
  auto inv = [&p](const detail::Vec<4>& y) {
    const double R = p.radius(y[0]);
    return std::pair<double, double>{0.5 * (y[2] * y[2] + R * R * y[3] * y[3]), R * R * y[3]};
  };
  return detail::run_trace(rhs, s0, cfg, sw, inv, [](const detail::Vec<4>&) { return false; },
                           stop);
}

}  // namespace revgeo

#endif  // REVGEO_DYNAMICS_HPP
