#ifndef REVGEO_CENTRAL_FORCE_HPP
#define REVGEO_CENTRAL_FORCE_HPP

// Planar motion in U_r = -k1/r - k2/r^3, treated as the R(r) = r surface of
// revolution (the plane in polar coordinates) plus a physical potential.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "revgeo/detail/gauss_kronrod.hpp"
#include "revgeo/detail/roots.hpp"
#include "revgeo/dynamics.hpp"
#include "revgeo/error.hpp"

namespace revgeo {

struct ForceParams {
  double k1 = 1.0;
  double k2 = 0.0;
};

enum class OrbitClass { CircularStable, CircularUnstable, Bound, Scatter, Capture, Trapped };

inline const char* to_string(OrbitClass c) {
  switch (c) {
    case OrbitClass::CircularStable: return "circular-stable";
    case OrbitClass::CircularUnstable: return "circular-unstable";
    case OrbitClass::Bound: return "bound";
    case OrbitClass::Scatter: return "scatter";
    case OrbitClass::Capture: return "capture";
    case OrbitClass::Trapped: return "trapped";
  }
  return "unknown";
}

enum class Stability { Stable, Unstable, Marginal };

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Marginal: return "marginal";
  }
  return "unknown";
}

struct CircularOrbit {
  double r;
  Stability stability;
};

namespace detail {
inline void check_force(const ForceParams& f) {
  if (!(f.k1 >= 0.0) || !(f.k2 >= 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "force strengths k1, k2 must be nonnegative");
  }
}
}  // namespace detail

/// V(r) = ell^2/(2 r^2) - k1/r - k2/r^3.
inline double total_potential(const ForceParams& f, double ell, double r) {
  if (!(r > 0.0)) throw Error(ErrorKind::Domain, "radius must be positive");
  return ell * ell / (2.0 * r * r) - f.k1 / r - f.k2 / (r * r * r);
}

inline double total_potential_slope(const ForceParams& f, double ell, double r) {
  const double r2 = r * r;
  return -ell * ell / (r2 * r) + f.k1 / r2 + 3.0 * f.k2 / (r2 * r2);
}

inline double total_potential_curvature(const ForceParams& f, double ell, double r) {
  const double r2 = r * r;
  return 3.0 * ell * ell / (r2 * r2) - 2.0 * f.k1 / (r2 * r) - 12.0 * f.k2 / (r2 * r2 * r);
}

/// Radii where V' = 0, i.e. roots of k1 r^2 - ell^2 r + 3 k2 = 0, outermost first.
inline std::vector<CircularOrbit> circular_radii(const ForceParams& f, double ell) {
  detail::check_force(f);
  if (ell == 0.0) throw Error(ErrorKind::InvalidParameter, "angular momentum must be nonzero");
  const double L2 = ell * ell;
  std::vector<double> roots;
  if (f.k1 == 0.0) {
    if (f.k2 > 0.0) roots.push_back(3.0 * f.k2 / L2);
  } else {
    const double disc = L2 * L2 - 12.0 * f.k1 * f.k2;
    if (disc >= 0.0) {
      const double big = (L2 + std::sqrt(disc)) / (2.0 * f.k1);
      roots.push_back(big);
      if (f.k2 > 0.0 && disc > 0.0) roots.push_back(3.0 * f.k2 / (f.k1 * big));
    }
  }
  std::vector<CircularOrbit> out;
  for (double r : roots) {
    const double v2 = total_potential_curvature(f, ell, r);
    const double scale = 3.0 * L2 / std::pow(r, 4);
    Stability st = Stability::Marginal;
    if (v2 > 1e-12 * scale) st = Stability::Stable;
    else if (v2 < -1e-12 * scale) st = Stability::Unstable;
    out.push_back({r, st});
  }
  return out;
}

/// kappa = sqrt(V''(r_c)).
inline double epicyclic_frequency(const ForceParams& f, double ell, double r_c) {
  const double v2 = total_potential_curvature(f, ell, r_c);
  if (!(v2 > 0.0)) throw Error(ErrorKind::Domain, "unstable-orbit: V'' <= 0 at the circular radius");
  return std::sqrt(v2);
}

/// Orbit classes at energy E. With a centrifugal barrier (k2 > 0) the outer
/// class is reported together with Trapped for the region inside the barrier.
inline std::vector<OrbitClass> classify_orbit(const ForceParams& f, double ell, double E) {
  const auto circ = circular_radii(f, ell);
  auto same = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(std::abs(x), std::abs(y)); };
  const CircularOrbit* stable = nullptr;
  const CircularOrbit* unstable = nullptr;
  for (const auto& c : circ) {
    if (c.stability == Stability::Stable) stable = &c;
    if (c.stability == Stability::Unstable) unstable = &c;
  }
  std::vector<OrbitClass> out;
  if (f.k2 > 0.0 && !unstable) return {OrbitClass::Capture};  // no barrier maximum
  if (unstable) {
    const double vmax = total_potential(f, ell, unstable->r);
    if (same(E, vmax)) return {OrbitClass::CircularUnstable};
    if (E > vmax) return {OrbitClass::Capture};
  }
  if (stable) {
    const double vmin = total_potential(f, ell, stable->r);
    if (same(E, vmin)) out.push_back(OrbitClass::CircularStable);
    else if (E > vmin) out.push_back(E < 0.0 ? OrbitClass::Bound : OrbitClass::Scatter);
    else if (!unstable) throw Error(ErrorKind::NoMotion, "energy below the potential minimum");
  } else if (E > 0.0) {
    out.push_back(OrbitClass::Scatter);
  } else {
    throw Error(ErrorKind::NoMotion, "no allowed region at this energy");
  }
  if (unstable) out.push_back(OrbitClass::Trapped);
  return out;
}

struct ApsidalData {
  double pericenter;
  double apocenter;
  double inner_root;  // third turning point, inside the barrier (0 when k2 = 0)
  double apsidal_angle;
  double precession;  // 2 (apsidal - pi) per radial period
};

/// Azimuth from pericenter to apocenter of a bound orbit.
inline ApsidalData apsidal(const ForceParams& f, double ell, double E) {
  detail::check_force(f);
  if (!(E < 0.0)) throw Error(ErrorKind::Domain, "apsidal angle needs a bound orbit (E < 0)");
  const auto circ = circular_radii(f, ell);
  const CircularOrbit* stable = nullptr;
  const CircularOrbit* unstable = nullptr;
  for (const auto& c : circ) {
    if (c.stability == Stability::Stable) stable = &c;
    if (c.stability == Stability::Unstable) unstable = &c;
  }
  if (!stable) throw Error(ErrorKind::Domain, "no potential well at this angular momentum");
  auto g = [&](double r) { return E - total_potential(f, ell, r); };
  const double rs = stable->r;
  if (!(g(rs) > 0.0)) throw Error(ErrorKind::Domain, "energy at or below the well bottom");
  double r_lo;
  if (unstable) {
    r_lo = unstable->r;
    if (!(g(r_lo) < 0.0)) throw Error(ErrorKind::Domain, "energy above the barrier: no pericenter");
  } else {
    r_lo = rs;
    while (g(r_lo) >= 0.0) r_lo *= 0.5;
  }
  double r_hi = rs;
  while (g(r_hi) >= 0.0) r_hi *= 2.0;
  const double rp = detail::brent(g, r_lo, rs, 1e-15 * rs);
  const double ra = detail::brent(g, rs, r_hi, 1e-15 * rs);
  const double r3 = f.k2 / (std::abs(E) * rp * ra);
  // r = mid - half cos(phi) turns (r - rp)(ra - r) into half^2 sin^2(phi).
  const double mid = 0.5 * (rp + ra), half = 0.5 * (ra - rp);
  auto integrand = [&](double phi) {
    const double r = mid - half * std::cos(phi);
    return std::abs(ell) / std::sqrt(2.0 * std::abs(E) * r * (r - r3));
  };
  const auto q = detail::integrate_gk(integrand, 0.0, std::numbers::pi, 1e-15, 1e-13, 20000);
  return {rp, ra, r3, q.value, 2.0 * (q.value - std::numbers::pi)};
}

inline double apsidal_angle(const ForceParams& f, double ell, double E) {
  return apsidal(f, ell, E).apsidal_angle;
}

/// Relative floor below which an inbound orbit counts as captured.
inline constexpr double kCaptureFloor = 1e-9;

/// Default tolerances for orbits; the 1/r^3 force needs more than the torus defaults.
inline IntegratorConfig orbit_config() {
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-14;
  return cfg;
}

/// Integrates r'' = r theta'^2 - (k1/r^2 + 3 k2/r^4), theta'' = -2 r' theta'/r.
inline OrbitTrace integrate_orbit(const ForceParams& f, const GeodesicState& s0,
                                  const IntegratorConfig& cfg = orbit_config()) {
  detail::check_force(f);
  if (!(s0.r > 0.0)) throw Error(ErrorKind::Domain, "initial radius must be positive");
  const double floor = kCaptureFloor * s0.r;
  auto rhs = [&f](const detail::Vec<4>& y) {
    const double r = y[0];
    if (!(r > 0.0)) return detail::Vec<4>{NAN, NAN, NAN, NAN};
    const double r2 = r * r;
    return detail::Vec<4>{y[2], y[3], r * y[3] * y[3] - (f.k1 / r2 + 3.0 * f.k2 / (r2 * r2)),
                          -2.0 * y[2] * y[3] / r};
  };
  auto inv = [&f](const detail::Vec<4>& y) {
    const double r = y[0];
    const double E = 0.5 * (y[2] * y[2] + r * r * y[3] * y[3]) - f.k1 / r - f.k2 / (r * r * r);
    return std::pair<double, double>{E, r * r * y[3]};
  };
  std::vector<detail::Switch> sw{{[](const detail::Vec<4>& y) { return y[2]; },
                                  [](const detail::Vec<4>&) { return EventKind::TurningPoint; }}};
  OrbitTrace tr = detail::run_trace(rhs, s0, cfg, sw, inv,
                                    [floor](const detail::Vec<4>& y) { return y[0] < floor; }, {});
  // The step size collapses near r = 0 before the floor is reached. An inbound
  // orbit inside the innermost circular radius (V' > 0 all the way in) can no
  // longer turn, so a stall there is a capture.
  if (tr.status == TraceStatus::Failed && !tr.steps.empty() && f.k2 > 0.0) {
    const auto& last = tr.steps.back();
    const auto y = last(last.t1());
    const double L = y[0] * y[0] * y[3];
    double r_in = INFINITY;
    if (L != 0.0)
      for (const auto& c : circular_radii(f, L)) r_in = std::min(r_in, c.r);
    if (y[2] < 0.0 && y[0] < r_in) {
      tr.status = TraceStatus::Captured;
      tr.message = "captured at r = " + std::to_string(y[0]);
    }
  }
  return tr;
}

/// State on the circular orbit of radius r_c moving in +theta.
inline GeodesicState circular_state(double ell, double r_c) {
  return {r_c, 0.0, 0.0, ell / (r_c * r_c), 0.0};
}

}  // namespace revgeo

#endif  // REVGEO_CENTRAL_FORCE_HPP
