#ifndef REVGEO_REDUCED_HPP
#define REVGEO_REDUCED_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "revgeo/error.hpp"
#include "revgeo/surface.hpp"

namespace revgeo {

/// U(r) = ell^2 / (2 R(r)^2); +infinity on the axis.
template <RevolutionProfile P>
double effective_potential(const P& p, double ell, double r) {
  if (on_axis(p, r)) return INFINITY;
  const double R = p.radius(r);
  return ell * ell / (2.0 * R * R);
}

/// dU/dr = -ell^2 R' / R^3.
template <RevolutionProfile P>
double effective_potential_slope(const P& p, double ell, double r) {
  if (on_axis(p, r)) return std::copysign(INFINITY, -p.radius_prime(r));
  const double R = p.radius(r);
  return -ell * ell * p.radius_prime(r) / (R * R * R);
}

struct PotentialProfile {
  double ell;
  double U0;                      // at the outer equator r = 0
  double Uinner;                  // at r = b*pi; infinite when the axis is hit
  std::optional<double> chi_inf;  // axis crossing of a spindle
};

enum class GeodesicClass {
  Meridian,
  OuterEquator,
  InnerEquator,
  Bound,
  CriticalAsymptotic,
  Unbound,
  LemonBound,
  AppleBound,
};

inline const char* to_string(GeodesicClass g) {
  switch (g) {
    case GeodesicClass::Meridian: return "meridian";
    case GeodesicClass::OuterEquator: return "outer-equator";
    case GeodesicClass::InnerEquator: return "inner-equator";
    case GeodesicClass::Bound: return "bound";
    case GeodesicClass::CriticalAsymptotic: return "critical-asymptotic";
    case GeodesicClass::Unbound: return "unbound";
    case GeodesicClass::LemonBound: return "lemon-bound";
    case GeodesicClass::AppleBound: return "apple-bound";
  }
  return "unknown";
}

struct TurningPoints {
  std::optional<double> chi_max;
  std::optional<double> r_max;
};

struct CriticalAngles {
  std::optional<double> beta_crit;
  double beta_polar;
  std::optional<double> chi_inf;
};

struct OscillationData {
  double omega;               // radial angular frequency in affine time
  double omega_s;             // per unit arc length
  double freq_per_rev;        // radial oscillations per revolution
  double half_period_theta;   // azimuth between successive equator crossings
  double convergence_length;  // arc length to refocusing
};

inline PotentialProfile potential_profile(const SurfaceSpec& s, double ell) {
  PotentialProfile out{ell, effective_potential(s, ell, 0.0),
                        effective_potential(s, ell, std::numbers::pi * s.b), std::nullopt};
  if (s.family == Family::Spindle) out.chi_inf = std::acos(-(s.c + 1.0));
  if (s.c <= 0.0) out.Uinner = INFINITY;
  return out;
}

/// Relative tolerance used when an energy is compared against a potential level.
inline constexpr double kLevelTolerance = 1e-12;

inline std::vector<GeodesicClass> classify(const SurfaceSpec& s, double E, double ell) {
  if (!(E > 0.0)) throw Error(ErrorKind::InvalidParameter, "energy must be positive");
  if (ell == 0.0) return {GeodesicClass::Meridian};
  const double U0 = effective_potential(s, ell, 0.0);
  auto same = [](double x, double y) { return std::abs(x - y) <= kLevelTolerance * std::max(x, y); };
  if (E < U0 && !same(E, U0)) {
    throw Error(ErrorKind::NoMotion, "energy lies below the potential minimum");
  }
  if (same(E, U0)) return {GeodesicClass::OuterEquator};
  switch (s.family) {
    case Family::Ring: {
      const double Uin = effective_potential(s, ell, std::numbers::pi * s.b);
      if (same(E, Uin)) return {GeodesicClass::InnerEquator, GeodesicClass::CriticalAsymptotic};
      return {E < Uin ? GeodesicClass::Bound : GeodesicClass::Unbound};
    }
    case Family::Horn:
    case Family::Sphere: return {GeodesicClass::Bound};
    case Family::Spindle:
      return {s.lemon_centered() ? GeodesicClass::LemonBound : GeodesicClass::AppleBound};
  }
  return {GeodesicClass::Bound};
}

/// Launch angle folded into [0, pi/2]; the orbit shape only depends on |sin beta0|.
inline double folded_angle(double beta) {
  double x = std::abs(wrap_angle(beta));
  if (x > std::numbers::pi / 2.0) x = std::numbers::pi - x;
  return x;
}

inline TurningPoints turning_point(const SurfaceSpec& s, double beta0) {
  const double bf = folded_angle(beta0);
  const double sb = std::sin(bf);
  if (sb == 0.0) return {};
  const double q = (s.c + 2.0) * sb;
  const double cosx = q - (1.0 + s.c);
  if (cosx < -1.0) return {};
  double chi;
  if (cosx < 0.0) {
    // pi - chi from 1 + cos(chi) = q - c, free of cancellation near pi.
    chi = std::numbers::pi - 2.0 * std::asin(std::sqrt(std::max(0.0, q - s.c) / 2.0));
  } else {
    const double half = 0.5 * (std::numbers::pi / 2.0 - bf);
    const double eps_out = (s.c + 2.0) * 2.0 * std::sin(half) * std::sin(half);
    chi = 2.0 * std::asin(std::min(1.0, std::sqrt(eps_out / 2.0)));
  }
  return {chi, s.b * chi};
}

inline CriticalAngles critical_angles(const SurfaceSpec& s) {
  CriticalAngles out{std::nullopt, std::asin((1.0 + s.c) / (2.0 + s.c)), std::nullopt};
  if (s.family == Family::Ring && !s.lemon_centered()) out.beta_crit = std::asin(s.c / (2.0 + s.c));
  if (s.family == Family::Spindle) out.chi_inf = std::acos(-(s.c + 1.0));
  return out;
}

inline OscillationData small_oscillation(const SurfaceSpec& s, double ell) {
  const double k = std::sqrt(s.c + 2.0);
  const double R0 = s.a + s.b;
  return {std::abs(ell) / std::sqrt(s.b * R0 * R0 * R0), 1.0 / (s.b * k), k,
          std::numbers::pi / k, s.b * k * std::numbers::pi};
}

}  // namespace revgeo

#endif  // REVGEO_REDUCED_HPP
