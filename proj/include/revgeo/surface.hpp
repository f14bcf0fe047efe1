#ifndef REVGEO_SURFACE_HPP
#define REVGEO_SURFACE_HPP

#include <array>
#include <cmath>
#include <concepts>
#include <functional>
#include <numbers>
#include <string>

#include "revgeo/error.hpp"

namespace revgeo {

using Vec3 = std::array<double, 3>;

enum class Family { Ring, Horn, Spindle, Sphere };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::Ring: return "ring";
    case Family::Horn: return "horn";
    case Family::Spindle: return "spindle";
    case Family::Sphere: return "sphere";
  }
  return "unknown";
}

/// A torus of revolution: a circle of radius b centered at distance a from the
/// symmetry axis, described by the radial arc-length coordinate r = b*chi
/// measured from the outer equator.
///
/// Negative a (down to -b) is accepted; it describes the same spindle surfaces
/// with r = 0 sitting on the lemon equator instead of the apple equator.
struct SurfaceSpec {
  double a = 2.0;
  double b = 1.0;
  double c = 1.0;  // shape parameter (a - b) / b
  Family family = Family::Ring;

  double length_scale() const { return b; }

  double radius(double r) const { return a + b * std::cos(r / b); }
  double radius_prime(double r) const { return -std::sin(r / b); }
  double radius_second(double r) const { return -std::cos(r / b) / b; }
  double height(double r) const { return b * std::sin(r / b); }
  double height_prime(double r) const { return std::cos(r / b); }

  double chi(double r) const { return r / b; }

  /// r = 0 lies on the inner (lemon) equator of a spindle torus.
  bool lemon_centered() const { return c < -1.0; }
};

inline Family classify_shape(double c) {
  // The redundant range -2 <= c < -1 mirrors -1 < c <= 0.
  const double ce = c < -1.0 ? -2.0 - c : c;
  if (ce > 0.0) return Family::Ring;
  if (ce == 0.0) return Family::Horn;
  if (ce > -1.0) return Family::Spindle;
  return Family::Sphere;
}

inline SurfaceSpec make_torus(double a, double b) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw Error(ErrorKind::InvalidParameter, "revolved circle radius b must be positive");
  }
  if (!std::isfinite(a) || a < -b) {
    throw Error(ErrorKind::InvalidParameter, "center offset a must satisfy a >= -b");
  }
  SurfaceSpec s;
  s.a = a;
  s.b = b;
  s.c = (a - b) / b;
  s.family = classify_shape(s.c);
  return s;
}

/// Anything that can be revolved: an arc-length profile (R'^2 + Z'^2 = 1).
template <class P>
concept RevolutionProfile = requires(const P& p, double r) {
  { p.radius(r) } -> std::convertible_to<double>;
  { p.radius_prime(r) } -> std::convertible_to<double>;
  { p.radius_second(r) } -> std::convertible_to<double>;
  { p.height_prime(r) } -> std::convertible_to<double>;
  { p.length_scale() } -> std::convertible_to<double>;
};

/// Type-erased profile for surfaces other than the torus family (cylinder,
/// cone, ...). The callbacks must honour the arc-length contract.
struct ProfileFunctions {
  std::function<double(double)> R;
  std::function<double(double)> dR;
  std::function<double(double)> d2R;
  std::function<double(double)> dZ;
  double scale = 1.0;

  double radius(double r) const { return R(r); }
  double radius_prime(double r) const { return dR(r); }
  double radius_second(double r) const { return d2R(r); }
  double height_prime(double r) const { return dZ(r); }
  double length_scale() const { return scale; }
};

static_assert(RevolutionProfile<SurfaceSpec>);
static_assert(RevolutionProfile<ProfileFunctions>);

struct ProfileEval {
  double R;
  double Rprime;
  double Zprime;
};

struct MetricAt {
  double g_rr;
  double g_thth;
  double inv_g_rr;
  double inv_g_thth;
};

struct ChristoffelAt {
  double Gamma_r_thth;
  double Gamma_th_rth;
};

/// Radii below this fraction of the length scale count as the symmetry axis.
inline constexpr double kAxisTolerance = 1e-12;

template <RevolutionProfile P>
bool on_axis(const P& p, double r) {
  return std::abs(p.radius(r)) < kAxisTolerance * p.length_scale();
}

template <RevolutionProfile P>
ProfileEval profile(const P& p, double r) {
  return {p.radius(r), p.radius_prime(r), p.height_prime(r)};
}

template <RevolutionProfile P>
MetricAt metric(const P& p, double r) {
  const double R = p.radius(r);
  const double R2 = R * R;
  return {1.0, R2, 1.0, R2 > 0.0 ? 1.0 / R2 : INFINITY};
}

template <RevolutionProfile P>
ChristoffelAt christoffel(const P& p, double r) {
  if (on_axis(p, r)) {
    throw Error(ErrorKind::SingularAxis, "Christoffel symbols undefined on the symmetry axis");
  }
  const double R = p.radius(r);
  const double Rp = p.radius_prime(r);
  return {-R * Rp, Rp / R};
}

template <RevolutionProfile P>
double gaussian_curvature(const P& p, double r) {
  if (on_axis(p, r)) {
    throw Error(ErrorKind::SingularAxis, "curvature undefined on the symmetry axis");
  }
  return -p.radius_second(r) / p.radius(r);
}

inline Vec3 embed(const SurfaceSpec& s, double r, double theta) {
  const double R = s.radius(r);
  return {R * std::cos(theta), R * std::sin(theta), s.height(r)};
}

template <RevolutionProfile P>
Vec3 normal(const P& p, double r, double theta) {
  const double zp = p.height_prime(r);
  const double rp = p.radius_prime(r);
  return {zp * std::cos(theta), zp * std::sin(theta), -rp};
}

/// Length of the parallel circle through r.
inline double parallel_circumference(const SurfaceSpec& s, double r) {
  return 2.0 * std::numbers::pi * std::abs(s.radius(r));
}

/// Straight-line distance in space between two surface points.
inline double chord_distance(const SurfaceSpec& s, double r1, double th1, double r2, double th2) {
  const Vec3 p = embed(s, r1, th1);
  const Vec3 q = embed(s, r2, th2);
  return std::hypot(p[0] - q[0], p[1] - q[1], p[2] - q[2]);
}

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double y = std::remainder(x, two_pi);
  if (y <= -std::numbers::pi) y += two_pi;
  return y;
}

}  // namespace revgeo

#endif  // REVGEO_SURFACE_HPP
