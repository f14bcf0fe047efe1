#ifndef REVGEO_QUADRATURE_HPP
#define REVGEO_QUADRATURE_HPP

// Orbit, time and length integrals of torus geodesics. Everything is written in
// chi = r/b with rho = R/b = c + 1 + cos(chi) and the scaled Clairaut constant
// q = R sin(beta)/b, so that
//   dtheta/dchi = q / (rho sqrt(rho^2 - q^2)),   ds/dchi = b rho / sqrt(rho^2 - q^2).
// The square-root singularity at a turning point and the near-logarithmic peak
// at the inner equator are removed by substitution before Gauss-Kronrod.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "revgeo/detail/gauss_kronrod.hpp"
#include "revgeo/error.hpp"
#include "revgeo/reduced.hpp"
#include "revgeo/surface.hpp"

namespace revgeo {

struct QuadratureConfig {
  double abs_tol = 1e-14;
  double rel_tol = 1e-12;
  bool turning_point_substitution = true;
};

/// The radial well seen by one geodesic. gap_in = q - c and gap_out = c + 2 - q
/// are carried separately so that nearly critical and nearly equatorial orbits
/// keep full relative precision.
struct Well {
  double c = 1.0;
  double q = 0.0;
  double gap_in = 0.0;   // 1 + cos(chi_t) when bound; minus the inner clearance otherwise
  double gap_out = 0.0;  // 1 - cos(chi_t)
  double chi_t = 0.0;    // turning angle in [0, pi] (bound only)
  double delta_t = 0.0;  // pi - chi_t

  bool bound() const { return gap_in >= 0.0; }
  double clearance() const { return -gap_in; }
};

inline Well make_well(double c, double q, double gap_in, double gap_out) {
  Well w{c, q, gap_in, gap_out, 0.0, 0.0};
  if (w.bound()) {
    if (gap_in < 1.0) {
      w.delta_t = 2.0 * std::asin(std::sqrt(gap_in / 2.0));
      w.chi_t = std::numbers::pi - w.delta_t;
    } else {
      w.chi_t = 2.0 * std::asin(std::min(1.0, std::sqrt(std::max(0.0, gap_out) / 2.0)));
      w.delta_t = std::numbers::pi - w.chi_t;
    }
  }
  return w;
}

/// Well of the geodesic launched from the outer equator at angle beta0.
inline Well well_from_beta(const SurfaceSpec& s, double beta0) {
  const double bf = folded_angle(beta0);
  const double k = s.c + 2.0;
  const double q = k * std::sin(bf);
  const double h = 0.5 * (std::numbers::pi / 2.0 - bf);
  const double gap_out = k * 2.0 * std::sin(h) * std::sin(h);
  double gap_in = q - s.c;
  if (s.c > 0.0 && s.c < k) {
    const double bc = std::asin(s.c / k);
    gap_in = k * 2.0 * std::cos(0.5 * (bf + bc)) * std::sin(0.5 * (bf - bc));
  }
  return make_well(s.c, q, gap_in, gap_out);
}

/// Well at beta0 = beta_crit + d on a ring torus, exact in the offset d.
inline Well well_near_crit(const SurfaceSpec& s, double d) {
  const double k = s.c + 2.0;
  const double bc = std::asin(s.c / k);
  const double q = k * std::sin(bc + d);
  const double gap_in = k * 2.0 * std::cos(bc + 0.5 * d) * std::sin(0.5 * d);
  return make_well(s.c, q, gap_in, k - q);
}

/// Well of a segment with conjugate momentum p = R sin(beta) (any sign).
inline Well well_from_momentum(const SurfaceSpec& s, double p) {
  const double q = std::abs(p) / s.b;
  return make_well(s.c, q, q - s.c, s.c + 2.0 - q);
}

enum class Integrand { Theta, Length };

namespace detail {

// sin(u^2/2) / u^2 without loss for small u.
inline double half_sinc_sq(double u) {
  const double x = 0.5 * u * u;
  if (x < 1e-4) return 0.5 * (1.0 - x * x / 6.0);
  return std::sin(x) / (u * u);
}

inline double finish(const Well& w, Integrand kind, double rho, double rho_mq, double jac) {
  // jac already carries dchi/dvar / sqrt(rho - q)
  const double root = jac / std::sqrt(rho_mq + 2.0 * w.q);
  return kind == Integrand::Theta ? w.q * root / rho : rho * root;
}

/// Integral over 0 <= x1 <= x2 <= end of the well (pi, or chi_t when bound).
inline QuadResult folded_integral(const Well& w, Integrand kind, double x1, double x2,
                                  const QuadratureConfig& cfg) {
  QuadResult none;
  none.converged = true;
  if (!(x2 > x1)) return none;
  const double c = w.c;

  if (!cfg.turning_point_substitution) {
    auto raw = [&](double x) {
      double rho_mq;
      if (w.bound()) {
        rho_mq = 2.0 * std::sin(0.5 * (w.chi_t + x)) * std::sin(0.5 * (w.chi_t - x));
      } else {
        const double cx = std::cos(0.5 * x);
        rho_mq = 2.0 * cx * cx + w.clearance();
      }
      const double rho = w.q + rho_mq;
      return finish(w, kind, rho, rho_mq, 1.0 / std::sqrt(rho_mq));
    };
    return integrate_gk(raw, x1, x2, cfg.abs_tol, cfg.rel_tol);
  }

  if (!w.bound()) {
    // w_ = pi - x; peak of width sqrt(eps) at w_ = 0.
    const double eps = w.clearance();
    const double lo = std::numbers::pi - x2;
    const double hi = std::numbers::pi - x1;
    auto core = [&](double wv, double jac_w) {
      const double S = std::sin(0.5 * wv);
      const double rho = c + 2.0 * S * S;
      const double rho_mq = eps + 2.0 * S * S;
      return finish(w, kind, rho, rho_mq, jac_w / std::sqrt(rho_mq));
    };
    if (eps == 0.0) {
      if (lo <= 0.0) {
        QuadResult inf;
        inf.value = INFINITY;
        return inf;
      }
      auto f = [&](double y) {
        const double wv = std::exp(y);
        return core(wv, wv);
      };
      return integrate_gk(f, std::log(lo), std::log(hi), cfg.abs_tol, cfg.rel_tol);
    }
    const double k = std::sqrt(2.0 * eps);
    auto f = [&](double v) { return core(k * std::sinh(v), k * std::cosh(v)); };
    return integrate_gk(f, std::asinh(lo / k), std::asinh(hi / k), cfg.abs_tol, cfg.rel_tol);
  }

  // Bound: u = sqrt(chi_t - x).
  const double ulo = std::sqrt(std::max(0.0, w.chi_t - x2));
  const double uhi = std::sqrt(std::max(0.0, w.chi_t - x1));
  if (!(uhi > ulo)) return none;
  if (w.chi_t <= std::numbers::pi / 2.0) {
    auto f = [&](double u) {
      const double A = std::sin(w.chi_t - 0.5 * u * u);
      const double s2 = half_sinc_sq(u);
      const double rho_mq = 2.0 * A * s2 * u * u;
      const double rho = w.q + rho_mq;
      return finish(w, kind, rho, rho_mq, 2.0 / std::sqrt(2.0 * A * s2));
    };
    return integrate_gk(f, ulo, uhi, cfg.abs_tol, cfg.rel_tol);
  }
  // Turning point close to the inner equator: rho - q ~ delta_t + u^2/2 near u = 0.
  const double dt = w.delta_t;
  if (dt == 0.0) {
    if (ulo <= 0.0) {
      QuadResult inf;
      inf.value = INFINITY;
      return inf;
    }
    auto f = [&](double y) {
      const double u = std::exp(y);
      const double A = std::sin(0.5 * u * u);
      const double s2 = half_sinc_sq(u);
      const double rho_mq = 2.0 * A * s2 * u * u;
      const double rho = w.q + rho_mq;
      return finish(w, kind, rho, rho_mq, 2.0 * u / std::sqrt(2.0 * A * s2));
    };
    return integrate_gk(f, std::log(ulo), std::log(uhi), cfg.abs_tol, cfg.rel_tol);
  }
  const double m = std::sqrt(2.0 * dt);
  auto f = [&](double v) {
    const double ch = std::cosh(v);
    const double u = m * std::sinh(v);
    const double A = std::sin(dt * ch * ch);
    const double s2 = half_sinc_sq(u);
    const double rho_mq = 2.0 * A * s2 * u * u;
    const double rho = w.q + rho_mq;
    return finish(w, kind, rho, rho_mq, 2.0 * m * ch / std::sqrt(2.0 * A * s2));
  };
  return integrate_gk(f, std::asinh(ulo / m), std::asinh(uhi / m), cfg.abs_tol, cfg.rel_tol);
}

inline double checked(const QuadResult& r) {
  if (std::isnan(r.value)) throw Error(ErrorKind::IntegrationFailure, "quadrature produced NaN");
  return r.value;
}

/// Integral over an arbitrary chi interval [xa, xb] (xa <= xb) along which the
/// orbit stays in the allowed region, split where rho is extremal.
inline double chi_integral(const Well& w, Integrand kind, double xa, double xb,
                           const QuadratureConfig& cfg) {
  constexpr double pi = std::numbers::pi;
  if (!(xb > xa)) return 0.0;
  const double end = w.bound() ? w.chi_t : pi;
  const double slack = 1e-10;
  auto fold_check = [&](double x) {
    if (x > end + slack) {
      throw Error(ErrorKind::ForbiddenRegion, "segment leaves the region where R >= |p|");
    }
    return std::min(x, end);
  };
  double total = 0.0;
  const long k0 = static_cast<long>(std::floor(xa / pi));
  const long k1 = static_cast<long>(std::ceil(xb / pi));
  for (long k = k0; k < k1; ++k) {
    const double lo = std::max(xa, k * pi);
    const double hi = std::min(xb, (k + 1) * pi);
    if (!(hi > lo)) continue;
    // Fold onto [0, pi]; on odd pieces the orientation flips.
    const bool even = (k % 2 == 0);
    double f1 = even ? lo - k * pi : (k + 1) * pi - hi;
    double f2 = even ? hi - k * pi : (k + 1) * pi - lo;
    f1 = fold_check(std::max(0.0, f1));
    f2 = fold_check(std::max(0.0, f2));
    total += checked(folded_integral(w, kind, f1, f2, cfg));
  }
  return total;
}

}  // namespace detail

/// theta = G(chi, beta0): azimuth swept while chi goes from 0 to chi along the
/// geodesic launched from the outer equator at beta0.
inline double orbit_angle(const SurfaceSpec& s, double beta0, double chi,
                          const QuadratureConfig& cfg = {}) {
  const double sgn = std::sin(beta0) > 0.0 ? 1.0 : (std::sin(beta0) < 0.0 ? -1.0 : 0.0);
  if (sgn == 0.0 || chi == 0.0) return 0.0;
  const Well w = well_from_beta(s, beta0);
  const double x = std::abs(chi);
  const double dir = chi > 0.0 ? sgn : -sgn;
  if (w.bound()) {
    if (x > w.chi_t * (1.0 + 1e-12) + 1e-14) {
      throw Error(ErrorKind::Domain, "chi lies beyond the turning point of a bound geodesic");
    }
    return dir * detail::chi_integral(w, Integrand::Theta, 0.0, std::min(x, w.chi_t), cfg);
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double half = detail::chi_integral(w, Integrand::Theta, 0.0, std::numbers::pi, cfg);
  const double loops = std::floor(x / two_pi);
  const double rem = x - loops * two_pi;
  const double part = rem <= std::numbers::pi
                          ? detail::chi_integral(w, Integrand::Theta, 0.0, rem, cfg)
                          : 2.0 * half - detail::chi_integral(w, Integrand::Theta, 0.0, two_pi - rem, cfg);
  return dir * (loops * 2.0 * half + part);
}

namespace detail {

inline void require_ring(const SurfaceSpec& s, const char* what) {
  if (s.family != Family::Ring || s.lemon_centered()) {
    throw Error(ErrorKind::Domain, std::string(what) + " needs a ring torus");
  }
}

/// Azimuth swept in one full radial period of the well.
inline double period_theta(const Well& w, const QuadratureConfig& cfg = {}) {
  if (w.bound()) return 4.0 * chi_integral(w, Integrand::Theta, 0.0, w.chi_t, cfg);
  return 2.0 * chi_integral(w, Integrand::Theta, 0.0, std::numbers::pi, cfg);
}

/// Arc length (in units of b) of one full radial period of the well.
inline double period_length(const Well& w, const QuadratureConfig& cfg = {}) {
  if (w.bound()) return 4.0 * chi_integral(w, Integrand::Length, 0.0, w.chi_t, cfg);
  return 2.0 * chi_integral(w, Integrand::Length, 0.0, std::numbers::pi, cfg);
}

/// Radial periods per revolution of the well; the equatorial limit is sqrt(c+2).
inline double frequency(const Well& w, const QuadratureConfig& cfg = {}) {
  if (w.bound() && w.gap_out <= 0.0) return std::sqrt(w.c + 2.0);
  return 2.0 * std::numbers::pi / period_theta(w, cfg);
}

}  // namespace detail

/// N(2 pi, beta0): radial loops per azimuthal revolution of an unbound geodesic.
inline double theta_frequency_unbound(const SurfaceSpec& s, double beta0,
                                      const QuadratureConfig& cfg = {}) {
  detail::require_ring(s, "unbound frequency");
  const Well w = well_from_beta(s, beta0);
  if (w.bound() || folded_angle(beta0) == 0.0) {
    throw Error(ErrorKind::Domain, "unbound frequency needs 0 < |beta0| < beta_crit");
  }
  return detail::frequency(w, cfg);
}

/// N_bound(beta0) = 2 pi / (4 G(chi_max, beta0)).
inline double theta_frequency_bound(const SurfaceSpec& s, double beta0,
                                    const QuadratureConfig& cfg = {}) {
  if (s.family == Family::Sphere) return 1.0;
  const Well w = well_from_beta(s, beta0);
  if (!w.bound() || folded_angle(beta0) == 0.0 ||
      (s.family == Family::Ring && w.gap_in == 0.0)) {
    throw Error(ErrorKind::Domain, "bound frequency needs beta_crit < |beta0| <= pi/2");
  }
  return detail::frequency(w, cfg);
}

/// Affine time from r0 to r at energy E and angular momentum ell; the sign
/// follows the direction of travel. Turning-point endpoints are allowed.
inline double affine_time(const SurfaceSpec& s, double E, double ell, double r0, double r,
                          const QuadratureConfig& cfg = {}) {
  if (!(E > 0.0)) throw Error(ErrorKind::InvalidParameter, "energy must be positive");
  const double v = std::sqrt(2.0 * E);
  const Well w = well_from_momentum(s, ell / v);
  double x0 = std::min(r0, r) / s.b;
  double x1 = std::max(r0, r) / s.b;
  // A turning radius computed elsewhere may miss chi_t by a few ulp, which
  // would drop a sqrt-sized sliver of the integral.
  if (w.bound()) {
    const double snap = 1e-12 * std::max(1.0, w.chi_t);
    if (std::abs(std::abs(x1) - w.chi_t) < snap) x1 = std::copysign(w.chi_t, x1);
    if (std::abs(std::abs(x0) - w.chi_t) < snap) x0 = std::copysign(w.chi_t, x0);
  }
  const double len = s.b * detail::chi_integral(w, Integrand::Length, x0, x1, cfg);
  return (r >= r0 ? 1.0 : -1.0) * len / v;
}

/// Arc length of one radial loop (chi from 0 to 2 pi) of an unbound geodesic.
inline double arc_length_unbound_loop(const SurfaceSpec& s, double beta0,
                                      const QuadratureConfig& cfg = {}) {
  detail::require_ring(s, "unbound loop length");
  const Well w = well_from_beta(s, beta0);
  if (w.bound()) throw Error(ErrorKind::Domain, "unbound loop length needs |beta0| < beta_crit");
  return s.b * detail::period_length(w, cfg);
}

inline double arc_length_unbound(const SurfaceSpec& s, double beta0, int loops,
                                 const QuadratureConfig& cfg = {}) {
  return loops * arc_length_unbound_loop(s, beta0, cfg);
}

/// Arc length of one full radial period of a bound geodesic.
inline double arc_length_bound_period(const SurfaceSpec& s, double beta0,
                                      const QuadratureConfig& cfg = {}) {
  const Well w = well_from_beta(s, beta0);
  if (!w.bound() || folded_angle(beta0) == 0.0 ||
      (s.family == Family::Ring && w.gap_in == 0.0)) {
    throw Error(ErrorKind::Domain, "bound period length needs beta_crit < |beta0| <= pi/2");
  }
  if (w.gap_out <= 0.0) return 2.0 * std::numbers::pi * (s.a + s.b) / std::sqrt(s.c + 2.0);
  return s.b * detail::period_length(w, cfg);
}

/// Asymptotic revolution count ln(1/(pi - chi)) / (2 pi sqrt(c)) of the orbit
/// that creeps up on the inner equator. NaN unless the surface is a ring torus.
inline double critical_divergence_estimate(const SurfaceSpec& s, double chi) {
  if (s.family != Family::Ring) return NAN;
  return std::log(1.0 / (std::numbers::pi - chi)) / (2.0 * std::numbers::pi * std::sqrt(s.c));
}

}  // namespace revgeo

#endif  // REVGEO_QUADRATURE_HPP
