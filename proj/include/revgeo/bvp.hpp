#ifndef REVGEO_BVP_HPP
#define REVGEO_BVP_HPP

// Two-point geodesic problem on a torus by the conjugate momentum p = R sin(beta).
// Between turning points r is monotone and theta advances by
//   F(r1, r2; p) = int p dr / (R sqrt(R^2 - p^2)),
// so every connecting geodesic is a root of a sum of such pieces. Branches with
// turning points are parametrized by the turning radius instead of p, which
// removes the fold where F has a vertical tangent.

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "revgeo/closed.hpp"
#include "revgeo/detail/roots.hpp"
#include "revgeo/dynamics.hpp"
#include "revgeo/error.hpp"
#include "revgeo/quadrature.hpp"
#include "revgeo/surface.hpp"

namespace revgeo {

namespace detail {

inline void check_momentum(const SurfaceSpec& s, double r1, double r2, double p) {
  const double lo = std::min(r1, r2) / s.b, hi = std::max(r1, r2) / s.b;
  double rmin = std::min(s.radius(r1), s.radius(r2));
  // interior minima of R sit at odd multiples of pi
  const double k = std::ceil((lo - std::numbers::pi) / (2.0 * std::numbers::pi));
  if (std::numbers::pi + 2.0 * std::numbers::pi * k < hi) rmin = std::min(rmin, s.a - s.b);
  if (std::abs(p) > rmin * (1.0 + 1e-12)) {
    throw Error(ErrorKind::ForbiddenRegion, "forbidden-momentum: |p| exceeds R on the segment");
  }
}

}  // namespace detail

/// F(r1, r2; p): azimuth swept on a radially monotone segment; odd in p.
inline double theta_of_momentum(const SurfaceSpec& s, double r1, double r2, double p,
                                const QuadratureConfig& cfg = {}) {
  detail::check_momentum(s, r1, r2, p);
  if (p == 0.0) return 0.0;
  const Well w = well_from_momentum(s, p);
  const double lo = std::min(r1, r2) / s.b, hi = std::max(r1, r2) / s.b;
  return std::copysign(detail::chi_integral(w, Integrand::Theta, lo, hi, cfg), p);
}

/// G(r1, r2; p): arc length of the same segment.
inline double arclength_of_momentum(const SurfaceSpec& s, double r1, double r2, double p,
                                    const QuadratureConfig& cfg = {}) {
  detail::check_momentum(s, r1, r2, p);
  const Well w = well_from_momentum(s, p);
  const double lo = std::min(r1, r2) / s.b, hi = std::max(r1, r2) / s.b;
  if (p == 0.0) return s.b * (hi - lo);
  return s.b * detail::chi_integral(w, Integrand::Length, lo, hi, cfg);
}

/// Turning radius b*acos((|p| - a)/b) reached by a segment with momentum p.
inline double rmax_of_momentum(const SurfaceSpec& s, double p) {
  const double x = (std::abs(p) - s.a) / s.b;
  if (x < -1.0 - 1e-15 || x > 1.0 + 1e-15) {
    throw Error(ErrorKind::Domain, "no-turning-point: |p| outside [R(b pi), R(0)]");
  }
  return s.b * std::acos(std::clamp(x, -1.0, 1.0));
}

/// Azimuth from r1 (0 <= r1 < r_max) out to the turning point and back to r2:
/// the single-overshoot form of F.
inline double theta_with_overshoot(const SurfaceSpec& s, double r1, double r2, double p,
                                   const QuadratureConfig& cfg = {}) {
  const double rm = rmax_of_momentum(s, p);
  return theta_of_momentum(s, r1, rm, p, cfg) + theta_of_momentum(s, r2, rm, p, cfg);
}

struct BvpProblem {
  double r1 = 0.0, theta1 = 0.0;
  double r2 = 0.0, theta2 = 0.0;
  int winding_cap = 2;  // azimuthal and radial windings searched in [-cap, cap]
};

enum class TurningStructure { None, OneOvershoot, TwoOvershoot, Parallel };

inline const char* to_string(TurningStructure t) {
  switch (t) {
    case TurningStructure::None: return "none";
    case TurningStructure::OneOvershoot: return "one-overshoot";
    case TurningStructure::TwoOvershoot: return "two-overshoot";
    case TurningStructure::Parallel: return "parallel";
  }
  return "unknown";
}

struct BvpSolution {
  double p_theta = 0.0;
  double beta1 = 0.0;  // launch angle at endpoint 1
  TurningStructure turning = TurningStructure::None;
  std::optional<double> r_ext;  // turning radius, signed
  int azimuth_winding = 0;      // j in dtheta = wrap(theta2 - theta1) + 2 pi j
  int radial_winding = 0;       // w in chi2 + 2 pi w (monotone branches)
  double arc_length = 0.0;
  double endpoint_error = 0.0;  // chord distance of the re-integrated end from endpoint 2
  bool tie = false;
  std::vector<std::pair<double, double>> polyline;  // (r, theta)
};

struct BvpResult {
  std::vector<BvpSolution> solutions;  // ascending length
  std::vector<std::string> branches;

  const BvpSolution& shortest() const { return solutions.front(); }
};

namespace detail {

struct Candidate {
  double p;
  int d1;  // initial radial direction (+1 outward in chi, -1 inward, 0 none)
  TurningStructure turning;
  std::optional<double> r_ext;
  int j, w;
  double length;
};

/// Integral over [lo, hi] with q = 0 handled (meridian pieces).
inline double piece(const Well& w, Integrand kind, double lo, double hi, const QuadratureConfig& cfg) {
  if (!(hi > lo)) return 0.0;
  if (w.q == 0.0) return kind == Integrand::Theta ? 0.0 : hi - lo;
  return chi_integral(w, kind, lo, hi, cfg);
}

inline Well well_from_turning(double c, double chi_lim, double delta) {
  // turning at tau = chi_lim - delta, exact in delta when chi_lim = pi
  const double tau = chi_lim - delta;
  Well w;
  w.c = c;
  if (chi_lim == std::numbers::pi) {
    const double s = std::sin(0.5 * delta);
    w.gap_in = 2.0 * s * s;
    w.delta_t = delta;
    w.chi_t = tau;
  } else {
    const double cc = std::cos(0.5 * tau);
    w.gap_in = 2.0 * cc * cc;
    w.chi_t = tau;
    w.delta_t = std::numbers::pi - tau;
  }
  const double ss = std::sin(0.5 * tau);
  w.gap_out = 2.0 * ss * ss;
  w.q = c + w.gap_in;
  return w;
}

/// Pieces of a path with k turning points at +-tau, starting along d1.
inline std::vector<std::pair<double, double>> turning_pieces(double x1, double x2, double tau, int k,
                                                             int d1) {
  if (k == 1) {
    if (d1 > 0) return {{x1, tau}, {x2, tau}};
    return {{-tau, x1}, {-tau, x2}};
  }
  if (d1 > 0) return {{x1, tau}, {-tau, tau}, {-tau, x2}};
  return {{-tau, x1}, {-tau, tau}, {x2, tau}};
}

inline double normalize_chi(double chi) { return wrap_angle(chi); }

}  // namespace detail

/// Enumerates geodesics from (r1, theta1) to (r2, theta2): radially monotone
/// segments with radial winding w, and one or two overshoots past the
/// endpoints, each for azimuthal targets wrap(dtheta) + 2 pi j.
inline BvpResult solve_two_point(const SurfaceSpec& s, const BvpProblem& prob,
                                 const QuadratureConfig& cfg = {}) {
  constexpr double pi = std::numbers::pi;
  const double b = s.b, c = s.c;
  if (on_axis(s, prob.r1) || on_axis(s, prob.r2)) {
    throw Error(ErrorKind::SingularAxis, "endpoint on the symmetry axis");
  }
  const double x1 = detail::normalize_chi(prob.r1 / b);
  const double x2 = detail::normalize_chi(prob.r2 / b);
  const double base = wrap_angle(prob.theta2 - prob.theta1);
  const int J = std::max(0, prob.winding_cap);
  std::vector<double> targets;
  std::vector<int> target_j;
  for (int j = -J; j <= J; ++j) {
    targets.push_back(base + 2.0 * pi * j);
    target_j.push_back(j);
  }
  auto rho = [&](double x) { return c + 1.0 + std::cos(x); };

  BvpResult result;
  std::vector<std::future<std::vector<detail::Candidate>>> jobs;

  // Parallels: an equator joins any two of its points.
  if (std::abs(std::sin(x1)) < 1e-12 && std::abs(x1 - x2) < 1e-12 && s.radius(prob.r1) > 0.0) {
    result.branches.push_back("equator-arc");
    const double R = s.radius(prob.r1);
    std::vector<detail::Candidate> arcs;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (targets[i] == 0.0) continue;
      arcs.push_back({std::copysign(R, targets[i]), 0, TurningStructure::Parallel, std::nullopt,
                      target_j[i], 0, R * std::abs(targets[i])});
    }
    std::promise<std::vector<detail::Candidate>> pr;
    pr.set_value(arcs);
    jobs.push_back(pr.get_future());
  }

  // Radially monotone branches.
  const bool ring = s.family == Family::Ring && !s.lemon_centered();
  const int W = ring ? J : 0;
  for (int w = -W; w <= W; ++w) {
    const double x2w = x2 + 2.0 * pi * w;
    const double lo = std::min(x1, x2w), hi = std::max(x1, x2w);
    if (!(hi - lo > 1e-15)) continue;
    result.branches.push_back("monotone w=" + std::to_string(w));
    jobs.push_back(std::async(std::launch::async, [=, &cfg, &s]() {
      std::vector<detail::Candidate> out;
      double qmax = std::min(rho(lo), rho(hi));
      const double kodd = std::ceil((lo - pi) / (2.0 * pi));
      const bool interior_min = pi + 2.0 * pi * kodd < hi && pi + 2.0 * pi * kodd > lo;
      if (interior_min) qmax = std::min(qmax, c);
      if (qmax < 0.0) return out;
      const int d1 = x2w > x1 ? 1 : -1;
      auto theta_at = [&](double q) {
        return detail::piece(well_from_momentum(s, q * b), Integrand::Theta, lo, hi, cfg);
      };
      auto length_at = [&](double q) {
        return b * detail::piece(well_from_momentum(s, q * b), Integrand::Length, lo, hi, cfg);
      };
      for (std::size_t i = 0; i < targets.size(); ++i) {
        const double T = std::abs(targets[i]);
        double q;
        if (T == 0.0) {
          q = 0.0;
        } else {
          double qhi = qmax;
          if (interior_min) {
            // theta diverges as q -> c; walk up until the target is exceeded
            double gap = 0.5 * qmax;
            qhi = qmax - gap;
            while (theta_at(qhi) < T && gap > 1e-15 * qmax) {
              gap *= 0.1;
              qhi = qmax - gap;
            }
          }
          if (!(qhi > 0.0) || theta_at(qhi) < T) continue;
          q = detail::brent([&](double qq) { return theta_at(qq) - T; }, 0.0, qhi, 1e-16);
        }
        out.push_back({std::copysign(q * b, targets[i]), d1, TurningStructure::None, std::nullopt,
                       target_j[i], w, length_at(q)});
      }
      return out;
    }));
  }

  // Overshoot branches, parametrized by the turning angle tau.
  double chi_lim = pi;
  if (s.family == Family::Spindle || s.family == Family::Sphere) chi_lim = std::acos(-(c + 1.0));
  const double tau_min = std::max({std::abs(x1), std::abs(x2), 1e-8});
  if (tau_min < chi_lim) {
    for (int k = 1; k <= 2; ++k) {
      for (int d1 : {1, -1}) {
        result.branches.push_back(std::string(k == 1 ? "one" : "two") + "-overshoot d=" +
                                  (d1 > 0 ? "+" : "-"));
        jobs.push_back(std::async(std::launch::async, [=, &cfg]() {
          std::vector<detail::Candidate> out;
          const double dmax = chi_lim - tau_min;
          auto psi = [&](double delta, Integrand kind) {
            const Well w = detail::well_from_turning(c, chi_lim, delta);
            double sum = 0.0;
            for (auto [lo, hi] : detail::turning_pieces(x1, x2, chi_lim - delta, k, d1)) {
              sum += detail::piece(w, kind, lo, hi, cfg);
            }
            return sum;
          };
          // Grid in delta = chi_lim - tau: linear, plus log clusters at both ends.
          std::vector<double> grid;
          for (int i = 0; i <= 48; ++i) grid.push_back(dmax * (0.02 + 0.98 * i / 48.0));
          for (int i = 1; i <= 24; ++i) grid.push_back(dmax * 0.02 * std::pow(10.0, -10.0 * i / 24.0));
          for (int i = 1; i <= 24; ++i) grid.push_back(dmax * (1.0 - std::pow(10.0, -1.0 - 9.0 * i / 24.0)));
          std::sort(grid.begin(), grid.end());
          grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
          std::vector<double> vals(grid.size());
          for (std::size_t g = 0; g < grid.size(); ++g) vals[g] = psi(grid[g], Integrand::Theta);
          for (std::size_t i = 0; i < targets.size(); ++i) {
            const double T = std::abs(targets[i]);
            if (T == 0.0) continue;
            for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
              const double fa = vals[g] - T, fb = vals[g + 1] - T;
              if ((fa < 0.0) == (fb < 0.0) && fb != 0.0) continue;
              const double y = detail::brent(
                  [&](double yy) { return psi(std::exp(yy), Integrand::Theta) - T; },
                  std::log(grid[g]), std::log(grid[g + 1]), 1e-14);
              const double delta = std::exp(y);
              const Well w = detail::well_from_turning(c, chi_lim, delta);
              const double tau = chi_lim - delta;
              out.push_back({std::copysign(w.q * b, targets[i]), d1,
                             k == 1 ? TurningStructure::OneOvershoot : TurningStructure::TwoOvershoot,
                             d1 * tau * b, target_j[i], 0, b * psi(delta, Integrand::Length)});
            }
          }
          return out;
        }));
      }
    }
  }

  std::vector<detail::Candidate> cands;
  for (auto& f : jobs) {
    auto v = f.get();
    cands.insert(cands.end(), v.begin(), v.end());
  }
  if (cands.empty()) {
    std::string list;
    for (const auto& br : result.branches) list += (list.empty() ? "" : ", ") + br;
    throw Error(ErrorKind::NotFound, "no connecting geodesic; searched " + list);
  }
  std::sort(cands.begin(), cands.end(),
            [](const detail::Candidate& a, const detail::Candidate& b2) { return a.length < b2.length; });

  const double R1 = s.radius(prob.r1);
  for (const auto& cd : cands) {
    const double sb = std::clamp(cd.p / R1, -1.0, 1.0);
    const double cb = cd.d1 == 0 ? 0.0 : cd.d1 * std::sqrt(std::max(0.0, 1.0 - sb * sb));
    const double beta1 = std::atan2(sb, cb);
    // Same launch direction and length is the same geodesic.
    bool dup = false;
    for (const auto& sol : result.solutions) {
      if (std::abs(sol.arc_length - cd.length) < 1e-9 * std::max(1.0, cd.length) &&
          std::abs(wrap_angle(sol.beta1 - beta1)) < 1e-9) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    BvpSolution sol;
    sol.p_theta = cd.p;
    sol.beta1 = beta1;
    sol.turning = cd.turning;
    sol.r_ext = cd.r_ext;
    sol.azimuth_winding = cd.j;
    sol.radial_winding = cd.w;
    sol.arc_length = cd.length;

    IntegratorConfig ic;
    ic.rel_tol = 1e-12;
    ic.abs_tol = 1e-14;
    ic.max_lambda = cd.length;
    const OrbitTrace tr = integrate(s, state_at(s, prob.r1, prob.theta1, sol.beta1, 1.0), ic);
    const GeodesicState e = tr.at(cd.length);
    sol.endpoint_error = tr.status == TraceStatus::Failed
                             ? INFINITY
                             : chord_distance(s, e.r, e.theta, prob.r2, prob.theta2);
    constexpr int kPoly = 256;
    for (int i = 0; i <= kPoly; ++i) {
      const GeodesicState st = tr.at(cd.length * i / kPoly);
      sol.polyline.emplace_back(st.r, st.theta);
    }
    result.solutions.push_back(std::move(sol));
  }
  for (std::size_t i = 0; i + 1 < result.solutions.size(); ++i) {
    auto& a = result.solutions[i];
    auto& n = result.solutions[i + 1];
    if (std::abs(n.arc_length - a.arc_length) < 1e-9) a.tie = n.tie = true;
  }
  return result;
}

struct Ray {
  std::string name;
  double beta0;
  double length;
};

struct ExpMapRays {
  std::vector<Ray> rays;
  std::vector<std::string> warnings;
};

/// Launch angle and length pairs for the tangent-plane diagram of closed
/// geodesics, with the meridian and outer equator as baseline rays.
inline ExpMapRays exp_map_rays(const SurfaceSpec& s, const std::vector<ClosedLabel>& labels,
                               const QuadratureConfig& cfg = {}) {
  ExpMapRays out;
  out.rays.push_back({"meridian", 0.0, 2.0 * std::numbers::pi * s.b});
  out.rays.push_back({"outer-equator", std::numbers::pi / 2.0, 2.0 * std::numbers::pi * (s.a + s.b)});
  for (const auto& l : labels) {
    try {
      const ClosedGeodesic g = find_closed(s, l, cfg);
      if (g.start_r != 0.0) {
        out.warnings.push_back(to_string(l) + ": does not pass through the origin; skipped");
        continue;
      }
      out.rays.push_back({to_string(l), g.beta0, g.period_length});
    } catch (const Error& e) {
      out.warnings.push_back(to_string(l) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace revgeo

#endif  // REVGEO_BVP_HPP
