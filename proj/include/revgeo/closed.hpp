#ifndef REVGEO_CLOSED_HPP
#define REVGEO_CLOSED_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "revgeo/detail/roots.hpp"
#include "revgeo/dynamics.hpp"
#include "revgeo/error.hpp"
#include "revgeo/quadrature.hpp"
#include "revgeo/reduced.hpp"
#include "revgeo/surface.hpp"

namespace revgeo {

/// [m, n; p]: m radial oscillations during n revolutions; p = 1 when the
/// geodesic passes the inner equator.
struct ClosedLabel {
  int m = 1;
  int n = 1;
  int p = 0;

  bool operator==(const ClosedLabel&) const = default;
};

inline std::string to_string(const ClosedLabel& l) {
  return "[" + std::to_string(l.m) + "," + std::to_string(l.n) + ";" + std::to_string(l.p) + "]";
}

struct ClosedGeodesic {
  ClosedLabel label;
  double beta0 = 0.0;
  double start_r = 0.0;  // b*pi for the inner equator, else 0
  double energy_at_unit_ell = 0.0;
  std::optional<double> chi_max;
  double period_length = 0.0;
  double frequency = 0.0;  // N or N_bound at beta0
  double closure_residual = 0.0;
};

namespace detail {

inline double launch_energy(const SurfaceSpec& s, double r0, double beta0) {
  const double R = s.radius(r0) * std::sin(beta0);
  return R == 0.0 ? INFINITY : 1.0 / (2.0 * R * R);
}

inline void validate_label(const SurfaceSpec& s, const ClosedLabel& l) {
  if (l.p != 0 && l.p != 1) throw Error(ErrorKind::InvalidParameter, "p must be 0 or 1");
  if (l.m < 0 || l.n < 0 || (l.m == 0 && l.n == 0)) {
    throw Error(ErrorKind::InvalidParameter, "label needs nonnegative (m, n) other than (0, 0)");
  }
  if (s.family == Family::Sphere) {
    throw Error(ErrorKind::UnsupportedFamily, "every geodesic of the sphere is closed");
  }
  if (std::gcd(l.m, l.n) != 1) {
    throw Error(ErrorKind::NonPrimitive, to_string(l) + " retraces a primitive closed geodesic");
  }
  if (l.m == 1 && l.n == 0 && l.p == 0) {
    throw Error(ErrorKind::Nonexistent, "[1,0;0] does not exist");
  }
  if (l.p == 1 && (s.family != Family::Ring || s.lemon_centered())) {
    throw Error(ErrorKind::Nonexistent, "only ring tori carry geodesics through the inner equator");
  }
}

/// Lower end of the bound frequency range on surfaces without an unbound
/// regime, estimated at a very small launch angle.
inline double bound_frequency_floor(const SurfaceSpec& s, const QuadratureConfig& cfg) {
  return frequency(well_from_beta(s, 1e-9), cfg);
}

}  // namespace detail

/// Solves for the launch angle of the closed geodesic with the given label.
inline ClosedGeodesic find_closed(const SurfaceSpec& s, const ClosedLabel& l,
                                  const QuadratureConfig& cfg = {}) {
  detail::validate_label(s, l);
  constexpr double pi = std::numbers::pi;
  ClosedGeodesic g;
  g.label = l;

  if (l.m == 0 && l.p == 0) {  // outer equator
    g.beta0 = pi / 2.0;
    g.energy_at_unit_ell = detail::launch_energy(s, 0.0, g.beta0);
    g.chi_max = 0.0;
    g.period_length = 2.0 * pi * (s.a + s.b);
    g.frequency = std::sqrt(s.c + 2.0);
    return g;
  }
  if (l.m == 0 && l.p == 1) {  // inner equator
    g.beta0 = pi / 2.0;
    g.start_r = pi * s.b;
    g.energy_at_unit_ell = detail::launch_energy(s, g.start_r, g.beta0);
    g.period_length = 2.0 * pi * (s.a - s.b);
    return g;
  }
  if (l.n == 0) {  // meridian
    g.beta0 = 0.0;
    g.energy_at_unit_ell = INFINITY;
    g.period_length = 2.0 * pi * s.b;
    g.frequency = INFINITY;
    return g;
  }

  const double target = static_cast<double>(l.m) / l.n;
  const double k = s.c + 2.0;

  if (l.p == 1) {
    // N falls from infinity at beta0 = 0 to 0 at beta_crit; solve in
    // t = -ln(beta_crit - beta0), where N is tame.
    const double bc = std::asin(s.c / k);
    auto freq_at = [&](double t) { return detail::frequency(well_near_crit(s, -std::exp(-t)), cfg); };
    // Small-angle asymptote N ~ K / beta0 seeds the bracket.
    const double K = std::pow(s.c, 1.5) * std::sqrt(k) / (s.c + 1.0);
    double b_lo = std::min(0.5 * K / target, 0.5 * bc);
    double t_lo = -std::log(bc - b_lo);
    for (int i = 0; i < 60 && freq_at(t_lo) <= target; ++i) {
      b_lo *= 0.5;
      t_lo = -std::log(bc - b_lo);
    }
    double t_hi = t_lo + 1.0;
    while (freq_at(t_hi) >= target) {
      t_hi += 2.0;
      if (t_hi > 700.0) throw Error(ErrorKind::NotFound, "no bracket for " + to_string(l));
    }
    const double t = detail::brent([&](double tt) { return freq_at(tt) - target; }, t_lo, t_hi, 1e-15);
    const double d = std::exp(-t);
    const Well w = well_near_crit(s, -d);
    g.beta0 = bc - d;
    g.frequency = detail::frequency(w, cfg);
    g.period_length = l.m * s.b * detail::period_length(w, cfg);
  } else {
    if (target >= std::sqrt(k)) {
      throw Error(ErrorKind::Nonexistent,
                  to_string(l) + ": bound geodesics need m/n < sqrt(c+2)");
    }
    Well w;
    if (s.family == Family::Ring) {
      // N_bound rises from 0 at beta_crit to sqrt(c+2) at pi/2.
      const double bc = std::asin(s.c / k);
      const double t_min = -std::log(pi / 2.0 - bc);
      auto freq_at = [&](double t) {
        if (t <= t_min) return std::sqrt(k);
        return detail::frequency(well_near_crit(s, std::exp(-t)), cfg);
      };
      double t_hi = t_min + 1.0;
      while (freq_at(t_hi) >= target) {
        t_hi += 2.0;
        if (t_hi > 700.0) throw Error(ErrorKind::NotFound, "no bracket for " + to_string(l));
      }
      const double t =
          detail::brent([&](double tt) { return freq_at(tt) - target; }, t_min, t_hi, 1e-15);
      const double d = std::exp(-t);
      w = well_near_crit(s, d);
      g.beta0 = std::min(bc + d, pi / 2.0);
    } else {
      const double floor = detail::bound_frequency_floor(s, cfg);
      if (target <= floor) {
        throw Error(ErrorKind::Nonexistent,
                    to_string(l) + ": below the smallest bound frequency of this surface");
      }
      auto fb = [&](double b) { return detail::frequency(well_from_beta(s, b), cfg) - target; };
      g.beta0 = detail::brent(fb, 1e-9, pi / 2.0, 1e-15);
      w = well_from_beta(s, g.beta0);
    }
    g.chi_max = w.chi_t;
    g.frequency = detail::frequency(w, cfg);
    g.period_length = l.m * s.b * detail::period_length(w, cfg);
  }
  g.energy_at_unit_ell = detail::launch_energy(s, 0.0, g.beta0);
  g.closure_residual = std::abs(g.frequency - target);
  return g;
}

inline IntegratorConfig closure_config() {
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-13;
  cfg.abs_tol = 1e-15;
  return cfg;
}

/// Integrates the geodesic for its nominal period and returns the distance
/// between start and end in (chi, theta, beta), each wrapped to (-pi, pi].
/// Labels whose launch angle sits within ~1e-9 of the critical angle are
/// ill-conditioned and do not close to 1e-5 in double precision.
inline double verify_closure(const SurfaceSpec& s, const ClosedGeodesic& g,
                             IntegratorConfig cfg = closure_config()) {
  cfg.max_lambda = g.period_length;
  cfg.record_states = false;
  const GeodesicState s0 = state_at(s, g.start_r, 0.0, g.beta0, 1.0);
  const OrbitTrace tr = integrate(s, s0, cfg);
  if (tr.status == TraceStatus::Failed) {
    throw Error(ErrorKind::IntegrationFailure, "closure check: " + tr.message);
  }
  const GeodesicState e = tr.at(g.period_length);
  const double dchi = wrap_angle((e.r - s0.r) / s.b);
  const double dth = wrap_angle(e.theta - s0.theta);
  const double dbeta = wrap_angle(velocity_angle(s, e) - velocity_angle(s, s0));
  return std::sqrt(dchi * dchi + dth * dth + dbeta * dbeta);
}

namespace detail {

/// Azimuth mismatch after m radial periods, measured on the ODE.
inline double ode_closure_mismatch(const SurfaceSpec& s, double beta0, const ClosedLabel& l) {
  const Well w = well_from_beta(s, beta0);
  if (w.bound() != (l.p == 0)) {
    throw Error(ErrorKind::Domain, "launch angle left the regime of " + to_string(l));
  }
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-14;
  cfg.record_states = false;
  cfg.max_lambda = 1.5 * l.m * s.b * period_length(w) + 10.0 * s.b;
  const int wanted = l.p == 0 ? 2 * l.m : l.m;
  int seen = 0;
  double theta = NAN;
  auto stop = [&](const OrbitEvent& e) {
    if (e.kind != EventKind::OuterEquator) return false;
    if (++seen < wanted) return false;
    theta = e.state.theta;
    return true;
  };
  const OrbitTrace tr = integrate(s, state_at(s, 0.0, 0.0, beta0, 1.0), cfg, stop);
  if (std::isnan(theta)) {
    throw Error(ErrorKind::RefineFailure, "ODE did not complete " + std::to_string(l.m) +
                                              " radial periods (" + tr.message + ")");
  }
  return theta - 2.0 * std::numbers::pi * l.n;
}

}  // namespace detail

/// Secant iteration on the ODE azimuth mismatch, started at a quadrature or
/// hand-picked guess.
inline double refine_via_ode(const SurfaceSpec& s, double beta0_guess, const ClosedLabel& l) {
  detail::validate_label(s, l);
  if (l.m == 0) return std::numbers::pi / 2.0;
  if (l.n == 0) return 0.0;
  auto f = [&](double b) { return detail::ode_closure_mismatch(s, b, l); };
  double x0 = beta0_guess;
  double f0 = f(x0);
  if (std::abs(f0) < 1e-9) return x0;
  // Probe and step away from the critical angle so iterates stay in the regime.
  const auto bc = critical_angles(s).beta_crit;
  double lo = 0.0, hi = std::numbers::pi / 2.0;
  if (bc) (l.p == 0 ? lo : hi) = *bc;
  double step = 1e-6 * (std::abs(x0) + 1e-3);
  if (bc) step = std::min(step, 0.5 * std::abs(x0 - *bc));
  double x1 = l.p == 0 ? x0 + step : x0 - step;
  double f1 = f(x1);
  double best = std::abs(f0) < std::abs(f1) ? x0 : x1;
  double best_f = std::min(std::abs(f0), std::abs(f1));
  for (int it = 0; it < 40; ++it) {
    if (f1 == f0) break;
    double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    // Keep the secant step modest; far steps may leave the label's regime.
    const double cap = 0.05;
    x2 = std::clamp(x2, x1 - cap, x1 + cap);
    if (x2 <= lo) x2 = 0.5 * (lo + x1);
    if (x2 >= hi) x2 = 0.5 * (hi + x1);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f(x1);
    if (std::abs(f1) < best_f) {
      best = x1;
      best_f = std::abs(f1);
    }
    if (std::abs(f1) < 1e-10 || std::abs(x1 - x0) < 1e-14) return x1;
  }
  if (best_f < 1e-7) return best;
  throw Error(ErrorKind::RefineFailure,
              "secant did not converge; best beta0 = " + std::to_string(best));
}

struct Convergent {
  long num;
  long den;
};

/// Last continued-fraction convergent of x whose denominator is at most max_den.
inline Convergent best_convergent(double x, long max_den = 50) {
  long h0 = 1, h1 = static_cast<long>(std::floor(x));
  long k0 = 0, k1 = 1;
  double frac = x - std::floor(x);
  for (int i = 0; i < 64 && frac > 1e-12; ++i) {
    const double inv = 1.0 / frac;
    const long a = static_cast<long>(std::floor(inv));
    const long h2 = a * h1 + h0;
    const long k2 = a * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    frac = inv - a;
  }
  return {h1, k1};
}

/// Advance of the outer-equator node per radial period relative to the nearest
/// closed orbit m/n; positive in the direction of motion.
inline double precession_rate(const SurfaceSpec& s, double beta0, const QuadratureConfig& cfg = {}) {
  const Well w = well_from_beta(s, beta0);
  if (!w.bound() || folded_angle(beta0) == 0.0 || (s.family == Family::Ring && w.gap_in == 0.0)) {
    throw Error(ErrorKind::Domain, "precession is defined for bound geodesics");
  }
  if (w.gap_out <= 0.0) return 0.0;
  const double per = detail::period_theta(w, cfg);
  const Convergent r = best_convergent(2.0 * std::numbers::pi / per);
  return per - 2.0 * std::numbers::pi * static_cast<double>(r.den) / static_cast<double>(r.num);
}

struct CrossingSeries {
  double chi;                       // |chi| of the self-crossings
  int count;                        // crossings on the upper half (chi >= 0) per period
  std::vector<double> theta_offsets;  // their azimuths in [0, 2 pi)
  double spacing;                   // azimuth step between neighbours
};

namespace detail {

/// chi as a function of the (monotone) azimuth along a trace.
class ChiOfTheta {
 public:
  ChiOfTheta(const OrbitTrace& tr, double b) : tr_(tr), b_(b) {
    starts_.reserve(tr.steps.size());
    for (const auto& st : tr.steps) starts_.push_back(st.rc[0][1]);
  }

  double operator()(double theta) const {
    auto it = std::upper_bound(starts_.begin(), starts_.end(), theta);
    std::size_t i = it == starts_.begin() ? 0 : static_cast<std::size_t>(it - starts_.begin()) - 1;
    const auto& st = tr_.steps[i];
    // Newton on theta(lambda) = theta inside the step, bisection fallback.
    double lo = st.t0, hi = st.t1();
    double lam = lo + (hi - lo) * 0.5;
    for (int k = 0; k < 60; ++k) {
      const auto y = st(lam);
      const double d = y[1] - theta;
      if (d > 0.0) hi = lam;
      else lo = lam;
      double next = y[3] > 0.0 ? lam - d / y[3] : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - lam) < 1e-15 * (1.0 + std::abs(lam))) {
        lam = next;
        break;
      }
      lam = next;
    }
    return st(lam)[0] / b_;
  }

 private:
  const OrbitTrace& tr_;
  double b_;
  std::vector<double> starts_;
};

}  // namespace detail

/// Self-crossings of a bound closed geodesic within one period, grouped by |chi|.
inline std::vector<CrossingSeries> self_intersections(const SurfaceSpec& s, const ClosedGeodesic& g) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const ClosedLabel& l = g.label;
  if (l.p == 1 || l.m == 0 || l.n <= 1) return {};

  IntegratorConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-14;
  cfg.record_states = false;
  cfg.max_lambda = g.period_length * (1.0 + 1e-9) + 1e-9;
  const OrbitTrace tr = integrate(s, state_at(s, 0.0, 0.0, g.beta0, 1.0), cfg);
  if (tr.status == TraceStatus::Failed) {
    throw Error(ErrorKind::IntegrationFailure, "self-intersection trace: " + tr.message);
  }
  const detail::ChiOfTheta chi_of(tr, s.b);
  const double big = two_pi * l.n;  // azimuthal period of the closed orbit
  auto chi_at = [&](double th) {
    th = std::fmod(th, big);
    if (th < 0.0) th += big;
    return chi_of(th);
  };

  struct Pt {
    double chi, theta;
  };
  std::vector<Pt> pts;
  const int samples = 4096 * l.m;
  const double h = big / samples;
  for (int k = 1; k < l.n; ++k) {
    const double shift = two_pi * k;
    auto F = [&](double th) { return chi_at(th) - chi_at(th + shift); };
    double ta = 0.0, fa = F(ta);
    for (int j = 1; j <= samples; ++j) {
      const double tb = j * h;
      const double fb = F(tb);
      if ((fa < 0.0) != (fb < 0.0) || fb == 0.0) {
        const double root = fb == 0.0 ? tb : detail::brent(F, ta, tb, 1e-13);
        const double th = std::fmod(root, two_pi);
        pts.push_back({chi_at(root), th < 0.0 ? th + two_pi : th});
      }
      ta = tb;
      fa = fb;
    }
  }

  // Merge duplicates (the same point is met from both strands).
  const double tol = 1e-6;
  std::vector<Pt> uniq;
  for (const Pt& p : pts) {
    bool dup = false;
    for (const Pt& u : uniq) {
      const double dth = std::abs(wrap_angle(p.theta - u.theta));
      if (std::abs(p.chi - u.chi) < tol && dth < tol) {
        dup = true;
        break;
      }
    }
    if (!dup) uniq.push_back(p);
  }

  std::vector<CrossingSeries> out;
  for (const Pt& p : uniq) {
    const double a = std::abs(p.chi) < tol ? 0.0 : std::abs(p.chi);
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const CrossingSeries& c) { return std::abs(c.chi - a) < 1e-5; });
    if (it == out.end()) {
      out.push_back({a, 0, {}, 0.0});
      it = out.end() - 1;
    }
    if (p.chi >= -tol) {
      it->count += 1;
      it->theta_offsets.push_back(p.theta);
    }
  }
  for (auto& c : out) {
    std::sort(c.theta_offsets.begin(), c.theta_offsets.end());
    const std::size_t n = c.theta_offsets.size();
    if (n >= 2) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double next = i + 1 < n ? c.theta_offsets[i + 1] : c.theta_offsets[0] + two_pi;
        sum += next - c.theta_offsets[i];
      }
      c.spacing = sum / n;
    } else {
      c.spacing = two_pi;
    }
  }
  std::sort(out.begin(), out.end(),
            [](const CrossingSeries& x, const CrossingSeries& y) { return x.chi < y.chi; });
  return out;
}

struct SpectrumEntry {
  ClosedLabel label;
  std::optional<ClosedGeodesic> geodesic;
  std::optional<ErrorKind> error;
  std::string message;
};

/// Every primitive label with m <= m_max, n <= n_max and both p values,
/// ordered by n, then m, then p. Labels are solved on worker threads.
inline std::vector<SpectrumEntry> spectrum(const SurfaceSpec& s, int m_max, int n_max,
                                           const QuadratureConfig& cfg = {},
                                           unsigned threads = 0) {
  if (m_max < 1 || n_max < 1) throw Error(ErrorKind::InvalidParameter, "bounds must be >= 1");
  std::vector<SpectrumEntry> out;
  for (int n = 0; n <= n_max; ++n)
    for (int m = 0; m <= m_max; ++m)
      for (int p = 0; p <= 1; ++p)
        if ((m || n) && std::gcd(m, n) == 1) out.push_back({{m, n, p}, {}, {}, {}});

  auto solve = [&](SpectrumEntry& e) {
    try {
      e.geodesic = find_closed(s, e.label, cfg);
    } catch (const Error& err) {
      e.error = err.kind();
      e.message = err.what();
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(out.size()));
  if (threads <= 1) {
    for (auto& e : out) solve(e);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < out.size(); i = next++) solve(out[i]);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace revgeo

#endif  // REVGEO_CLOSED_HPP
