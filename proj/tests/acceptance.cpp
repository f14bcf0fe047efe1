#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "revgeo/revgeo.hpp"

using namespace revgeo;

namespace {

constexpr double pi = std::numbers::pi;

// Collects failed checks for one criterion.
struct Check {
  std::vector<std::string> failures;

  void near(const std::string& what, double got, double want, double tol) {
    if (!(std::abs(got - want) <= tol)) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s = %.12g, want %.12g +- %.1e", what.c_str(), got, want, tol);
      failures.push_back(buf);
    }
  }
  void below(const std::string& what, double got, double limit) {
    if (!(got < limit)) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s = %.3e, limit %.1e", what.c_str(), got, limit);
      failures.push_back(buf);
    }
  }
  void truth(const std::string& what, bool ok) {
    if (!ok) failures.push_back(what);
  }
  bool ok() const { return failures.empty(); }
};

const SurfaceSpec ring = make_torus(2, 1);

IntegratorConfig tight(double lambda_max) {
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-14;
  cfg.max_lambda = lambda_max;
  return cfg;
}

void c1(Check& ck) {
  const auto ang = critical_angles(ring);
  ck.truth("ring has a critical angle", ang.beta_crit.has_value());
  if (ang.beta_crit) ck.near("beta_crit", *ang.beta_crit, 0.3398369094, 1e-9);
}

void c2(Check& ck) { ck.near("beta_polar [deg]", critical_angles(ring).beta_polar * 180 / pi, 41.8, 0.05); }

void c3(Check& ck) {
  struct Want {
    ClosedLabel l;
    double beta0, tol;
  };
  for (const auto& w : {Want{{3, 1, 1}, 0.2382795502, 1e-6}, Want{{3, 2, 1}, 0.3226433, 1e-5},
                        Want{{3, 5, 1}, 0.3395532232, 1e-6}, Want{{1, 1, 0}, 0.4097, 1e-3},
                        Want{{1, 2, 0}, 0.3422, 1e-3}, Want{{3, 2, 0}, 0.7167, 1e-3},
                        Want{{7, 5, 0}, 0.6124, 1e-3}}) {
    try {
      ck.near(to_string(w.l), find_closed(ring, w.l).beta0, w.beta0, w.tol);
    } catch (const Error& e) {
      ck.truth(to_string(w.l) + ": " + e.what(), false);
    }
  }
}

void c4(Check& ck) {
  ck.near("[1,1;0] period", find_closed(ring, {1, 1, 0}).period_length, 15.26, 0.02);
  ck.near("[1,2;0] period", find_closed(ring, {1, 2, 0}).period_length, 21.9, 0.05);
  ck.near("loop at 0.119", arc_length_unbound_loop(ring, 0.119), 6.45, 0.01);
  ck.near("7 loops at 0.119", arc_length_unbound(ring, 0.119, 7), 45.12, 0.05);
  ck.near("inner equator", parallel_circumference(ring, pi), 6.28, 0.005);
  ck.near("meridian", 2 * pi * ring.b, 6.28, 0.005);
  ck.near("top parallel", parallel_circumference(ring, pi / 2), 12.57, 0.005);
  ck.near("outer equator", parallel_circumference(ring, 0.0), 18.85, 0.005);
}

void c5(Check& ck) {
  const std::set<std::pair<int, int>> want{{1, 1}, {1, 2}, {3, 2}, {1, 3}, {4, 3}, {5, 3}, {1, 4}, {3, 4},
                                           {5, 4}, {1, 5}, {2, 5}, {3, 5}, {4, 5}, {6, 5}, {7, 5}, {8, 5}};
  std::set<std::pair<int, int>> got;
  bool two_one_nonexistent = false;
  // m/n < sqrt 3 keeps m <= 8 for n <= 5.
  for (const auto& e : spectrum(ring, 9, 5)) {
    if (e.label.p != 0 || e.label.m == 0 || e.label.n == 0) continue;
    if (e.geodesic) got.insert({e.label.m, e.label.n});
    if (e.label == ClosedLabel{2, 1, 0}) two_one_nonexistent = e.error == ErrorKind::Nonexistent;
  }
  for (const auto& p : got)
    if (!want.count(p)) ck.truth("unexpected " + std::to_string(p.first) + "/" + std::to_string(p.second), false);
  for (const auto& p : want)
    if (!got.count(p)) ck.truth("missing " + std::to_string(p.first) + "/" + std::to_string(p.second), false);
  ck.truth("[2,1;0] reported nonexistent", two_one_nonexistent);
}

// Radial oscillations per revolution from successive outer-equator crossings.
double measured_frequency(const SurfaceSpec& s) {
  IntegratorConfig cfg = tight(40 * pi * s.radius(0));
  cfg.abs_tol = 1e-15;
  const auto tr = integrate(s, initial_state_from_angle(s, pi / 2 - 1e-3), cfg);
  const auto ev = tr.events_of(EventKind::OuterEquator);
  if (ev.size() < 5) return NAN;
  const std::size_t k = (ev.size() - 1) / 2 * 2;
  return 2 * pi / ((ev[k].state.theta - ev[0].state.theta) / (k / 2));
}

void c6(Check& ck) {
  ck.near("ring frequency", measured_frequency(ring), std::sqrt(3.0), 1e-3 * std::sqrt(3.0));
  ck.near("sphere frequency", measured_frequency(make_torus(0, 1)), 1.0, 1e-3);
}

void c7(Check& ck) {
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> B(-pi, pi), R(-2.0, 2.0);
  const SurfaceSpec surfaces[] = {ring, make_torus(1, 1), make_torus(0.5, 1)};
  double e_drift = 0, l_drift = 0, k_drift = 0, cross = 0, ret = 0;
  for (int i = 0; i < 50; ++i) {
    const SurfaceSpec& s = surfaces[i % 3];
    const double r0 = R(rng);
    double b0 = B(rng);
    // Keep off the meridians of the horn and spindle, which run into the axis.
    if (s.family != Family::Ring && std::abs(std::sin(b0)) < 0.05) b0 += 0.3;
    const GeodesicState s0 = state_at(s, r0, 0.0, b0, 1.0);
    const OrbitTrace tr = integrate(s, s0, tight(500));
    if (tr.status != TraceStatus::Completed) {
      ck.truth("trace " + std::to_string(i) + ": " + tr.message, false);
      continue;
    }
    e_drift = std::max(e_drift, tr.max_energy_drift);
    l_drift = std::max(l_drift, tr.max_ell_drift);
    const double K0 = conserved(s, s0).clairaut;
    for (const auto& st : tr.states)
      k_drift = std::max(k_drift, std::abs(conserved(s, st).clairaut - K0) / std::max(1.0, std::abs(K0)));
    for (const auto& e : tr.events) {
      const double beta = velocity_angle(s, e.state);
      if (e.kind == EventKind::InnerEquator)
        cross = std::max(cross, std::abs(s.radius(e.state.r) * std::sin(beta) - K0));
      if (e.kind == EventKind::OuterEquator)
        ret = std::max(ret, std::abs(std::sin(beta) - K0 / s.radius(0.0)));
    }
  }
  ck.below("energy drift", e_drift, 1e-9);
  ck.below("ell drift", l_drift, 1e-9);
  ck.below("Clairaut drift", k_drift, 1e-9);
  ck.below("inner crossing law", cross, 1e-8);
  ck.below("outer return law", ret, 1e-8);
}

// Azimuth and affine time at the k-th outer-equator crossing.
std::pair<double, double> crossing(const SurfaceSpec& s, double beta0, int k) {
  IntegratorConfig cfg = tight(2000);
  cfg.record_states = false;
  int seen = 0;
  std::pair<double, double> out{NAN, NAN};
  integrate(s, initial_state_from_angle(s, beta0), cfg, [&](const OrbitEvent& e) {
    if (e.kind != EventKind::OuterEquator) return false;
    out = {e.state.theta, e.lambda};
    return ++seen == k;
  });
  return out;
}

void c8(Check& ck) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> A(1.5, 4.0), U(0.05, 0.95);
  double angle = 0, length = 0;
  for (int i = 0; i < 20; ++i) {
    const SurfaceSpec s = make_torus(A(rng), 1.0);
    const double bc = *critical_angles(s).beta_crit;
    // Alternate unbound and bound launches, away from the critical angle.
    const bool bound = i % 2;
    const double b0 = bound ? bc + 0.01 + U(rng) * (pi / 2 - bc - 0.02) : 0.01 + U(rng) * (bc - 0.02);
    if (bound) {
      const auto [th, lam] = crossing(s, b0, 2);
      angle = std::max(angle, std::abs(4 * orbit_angle(s, b0, *turning_point(s, b0).chi_max) - th));
      length = std::max(length, std::abs(arc_length_bound_period(s, b0) - lam));
    } else {
      const auto [th, lam] = crossing(s, b0, 1);
      angle = std::max(angle, std::abs(orbit_angle(s, b0, 2 * pi) - th));
      length = std::max(length, std::abs(arc_length_unbound_loop(s, b0) - lam));
    }
  }
  ck.below("orbit angle vs ODE", angle, 1e-7);
  ck.below("arc length vs ODE", length, 1e-8);
}

void c9(Check& ck) {
  for (const auto& e : spectrum(ring, 5, 5)) {
    if (!e.geodesic || e.label.m == 0) continue;
    const auto xs = self_intersections(ring, *e.geodesic);
    const std::string name = to_string(e.label);
    const int n = e.label.n;
    if (e.label.p == 1 || n == 1) {
      ck.truth(name + " has no crossings", xs.empty());
      continue;
    }
    const bool at_zero = std::any_of(xs.begin(), xs.end(), [](const CrossingSeries& c) { return c.chi < 1e-6; });
    const std::size_t want = n == 2 || n == 3 ? 1 : 2;
    ck.truth(name + " crossing-radius count", xs.size() == want);
    if (n % 2 == 0) ck.truth(name + " crosses at chi = 0", at_zero);
    for (const auto& c : xs) ck.near(name + " spacing", c.spacing, 2 * pi / e.label.m, 1e-9);
  }
}

void c10(Check& ck) {
  const auto anti = solve_two_point(ring, {0.0, 0.0, 0.0, pi});
  ck.near("antipodal minimum", anti.shortest().arc_length, 7.63, 0.02);
  ck.truth("antipodal minimum below 3 pi", anti.shortest().arc_length < 3 * pi);
  for (double d : {0.3, 1.0, pi / std::sqrt(3.0) - 1e-3}) {
    const auto res = solve_two_point(ring, {0.0, 0.0, 0.0, d});
    ck.truth("equator arc minimal at " + std::to_string(d), res.shortest().turning == TurningStructure::Parallel);
    ck.near("equator arc length", res.shortest().arc_length, 3 * d, 1e-12);
  }
}

void c11(Check& ck) {
  ck.near("[2,3] length", flat_length({2, 3}), std::sqrt(13.0), 0.0);
  int sieve = 2;  // axis labels [1,0] and [0,1]
  for (int m = 1; m <= 6; ++m)
    for (int n = 1; n <= 6; ++n) {
      bool coprime = true;
      for (int d = 2; d <= 6; ++d) coprime = coprime && !(m % d == 0 && n % d == 0);
      sieve += coprime;
    }
  ck.truth("lattice count " + std::to_string(flat_lattice(6, 6).size()) + " vs sieve " + std::to_string(sieve),
           static_cast<int>(flat_lattice(6, 6).size()) == sieve);
}

void c12(Check& ck) {
  double worst = 0;
  for (double ell : {0.7, 1.0, 1.4})
    for (double u : {0.1, 0.5, 0.9}) worst = std::max(worst, std::abs(apsidal_angle({1, 0}, ell, -u / (2 * ell * ell)) - pi));
  ck.below("Kepler apsidal - pi", worst, 1e-8);
  double sxy = 0, sxx = 0;
  for (int i = 0; i <= 8; ++i) {
    const double k2 = 1e-5 * std::pow(100.0, i / 8.0);
    const double p = apsidal({1, k2}, 1.0, -0.3).precession;
    sxy += k2 * p;
    sxx += k2 * k2;
  }
  ck.near("precession slope / 6 pi", sxy / sxx / (6 * pi), 1.0, 0.02);
  const ForceParams f{1.0, 0.05};
  double vmax = NAN;
  for (const auto& c : circular_radii(f, 1.0))
    if (c.stability == Stability::Unstable) vmax = total_potential(f, 1.0, c.r);
  ck.truth("capture above the barrier", classify_orbit(f, 1.0, vmax + 0.5) == std::vector{OrbitClass::Capture});
}

struct Criterion {
  const char* title;
  std::function<void(Check&)> run;
};

const std::vector<Criterion> criteria{
    {"critical launch angle", c1},
    {"polar-circle angle", c2},
    {"closed-geodesic launch angles", c3},
    {"periods and reference lengths", c4},
    {"bound spectrum fractions", c5},
    {"small-oscillation frequency", c6},
    {"conservation suite", c7},
    {"quadrature against ODE", c8},
    {"self-intersection rules", c9},
    {"two-point geodesics", c10},
    {"flat torus lattice", c11},
    {"Kepler apsides and capture", c12},
};

bool report(int n) {
  Check ck;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    criteria[n - 1].run(ck);
  } catch (const Error& e) {
    ck.truth(std::string("error: ") + e.what(), false);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("criterion %2d %s  %s (%.2f s)\n", n, ck.ok() ? "PASS" : "FAIL", criteria[n - 1].title, secs);
  for (const auto& f : ck.failures) std::printf("    %s\n", f.c_str());
  return ck.ok();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int which = 0;
  app.add_option("--criterion", which, "run one criterion (1-12); all when omitted")
      ->check(CLI::Range(1, static_cast<int>(criteria.size())));
  CLI11_PARSE(app, argc, argv);
  if (which) return report(which) ? 0 : 1;
  int failed = 0;
  for (int n = 1; n <= static_cast<int>(criteria.size()); ++n) failed += !report(n);
  std::printf("%d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
