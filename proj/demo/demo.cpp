// Walk through the main entry points on the unit ring torus a = 2, b = 1.
#include <cstdio>
#include <numbers>

#include "revgeo/revgeo.hpp"

using namespace revgeo;

int main() {
  constexpr double pi = std::numbers::pi;
  const SurfaceSpec s = make_torus(2.0, 1.0);
  std::printf("torus a=%g b=%g c=%g (%s)\n", s.a, s.b, s.c, to_string(s.family));

  const auto ang = critical_angles(s);
  std::printf("critical launch angle %.10f rad, polar circle %.2f deg\n", *ang.beta_crit,
              ang.beta_polar * 180 / pi);

  // A geodesic launched from the outer equator.
  IntegratorConfig cfg;
  cfg.max_lambda = 45.2;
  const OrbitTrace tr = integrate(s, initial_state_from_angle(s, 0.119), cfg);
  std::printf("beta0 = 0.119: %zu inner-equator crossings in arc length %.2f\n",
              tr.events_of(EventKind::InnerEquator).size(), tr.final_lambda());

  for (ClosedLabel l : {ClosedLabel{1, 1, 0}, {3, 2, 0}, {7, 1, 1}}) {
    const ClosedGeodesic g = find_closed(s, l);
    std::printf("%-8s beta0 %.10f  length %.4f  ODE closure %.1e\n", to_string(l).c_str(), g.beta0,
                g.period_length, verify_closure(s, g));
  }

  const BvpResult bvp = solve_two_point(s, {0.0, 0.0, 0.0, pi});
  std::printf("shortest geodesic between antipodal outer-equator points: %.6f (%zu found)\n",
              bvp.shortest().arc_length, bvp.solutions.size());

  std::printf("flat torus [2,3]: length %.6f in %zu segments\n", flat_length({2, 3}), flat_segments({2, 3}).size());

  const ForceParams f{1.0, 1e-3};
  const ApsidalData ap = apsidal(f, 1.0, -0.3);
  std::printf("relativistic Kepler: precession %.6e per orbit (6 pi k2 = %.6e)\n", ap.precession, 6 * pi * f.k2);
}
