#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "revgeo/bvp.hpp"
#include "test_util.hpp"

using namespace revgeo;
constexpr double pi = std::numbers::pi;

namespace {
const SurfaceSpec ring = make_torus(2, 1);

// Composite Simpson on G after r = r2 - u^2, which removes the endpoint
// singularity when p = R(r2).
double length_reference(const SurfaceSpec& s, double r1, double r2, double p) {
  const double U = std::sqrt(r2 - r1);
  const int n = 200000;
  auto g = [&](double u) {
    const double R = s.radius(r2 - u * u);
    const double d = R * R - p * p;
    if (u == 0.0) {
      // limit 2u R / sqrt(R^2 - p^2) with R^2 - p^2 ~ 2 p |R'| u^2
      return 2.0 * R / std::sqrt(2.0 * p * std::abs(s.radius_prime(r2)));
    }
    return 2.0 * u * R / std::sqrt(d);
  };
  double sum = g(0) + g(U);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4 : 2) * g(U * i / n);
  return sum * U / (3.0 * n);
}

// Affine time at which a unit-speed geodesic from r1 first reaches r2.
double ode_length(const SurfaceSpec& s, double r1, double r2, double p) {
  const double beta = std::asin(p / s.radius(r1));
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-13;
  cfg.abs_tol = 1e-15;
  cfg.max_lambda = 4.0 * (r2 - r1) + 10.0;
  double hit = NAN;
  auto stop = [&](const OrbitEvent&) { return false; };
  const OrbitTrace tr = integrate(s, state_at(s, r1, 0.0, beta, 1.0), cfg, stop);
  double lo = 0, hi = tr.final_lambda();
  for (double t = 0; t < hi; t += 1e-3)
    if (tr.at(t).r >= r2) {
      hi = t;
      break;
    }
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (tr.at(mid).r < r2 ? lo : hi) = mid;
  }
  hit = 0.5 * (lo + hi);
  return hit;
}
}  // namespace

TEST(Momentum, ThetaIsOddAndMonotone) {
  EXPECT_EQ(theta_of_momentum(ring, 0.0, pi / 2, 0.0), 0.0);
  double prev = -INFINITY;
  for (int i = -20; i <= 20; ++i) {
    const double p = 1.99 * i / 20.0;
    const double f = theta_of_momentum(ring, 0.0, pi / 2, p);
    EXPECT_NEAR(f, -theta_of_momentum(ring, 0.0, pi / 2, -p), 1e-13);
    EXPECT_GT(f, prev);
    prev = f;
  }
}

TEST(Momentum, VerticalTangentAtTheEndpointRadius) {
  // R(pi/2) = 2: F stays finite but its slope blows up like 1/sqrt(2 - p).
  const double f2 = theta_of_momentum(ring, 0.0, pi / 2, 2.0);
  EXPECT_TRUE(std::isfinite(f2));
  double last = 0;
  for (double h : {1e-2, 1e-4, 1e-6}) {
    const double slope = (f2 - theta_of_momentum(ring, 0.0, pi / 2, 2.0 - h)) / h;
    EXPECT_GT(slope, 5 * last);
    last = slope;
  }
  EXPECT_KIND(theta_of_momentum(ring, 0.0, pi / 2, 2.01), ErrorKind::ForbiddenRegion);
}

TEST(Momentum, AsymptoteAtTheInnerEquator) {
  // Turning radius approaches pi b: the azimuth diverges logarithmically.
  double last = 0;
  for (double e : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const double f = theta_with_overshoot(ring, 0.0, 0.0, 1.0 + e);
    EXPECT_GT(f, last + 1.0);
    last = f;
  }
  EXPECT_GT(theta_of_momentum(ring, 0.0, pi, 1.0 - 1e-10), theta_of_momentum(ring, 0.0, pi, 1.0 - 1e-5) + 5.0);
}

TEST(Momentum, ArcLengthBasics) {
  EXPECT_DOUBLE_EQ(arclength_of_momentum(ring, 0.3, 1.2, 0.0), 0.9);
  for (double p : {0.2, 1.0, 1.5})
    EXPECT_GT(arclength_of_momentum(ring, 0.3, 1.2, p), 0.9);
  EXPECT_KIND(arclength_of_momentum(ring, 0.0, 3.0, 1.5), ErrorKind::ForbiddenRegion);
}

TEST(Momentum, ImproperEndpointLength) {
  // G has a square-root branch at p = R(r2): one ulp in p moves it by ~1e-8.
  for (double r2 : {0.5, pi / 2, 2.5}) {
    const double p = ring.radius(r2);
    EXPECT_NEAR(arclength_of_momentum(ring, 0.0, r2, p), length_reference(ring, 0.0, r2, p), 1e-7) << r2;
  }
}

TEST(Momentum, ArcLengthMatchesOde) {
  for (auto [r1, r2, p] : {std::tuple{0.0, 1.0, 1.0}, {0.2, 2.0, 1.3}, {-1.0, 0.5, 2.1}, {0.5, 3.0, 0.8}}) {
    EXPECT_NEAR(arclength_of_momentum(ring, r1, r2, p), ode_length(ring, r1, r2, p), 1e-7);
  }
}

TEST(Momentum, TurningRadius) {
  EXPECT_NEAR(rmax_of_momentum(ring, 2.0), pi / 2, 1e-15);
  EXPECT_EQ(rmax_of_momentum(ring, 3.0), 0.0);
  EXPECT_NEAR(rmax_of_momentum(ring, 1.0), pi, 1e-15);
  EXPECT_NEAR(rmax_of_momentum(ring, -2.0), pi / 2, 1e-15);
  EXPECT_KIND(rmax_of_momentum(ring, 0.5), ErrorKind::Domain);
  EXPECT_KIND(rmax_of_momentum(ring, 3.5), ErrorKind::Domain);
  for (double r : {0.3, 1.0, 2.9}) EXPECT_NEAR(rmax_of_momentum(ring, ring.radius(r)), r, 1e-12);
}

TEST(TwoPoint, ShortEquatorArc) {
  const auto res = solve_two_point(ring, {0.0, 0.0, 0.0, 0.5});
  EXPECT_NEAR(res.shortest().arc_length, 1.5, 1e-12);
  EXPECT_EQ(res.shortest().turning, TurningStructure::Parallel);
}

TEST(TwoPoint, AntipodalEquatorPoints) {
  const auto res = solve_two_point(ring, {0.0, 0.0, 0.0, pi});
  const auto& best = res.shortest();
  const double half_loop = find_closed(ring, {1, 1, 0}).period_length / 2;
  EXPECT_NEAR(best.arc_length, half_loop, 1e-8);
  EXPECT_NEAR(best.arc_length, 7.63, 0.01);
  EXPECT_LT(best.arc_length, 3 * pi);
  // Mirror images above and below the equator, in both azimuthal senses, tie.
  ASSERT_GE(res.solutions.size(), 4u);
  int up = 0, down = 0;
  for (int i = 0; i < 4; ++i) {
    const auto& sol = res.solutions[i];
    EXPECT_TRUE(sol.tie);
    EXPECT_NEAR(sol.arc_length, best.arc_length, 1e-9);
    EXPECT_LT(sol.endpoint_error, 1e-6);
    ASSERT_TRUE(sol.r_ext.has_value());
    EXPECT_NEAR(std::abs(*sol.r_ext), *find_closed(ring, {1, 1, 0}).chi_max, 1e-8);
    (*sol.r_ext > 0 ? up : down)++;
  }
  EXPECT_EQ(up, 2);
  EXPECT_EQ(down, 2);
}

TEST(TwoPoint, JustPastTheFocalSeparation) {
  const double d = pi / std::sqrt(3.0) + 1e-2;
  const auto res = solve_two_point(ring, {0.0, 0.0, 0.0, d});
  EXPECT_LT(res.shortest().arc_length, 3 * d);
  EXPECT_NE(res.shortest().turning, TurningStructure::Parallel);
  const double e = pi / std::sqrt(3.0) - 1e-2;
  EXPECT_NEAR(solve_two_point(ring, {0.0, 0.0, 0.0, e}).shortest().arc_length, 3 * e, 1e-12);
}

TEST(TwoPoint, MeridianBaseline) {
  const auto res = solve_two_point(ring, {0.2, 1.0, 1.1, 1.0});
  EXPECT_NEAR(res.shortest().arc_length, 0.9, 1e-12);
  EXPECT_EQ(res.shortest().p_theta, 0.0);
}

TEST(TwoPoint, NearbyPointsHaveAUniqueMinimum) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-pi, pi), D(-0.3, 0.3);
  for (int k = 0; k < 6; ++k) {
    const double r1 = U(rng), t1 = U(rng);
    const double r2 = r1 + D(rng), t2 = t1 + D(rng) / 3;
    ASSERT_LT(chord_distance(ring, r1, t1, r2, t2), 1.0);
    const auto res = solve_two_point(ring, {r1, t1, r2, t2, 1});
    ASSERT_GE(res.solutions.size(), 2u);
    EXPECT_FALSE(res.shortest().tie);
    EXPECT_GT(res.solutions[1].arc_length, res.shortest().arc_length + 1e-6);
    EXPECT_LT(res.shortest().endpoint_error, 1e-6);
  }
}

TEST(TwoPoint, SolutionsReachTheSecondEndpoint) {
  const BvpProblem prob{0.5, 0.0, -2.0, 2.0};
  const auto res = solve_two_point(ring, prob);
  ASSERT_FALSE(res.solutions.empty());
  const double chord = chord_distance(ring, prob.r1, prob.theta1, prob.r2, prob.theta2);
  for (std::size_t i = 0; i < res.solutions.size(); ++i) {
    const auto& sol = res.solutions[i];
    EXPECT_LT(sol.endpoint_error, 1e-6) << i;
    EXPECT_GE(sol.arc_length, chord);
    if (i) {
      EXPECT_GE(sol.arc_length, res.solutions[i - 1].arc_length);
    }
    EXPECT_LE(std::abs(sol.p_theta), ring.radius(prob.r1) * (1 + 1e-12));
  }
  EXPECT_FALSE(res.branches.empty());
}

TEST(TwoPoint, Errors) {
  EXPECT_KIND(solve_two_point(make_torus(1, 1), {pi, 0.0, 0.5, 1.0}), ErrorKind::SingularAxis);
}

TEST(ExpMap, BaselineRaysAndLabels) {
  const auto rays = exp_map_rays(ring, {{1, 1, 0}, {0, 1, 1}, {2, 1, 0}});
  ASSERT_EQ(rays.rays.size(), 3u);
  EXPECT_EQ(rays.rays[0].beta0, 0.0);
  EXPECT_NEAR(rays.rays[0].length, 2 * pi, 1e-15);
  EXPECT_NEAR(rays.rays[1].beta0, pi / 2, 1e-15);
  EXPECT_NEAR(rays.rays[1].length, 6 * pi, 1e-14);
  EXPECT_NEAR(rays.rays[2].beta0, 0.4097, 1e-4);
  EXPECT_NEAR(rays.rays[2].length, 15.26, 0.01);
  EXPECT_EQ(rays.warnings.size(), 2u);
}
