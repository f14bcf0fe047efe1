#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "revgeo/flat_torus.hpp"
#include "test_util.hpp"

using namespace revgeo;

namespace {
// Count the unit cells the line from (0,0) to (m,n) passes through by sampling.
int cells_visited(int m, int n) {
  const int samples = 100003;  // prime, so no sample lands on a cell boundary
  int count = 1;
  std::pair<double, double> cell{0, 0};
  for (int i = 1; i < samples; ++i) {
    const double t = double(i) / samples;
    std::pair<double, double> c{std::floor(m * t), std::floor(n * t)};
    if (c != cell) ++count;
    cell = c;
  }
  return count;
}
}  // namespace

TEST(FlatLength, Examples) {
  EXPECT_DOUBLE_EQ(flat_length({2, 3}), std::sqrt(13.0));
  EXPECT_EQ(flat_length({1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(flat_length({1, 1}), std::sqrt(2.0));
  EXPECT_KIND(flat_length({0, 0}), ErrorKind::InvalidParameter);
  EXPECT_KIND(flat_length({-1, 2}), ErrorKind::InvalidParameter);
}

TEST(FlatSegments, Examples) {
  EXPECT_EQ(flat_segments({2, 3}).size(), 4u);
  const auto d = flat_segments({1, 1});
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].x0, 0.0);
  EXPECT_EQ(d[0].y1, 1.0);
  const auto h = flat_segments({1, 0});
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h[0].y0, 0.0);
  EXPECT_EQ(h[0].y1, 0.0);
  EXPECT_EQ(h[0].x1, 1.0);
  EXPECT_KIND(flat_segments({2, 4}), ErrorKind::NonPrimitive);
  EXPECT_KIND(flat_segments({0, 0}), ErrorKind::InvalidParameter);
}

TEST(FlatSegments, CountMatchesBruteForce) {
  for (int m = 1; m <= 9; ++m)
    for (int n = 1; n <= 9; ++n) {
      if (std::gcd(m, n) != 1) continue;
      EXPECT_EQ(static_cast<int>(flat_segments({m, n}).size()), cells_visited(m, n)) << m << "," << n;
      EXPECT_EQ(static_cast<int>(flat_segments({m, n}).size()), m + n - 1);
    }
}

TEST(FlatSegments, UnwrapsToTheStraightLine) {
  for (int m = 0; m <= 7; ++m)
    for (int n = 0; n <= 7; ++n) {
      if (std::gcd(m, n) != 1) continue;
      const auto segs = flat_segments({m, n});
      double X = 0, Y = 0, total = 0;
      ASSERT_EQ(segs.front().x0, 0.0);
      ASSERT_EQ(segs.front().y0, 0.0);
      for (std::size_t k = 0; k < segs.size(); ++k) {
        const auto& sg = segs[k];
        for (double v : {sg.x0, sg.y0, sg.x1, sg.y1}) {
          EXPECT_GE(v, 0.0);
          EXPECT_LE(v, 1.0);
        }
        // Each piece is parallel to (m, n).
        EXPECT_NEAR((sg.x1 - sg.x0) * n - (sg.y1 - sg.y0) * m, 0.0, 1e-14);
        // Starts where the previous piece left, modulo the lattice.
        if (k) {
          const auto& pr = segs[k - 1];
          const double dx = sg.x0 - pr.x1, dy = sg.y0 - pr.y1;
          EXPECT_NEAR(dx, std::round(dx), 1e-14);
          EXPECT_NEAR(dy, std::round(dy), 1e-14);
          // The crossing sits on x = i or y = j.
          const double ex = std::min(pr.x1, 1 - pr.x1), ey = std::min(pr.y1, 1 - pr.y1);
          EXPECT_LT(std::min(ex, ey), 1e-14);
        }
        X += sg.x1 - sg.x0;
        Y += sg.y1 - sg.y0;
        total += sg.length();
      }
      EXPECT_NEAR(X, m, 1e-12);
      EXPECT_NEAR(Y, n, 1e-12);
      EXPECT_NEAR(total, flat_length({m, n}), 1e-12);
    }
}

TEST(FlatSegments, CrossingsAtIntegerPoints) {
  // Unwrapped crossing points of [3,5] are the t = i/3 and j/5 points of (3t, 5t).
  const auto segs = flat_segments({3, 5});
  std::set<long> want;
  for (int i = 1; i < 3; ++i) want.insert(std::lround(1e9 * i / 3.0));
  for (int j = 1; j < 5; ++j) want.insert(std::lround(1e9 * j / 5.0));
  std::set<long> got;
  double X = 0;
  for (std::size_t k = 0; k + 1 < segs.size(); ++k) {
    X += segs[k].x1 - segs[k].x0;
    got.insert(std::lround(1e9 * X / 3.0));
  }
  EXPECT_EQ(got, want);
}

TEST(FlatLattice, CountsAndOrder) {
  const auto lat = flat_lattice(6, 6);
  int axes = 0, inner = 0;
  for (const auto& e : lat) (e.label.m && e.label.n ? inner : axes)++;
  // Sieve: coprime pairs in [1,6]^2.
  int sieve = 0;
  for (int m = 1; m <= 6; ++m)
    for (int n = 1; n <= 6; ++n) {
      int g = 1;
      for (int d = 2; d <= 6; ++d)
        if (m % d == 0 && n % d == 0) g = d;
      sieve += g == 1;
    }
  EXPECT_EQ(inner, sieve);
  EXPECT_EQ(inner, 23);
  EXPECT_EQ(axes, 2);
  for (std::size_t i = 1; i < lat.size(); ++i) EXPECT_LE(lat[i - 1].length, lat[i].length);
  const auto first_inner = std::find_if(lat.begin(), lat.end(), [](auto& e) { return e.label.m && e.label.n; });
  EXPECT_EQ(first_inner->label, (FlatLabel{1, 1}));
  EXPECT_DOUBLE_EQ(first_inner->length, std::sqrt(2.0));
  auto has = [&](FlatLabel l) {
    return std::any_of(lat.begin(), lat.end(), [&](auto& e) { return e.label == l; });
  };
  EXPECT_TRUE(has({2, 3}));
  EXPECT_TRUE(has({3, 2}));
  EXPECT_FALSE(has({2, 4}));
  EXPECT_KIND(flat_lattice(0, 3), ErrorKind::InvalidParameter);
}

TEST(FlatLabel, Formatting) { EXPECT_EQ(to_string(FlatLabel{2, 3}), "[2,3]"); }
