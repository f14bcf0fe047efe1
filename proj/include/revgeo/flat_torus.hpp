#ifndef REVGEO_FLAT_TORUS_HPP
#define REVGEO_FLAT_TORUS_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "revgeo/error.hpp"

namespace revgeo {

/// Closed geodesic of the flat unit-square torus winding m times in x and n in y.
struct FlatLabel {
  int m = 1;
  int n = 0;

  bool operator==(const FlatLabel&) const = default;
  bool primitive() const { return std::gcd(m, n) == 1; }
};

inline std::string to_string(const FlatLabel& l) {
  return "[" + std::to_string(l.m) + "," + std::to_string(l.n) + "]";
}

struct FlatSegment {
  double x0, y0, x1, y1;

  double length() const { return std::hypot(x1 - x0, y1 - y0); }
};

struct FlatEntry {
  FlatLabel label;
  double length;
};

inline void check_flat(const FlatLabel& l) {
  if (l.m < 0 || l.n < 0 || (l.m == 0 && l.n == 0)) {
    throw Error(ErrorKind::InvalidParameter, "flat label needs nonnegative (m, n) other than (0, 0)");
  }
}

inline double flat_length(const FlatLabel& l) {
  check_flat(l);
  return std::hypot(static_cast<double>(l.m), static_cast<double>(l.n));
}

/// The line from (0,0) to (m,n) cut into its pieces inside the unit square.
inline std::vector<FlatSegment> flat_segments(const FlatLabel& l) {
  check_flat(l);
  if (!l.primitive()) {
    throw Error(ErrorKind::NonPrimitive, to_string(l) + " retraces " +
                                             to_string(FlatLabel{l.m / std::gcd(l.m, l.n), l.n / std::gcd(l.m, l.n)}));
  }
  // Parameter values where the line meets x or y = integer.
  std::vector<double> cuts{0.0, 1.0};
  for (int i = 1; i < l.m; ++i) cuts.push_back(static_cast<double>(i) / l.m);
  for (int j = 1; j < l.n; ++j) cuts.push_back(static_cast<double>(j) / l.n);
  std::sort(cuts.begin(), cuts.end());
  std::vector<FlatSegment> out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double t0 = cuts[k], t1 = cuts[k + 1];
    const double tm = 0.5 * (t0 + t1);
    const double fx = std::floor(l.m * tm), fy = std::floor(l.n * tm);
    out.push_back({l.m * t0 - fx, l.n * t0 - fy, l.m * t1 - fx, l.n * t1 - fy});
  }
  return out;
}

/// Primitive labels with m <= m_max and n <= n_max, by length then label.
inline std::vector<FlatEntry> flat_lattice(int m_max, int n_max) {
  if (m_max < 1 || n_max < 1) throw Error(ErrorKind::InvalidParameter, "bounds must be >= 1");
  std::vector<FlatEntry> out;
  for (int m = 0; m <= m_max; ++m)
    for (int n = 0; n <= n_max; ++n)
      if ((m || n) && std::gcd(m, n) == 1) out.push_back({{m, n}, flat_length({m, n})});
  std::sort(out.begin(), out.end(), [](const FlatEntry& a, const FlatEntry& b) {
    if (a.length != b.length) return a.length < b.length;
    return a.label.m != b.label.m ? a.label.m < b.label.m : a.label.n < b.label.n;
  });
  return out;
}

}  // namespace revgeo

#endif  // REVGEO_FLAT_TORUS_HPP
