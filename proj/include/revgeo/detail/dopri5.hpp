#ifndef REVGEO_DETAIL_DOPRI5_HPP
#define REVGEO_DETAIL_DOPRI5_HPP

// Dormand-Prince 5(4) embedded Runge-Kutta pair with the 4th-order continuous
// extension of Hairer & Wanner (dopri5.f), step-size control by the usual
// elementary controller, and FSAL reuse of the last stage.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace revgeo::detail {

template <std::size_t N>
using Vec = std::array<double, N>;

/// One accepted step together with its interpolant on [t0, t0 + h].
template <std::size_t N>
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<Vec<N>, 5> rc{};

  double t1() const { return t0 + h; }

  Vec<N> operator()(double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    Vec<N> y;
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = rc[0][i] + s * (rc[1][i] + s1 * (rc[2][i] + s * (rc[3][i] + s1 * rc[4][i])));
    }
    return y;
  }
};

struct StepControl {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = INFINITY;
  double initial_step = 0.0;  // 0 selects automatically
  long max_steps = 5'000'000;
};

enum class StepStatus { Completed, Stopped, StepUnderflow, MaxSteps, NonFinite };

namespace dp {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
}  // namespace dp

/// Integrates y' = f(t, y) from t0 to t_end. `on_step(const DenseStep&)` sees
/// every accepted step and returns false to stop early. The RHS may throw; the
/// exception propagates after the steps already reported.
template <std::size_t N, class Rhs, class OnStep>
StepStatus dopri5(Rhs&& f, double t0, Vec<N> y, double t_end, const StepControl& ctl,
                  OnStep&& on_step) {
  using namespace dp;
  const double span = t_end - t0;
  if (span <= 0.0) return StepStatus::Completed;

  auto scale = [&](std::size_t, double a, double b) {
    return ctl.abs_tol + ctl.rel_tol * std::max(std::abs(a), std::abs(b));
  };

  Vec<N> k1 = f(t0, y), k2, k3, k4, k5, k6, k7, yt, y1;
  double t = t0;

  double h = ctl.initial_step;
  if (h <= 0.0) {
    // Hairer's starting-step heuristic.
    double d0 = 0.0, dd1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = scale(i, y[i], y[i]);
      d0 += (y[i] / sk) * (y[i] / sk);
      dd1 += (k1[i] / sk) * (k1[i] / sk);
    }
    d0 = std::sqrt(d0 / N);
    dd1 = std::sqrt(dd1 / N);
    double h0 = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * d0 / dd1;
    h0 = std::min({h0, ctl.max_step, span});
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h0 * k1[i];
    const Vec<N> f1 = f(t + h0, yt);
    double d2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = scale(i, y[i], y[i]);
      d2 += ((f1[i] - k1[i]) / sk) * ((f1[i] - k1[i]) / sk);
    }
    d2 = std::sqrt(d2 / N) / h0;
    const double dm = std::max(dd1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    h = std::min({100.0 * h0, h1, ctl.max_step, span});
  }

  DenseStep<N> step;
  long count = 0;
  bool last_rejected = false;
  const double uround = std::numeric_limits<double>::epsilon();

  while (t < t_end) {
    if (++count > ctl.max_steps) return StepStatus::MaxSteps;
    if (0.1 * std::abs(h) <= std::abs(t) * uround) return StepStatus::StepUnderflow;
    bool final_step = false;
    if (t + 1.01 * h >= t_end) {
      h = t_end - t;
      final_step = true;
    }

    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * a21 * k1[i];
    k2 = f(t + c2 * h, yt);
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(t + c3 * h, yt);
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(t + c4 * h, yt);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f(t + c5 * h, yt);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = f(t + h, yt);
    for (std::size_t i = 0; i < N; ++i)
      y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    k7 = f(t + h, y1);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double ei =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sk = scale(i, y[i], y1[i]);
      err += (ei / sk) * (ei / sk);
    }
    err = std::sqrt(err / N);
    if (!std::isfinite(err)) {
      if (std::abs(h) < 1e-300) return StepStatus::NonFinite;
      h *= 0.1;
      last_rejected = true;
      continue;
    }

    double fac = 0.9 * std::pow(std::max(err, 1e-300), -0.2);
    if (err <= 1.0) {
      step.t0 = t;
      step.h = h;
      for (std::size_t i = 0; i < N; ++i) {
        const double ydiff = y1[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        step.rc[0][i] = y[i];
        step.rc[1][i] = ydiff;
        step.rc[2][i] = bspl;
        step.rc[3][i] = ydiff - h * k7[i] - bspl;
        step.rc[4][i] =
            h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      t = final_step ? t_end : t + h;
      y = y1;
      k1 = k7;
      if (!on_step(static_cast<const DenseStep<N>&>(step))) return StepStatus::Stopped;
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
      last_rejected = false;
    } else {
      fac = std::clamp(fac, 0.2, 1.0);
      last_rejected = true;
    }
    h = std::min(h * fac, ctl.max_step);
  }
  return StepStatus::Completed;
}

}  // namespace revgeo::detail

#endif  // REVGEO_DETAIL_DOPRI5_HPP
