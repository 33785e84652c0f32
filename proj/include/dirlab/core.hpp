#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

/// \file core.hpp
/// Angle arithmetic on the unit circle and small numeric helpers shared by
/// every module: chord/arc conversions, deterministic pairwise reduction and
/// a thread-count-independent parallel map.

namespace dirlab {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Absolute tolerance for angle equality (radians).
inline constexpr double kAngleTol = 1e-14;

/// Normalize an angle to [0, 2pi).
inline double normalize_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

/// Chordal distance between two points at angular separation u >= 0.
/// chord(u) = 2 sin(u/2); symmetric under u -> 2pi - u.
inline double chord_of_arc(double u) { return 2.0 * std::abs(std::sin(0.5 * u)); }

/// Arc length whose chord equals t, t in [0, 2]. Inverse of chord_of_arc on [0, pi].
inline double arc_of_chord(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 2.0) return kPi;
  return 2.0 * std::asin(0.5 * t);
}

/// A point on the unit circle stored by its angle in [0, 2pi).
struct AnglePoint {
  double theta = 0.0;

  AnglePoint() = default;
  explicit AnglePoint(double t) : theta(normalize_angle(t)) {}

  friend bool operator==(const AnglePoint& a, const AnglePoint& b) {
    double d = std::abs(a.theta - b.theta);
    return d <= kAngleTol || kTwoPi - d <= kAngleTol;
  }
};

/// Chordal distance |e^{ia} - e^{ib}|.
inline double chord_between(double a, double b) {
  return chord_of_arc(normalize_angle(a - b));
}

/// Deterministic pairwise summation. The reduction tree depends only on the
/// element count, never on thread scheduling, so sums are bit-stable.
inline double pairwise_sum(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

/// Evaluate fn(i) for i in [0, n) across `threads` workers and return the
/// results indexed by i. Each item is computed independently; downstream
/// reductions over the returned vector are therefore identical for any
/// thread count.
template <typename T>
std::vector<T> parallel_map(std::size_t n, int threads,
                            const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  int nt = std::min<int>(threads, static_cast<int>(n));
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::size_t chunk = (n + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi]() {
      for (std::size_t i = lo; i < hi; ++i) out[i] = fn(i);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

/// relative difference with guard for tiny denominators
inline double rel_diff(double a, double b) {
  double m = std::max(std::abs(a), std::abs(b));
  if (m == 0.0) return 0.0;
  return std::abs(a - b) / m;
}

}  // namespace dirlab
