#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

#include "dirlab/core.hpp"

/// \file quadrature.hpp
/// Globally adaptive Gauss-Kronrod 7/15 quadrature over a set of seeded
/// panels. Integrable endpoint singularities (log, small negative powers)
/// are handled by placing them on panel boundaries: Kronrod nodes are
/// strictly interior, and bisection grades panels geometrically into the
/// singularity.

namespace dirlab {

/// Tolerances and policy knobs for the singular quadrature used throughout.
struct QuadConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 4000;
  /// Half-width of the near-diagonal exclusion window around zeta in units
  /// of the local smoothness scale (distance to the nearest kink/endpoint
  /// of |f*| along the arc).
  double exclusion_radius_factor = 1e-6;
  /// Minimum ratio delta / truncation_error below which local values on a
  /// truncated set are refused ("untrusted regime").
  double trust_factor = 100.0;
  /// A gap is integrated by the far-field rule when its length is below
  /// far_ratio times its angular distance to zeta (and its estimated
  /// contribution error fits the budget).
  double far_ratio = 0.125;
  /// zeta-grid density for energy integrals (points per gap).
  int points_per_gap = 64;
  /// nodes in the shared pushforward table used by the far-field rule
  int table_nodes = 1536;

  void validate() const {
    if (rel_tol <= 0 || abs_tol <= 0) throw std::invalid_argument("QuadConfig: tolerances must be positive");
    if (max_subdivisions < 32) throw std::invalid_argument("QuadConfig: max_subdivisions >= 32 required");
  }
  QuadConfig halved() const {
    QuadConfig q = *this;
    q.rel_tol *= 0.5;
    q.abs_tol *= 0.5;
    return q;
  }
};

namespace gk {
// 15-point Kronrod extension of 7-point Gauss (QUADPACK values).
inline constexpr double kx[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
inline constexpr double kw[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double gw[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};
}  // namespace gk

struct PanelResult {
  double value = 0.0;
  double error = 0.0;
};

/// One GK7/15 evaluation on [a, b]. Nodes are strictly interior.
template <typename F>
PanelResult gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fk[15];
  for (int i = 0; i < 7; ++i) {
    fk[i] = f(c - h * gk::kx[i]);
    fk[14 - i] = f(c + h * gk::kx[i]);
  }
  fk[7] = f(c);
  double rk = 0.0;
  for (int i = 0; i < 7; ++i) rk += gk::kw[i] * (fk[i] + fk[14 - i]);
  rk += gk::kw[7] * fk[7];
  double rg = gk::gw[3] * fk[7];
  for (int i = 0; i < 3; ++i) rg += gk::gw[i] * (fk[2 * i + 1] + fk[13 - 2 * i]);
  PanelResult r;
  r.value = rk * h;
  double diff = std::abs(rk - rg) * h;
  // QUADPACK-style sharpening of the raw difference
  double scale = std::abs(r.value) + 1e-300;
  double q = diff / scale;
  r.error = (q > 0 && q < 1.0) ? scale * std::pow(200.0 * q, 1.5) / 200.0 * 200.0 : diff;
  r.error = std::min(r.error, diff);
  if (!std::isfinite(r.value)) r.error = std::numeric_limits<double>::infinity();
  return r;
}

struct IntegralResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
  int panels = 0;
  /// per-region pairwise sums when seeds carry region tags
  std::vector<double> region_values;
};

/// Seed panel with an optional region tag (used by the local-Dirichlet
/// breakdown to split I / Gamma / Sigma contributions).
struct SeedPanel {
  double a = 0.0, b = 0.0;
  int region = 0;
};

namespace detail {
struct WorkPanel {
  double a, b, value, error;
  int region;
};
}  // namespace detail

/// Globally adaptive integration over the seeded panels. The worst panel by
/// error estimate is bisected until the summed error meets
/// max(abs_tol, rel_tol*|value|)/2 or the panel budget is exhausted.
/// The returned value is a pairwise sum over panels sorted by position, so
/// it does not depend on refinement order.
template <typename F>
IntegralResult integrate_adaptive(const F& f, const std::vector<SeedPanel>& seeds,
                                  const QuadConfig& quad, int n_regions = 1) {
  std::vector<detail::WorkPanel> panels;
  panels.reserve(seeds.size() * 2);
  using QE = std::pair<double, std::size_t>;
  std::priority_queue<QE> queue;
  double total = 0.0, toterr = 0.0;
  for (const auto& s : seeds) {
    if (!(s.b > s.a)) continue;
    PanelResult r = gk15(f, s.a, s.b);
    panels.push_back({s.a, s.b, r.value, r.error, s.region});
    total += r.value;
    toterr += r.error;
    queue.emplace(r.error, panels.size() - 1);
  }
  const int budget = quad.max_subdivisions + static_cast<int>(seeds.size());
  while (static_cast<int>(panels.size()) < budget && !queue.empty()) {
    double target = 0.5 * std::max(quad.abs_tol, quad.rel_tol * std::abs(total));
    if (toterr <= target) break;
    auto [err, idx] = queue.top();
    queue.pop();
    if (err != panels[idx].error) continue;  // stale entry
    if (err <= 0) break;
    detail::WorkPanel p = panels[idx];
    double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) { panels[idx].error = 0; continue; }
    PanelResult rl = gk15(f, p.a, m), rr = gk15(f, m, p.b);
    total += rl.value + rr.value - p.value;
    toterr += rl.error + rr.error - p.error;
    panels[idx] = {p.a, m, rl.value, rl.error, p.region};
    queue.emplace(rl.error, idx);
    panels.push_back({m, p.b, rr.value, rr.error, p.region});
    queue.emplace(rr.error, panels.size() - 1);
  }
  std::sort(panels.begin(), panels.end(),
            [](const detail::WorkPanel& x, const detail::WorkPanel& y) { return x.a < y.a; });
  IntegralResult out;
  out.panels = static_cast<int>(panels.size());
  out.region_values.assign(std::max(1, n_regions), 0.0);
  std::vector<double> vals(panels.size());
  toterr = 0.0;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    vals[i] = panels[i].value;
    toterr += panels[i].error;
  }
  out.value = pairwise_sum(vals);
  out.error = toterr;
  out.converged = toterr <= std::max(quad.abs_tol, quad.rel_tol * std::abs(out.value));
  if (n_regions > 1) {
    for (int r = 0; r < n_regions; ++r) {
      std::vector<double> rv;
      for (const auto& p : panels)
        if (p.region == r) rv.push_back(p.value);
      out.region_values[r] = pairwise_sum(rv);
    }
  } else {
    out.region_values[0] = out.value;
  }
  return out;
}

/// Convenience wrapper for a single interval [a, b] with interior
/// breakpoints (singularities, kinks) inserted as panel boundaries.
template <typename F>
IntegralResult integrate(const F& f, double a, double b,
                         std::vector<double> breakpoints, const QuadConfig& quad) {
  breakpoints.push_back(a);
  breakpoints.push_back(b);
  std::sort(breakpoints.begin(), breakpoints.end());
  std::vector<SeedPanel> seeds;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    double lo = std::max(a, breakpoints[i]);
    double hi = std::min(b, breakpoints[i + 1]);
    if (hi > lo) seeds.push_back({lo, hi, 0});
  }
  return integrate_adaptive(f, seeds, quad);
}

/// Cumulative integral table G(y) = int_0^y g(x) dx on a logarithmic grid,
/// with cubic-Hermite evaluation using the exact derivative g at the nodes.
/// g may have an integrable singularity at 0; the head panel is summed over
/// geometrically graded subpanels.
template <typename F>
class CumulativeTable {
 public:
  CumulativeTable() = default;

  CumulativeTable(const F& g, double y_min, double y_max, int nodes) : g_(g) {
    if (nodes < 8) nodes = 8;
    y_.resize(nodes);
    G_.resize(nodes);
    d_.resize(nodes);
    double ratio = std::log(y_max / y_min) / (nodes - 1);
    for (int i = 0; i < nodes; ++i) y_[i] = y_min * std::exp(ratio * i);
    y_.back() = y_max;
    // head: (0, y_min] graded toward 0
    double head = 0.0;
    double hi = y_[0];
    for (int k = 0; k < 64 && hi > 1e-300; ++k) {
      double lo = 0.5 * hi;
      head += gk15(g_, lo, hi).value;
      hi = lo;
    }
    G_[0] = head;
    d_[0] = g_(y_[0]);
    for (int i = 1; i < nodes; ++i) {
      PanelResult pr = gk15(g_, y_[i - 1], y_[i]);
      double seg = pr.value;
      // one refinement level for safety on coarse panels
      if (pr.error > 1e-12 * (std::abs(seg) + 1e-300)) {
        double m = 0.5 * (y_[i - 1] + y_[i]);
        seg = gk15(g_, y_[i - 1], m).value + gk15(g_, m, y_[i]).value;
      }
      G_[i] = G_[i - 1] + seg;
      d_[i] = g_(y_[i]);
    }
  }

  /// G(y); clamped evaluation below the first node falls back to linear in
  /// the head (contributions there are at far-field noise level).
  double operator()(double y) const {
    if (y <= y_.front()) return G_.front() * (y / y_.front());
    if (y >= y_.back()) return G_.back();
    auto it = std::upper_bound(y_.begin(), y_.end(), y);
    std::size_t i = static_cast<std::size_t>(it - y_.begin()) - 1;
    double h = y_[i + 1] - y_[i];
    double t = (y - y_[i]) / h;
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    double h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t);
    double h11 = t * t * (t - 1);
    return h00 * G_[i] + h10 * h * d_[i] + h01 * G_[i + 1] + h11 * h * d_[i + 1];
  }

  bool empty() const { return y_.empty(); }
  double y_min() const { return y_.empty() ? 0.0 : y_.front(); }

 private:
  F g_;
  std::vector<double> y_, G_, d_;
};

}  // namespace dirlab
