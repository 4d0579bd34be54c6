/*
 * Copyright 2026 The pfclt Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pfclt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "pfclt/errors.hpp"
#include "pfclt/parallel.hpp"

namespace pfclt {

std::string to_string(QuadratureScheme s) {
  return s == QuadratureScheme::GaussLegendre ? "gauss-legendre" : "trapezoid";
}

namespace {

GaussRule compute_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      // p1 = P_n(x), p0 = P_{n-1}(x)
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Re-evaluate the derivative at the converged root for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

void validate_interval(double a, double b) {
  if (!(std::isfinite(a) && std::isfinite(b) && a < b)) {
    throw ValidationError("degenerate interval (" + std::to_string(a) + ", " +
                          std::to_string(b) + ")");
  }
}

void append_gauss_panel(Grid& g, double left, double right) {
  const GaussRule& rule = gauss_legendre(kPanelOrder);
  const double half = 0.5 * (right - left);
  const double mid = 0.5 * (right + left);
  Panel p{left, right, g.size(), kPanelOrder};
  for (int i = 0; i < kPanelOrder; ++i) {
    g.nodes.push_back(mid + half * rule.nodes[i]);
    g.weights.push_back(half * rule.weights[i]);
  }
  g.panels.push_back(p);
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1) throw ValidationError("Gauss-Legendre order must be positive");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
  return it->second;
}

double Grid::integrate(const std::function<double(double)>& f) const {
  double sum = 0.0;
  for (int i = 0; i < size(); ++i) sum += weights[i] * f(nodes[i]);
  return sum;
}

Grid make_grid(double a, double b, int n_points, QuadratureScheme scheme) {
  validate_interval(a, b);
  if (n_points < 2) throw ValidationError("grid needs at least 2 points");
  Grid g;
  g.a = a;
  g.b = b;
  g.scheme = scheme;
  if (scheme == QuadratureScheme::Trapezoid) {
    const double h = (b - a) / n_points;
    for (int i = 0; i < n_points; ++i) {
      const double left = a + i * h;
      const double right = (i + 1 == n_points) ? b : a + (i + 1) * h;
      g.nodes.push_back(a + (i + 0.5) * h);
      g.weights.push_back(h);
      g.panels.push_back({left, right, i, 1});
    }
    return g;
  }
  const int panels = (n_points + kPanelOrder - 1) / kPanelOrder;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double left = a + p * h;
    const double right = (p + 1 == panels) ? b : a + (p + 1) * h;
    append_gauss_panel(g, left, right);
  }
  return g;
}

Grid make_panel_grid(std::span<const double> breakpoints, double density) {
  if (breakpoints.size() < 2) throw ValidationError("need at least two breakpoints");
  if (!(density > 0.0)) throw ValidationError("grid density must be positive");
  std::vector<double> bp(breakpoints.begin(), breakpoints.end());
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  validate_interval(bp.front(), bp.back());
  Grid g;
  g.a = bp.front();
  g.b = bp.back();
  for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
    const double len = bp[s + 1] - bp[s];
    const int panels =
        std::max(1, static_cast<int>(std::ceil(density * len / kPanelOrder - 1e-12)));
    const double h = len / panels;
    for (int p = 0; p < panels; ++p) {
      const double left = bp[s] + p * h;
      const double right = (p + 1 == panels) ? bp[s + 1] : bp[s] + (p + 1) * h;
      append_gauss_panel(g, left, right);
    }
  }
  return g;
}

int default_node_count(double length, double density) {
  const int raw = std::max(kMinGridNodes, static_cast<int>(std::ceil(density * length)));
  return ((raw + kPanelOrder - 1) / kPanelOrder) * kPanelOrder;
}

double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double panel_width, int order) {
  if (a == b) return 0.0;
  if (a > b) return -integrate_1d(f, b, a, panel_width, order);
  const GaussRule& rule = gauss_legendre(order);
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / panel_width)));
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    double s = 0.0;
    for (int i = 0; i < order; ++i) s += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    sum += 0.5 * h * s;
  }
  return sum;
}

namespace {

std::vector<std::pair<double, double>> box_panels(double lo, double hi, double other_lo,
                                                  double other_hi, double width) {
  std::vector<double> cuts{lo, hi};
  for (double c : {other_lo, other_hi}) {
    if (c > lo && c < hi) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double len = cuts[s + 1] - cuts[s];
    const int n = std::max(1, static_cast<int>(std::ceil(len / width - 1e-12)));
    for (int p = 0; p < n; ++p) {
      const double l = cuts[s] + len * p / n;
      const double r = (p + 1 == n) ? cuts[s + 1] : cuts[s] + len * (p + 1) / n;
      out.emplace_back(l, r);
    }
  }
  return out;
}

// Both triangles of [p, q]^2 via the collapsed (Duffy) map.
double diagonal_square(const std::function<double(double, double)>& g, double p,
                       double q) {
  constexpr int kOrder = 16;
  const GaussRule& rule = gauss_legendre(kOrder);
  const double h = q - p;
  double sum = 0.0;
  for (int i = 0; i < kOrder; ++i) {
    const double s = 0.5 * (1.0 + rule.nodes[i]);
    const double ws = 0.5 * rule.weights[i];
    for (int j = 0; j < kOrder; ++j) {
      const double t = 0.5 * (1.0 + rule.nodes[j]);
      const double w = ws * 0.5 * rule.weights[j] * s;
      const double u = p + h * s;
      const double v = p + h * s * t;
      sum += w * (g(u, v) + g(v, u));
    }
  }
  return sum * h * h;
}

}  // namespace

double integrate_box(const std::function<double(double, double)>& g, double ax,
                     double bx, double ay, double by, double panel_width, int order) {
  validate_interval(ax, bx);
  validate_interval(ay, by);
  const auto xs = box_panels(ax, bx, ay, by, panel_width);
  const auto ys = box_panels(ay, by, ax, bx, panel_width);
  const GaussRule& rule = gauss_legendre(order);
  // One partial sum per y panel, added in a fixed order afterwards so the
  // result does not depend on scheduling.
  std::vector<double> partial(ys.size(), 0.0);
  parallel_for(ys.size(), [&](std::size_t py) {
    const auto [yl, yr] = ys[py];
    std::vector<double> yn(order), yw(order);
    for (int j = 0; j < order; ++j) {
      yn[j] = 0.5 * (yl + yr) + 0.5 * (yr - yl) * rule.nodes[j];
      yw[j] = 0.5 * (yr - yl) * rule.weights[j];
    }
    double acc = 0.0;
    for (const auto& [xl, xr] : xs) {
      if (xl == yl && xr == yr) {
        acc += diagonal_square(g, xl, xr);
        continue;
      }
      double s = 0.0;
      for (int i = 0; i < order; ++i) {
        const double x = 0.5 * (xl + xr) + 0.5 * (xr - xl) * rule.nodes[i];
        const double wx = 0.5 * (xr - xl) * rule.weights[i];
        double row = 0.0;
        for (int j = 0; j < order; ++j) row += yw[j] * g(x, yn[j]);
        s += wx * row;
      }
      acc += s;
    }
    partial[py] = acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace pfclt
