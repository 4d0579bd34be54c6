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

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace pfclt {

enum class QuadratureScheme {
  /// Composite Gauss-Legendre, 8 nodes per panel.
  GaussLegendre,
  /// Equal cells with one node at each cell midpoint (interior convention).
  Trapezoid,
};

std::string to_string(QuadratureScheme s);

inline constexpr int kPanelOrder = 8;
inline constexpr double kDefaultDensity = 16.0;
inline constexpr int kMinGridNodes = 256;

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

/// A panel [left, right] holding nodes first .. first + count - 1.
struct Panel {
  double left = 0.0;
  double right = 0.0;
  int first = 0;
  int count = 0;
};

/// Quadrature nodes and weights on (a, b), grouped in panels.
struct Grid {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<Panel> panels;
  QuadratureScheme scheme = QuadratureScheme::GaussLegendre;

  int size() const { return static_cast<int>(nodes.size()); }
  double length() const { return b - a; }
  /// Integral of f against the grid weights.
  double integrate(const std::function<double(double)>& f) const;
};

/// Grid with n_points nodes on (a, b). Gauss-Legendre grids round n_points up
/// to a multiple of the panel order.
Grid make_grid(double a, double b, int n_points,
               QuadratureScheme scheme = QuadratureScheme::GaussLegendre);

/// Gauss-Legendre grid whose panel boundaries include every breakpoint
/// (sorted, at least two). Each segment gets ceil(density * length / 8)
/// panels.
Grid make_panel_grid(std::span<const double> breakpoints, double density);

/// Node count used for an interval of the given length: density nodes per
/// unit length, at least kMinGridNodes, rounded to whole panels.
int default_node_count(double length, double density = kDefaultDensity);

/// Composite Gauss-Legendre integral of f over [a, b] with panels no wider
/// than panel_width.
double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double panel_width = 0.5, int order = 16);

/// Integral of g(x, y) over [ax, bx] x [ay, by]. Panels are laid out so that
/// overlapping parts of the two ranges share panels; squares cut by the
/// diagonal x = y are split into two triangles, so integrands that are
/// smooth on either side of the diagonal are integrated to full order.
double integrate_box(const std::function<double(double, double)>& g, double ax,
                     double bx, double ay, double by, double panel_width = 1.0,
                     int order = 10);

}  // namespace pfclt
