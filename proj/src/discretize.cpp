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

#include "pfclt/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pfclt/errors.hpp"
#include "pfclt/parallel.hpp"

namespace pfclt {

GridPtr share(Grid grid) { return std::make_shared<const Grid>(std::move(grid)); }

GridPtr domain_grid(double L, double density) {
  if (!(L > 0.0)) throw ValidationError("L must be positive");
  const double need = static_cast<double>(kMinGridNodes) / (2.0 * L);
  const double bp[] = {-L, L};
  return share(make_panel_grid(bp, std::max(density, need)));
}

double DiscreteOperator::kernel_at(int i, int j) const {
  return matrix(i, j) / std::sqrt(grid->weights[i] * grid->weights[j]);
}

namespace {

Eigen::VectorXd sqrt_weights(const Grid& g) {
  Eigen::VectorXd s(g.size());
  for (int i = 0; i < g.size(); ++i) s[i] = std::sqrt(g.weights[i]);
  return s;
}

}  // namespace

DiscreteOperator discretize_kernel(const ScalarKernel& k, GridPtr grid) {
  const int n = grid->size();
  const Eigen::VectorXd sw = sqrt_weights(*grid);
  Eigen::MatrixXd m(n, n);
  // Column-major storage: fill one column per task.
  parallel_for(n, [&](int j) {
    const double y = grid->nodes[j];
    for (int i = 0; i < n; ++i) m(i, j) = (sw[i] * sw[j]) * k(grid->nodes[i], y);
  });
  return {std::move(grid), std::move(m)};
}

DiscreteOperator discretize_sign_kernel(GridPtr grid) {
  const Grid& g = *grid;
  const int n = g.size();
  // Q(i, j) = 2 C(i, j) - w_j with C(i, j) the integral over (a, x_i) of the
  // j-th interpolation basis function.
  Eigen::MatrixXd q(n, n);
  std::vector<int> panel_of(n);
  for (int p = 0; p < static_cast<int>(g.panels.size()); ++p) {
    for (int j = 0; j < g.panels[p].count; ++j) panel_of[g.panels[p].first + j] = p;
  }
  for (int i = 0; i < n; ++i) {
    const int pi = panel_of[i];
    for (int j = 0; j < n; ++j) {
      const int pj = panel_of[j];
      if (pj < pi) {
        q(i, j) = g.weights[j];
      } else if (pj > pi) {
        q(i, j) = -g.weights[j];
      }
    }
  }
  for (const Panel& p : g.panels) {
    const GaussRule& rule = gauss_legendre(p.count);
    for (int ii = 0; ii < p.count; ++ii) {
      const double upper = g.nodes[p.first + ii];
      const double half = 0.5 * (upper - p.left);
      for (int jj = 0; jj < p.count; ++jj) {
        double c = 0.0;
        for (int q_idx = 0; q_idx < p.count; ++q_idx) {
          const double s = p.left + half * (1.0 + rule.nodes[q_idx]);
          double basis = 1.0;
          for (int m = 0; m < p.count; ++m) {
            if (m == jj) continue;
            const double tm = g.nodes[p.first + m];
            basis *= (s - tm) / (g.nodes[p.first + jj] - tm);
          }
          c += half * rule.weights[q_idx] * basis;
        }
        q(p.first + ii, p.first + jj) = 2.0 * c - g.weights[p.first + jj];
      }
    }
  }
  const Eigen::VectorXd sw = sqrt_weights(g);
  Eigen::MatrixXd m = sw.asDiagonal() * q * sw.cwiseInverse().asDiagonal();
  return {std::move(grid), std::move(m)};
}

DiscreteOperator zero_operator(GridPtr grid) {
  const int n = grid->size();
  return {std::move(grid), Eigen::MatrixXd::Zero(n, n)};
}

DiscreteOperator identity_operator(GridPtr grid) {
  const int n = grid->size();
  return {std::move(grid), Eigen::MatrixXd::Identity(n, n)};
}

DiscreteOperator multiplication_operator(const std::function<double(double)>& f,
                                         GridPtr grid) {
  const int n = grid->size();
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d[i] = f(grid->nodes[i]);
  Eigen::MatrixXd m = d.asDiagonal();
  return {std::move(grid), std::move(m)};
}

DiscreteOperator chi_projection(double a, double b, GridPtr grid) {
  return multiplication_operator([a, b](double x) { return (x > a && x < b) ? 1.0 : 0.0; },
                                 std::move(grid));
}

Eigen::VectorXd sample_function(const std::function<double(double)>& f,
                                const Grid& grid) {
  Eigen::VectorXd v(grid.size());
  for (int i = 0; i < grid.size(); ++i) v[i] = std::sqrt(grid.weights[i]) * f(grid.nodes[i]);
  return v;
}

Eigen::MatrixXd outer_kernel(const std::function<double(double)>& f,
                             const std::function<double(double)>& g,
                             const Grid& grid) {
  return sample_function(f, grid) * sample_function(g, grid).transpose();
}

void require_same_grid(const DiscreteOperator& x, const DiscreteOperator& y) {
  if (x.grid == y.grid) return;
  if (!x.grid || !y.grid || x.grid->nodes != y.grid->nodes ||
      x.grid->weights != y.grid->weights) {
    throw ValidationError("operators live on different grids");
  }
}

double op_trace(const DiscreteOperator& op) { return op.matrix.trace(); }

DiscreteOperator op_product(const DiscreteOperator& x, const DiscreteOperator& y) {
  require_same_grid(x, y);
  return {x.grid, x.matrix * y.matrix};
}

DiscreteOperator op_adjoint(const DiscreteOperator& op) {
  return {op.grid, op.matrix.transpose()};
}

DiscreteOperator op_sum(const DiscreteOperator& x, const DiscreteOperator& y, double cx,
                        double cy) {
  require_same_grid(x, y);
  return {x.grid, cx * x.matrix + cy * y.matrix};
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw DimensionError("singular values need a square matrix");
  if (m.rows() > kMaxSvdDim) {
    throw SizeError("SVD limited to " + std::to_string(kMaxSvdDim) + " rows, got " +
                    std::to_string(m.rows()));
  }
  if (m.size() == 0) return {};
  if (!m.allFinite()) throw NumericalError("SVD input has non-finite entries");
  const double scale = m.cwiseAbs().maxCoeff();
  Eigen::VectorXd s;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * scale) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
      throw NumericalError("symmetric eigensolver failed to converge (dim " +
                           std::to_string(m.rows()) + ")");
    }
    s = eig.eigenvalues().cwiseAbs();
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    if (svd.info() != Eigen::Success) {
      throw NumericalError("SVD failed to converge (dim " + std::to_string(m.rows()) +
                           ", max entry " + std::to_string(scale) + ")");
    }
    s = svd.singularValues();
  }
  std::sort(s.data(), s.data() + s.size(), std::greater<>());
  return s;
}

Eigen::VectorXd singular_values(const DiscreteOperator& op) {
  return singular_values(op.matrix);
}

double trace_norm(const DiscreteOperator& op) { return singular_values(op).sum(); }

double operator_norm(const DiscreteOperator& op) {
  const Eigen::VectorXd s = singular_values(op);
  return s.size() ? s[0] : 0.0;
}

KernelOperators kernel_operators(const MatrixKernel& kernel, GridPtr grid) {
  KernelOperators ops;
  ops.grid = grid;
  ops.lambda = kernel.lambda;
  ops.A = discretize_kernel(kernel.a, grid);
  ops.A_dag = op_adjoint(ops.A);
  ops.D = discretize_kernel(kernel.d, grid);
  ops.B = discretize_kernel(kernel.b_smooth, grid);
  if (kernel.b_jump != 0.0) {
    ops.B = op_sum(ops.B, discretize_sign_kernel(grid), 1.0, kernel.b_jump);
  }
  return ops;
}

BlockOperator block_operator(const DiscreteOperator& A, const DiscreteOperator& D,
                             const DiscreteOperator& B, const DiscreteOperator& A_dag,
                             double lambda) {
  require_same_grid(A, D);
  require_same_grid(A, B);
  require_same_grid(A, A_dag);
  const int n = A.size();
  BlockOperator k;
  k.grid = A.grid;
  k.lambda = lambda;
  k.matrix.resize(2 * n, 2 * n);
  k.matrix.topLeftCorner(n, n) = lambda * A.matrix;
  k.matrix.topRightCorner(n, n) = lambda * D.matrix;
  k.matrix.bottomLeftCorner(n, n) = lambda * B.matrix;
  k.matrix.bottomRightCorner(n, n) = lambda * A_dag.matrix;
  return k;
}

BlockOperator block_operator(const KernelOperators& ops) {
  return block_operator(ops.A, ops.D, ops.B, ops.A_dag, ops.lambda);
}

Eigen::Matrix2d block_traces(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows()) / 2;
  Eigen::Matrix2d w;
  w << m.topLeftCorner(n, n).trace(), m.topRightCorner(n, n).trace(),
      m.bottomLeftCorner(n, n).trace(), m.bottomRightCorner(n, n).trace();
  return w;
}

std::vector<Eigen::Matrix2d> w_matrices(const BlockOperator& k_op, int k_max) {
  if (k_max < 1) throw ValidationError("k_max must be at least 1");
  std::vector<Eigen::Matrix2d> out;
  Eigen::MatrixXd power = k_op.matrix;
  out.push_back(block_traces(power));
  for (int k = 2; k <= k_max; ++k) {
    power = power * k_op.matrix;
    out.push_back(block_traces(power));
  }
  return out;
}

double identity_defect(const Eigen::Matrix2d& w) {
  const double scale = std::max(std::abs(w(0, 0)), std::abs(w(1, 1)));
  const double defect = std::max({std::abs(w(0, 1)), std::abs(w(1, 0)),
                                  std::abs(w(0, 0) - w(1, 1))});
  if (scale == 0.0) return defect == 0.0 ? 0.0 : INFINITY;
  return defect / scale;
}

StepFunction::StepFunction(std::vector<StepPiece> pieces) : pieces_(std::move(pieces)) {
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const StepPiece& p = pieces_[i];
    if (!std::isfinite(p.lambda) || p.lambda == 0.0) {
      throw ValidationError("step piece " + std::to_string(i) + " has a zero or non-finite height");
    }
    if (!(std::isfinite(p.a) && std::isfinite(p.b) && p.a < p.b)) {
      throw ValidationError("step piece " + std::to_string(i) + " has an empty interval");
    }
    if (i > 0 && pieces_[i - 1].b > p.a) {
      throw ValidationError("step pieces must be ordered and disjoint");
    }
  }
}

StepFunction StepFunction::parse(const std::string& text) {
  std::vector<StepPiece> pieces;
  std::stringstream all(text);
  std::string item;
  while (std::getline(all, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::stringstream one(item);
    std::string field;
    std::vector<double> values;
    while (std::getline(one, field, ':')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(field, &used));
        if (field.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw ValidationError("bad step piece '" + item + "', expected lambda:a:b");
      }
    }
    if (values.size() != 3) throw ValidationError("bad step piece '" + item + "', expected lambda:a:b");
    pieces.push_back({values[0], values[1], values[2]});
  }
  if (pieces.empty()) throw ValidationError("empty step function");
  return StepFunction(std::move(pieces));
}

StepFunction StepFunction::indicator(double a, double b) {
  return StepFunction({{1.0, a, b}});
}

double StepFunction::operator()(double x) const {
  for (const StepPiece& p : pieces_) {
    if (x > p.a && x < p.b) return p.lambda;
  }
  return 0.0;
}

StepFunction StepFunction::scaled(double L) const {
  if (!(L > 0.0)) throw ValidationError("scale must be positive");
  std::vector<StepPiece> out = pieces_;
  for (StepPiece& p : out) {
    p.a *= L;
    p.b *= L;
  }
  return StepFunction(std::move(out));
}

StepFunction StepFunction::times(double c) const {
  std::vector<StepPiece> out = pieces_;
  for (StepPiece& p : out) p.lambda *= c;
  return StepFunction(std::move(out));
}

std::vector<double> StepFunction::breakpoints() const {
  std::vector<double> out;
  for (const StepPiece& p : pieces_) {
    if (out.empty() || out.back() != p.a) out.push_back(p.a);
    out.push_back(p.b);
  }
  return out;
}

std::string StepFunction::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (i) os << ',';
    os << pieces_[i].lambda << ':' << pieces_[i].a << ':' << pieces_[i].b;
  }
  return os.str();
}

}  // namespace pfclt
