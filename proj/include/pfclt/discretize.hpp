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
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pfclt/kernels.hpp"
#include "pfclt/quadrature.hpp"

namespace pfclt {

using GridPtr = std::shared_ptr<const Grid>;

/// Gauss-Legendre grid on (-L, L) with at least `density` nodes per unit
/// length and at least kMinGridNodes nodes.
GridPtr domain_grid(double L, double density = kDefaultDensity);
GridPtr share(Grid grid);

/// Integral operator in the weight-symmetrized representation
/// matrix(i, j) = sqrt(w_i) k(x_i, x_j) sqrt(w_j).
struct DiscreteOperator {
  GridPtr grid;
  Eigen::MatrixXd matrix;

  int size() const { return static_cast<int>(matrix.rows()); }
  /// Kernel value recovered at a pair of nodes.
  double kernel_at(int i, int j) const;
};

DiscreteOperator discretize_kernel(const ScalarKernel& k, GridPtr grid);

/// sgn(x - y) by product integration: within each panel the jump is
/// integrated exactly against the panel's interpolating polynomial. The
/// result is exactly antisymmetric.
DiscreteOperator discretize_sign_kernel(GridPtr grid);

DiscreteOperator zero_operator(GridPtr grid);
DiscreteOperator identity_operator(GridPtr grid);
/// Multiplication by f, i.e. diag(f(x_i)).
DiscreteOperator multiplication_operator(const std::function<double(double)>& f,
                                         GridPtr grid);
/// Diagonal 0/1 projection onto the nodes inside (a, b).
DiscreteOperator chi_projection(double a, double b, GridPtr grid);

/// Function samples in the same embedding: v_i = sqrt(w_i) f(x_i), so that
/// the Euclidean inner product approximates the L2 one.
Eigen::VectorXd sample_function(const std::function<double(double)>& f,
                                const Grid& grid);
Eigen::MatrixXd outer_kernel(const std::function<double(double)>& f,
                             const std::function<double(double)>& g,
                             const Grid& grid);

void require_same_grid(const DiscreteOperator& x, const DiscreteOperator& y);
double op_trace(const DiscreteOperator& op);
DiscreteOperator op_product(const DiscreteOperator& x, const DiscreteOperator& y);
DiscreteOperator op_adjoint(const DiscreteOperator& op);
DiscreteOperator op_sum(const DiscreteOperator& x, const DiscreteOperator& y,
                        double cx = 1.0, double cy = 1.0);

inline constexpr int kMaxSvdDim = 4096;

/// Singular values, descending.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& m);
Eigen::VectorXd singular_values(const DiscreteOperator& op);
double trace_norm(const DiscreteOperator& op);
/// Largest singular value.
double operator_norm(const DiscreteOperator& op);

/// The four scalar operators of a matrix kernel restricted to the grid.
struct KernelOperators {
  GridPtr grid;
  double lambda = 1.0;
  DiscreteOperator A;
  DiscreteOperator A_dag;
  DiscreteOperator D;
  DiscreteOperator B;
};

KernelOperators kernel_operators(const MatrixKernel& kernel, GridPtr grid);

/// lambda * [[A, D], [B, A_dag]] acting on pairs of grid functions.
struct BlockOperator {
  GridPtr grid;
  double lambda = 1.0;
  Eigen::MatrixXd matrix;

  int half() const { return static_cast<int>(matrix.rows()) / 2; }
};

BlockOperator block_operator(const DiscreteOperator& A, const DiscreteOperator& D,
                             const DiscreteOperator& B, const DiscreteOperator& A_dag,
                             double lambda);
BlockOperator block_operator(const KernelOperators& ops);

/// 2x2 matrix of block traces of a 2n x 2n matrix.
Eigen::Matrix2d block_traces(const Eigen::MatrixXd& m);
/// Block traces of K^k for k = 1..k_max (entry k - 1).
std::vector<Eigen::Matrix2d> w_matrices(const BlockOperator& k_op, int k_max);
/// max(|W12|, |W21|, |W11 - W22|) / max(|W11|, |W22|).
double identity_defect(const Eigen::Matrix2d& w);

struct StepPiece {
  double lambda = 1.0;
  double a = 0.0;
  double b = 1.0;
};

/// phi = sum of lambda_i times the indicator of (a_i, b_i); pieces ordered
/// and disjoint.
class StepFunction {
 public:
  StepFunction() = default;
  explicit StepFunction(std::vector<StepPiece> pieces);

  /// Parses "lambda:a:b,lambda:a:b".
  static StepFunction parse(const std::string& text);
  static StepFunction indicator(double a, double b);

  const std::vector<StepPiece>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }
  double operator()(double x) const;
  /// x -> phi(x / L).
  StepFunction scaled(double L) const;
  StepFunction times(double c) const;
  std::vector<double> breakpoints() const;
  double support_left() const { return pieces_.front().a; }
  double support_right() const { return pieces_.back().b; }
  std::string to_string() const;

 private:
  std::vector<StepPiece> pieces_;
};

}  // namespace pfclt
