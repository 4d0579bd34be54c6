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

#include "pfclt/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "pfclt/errors.hpp"

namespace pfclt {

Count stirling_v(int n, int k) {
  if (n < 0 || k < 0 || k > n || n > kMaxStirlingN) {
    throw ValidationError("stirling_v needs 0 <= k <= n <= " + std::to_string(kMaxStirlingN) +
                          ", got n=" + std::to_string(n) + " k=" + std::to_string(k));
  }
  // Row-by-row table; v(0, k) = v(n, 0) = 0 and v(1, 1) = 1.
  std::vector<Count> row(n + 1, 0);
  if (n >= 1) row[1] = 1;
  for (int m = 2; m <= n; ++m) {
    for (int j = m; j >= 1; --j) {
      Count scaled = 0;
      Count next = 0;
      if (__builtin_mul_overflow(static_cast<Count>(j), row[j], &scaled) ||
          __builtin_add_overflow(row[j - 1], scaled, &next)) {
        throw SizeError("stirling_v overflow at n=" + std::to_string(m));
      }
      row[j] = next;
    }
  }
  return row[k];
}

std::string to_string(Count c) {
  if (c == 0) return "0";
  std::string s;
  while (c > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(c % 10)));
    c /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

namespace {

// Tr(X Y) without forming the product.
double trace_of_product(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  return x.cwiseProduct(y.transpose()).sum();
}

// Checked before assembly: the operators alone would need gigabytes.
void require_block_dim(long long dim) {
  if (dim > kMaxBlockDim) {
    throw SizeError("block operator of dimension " + std::to_string(dim) + " exceeds " +
                    std::to_string(kMaxBlockDim) + "; lower the grid density");
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

std::vector<double> v_k_traces(const BlockOperator& k_op, int k_max) {
  if (k_max < 1 || k_max > kMaxTracePower) {
    throw ValidationError("k_max must be in [1, " + std::to_string(kMaxTracePower) + "]");
  }
  require_block_dim(k_op.matrix.rows());
  const int half = (k_max + 1) / 2;
  // powers[p] = K^p for p = 1..half.
  std::vector<Eigen::MatrixXd> powers(half + 1);
  powers[1] = k_op.matrix;
  if (half >= 2) powers[2] = powers[1] * powers[1];
  if (half >= 3) powers[3] = powers[2] * powers[1];
  if (half >= 4) powers[4] = powers[2] * powers[2];
  std::vector<double> v;
  v.push_back(0.5 * powers[1].trace());
  for (int k = 2; k <= k_max; ++k) {
    const int a = k / 2;
    v.push_back(0.5 * trace_of_product(powers[a], powers[k - a]));
  }
  return v;
}

std::vector<double> v_k_traces(const MatrixKernel& kernel, double L, double density,
                               int k_max) {
  GridPtr grid = domain_grid(L, density);
  require_block_dim(2LL * grid->size());
  return v_k_traces(block_operator(kernel_operators(kernel, grid)), k_max);
}

double telescoped_cumulant(const std::vector<double>& v, int n) {
  if (n < 2 || n > static_cast<int>(v.size())) throw ValidationError("telescoped form needs 2 <= n <= |V|");
  double c = 0.0;
  for (int k = 2; k <= n; ++k) {
    const double sign = (k % 2 == 0) ? -1.0 : 1.0;
    c += sign * factorial(k - 1) * static_cast<double>(stirling_v(n - 1, k - 1)) *
         (v[k - 1] - v[k - 2]);
  }
  return c;
}

std::vector<double> cumulants_from_traces(const std::vector<double>& v, int n_max,
                                          double tolerance) {
  if (n_max < 1 || n_max > kMaxCumulantOrder || n_max > static_cast<int>(v.size())) {
    throw ValidationError("n_max must be in [1, " + std::to_string(kMaxCumulantOrder) +
                          "] and at most the number of traces");
  }
  std::vector<double> c;
  for (int n = 1; n <= n_max; ++n) {
    double sum = 0.0;
    double scale = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double sign = (k % 2 == 1) ? 1.0 : -1.0;
      const double term = sign * factorial(k - 1) * static_cast<double>(stirling_v(n, k)) * v[k - 1];
      sum += term;
      scale = std::max(scale, std::abs(term));
    }
    if (n >= 2) {
      const double other = telescoped_cumulant(v, n);
      if (std::abs(other - sum) > tolerance * std::max(std::abs(sum), scale)) {
        throw ConsistencyError("cumulant c_" + std::to_string(n) + " disagrees between forms: " +
                               std::to_string(sum) + " vs " + std::to_string(other));
      }
    }
    c.push_back(sum);
  }
  return c;
}

namespace {

void fill_normalized(CumulantReport& r) {
  r.expectation = r.c_n.empty() ? 0.0 : r.c_n[0];
  r.variance = r.c_n.size() >= 2 ? r.c_n[1] : 0.0;
  r.normalized.clear();
  for (std::size_t i = 0; i < r.c_n.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    r.normalized.push_back(r.variance > 0.0 ? r.c_n[i] / std::pow(r.variance, n / 2.0) : NAN);
  }
}

}  // namespace

CumulantReport cumulant_counts(const MatrixKernel& kernel, double L, int n_max,
                               double density) {
  CumulantReport r;
  r.L = L;
  r.v_k = v_k_traces(kernel, L, density, n_max);
  r.c_n = cumulants_from_traces(r.v_k, n_max);
  fill_normalized(r);
  return r;
}

Moments expectation_variance(const MatrixKernel& kernel, const StepFunction& f, double L) {
  const StepFunction fl = f.scaled(L);
  const auto& pieces = fl.pieces();
  auto intensity = [&kernel](double x) { return kernel.lambda * kernel.a(x, x); };
  auto det = [&kernel](double x, double y) { return kernel.det(x, y); };
  Moments m;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const StepPiece& p = pieces[i];
    const double mass = integrate_1d(intensity, p.a, p.b);
    m.expectation += p.lambda * mass;
    m.variance += p.lambda * p.lambda * mass;
    for (std::size_t j = i; j < pieces.size(); ++j) {
      const StepPiece& q = pieces[j];
      const double weight = (i == j ? 1.0 : 2.0) * p.lambda * q.lambda;
      m.variance -= weight * integrate_box(det, p.a, p.b, q.a, q.b);
    }
  }
  return m;
}

Moments expectation_variance(const MatrixKernel& kernel, double L) {
  return expectation_variance(kernel, StepFunction::indicator(-1.0, 1.0), L);
}

CumulantReport cumulant_linear_stat(const MatrixKernel& kernel, const StepFunction& f,
                                    double L, int n_max, double density) {
  if (n_max < 1 || n_max > kMaxLinearStatOrder) {
    throw SizeError("cumulant_linear_stat needs 1 <= n_max <= " +
                    std::to_string(kMaxLinearStatOrder));
  }
  const StepFunction fl = f.scaled(L);
  const auto bps = fl.breakpoints();
  const double len = bps.back() - bps.front();
  GridPtr grid = share(make_panel_grid(bps, std::max(density, kMinGridNodes / len)));
  require_block_dim(2LL * grid->size());
  const BlockOperator K = block_operator(kernel_operators(kernel, grid));
  const int n = grid->size();
  Eigen::VectorXd fv(2 * n);
  for (int i = 0; i < n; ++i) fv[i] = fv[n + i] = fl(grid->nodes[i]);

  // M[l] = F^l K.
  std::vector<Eigen::MatrixXd> M(n_max + 1);
  for (int l = 1; l <= n_max; ++l) {
    M[l] = fv.array().pow(l).matrix().asDiagonal() * K.matrix;
  }

  CumulantReport r;
  r.L = L;
  for (int order = 1; order <= n_max; ++order) {
    double total = 0.0;
    // Depth-first over compositions, sharing prefix products.
    std::function<void(const Eigen::MatrixXd*, int, int, double)> walk =
        [&](const Eigen::MatrixXd* prefix, int remaining, int parts, double weight) {
          for (int l = 1; l <= remaining; ++l) {
            const double w = weight / factorial(l);
            if (l == remaining) {
              const int k = parts + 1;
              const double tr = prefix ? trace_of_product(*prefix, M[l]) : M[l].trace();
              const double sign = (k % 2 == 1) ? 1.0 : -1.0;
              total += sign * factorial(order) * w / k * tr;
            } else {
              const Eigen::MatrixXd next = prefix ? Eigen::MatrixXd(*prefix * M[l]) : M[l];
              walk(&next, remaining - l, parts + 1, w);
            }
          }
        };
    walk(nullptr, order, 0, 1.0);
    r.c_n.push_back(0.5 * total);
  }
  fill_normalized(r);
  return r;
}

std::vector<double> trace_polynomial(int k, double lambda, double alpha, double beta) {
  if (k < 2) throw ValidationError("trace polynomial needs k >= 2");
  using Poly = std::vector<double>;
  auto shift = [](const Poly& p, int by) {
    Poly out(p.size() + by, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) out[i + by] = p[i];
    return out;
  };
  auto add_into = [](Poly& acc, const Poly& p, double c) {
    if (acc.size() < p.size()) acc.resize(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) acc[i] += c * p[i];
  };
  std::vector<Poly> q(k + 1);
  q[0] = {1.0};
  q[1] = {0.0, 1.0};
  for (int m = 2; m <= k; ++m) {
    q[m] = shift(q[m - 1], 1);
    for (int n = 0; n <= m - 2; ++n) {
      add_into(q[m], shift(q[m - 2 - n], n + 2), alpha);
      add_into(q[m], shift(q[m - 2 - n], n + 1), beta);
    }
  }
  Poly r = q[k];
  for (double& c : r) c *= std::pow(lambda, k);
  r.resize(std::max<std::size_t>(r.size(), k + 1), 0.0);
  r[k] -= lambda;
  double scale = 0.0;
  for (double c : r) scale = std::max(scale, std::abs(c));
  const double tol = 1e-12 * std::max(scale, 1.0);
  if (std::abs(r[0]) > tol) throw ValidationError("trace polynomial does not vanish at 0");
  // r = t s(t); s = (1 - t) p(t).
  Poly s(r.begin() + 1, r.end());
  const int deg = static_cast<int>(s.size()) - 1;
  // Divide by (1 - t) = -(t - 1): synthetic division of s by (t - 1).
  Poly quotient(deg, 0.0);
  double carry = 0.0;
  for (int i = deg; i >= 1; --i) {
    carry = s[i] + carry;
    quotient[i - 1] = carry;
  }
  const double remainder = s[0] + carry;
  if (std::abs(remainder) > tol) {
    throw ValidationError("alpha + beta does not match lambda: trace polynomial has no (1 - t) factor");
  }
  for (double& c : quotient) c = -c;
  quotient.resize(std::max(k - 1, 1), 0.0);
  return quotient;
}

DecompositionReport trace_decomposition_check(const KernelOperators& ops,
                                              const FrcpData& data, int k) {
  if (k < 2 || k > 4) throw ValidationError("trace decomposition supports k in {2, 3, 4}");
  const Grid& grid = *ops.grid;
  const int n = grid.size();
  const double lambda = ops.lambda;
  if (lambda != data.lambda) throw ValidationError("FRCP data and operators disagree on lambda");

  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < data.f.size(); ++i) F += outer_kernel(data.f[i], data.g[i], grid);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < data.h.size(); ++i) H += outer_kernel(data.h[i], data.e[i], grid);

  const Eigen::MatrixXd& A = ops.A.matrix;
  const Eigen::MatrixXd& Ad = ops.A_dag.matrix;
  const Eigen::MatrixXd& D = ops.D.matrix;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

  std::vector<Eigen::MatrixXd> a_pow{I}, ad_pow{I};
  for (int p = 1; p <= k; ++p) {
    a_pow.push_back(a_pow.back() * A);
    ad_pow.push_back(ad_pow.back() * Ad);
  }
  // Excursion D A^dag^m B rewritten without B, split into the polynomial
  // piece and the finite-rank remainder.
  std::vector<Eigen::MatrixXd> exc_poly, exc_rank;
  for (int m = 0; m <= k - 2; ++m) {
    exc_poly.push_back((data.alpha * a_pow[2] + data.beta * A) * a_pow[m]);
    Eigen::MatrixXd rank_part = H * a_pow[m];
    for (int j = 1; j <= m; ++j) rank_part += D * ad_pow[m - j] * F * a_pow[j - 1];
    exc_rank.push_back(std::move(rank_part));
  }
  std::vector<Eigen::MatrixXd> full{I, A}, poly{I, A};
  for (int m = 2; m <= k; ++m) {
    Eigen::MatrixXd next_full = A * full[m - 1];
    Eigen::MatrixXd next_poly = A * poly[m - 1];
    for (int e = 0; e <= m - 2; ++e) {
      next_full += (exc_poly[e] + exc_rank[e]) * full[m - 2 - e];
      next_poly += exc_poly[e] * poly[m - 2 - e];
    }
    full.push_back(std::move(next_full));
    poly.push_back(std::move(next_poly));
  }

  DecompositionReport rep;
  rep.k = k;
  rep.L = grid.length() / 2.0;
  rep.p_k = trace_polynomial(k, lambda, data.alpha, data.beta);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (A + A.transpose()),
                                                     Eigen::EigenvaluesOnly);
  for (int i = 0; i < n; ++i) {
    const double mu = eig.eigenvalues()[i];
    double p = 0.0;
    for (int c = static_cast<int>(rep.p_k.size()) - 1; c >= 0; --c) p = p * mu + rep.p_k[c];
    rep.polynomial_part += lambda * std::pow(mu, k) + (mu - mu * mu) * p;
  }
  rep.finite_rank_part = std::pow(lambda, k) * (full[k] - poly[k]).trace();
  rep.rhs = rep.polynomial_part + rep.finite_rank_part;

  const BlockOperator K = block_operator(ops);
  Eigen::MatrixXd power = K.matrix;
  for (int p = 2; p <= k; ++p) power = power * K.matrix;
  rep.lhs = 0.5 * power.trace();
  rep.relative_residual = std::abs(rep.lhs - rep.rhs) / std::max(std::abs(rep.lhs), 1e-300);
  if (rep.lhs == 0.0 && rep.rhs == 0.0) rep.relative_residual = 0.0;
  return rep;
}

DecompositionReport trace_decomposition_check(const MatrixKernel& kernel, double L, int k,
                                              double density) {
  const FrcpData data = frcp_for(kernel, L);
  GridPtr grid = domain_grid(L, density);
  require_block_dim(2LL * grid->size());
  return trace_decomposition_check(kernel_operators(kernel, grid), data, k);
}

std::vector<double> clt_diagnostic(const CumulantReport& report) {
  if (!(report.variance > 0.0)) throw ValidationError("CLT diagnostic needs positive variance");
  std::vector<double> out;
  for (std::size_t i = 2; i < report.c_n.size(); ++i) {
    out.push_back(report.c_n[i] / std::pow(report.variance, (i + 1) / 2.0));
  }
  return out;
}

std::optional<double> variance_log_coefficient(const MatrixKernel& kernel,
                                               const std::optional<StepFunction>& step) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  if (!step) {
    if (kernel.variant == KernelVariant::Sine4) return 1.0 / (2.0 * pi2);
    if (kernel.variant == KernelVariant::Sine1) return 2.0 / pi2;
    return std::nullopt;
  }
  if (kernel.variant != KernelVariant::Sine4) return std::nullopt;
  double jumps = 0.0;
  for (double b : step->breakpoints()) {
    double left = 0.0, right = 0.0;
    for (const StepPiece& p : step->pieces()) {
      if (p.b == b) left = p.lambda;
      if (p.a == b) right = p.lambda;
    }
    jumps += (right - left) * (right - left);
  }
  return jumps / (4.0 * pi2);
}

double projection_defect_norm(const MatrixKernel& kernel, double L, double density) {
  GridPtr grid = domain_grid(L, density);
  if (grid->size() > kMaxSvdDim) throw SizeError("grid too large for a trace norm; lower the density");
  const DiscreteOperator A = kernel_operators(kernel, grid).A;
  return trace_norm(op_sum(A, op_product(A, A), 1.0, -1.0));
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> ly;
  for (double v : y) {
    if (!(v > 0.0)) throw ValidationError("log-log slope needs positive values");
    ly.push_back(std::log(v));
  }
  return log_slope(x, ly);
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("slope fit needs two or more points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (y[i] - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace pfclt
