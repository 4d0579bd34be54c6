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


#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "pfclt/cumulants.hpp"
#include "pfclt/errors.hpp"
#include "pfclt/frcp.hpp"
#include "pfclt/kernels.hpp"
#include "pfclt/special.hpp"

using namespace pfclt;
using std::numbers::pi;

namespace {

// Cumulants of a sum of independent Bernoulli(mu_i) variables.
std::vector<double> bernoulli_cumulants(const std::vector<double>& mu) {
  std::vector<double> c(4, 0.0);
  for (double p : mu) {
    const double q = 1.0 - p;
    c[0] += p;
    c[1] += p * q;
    c[2] += p * q * (1.0 - 2.0 * p);
    c[3] += p * q * (1.0 - 6.0 * p * q);
  }
  return c;
}

// Var of the count on (-L, L) from the pair correlation in one variable:
// lambda 2L + int_{-2L}^{2L} (2L - |u|) (rho2(0, u) - lambda^2) du.
double variance_oracle(const MatrixKernel& k, double L) {
  auto integrand = [&](double u) {
    const double rho2 = correlation({{0.0, u}, k});
    return (2.0 * L - u) * (rho2 - k.lambda * k.lambda);
  };
  return k.lambda * 2.0 * L + 2.0 * oracle::adaptive_simpson(integrand, 0.0, 2.0 * L, 1e-12);
}

}  // namespace

TEST_CASE("stirling numbers") {
  CHECK(stirling_v(1, 1) == 1);
  CHECK(stirling_v(3, 2) == 3);
  CHECK(stirling_v(4, 2) == 7);
  CHECK(stirling_v(5, 0) == 0);
  for (int n = 1; n <= 8; ++n) {
    for (int k = 1; k <= n; ++k) {
      CHECK(static_cast<double>(stirling_v(n, k)) == doctest::Approx(oracle::composition_sum(n, k)));
    }
  }
  CHECK(to_string(stirling_v(30, 15)) == "12879868072770626040000");
  CHECK_THROWS_AS(stirling_v(31, 2), ValidationError);
  CHECK_THROWS_AS(stirling_v(3, 4), ValidationError);
}

TEST_CASE("cumulants of a Bernoulli superposition") {
  const std::vector<double> mu{0.9, 0.5, 0.31, 0.02};
  std::vector<double> v(4, 0.0);
  for (int k = 1; k <= 4; ++k) {
    for (double m : mu) v[k - 1] += std::pow(m, k);
  }
  const auto c = cumulants_from_traces(v, 4);
  const auto want = bernoulli_cumulants(mu);
  for (int n = 0; n < 4; ++n) CHECK(c[n] == doctest::Approx(want[n]).epsilon(1e-13));
  for (int n = 2; n <= 4; ++n) CHECK(telescoped_cumulant(v, n) == doctest::Approx(c[n - 1]).epsilon(1e-13));
  CHECK_THROWS_AS(cumulants_from_traces(v, 5), ValidationError);
  CHECK_THROWS_AS(cumulants_from_traces(std::vector<double>(9, 0.1), 9), ValidationError);
}

TEST_CASE("first two cumulants from traces") {
  for (const MatrixKernel& k : {sine4_kernel(), sine1_kernel()}) {
    INFO(to_string(k.variant));
    const double L = 10.0;
    const CumulantReport r = cumulant_counts(k, L, 4);
    CHECK(r.c_n[0] == doctest::Approx(2.0 * L * k.lambda).epsilon(1e-10));
    const Moments m = expectation_variance(k, L);
    CHECK(r.c_n[1] == doctest::Approx(m.variance).epsilon(1e-6));
    CHECK(r.normalized.size() == 4);
    CHECK(r.normalized[1] == doctest::Approx(1.0));
  }
}

TEST_CASE("first trace is the expected count") {
  CHECK(v_k_traces(sine4_kernel(), 5.0, 16, 1)[0] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(v_k_traces(sine1_kernel(), 5.0, 16, 1)[0] == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("touching pieces with equal heights are one interval") {
  const MatrixKernel k = sine4_kernel();
  const Moments split = expectation_variance(k, StepFunction::parse("1:0:1,1:1:2"), 7.0);
  const Moments whole = expectation_variance(k, StepFunction::indicator(0.0, 2.0), 7.0);
  CHECK(split.expectation == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(split.variance == doctest::Approx(whole.variance).epsilon(1e-8));
}

TEST_CASE("variance by direct quadrature against a one-dimensional oracle") {
  for (const MatrixKernel& k : {sine4_kernel(), sine1_kernel()}) {
    for (double L : {0.5, 3.0, 7.0}) {
      INFO(to_string(k.variant), " L=", L);
      const Moments m = expectation_variance(k, L);
      CHECK(m.expectation == doctest::Approx(2.0 * L * k.lambda).epsilon(1e-12));
      CHECK(m.variance == doctest::Approx(variance_oracle(k, L)).epsilon(1e-9));
    }
  }
}

TEST_CASE("touching intervals from counting variances") {
  // Var(X_A - X_B) = 2 Var(X_A) + 2 Var(X_B) - Var(X_A + X_B) with stationarity.
  const MatrixKernel k = sine4_kernel();
  const double L = 6.0;
  const Moments step = expectation_variance(k, StepFunction::parse("1:0:1,-1:1:2"), L);
  const double half = expectation_variance(k, L / 2.0).variance;
  const double whole = expectation_variance(k, L).variance;
  CHECK(step.expectation == doctest::Approx(0.0).scale(1.0));
  CHECK(step.variance == doctest::Approx(4.0 * half - whole).epsilon(1e-9));
}

TEST_CASE("linear statistic of an indicator equals the count") {
  for (const MatrixKernel& k : {sine4_kernel(), sine1_kernel()}) {
    INFO(to_string(k.variant));
    const double L = 6.0;
    const CumulantReport counts = cumulant_counts(k, L, 5);
    const CumulantReport lin = cumulant_linear_stat(k, StepFunction::indicator(-1.0, 1.0), L, 5);
    for (int n = 1; n <= 5; ++n) {
      // Scale: the largest term of the trace expansion of c_n.
      double scale = 0.0;
      for (int j = 1; j <= n; ++j) {
        scale = std::max(scale, oracle::factorial(j - 1) * oracle::composition_sum(n, j) *
                                    std::abs(counts.v_k[j - 1]));
      }
      CHECK(std::abs(lin.c_n[n - 1] - counts.c_n[n - 1]) <= 1e-8 * scale);
    }
  }
}

TEST_CASE("linear statistic cumulants are homogeneous") {
  const MatrixKernel k = sine1_kernel();
  const double L = 4.0;
  const CumulantReport base = cumulant_linear_stat(k, StepFunction::parse("1:-1:0,0.5:0:1"), L, 4);
  const CumulantReport scaled = cumulant_linear_stat(k, StepFunction::parse("-2:-1:0,-1:0:1"), L, 4);
  for (int n = 1; n <= 4; ++n) {
    CHECK(scaled.c_n[n - 1] == doctest::Approx(std::pow(-2.0, n) * base.c_n[n - 1]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(cumulant_linear_stat(k, StepFunction::indicator(0, 1), L, 7), SizeError);
}

TEST_CASE("trace decomposition reproduces the traces") {
  for (const MatrixKernel& k : {sine4_kernel(), sine1_kernel()}) {
    for (int order : {2, 3, 4}) {
      INFO(to_string(k.variant), " k=", order);
      const DecompositionReport r = trace_decomposition_check(k, 10.0, order, 16);
      CHECK(r.relative_residual <= 1e-6);
      CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(trace_decomposition_check(sine4_kernel(), 5.0, 5, 16), ValidationError);
}

TEST_CASE("trace decomposition with vanishing off-diagonal blocks") {
  GridPtr g = domain_grid(4.0, 16);
  KernelOperators ops = kernel_operators(sine1_kernel(), g);
  ops.D = zero_operator(g);
  ops.B = zero_operator(g);
  ops.A_dag = ops.A;
  FrcpData data;
  data.lambda = ops.lambda;
  for (int order : {2, 3, 4}) {
    const DecompositionReport r = trace_decomposition_check(ops, data, order);
    for (double c : r.p_k) CHECK(c == 0.0);
    CHECK(r.finite_rank_part == doctest::Approx(0.0).scale(1.0));
    Eigen::MatrixXd p = ops.A.matrix;
    for (int i = 1; i < order; ++i) p = p * ops.A.matrix;
    CHECK(r.lhs == doctest::Approx(p.trace()).epsilon(1e-10));
    CHECK(r.relative_residual <= 1e-10);
  }
}

TEST_CASE("trace powers are refined consistently") {
  const MatrixKernel k = sine1_kernel();
  const auto coarse = v_k_traces(k, 8.0, 16, 4);
  const auto fine = v_k_traces(k, 8.0, 32, 4);
  for (int i = 0; i < 4; ++i) CHECK(fine[i] == doctest::Approx(coarse[i]).epsilon(1e-5));
  CHECK_THROWS_AS(v_k_traces(k, 300.0, 16, 4), SizeError);
}

TEST_CASE("normalized cumulants") {
  CumulantReport r;
  r.variance = 4.0;
  r.c_n = {1.0, 4.0, 2.0, -8.0};
  const auto d = clt_diagnostic(r);
  REQUIRE(d.size() == 2);
  CHECK(d[0] == doctest::Approx(0.25));
  CHECK(d[1] == doctest::Approx(-0.5));
  r.c_n = {0.0, 4.0, 0.0, 0.0, 0.0};
  for (double x : clt_diagnostic(r)) CHECK(x == 0.0);
  r.variance = 0.0;
  CHECK_THROWS_AS(clt_diagnostic(r), ValidationError);
}

TEST_CASE("log coefficients and slope fit") {
  CHECK(*variance_log_coefficient(sine4_kernel(), std::nullopt) == doctest::Approx(1.0 / (2 * pi * pi)));
  CHECK(*variance_log_coefficient(sine1_kernel(), std::nullopt) == doctest::Approx(2.0 / (pi * pi)));
  const auto touching = StepFunction::parse("1:0:1,-1:1:2");
  CHECK(*variance_log_coefficient(sine4_kernel(), touching) == doctest::Approx(3.0 / (2 * pi * pi)));
  const auto apart = StepFunction::parse("1:0:1,1:2:3");
  CHECK(*variance_log_coefficient(sine4_kernel(), apart) == doctest::Approx(1.0 / (pi * pi)));
  CHECK_FALSE(variance_log_coefficient(sine1_kernel(), touching).has_value());

  const std::vector<double> x{2.0, 5.0, 11.0, 40.0};
  std::vector<double> y, lx;
  for (double v : x) {
    y.push_back(0.3 * std::log(v) + 0.01 * v);
    lx.push_back(std::log(v));
  }
  CHECK(log_slope(x, y) == doctest::Approx(oracle::slope(lx, y)).epsilon(1e-12));
  CHECK_THROWS_AS(log_slope({1.0}, {1.0}), ValidationError);
}

TEST_CASE("projection defect grows like the sine-kernel count variance") {
  // Tr(A - A^2) for the sine kernel on an interval of length 2L grows like
  // log(L) / pi^2.
  const std::vector<double> Ls{10.0, 20.0, 40.0};
  std::vector<double> d;
  for (double L : Ls) d.push_back(projection_defect_norm(sine4_kernel(), L, 16));
  CHECK(log_slope(Ls, d) == doctest::Approx(1.0 / (pi * pi)).epsilon(0.02));
  CHECK(projection_defect_norm(sine1_kernel(), 10.0, 16) == doctest::Approx(d[0]).epsilon(1e-12));
  CHECK(log_log_slope({1.0, std::exp(1.0)}, {2.0, 2.0 * std::exp(3.0)}) == doctest::Approx(3.0));
  CHECK_THROWS_AS(log_log_slope({1.0, 2.0}, {1.0, 0.0}), ValidationError);
}
