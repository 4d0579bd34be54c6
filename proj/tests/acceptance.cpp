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


// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Tolerances are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pfclt/cumulants.hpp"
#include "pfclt/discretize.hpp"
#include "pfclt/ensembles.hpp"
#include "pfclt/frcp.hpp"
#include "pfclt/kernels.hpp"
#include "pfclt/quadrature.hpp"
#include "pfclt/skewlin.hpp"
#include "pfclt/special.hpp"

using namespace pfclt;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

constexpr double kPfaffianDetTol = 1e-9;
constexpr double kPfaffianBruteTol = 1e-10;
constexpr double kIntensityTol = 1e-12;
constexpr double kCountSlopeTol = 0.10;
constexpr double kStepSlopeTol = 0.15;
constexpr double kRankTol = 1e-6;
constexpr double kClosedFormTol = 1e-5;
constexpr int kFrcpNodes = 1024;
constexpr double kDecompositionTol = 1e-4;
constexpr double kIdentityTol = 1e-6;
constexpr double kVarianceTol = 1e-6;
constexpr double kPathTol = 1e-8;
constexpr double kCltDensity = 8.0;
constexpr double kMeanSe = 3.0;
constexpr double kMcSlopeTol = 0.25;
constexpr double kKsThreshold = 0.02;
constexpr std::uint64_t kMcSeed = 20260101;

const std::vector<double> kScanLs{25.0, 50.0, 100.0, 200.0};

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rel(double value, double target) { return std::abs(value - target) / std::abs(target); }

Outcome pfaffians() {
  std::mt19937_64 rng(20260101);
  double worst_det = 0.0, worst_brute = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + 2 * (t % 6);
    const Eigen::MatrixXd m = oracle::random_skew(n, rng);
    const SkewMatrix s(m);
    const double pf = pfaffian(s);
    const double det = determinant(m);
    worst_det = std::max(worst_det, rel(pf * pf, det));
    worst_brute = std::max(worst_brute, rel(pf, pfaffian_bruteforce(s)));
  }
  return {worst_det <= kPfaffianDetTol && worst_brute <= kPfaffianBruteTol,
          "200 matrices, dims 2..12: max rel |pf^2-det|=" + fmt("%.2e", worst_det) +
              " max rel |pf-brute|=" + fmt("%.2e", worst_brute)};
}

Outcome intensities() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double x = u(rng);
    worst = std::max(worst, std::abs(correlation({{x}, sine4_kernel()}) - 0.5));
    worst = std::max(worst, std::abs(correlation({{x}, sine1_kernel()}) - 1.0));
  }
  return {worst <= kIntensityTol, "max |rho1 - lambda| over 10 points=" + fmt("%.2e", worst)};
}

Outcome variance_slope(const MatrixKernel& k, const std::optional<StepFunction>& step,
                       double target, double tol) {
  std::vector<double> vars;
  std::string values;
  for (double L : kScanLs) {
    const Moments m = step ? expectation_variance(k, *step, L) : expectation_variance(k, L);
    vars.push_back(m.variance);
    values += fmt(" %.6f", m.variance);
  }
  const double slope = log_slope(kScanLs, vars);
  return {rel(slope, target) <= tol, "Var(L=25..200):" + values + " slope=" +
                                         fmt("%.6f", slope) + " target=" + fmt("%.6f", target) +
                                         " rel=" + fmt("%.4f", rel(slope, target))};
}

Outcome step_slopes() {
  const Outcome touching = variance_slope(sine4_kernel(), StepFunction::parse("1:0:1,-1:1:2"),
                                          3.0 / (2.0 * kPi2), kStepSlopeTol);
  const Outcome apart = variance_slope(sine4_kernel(), StepFunction::parse("1:0:1,1:2:3"),
                                       1.0 / kPi2, kStepSlopeTol);
  return {touching.pass && apart.pass,
          "touching chi(0,1)-chi(1,2): " + touching.detail + "; separated chi(0,1)+chi(2,3): " +
              apart.detail};
}

Outcome frcp_ranks() {
  double worst_ratio = 0.0, worst_residual = 0.0;
  bool pass = true;
  for (const MatrixKernel& k : {sine4_kernel(), sine1_kernel()}) {
    for (double L : {10.0, 25.0, 50.0}) {
      for (const IdentityCheck& c : frcp_identity_checks(k, L, kFrcpNodes)) {
        // Only the commutator carries the rank requirement; both carry the residual.
        if (c.name == "commutator") {
          worst_ratio = std::max(worst_ratio, c.report.tail_ratio);
          pass = pass && c.report.tail_ratio <= kRankTol;
        }
        worst_residual = std::max(worst_residual, c.report.residual);
        pass = pass && c.report.residual <= kClosedFormTol;
      }
    }
  }
  return {pass, "max sigma_(N+1)/sigma_1=" + fmt("%.2e", worst_ratio) +
                    " max closed-form residual=" + fmt("%.2e", worst_residual)};
}

Outcome decomposition() {
  double worst = 0.0;
  for (const MatrixKernel& k : {sine4_kernel(), sine1_kernel()}) {
    for (int order : {2, 3}) {
      worst = std::max(worst, trace_decomposition_check(k, 25.0, order).relative_residual);
    }
  }
  return {worst <= kDecompositionTol, "L=25, k=2,3, both kernels: max rel residual=" + fmt("%.2e", worst)};
}

Outcome w_identity() {
  double worst = 0.0;
  for (const MatrixKernel& k : {sine4_kernel(), sine1_kernel()}) {
    const BlockOperator K = block_operator(kernel_operators(k, domain_grid(25.0)));
    const auto ws = w_matrices(K, 4);
    for (int order : {2, 3, 4}) worst = std::max(worst, identity_defect(ws[order - 1]));
  }
  return {worst <= kIdentityTol, "L=25, k=2,3,4, both kernels: max defect=" + fmt("%.2e", worst)};
}

Outcome cumulant_consistency() {
  double worst_var = 0.0, worst_path = 0.0;
  for (const MatrixKernel& k : {sine4_kernel(), sine1_kernel()}) {
    const double L = 25.0;
    const CumulantReport counts = cumulant_counts(k, L, 5);
    worst_var = std::max(worst_var, rel(counts.c_n[1], expectation_variance(k, L).variance));
    const CumulantReport lin = cumulant_linear_stat(k, StepFunction::indicator(-1.0, 1.0), L, 5);
    for (int n = 1; n <= 5; ++n) {
      // Relative to the largest term of the trace expansion of c_n.
      double scale = 0.0;
      for (int j = 1; j <= n; ++j) {
        scale = std::max(scale, oracle::factorial(j - 1) * oracle::composition_sum(n, j) *
                                    std::abs(counts.v_k[j - 1]));
      }
      worst_path = std::max(worst_path, std::abs(lin.c_n[n - 1] - counts.c_n[n - 1]) / scale);
    }
  }
  return {worst_var <= kVarianceTol && worst_path <= kPathTol,
          "L=25: c2 vs Var-For rel=" + fmt("%.2e", worst_var) +
              "; linear-statistic vs counting path, n<=5, rel=" + fmt("%.2e", worst_path)};
}

Outcome clt_decay() {
  bool pass = true;
  std::string detail;
  for (const MatrixKernel& k : {sine4_kernel(), sine1_kernel()}) {
    std::vector<std::vector<double>> norm;
    for (double L : kScanLs) norm.push_back(clt_diagnostic(cumulant_counts(k, L, 4, kCltDensity)));
    for (int n : {3, 4}) {
      detail += (detail.empty() ? "" : "; ") + to_string(k.variant) + " |c" + std::to_string(n) +
                "|/Var^" + (n == 3 ? "1.5" : "2") + ":";
      bool decreasing = true;
      for (std::size_t i = 0; i < norm.size(); ++i) {
        const double a = std::abs(norm[i][n - 3]);
        detail += fmt(" %.3e", a);
        if (i > 0) decreasing = decreasing && a < std::abs(norm[i - 1][n - 3]);
      }
      detail += decreasing ? " (decreasing)" : " (not decreasing)";
      pass = pass && decreasing;
    }
  }
  return {pass, detail};
}

Outcome is_norm() {
  auto sq = [](double x) {
    const double v = sine_integral_is(x) - 0.5;
    return v * v;
  };
  bool pass = true;
  double previous = 0.0;
  std::string detail = "norms:";
  for (double T : {1.0, 10.0, 100.0, 1000.0, 10000.0}) {
    const double v = integrate_1d(sq, 0.0, T);
    pass = pass && v <= 1.0 && v > previous;
    previous = v;
    detail += fmt(" %.8f", v);
  }
  return {pass, detail};
}

Outcome monte_carlo() {
  bool pass = true;
  std::string detail;
  const std::vector<double> Ls{8.0, 16.0, 32.0};
  for (int beta : {4, 1}) {
    EnsembleConfig c;
    c.beta = beta;
    c.matrix_size = 2000;
    c.samples = 10000;
    c.seed = kMcSeed;
    const auto rows = fluctuation_scan(c, Ls);
    const MatrixKernel k = beta == 4 ? sine4_kernel() : sine1_kernel();
    std::vector<double> vars;
    double worst_z = 0.0;
    for (const CountSample& s : rows) {
      vars.push_back(s.variance);
      const double expected = 2.0 * k.lambda * s.L;
      worst_z = std::max(worst_z, std::abs(s.mean - expected) / s.standard_error);
    }
    const double slope = log_slope(Ls, vars);
    const double target = *variance_log_coefficient(k, std::nullopt);
    const double ks = rows.back().ks;
    const bool ok = worst_z <= kMeanSe && rel(slope, target) <= kMcSlopeTol && ks <= kKsThreshold;
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + std::string("beta=") + std::to_string(beta) +
              ": max mean z=" + fmt("%.2f", worst_z) + " slope=" + fmt("%.4f", slope) +
              " target=" + fmt("%.4f", target) + " rel=" + fmt("%.3f", rel(slope, target)) +
              " KS(L=32)=" + fmt("%.4f", ks) + " midpoint KS=" + fmt("%.4f", rows.back().ks_midpoint);
  }
  return {pass, detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "pfaffian correctness", pfaffians},
      {2, "one-point intensities", intensities},
      {3, "variance slope, sine4 counts",
       [] { return variance_slope(sine4_kernel(), std::nullopt, 1.0 / (2.0 * kPi2), kCountSlopeTol); }},
      {4, "variance slope, sine1 counts",
       [] { return variance_slope(sine1_kernel(), std::nullopt, 2.0 / kPi2, kCountSlopeTol); }},
      {5, "step-function variance slopes", step_slopes},
      {6, "commutator rank and closed form", frcp_ranks},
      {7, "trace decomposition", decomposition},
      {8, "W_k identity", w_identity},
      {9, "cumulant consistency", cumulant_consistency},
      {10, "normalized cumulant decay", clt_decay},
      {11, "norm of (IS - 1/2) on (0, T)", is_norm},
      {12, "Monte Carlo fluctuations", monte_carlo},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %s: %s [%s] (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
