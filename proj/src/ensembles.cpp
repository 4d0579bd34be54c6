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

#include "pfclt/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pfclt/errors.hpp"
#include "pfclt/parallel.hpp"

namespace pfclt {

void EnsembleConfig::validate() const {
  if (beta != 1 && beta != 4) throw ValidationError("beta must be 1 or 4");
  if (matrix_size < 200) throw ValidationError("matrix size must be at least 200");
  if (samples < 100) throw ValidationError("need at least 100 samples");
  if (!(L >= 1.0)) throw ValidationError("window half-width L must be at least 1");
}

Rng sample_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

Tridiagonal sample_tridiagonal(int beta, int n, Rng& rng) {
  if (beta <= 0) throw ValidationError("beta must be positive");
  if (n < 1) throw ValidationError("matrix size must be positive");
  const double inv = 1.0 / std::sqrt(static_cast<double>(beta));
  std::normal_distribution<double> normal(0.0, std::sqrt(2.0));
  Tridiagonal t;
  t.diagonal.resize(n);
  t.off.resize(std::max(n - 1, 0));
  for (int i = 0; i < n; ++i) t.diagonal[i] = inv * normal(rng);
  for (int k = 1; k < n; ++k) {
    // chi_nu = sqrt(Gamma(nu / 2, scale 2)).
    std::gamma_distribution<double> gamma(0.5 * beta * (n - k), 2.0);
    t.off[k - 1] = inv * std::sqrt(gamma(rng));
  }
  return t;
}

int count_below(const Tridiagonal& t, double sigma) {
  const int n = static_cast<int>(t.diagonal.size());
  constexpr double kTiny = std::numeric_limits<double>::min();
  int count = 0;
  double q = 1.0;
  for (int i = 0; i < n; ++i) {
    const double e2 = i > 0 ? t.off[i - 1] * t.off[i - 1] : 0.0;
    q = t.diagonal[i] - sigma - (i > 0 ? e2 / q : 0.0);
    if (q == 0.0) q = -kTiny;
    if (q < 0.0) ++count;
  }
  return count;
}

Eigen::VectorXd tridiagonal_eigenvalues(const Tridiagonal& t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(t.diagonal, t.off, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("tridiagonal QL iteration did not converge (n = " +
                         std::to_string(t.diagonal.size()) + ")");
  }
  return eig.eigenvalues();
}

Eigen::VectorXd sample_spectrum(const EnsembleConfig& config, Rng& rng) {
  return tridiagonal_eigenvalues(sample_tridiagonal(config.beta, config.matrix_size, rng));
}

double target_intensity(int beta) {
  if (beta == 4) return 0.5;
  if (beta == 1) return 1.0;
  throw ValidationError("beta must be 1 or 4");
}

double unfolding_scale(int beta, int n) {
  // Semicircle density at the origin is sqrt(n) / pi.
  return std::sqrt(static_cast<double>(n)) / (std::numbers::pi * target_intensity(beta));
}

namespace {

// Unfolded cut points and their weights: statistic = sum w_i #(x < c_i).
std::vector<std::pair<double, double>> cut_points(double L,
                                                  const std::optional<StepFunction>& step) {
  std::vector<std::pair<double, double>> cuts;
  if (L == 0.0) return cuts;
  if (!step) return {{L, 1.0}, {-L, -1.0}};
  const StepFunction scaled = step->scaled(L);
  for (const StepPiece& p : scaled.pieces()) {
    cuts.push_back({p.b, p.lambda});
    cuts.push_back({p.a, -p.lambda});
  }
  return cuts;
}

void check_window(const std::vector<std::pair<double, double>>& cuts, int beta, int n) {
  double reach = 0.0;
  for (const auto& c : cuts) reach = std::max(reach, std::abs(c.first));
  const double raw = reach / unfolding_scale(beta, n);
  // Central tenth of the support [-2 sqrt(n), 2 sqrt(n)].
  if (raw > 0.2 * std::sqrt(static_cast<double>(n))) {
    throw ValidationError("window reaches raw eigenvalue " + std::to_string(raw) +
                          ", beyond the bulk guard " +
                          std::to_string(0.2 * std::sqrt(static_cast<double>(n))));
  }
}

}  // namespace

double unfold_bulk(const Eigen::VectorXd& eigenvalues, int beta, double L,
                   const std::optional<StepFunction>& step) {
  if (L < 0.0) throw ValidationError("L must be nonnegative");
  const int n = static_cast<int>(eigenvalues.size());
  const auto cuts = cut_points(L, step);
  check_window(cuts, beta, n);
  const double scale = unfolding_scale(beta, n);
  double total = 0.0;
  for (const auto& [c, w] : cuts) {
    int below = 0;
    for (int i = 0; i < n; ++i) below += (eigenvalues[i] * scale < c);
    total += w * below;
  }
  return total;
}

double unfold_bulk(const Tridiagonal& t, int beta, double L,
                   const std::optional<StepFunction>& step) {
  if (L < 0.0) throw ValidationError("L must be nonnegative");
  const int n = static_cast<int>(t.diagonal.size());
  const auto cuts = cut_points(L, step);
  check_window(cuts, beta, n);
  const double scale = unfolding_scale(beta, n);
  double total = 0.0;
  for (const auto& [c, w] : cuts) total += w * count_below(t, c / scale);
  return total;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double ks_distance_normal(std::vector<double> z) {
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = normal_cdf(z[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

CountSample summarize(double L, std::vector<double> values) {
  CountSample s;
  s.L = L;
  const double n = static_cast<double>(values.size());
  if (values.size() < 4) throw ValidationError("need at least 4 values for k-statistics");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  s.mean = mean;
  s.variance = n / (n - 1.0) * m2;
  s.standard_error = std::sqrt(s.variance / n);
  s.k3 = n * n / ((n - 1.0) * (n - 2.0)) * m3;
  s.k4 = n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2) /
         ((n - 1.0) * (n - 2.0) * (n - 3.0));
  s.skewness_se = std::sqrt(6.0 / n);
  s.kurtosis_se = std::sqrt(24.0 / n);
  if (s.variance > 0.0) {
    const double sd = std::sqrt(s.variance);
    s.skewness = s.k3 / (s.variance * sd);
    s.excess_kurtosis = s.k4 / (s.variance * s.variance);
    std::vector<double> z;
    z.reserve(values.size());
    bool integral = true;
    for (double v : values) {
      z.push_back((v - mean) / sd);
      integral = integral && v == std::round(v);
    }
    s.ks = ks_distance_normal(z);
    if (integral) {
      std::vector<double> sorted = values;
      std::sort(sorted.begin(), sorted.end());
      double worst = 0.0;
      std::size_t idx = 0;
      for (double k = sorted.front(); k <= sorted.back(); k += 1.0) {
        while (idx < sorted.size() && sorted[idx] <= k) ++idx;
        const double emp = idx / n;
        worst = std::max(worst, std::abs(emp - normal_cdf((k + 0.5 - mean) / sd)));
      }
      s.ks_midpoint = worst;
    }
  } else {
    s.ks = 1.0;
  }
  s.values = std::move(values);
  return s;
}

std::vector<CountSample> fluctuation_scan(const EnsembleConfig& config,
                                          const std::vector<double>& Ls) {
  config.validate();
  for (double L : Ls) {
    EnsembleConfig c = config;
    c.L = L;
    c.validate();
    check_window(cut_points(L, config.step), config.beta, config.matrix_size);
  }
  std::vector<std::vector<double>> values(Ls.size(), std::vector<double>(config.samples));
  parallel_for(static_cast<std::size_t>(config.samples), [&](std::size_t s) {
    Rng rng = sample_rng(config.seed, s);
    const Tridiagonal t = sample_tridiagonal(config.beta, config.matrix_size, rng);
    for (std::size_t l = 0; l < Ls.size(); ++l) {
      values[l][s] = unfold_bulk(t, config.beta, Ls[l], config.step);
    }
  });
  std::vector<CountSample> out;
  for (std::size_t l = 0; l < Ls.size(); ++l) out.push_back(summarize(Ls[l], std::move(values[l])));
  return out;
}

CountSample fluctuation_report(const EnsembleConfig& config) {
  return fluctuation_scan(config, {config.L}).front();
}

}  // namespace pfclt
