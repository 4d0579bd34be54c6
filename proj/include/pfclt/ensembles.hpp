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

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pfclt/discretize.hpp"

namespace pfclt {

struct EnsembleConfig {
  int beta = 4;
  int matrix_size = 2000;
  int samples = 10000;
  std::uint64_t seed = 1;
  /// Window half-width in units where the unfolded intensity is 1/2 (beta 4)
  /// or 1 (beta 1).
  double L = 8.0;
  std::optional<StepFunction> step;

  /// Throws ValidationError when a field is out of range.
  void validate() const;
};

using Rng = std::mt19937_64;

/// Generator for one sample, derived from (seed, index) only.
Rng sample_rng(std::uint64_t seed, std::uint64_t index);

/// Symmetric tridiagonal beta-Hermite matrix: diagonal N(0, 2) / sqrt(beta),
/// off-diagonal chi_{beta (n - k)} / sqrt(beta), k = 1 .. n - 1. Its
/// spectrum fills [-2 sqrt(n), 2 sqrt(n)].
struct Tridiagonal {
  Eigen::VectorXd diagonal;
  Eigen::VectorXd off;
};

Tridiagonal sample_tridiagonal(int beta, int n, Rng& rng);

/// Number of eigenvalues strictly below sigma (Sturm sequence).
int count_below(const Tridiagonal& t, double sigma);

/// Full spectrum, ascending.
Eigen::VectorXd tridiagonal_eigenvalues(const Tridiagonal& t);
Eigen::VectorXd sample_spectrum(const EnsembleConfig& config, Rng& rng);

/// Target intensity of the limiting process: 1/2 for beta 4, 1 for beta 1.
double target_intensity(int beta);
/// Factor mapping raw eigenvalues to unfolded positions near the origin.
double unfolding_scale(int beta, int n);

/// Counting or step statistic of an unfolded spectrum within (-L, L) (or of
/// the step function x -> phi(x / L)). Throws when the window leaves the
/// central tenth of the spectrum.
double unfold_bulk(const Eigen::VectorXd& eigenvalues, int beta, double L,
                   const std::optional<StepFunction>& step = std::nullopt);
/// Same statistic evaluated through Sturm counts on the tridiagonal matrix.
double unfold_bulk(const Tridiagonal& t, int beta, double L,
                   const std::optional<StepFunction>& step = std::nullopt);

struct CountSample {
  double L = 0.0;
  std::vector<double> values;
  double mean = 0.0;
  double variance = 0.0;
  double standard_error = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double skewness_se = 0.0;
  double kurtosis_se = 0.0;
  /// Kolmogorov-Smirnov distance of standardized values to N(0, 1).
  double ks = 0.0;
  /// Same, comparing the lattice CDF at half-integers (integer data only;
  /// NaN otherwise). Diagnostic.
  double ks_midpoint = NAN;
};

CountSample summarize(double L, std::vector<double> values);
double ks_distance_normal(std::vector<double> standardized);
double normal_cdf(double z);

/// One CountSample for config.L.
CountSample fluctuation_report(const EnsembleConfig& config);
/// One CountSample per window, all computed on the same spectra.
std::vector<CountSample> fluctuation_scan(const EnsembleConfig& config,
                                          const std::vector<double>& Ls);

}  // namespace pfclt
