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

#include "pfclt/special.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "pfclt/errors.hpp"

namespace pfclt {

namespace {

constexpr double kPi = std::numbers::pi;

// r in [-1, 1] after exact reduction modulo 2.
double reduce_mod2(double x) { return std::remainder(x, 2.0); }

double sin_pi_reduced(double r) {
  if (r > 0.5) return std::sin(kPi * (1.0 - r));
  if (r < -0.5) return -std::sin(kPi * (1.0 + r));
  return std::sin(kPi * r);
}

}  // namespace

double sin_pi(double x) {
  if (!std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
  return sin_pi_reduced(reduce_mod2(x));
}

double cos_pi(double x) {
  if (!std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
  const double r = std::abs(reduce_mod2(x));  // cos is even
  return sin_pi_reduced(0.5 - r);
}

// Taylor region: cancellation in the closed forms is worst near the removable
// singularity, and 12 terms reach full double precision for |pi x| < 1.
constexpr double kTaylorCutoff = 1.0;
constexpr int kTaylorTerms = 12;

double sinc_s(double x) {
  const double t = kPi * x;
  if (std::abs(t) < kTaylorCutoff) {
    const double t2 = t * t;
    // sum_k (-1)^k t^{2k} / (2k+1)!, Horner from the tail
    double acc = 1.0;
    for (int k = kTaylorTerms; k >= 1; --k) {
      acc = 1.0 - acc * t2 / ((2.0 * k) * (2.0 * k + 1.0));
    }
    return acc;
  }
  return sin_pi(x) / t;
}

double sinc_s_prime(double x) {
  const double t = kPi * x;
  if (std::abs(t) < kTaylorCutoff) {
    // d/dt sum_k (-1)^k t^{2k}/(2k+1)! = sum_{k>=1} (-1)^k 2k t^{2k-1}/(2k+1)!
    const double t2 = t * t;
    double sum = 0.0;
    double power = t;                 // t^{2k-1}
    double fact = 6.0;                // (2k+1)!
    double sign = -1.0;
    for (int k = 1; k <= kTaylorTerms; ++k) {
      sum += sign * 2.0 * k * power / fact;
      power *= t2;
      fact *= (2.0 * k + 2.0) * (2.0 * k + 3.0);
      sign = -sign;
    }
    return kPi * sum;
  }
  return (cos_pi(x) - sinc_s(x)) / x;
}

double sine_integral(double z) {
  if (z < 0.0) return -sine_integral(-z);
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return kPi / 2.0;

  constexpr double kEps = 1e-16;
  if (z <= 2.0) {
    // Power series; terms stay below 2 in magnitude so cancellation is mild.
    double sum = z;
    double term = z;
    const double z2 = z * z;
    for (int k = 1; k < 60; ++k) {
      term *= -z2 / ((2.0 * k) * (2.0 * k + 1.0));
      const double add = term / (2.0 * k + 1.0);
      sum += add;
      if (std::abs(add) < kEps * std::abs(sum)) break;
    }
    return sum;
  }

  // Modified Lentz evaluation of the continued fraction for E1(i z);
  // Si(z) = pi/2 + Im(e^{-iz} * cf).
  using cplx = std::complex<double>;
  constexpr double kTiny = 1e-300;
  cplx b(1.0, z);
  cplx c(1.0 / kTiny, 0.0);
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i < 100000; ++i) {
    const double a = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const cplx del = c * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < kEps) {
      h *= cplx(std::cos(z), -std::sin(z));
      return kPi / 2.0 + h.imag();
    }
  }
  throw NumericalError("sine integral continued fraction did not converge");
}

double sine_integral_is(double x) {
  if (std::isinf(x)) return x > 0 ? 0.5 : -0.5;
  return sine_integral(kPi * x) / kPi;
}

}  // namespace pfclt
