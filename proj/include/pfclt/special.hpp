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

namespace pfclt {

/// sin(pi x) with exact argument reduction (zero at every integer).
double sin_pi(double x);
/// cos(pi x) with exact argument reduction.
double cos_pi(double x);

/// S(x) = sin(pi x) / (pi x), S(0) = 1.
double sinc_s(double x);

/// S'(x). Odd, S'(0) = 0.
double sinc_s_prime(double x);

/// IS(x) = integral of S over [0, x] = Si(pi x) / pi. Odd, IS(+inf) = 1/2.
double sine_integral_is(double x);

/// Sine integral Si(z) = integral of sin(t)/t over [0, z].
double sine_integral(double z);

/// sgn with sgn(0) = 0.
inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace pfclt
