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
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pfclt/discretize.hpp"
#include "pfclt/errors.hpp"
#include "pfclt/frcp.hpp"
#include "pfclt/special.hpp"

using namespace pfclt;
using std::numbers::pi;

namespace {

const ConditionEntry* find(const std::vector<ConditionEntry>& es, const std::string& family,
                           int i, int j, int m, int n) {
  for (const auto& e : es) {
    if (e.family == family && e.i == i && e.j == j && e.m == m && e.n == n) return &e;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("alpha beta constraint") {
  const FrcpData s4 = sine4_frcp(10.0);
  CHECK(s4.alpha == 1.0);
  CHECK(s4.beta == 0.0);
  CHECK(s4.rank_bound == 2);
  CHECK(s4.constraint_holds());
  const FrcpData s1 = sine1_frcp(10.0);
  CHECK(s1.alpha + s1.beta == 0.0);
  CHECK(s1.rank_bound == 4);
  CHECK(s1.constraint_holds());
  CHECK_THROWS_AS(frcp_for(MatrixKernel{}, 1.0), UnsupportedError);
}

TEST_CASE("sine4 commutator kernel in closed form") {
  const double L = 7.0;
  const FrcpData d = sine4_frcp(L);
  CHECK(d.commutator_kernel(0.0, 0.0) == doctest::Approx(0.0).scale(1.0));
  for (double x : {-3.0, 0.4, 6.1}) {
    for (double y : {-5.5, 1.2}) {
      const double want = sine_integral_is(L - x) * sine_integral_is(L - y) -
                          sine_integral_is(L + x) * sine_integral_is(L + y);
      CHECK(d.commutator_kernel(x, y) == doctest::Approx(want).epsilon(1e-13));
    }
  }
}

TEST_CASE("discretized commutators match closed forms") {
  for (const MatrixKernel& k : {sine4_kernel(), sine1_kernel()}) {
    const auto checks = frcp_identity_checks(k, 10.0, 512);
    REQUIRE(checks.size() == 2);
    for (const auto& c : checks) {
      INFO(to_string(k.variant), " ", c.name);
      CHECK(c.report.pass);
      CHECK(c.report.residual <= 1e-5);
      CHECK(c.report.declared_rank == (k.variant == KernelVariant::Sine4 ? 2 : 4));
      for (int i = 1; i < c.report.singular_values.size(); ++i) {
        CHECK(c.report.singular_values[i] <= c.report.singular_values[i - 1]);
      }
    }
  }
}

TEST_CASE("residual shrinks under refinement") {
  const MatrixKernel k = sine1_kernel();
  const double coarse = frcp_identity_checks(k, 10.0, 128)[0].report.residual;
  const double fine = frcp_identity_checks(k, 10.0, 256)[0].report.residual;
  CHECK(fine * 1.5 <= coarse);
}

TEST_CASE("rank check on outer products and zero") {
  GridPtr g = share(make_grid(-2.0, 2.0, 64));
  DiscreteOperator uv{g, outer_kernel([](double x) { return std::cos(x); },
                                      [](double y) { return 1.0 + y * y; }, *g)};
  CHECK(rank_check(uv, 1).pass);
  CHECK_FALSE(rank_check(uv, 0).pass);
  const RankReport z = rank_check(zero_operator(g), 0);
  CHECK(z.pass);
  CHECK(z.tail_ratio == 0.0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  DiscreteOperator noise{g, Eigen::MatrixXd::NullaryExpr(g->size(), g->size(), [&] { return n01(rng); })};
  CHECK_FALSE(rank_check(noise, 4).pass);
}

TEST_CASE("condition iv: D chi against chi vanishes") {
  const double L = 12.0;
  const ConditionInputs in = condition_inputs(sine4_kernel(), L, 16);
  const Eigen::VectorXd chi = sample_function([](double) { return 1.0; }, *in.A.grid);
  CHECK(std::abs(chi.dot(in.D.matrix * chi)) <= 1e-10);
}

TEST_CASE("condition iv: sine4 entries stay bounded") {
  const auto rows = condition_iv_scan(sine4_kernel(), {25.0, 50.0, 100.0}, 2, 2, 8);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.entries.size() == 2 * 2 * 3 * 3 * 2 + 2 * 2 * 3 * 2);
    CHECK(r.max_abs < 2.0);
  }
  CHECK(rows[2].max_abs <= 1.5 * rows[0].max_abs);
}

TEST_CASE("condition iv negative control grows linearly") {
  for (double L : {5.0, 10.0, 20.0}) {
    ConditionInputs in = condition_inputs(sine4_kernel(), L, 16);
    in.D = identity_operator(in.A.grid);
    const Eigen::VectorXd chi = sample_function([](double) { return 1.0; }, *in.A.grid);
    in.f = {chi};
    in.g = {chi};
    in.h.clear();
    in.e.clear();
    const ConditionRow row = condition_inner_products(in, L, 0, 0);
    REQUIRE(row.entries.size() == 1);
    CHECK(row.entries[0].value == doctest::Approx(2.0 * L).epsilon(1e-12));
  }
}

TEST_CASE("condition scan rejects large orders") {
  const ConditionInputs in = condition_inputs(sine4_kernel(), 3.0, 16);
  CHECK_THROWS_AS(condition_inner_products(in, 3.0, 4, 1), ValidationError);
}

TEST_CASE("step frcp identities hold per piece") {
  const StepFunction step = StepFunction::parse("1:0:1,-1:1:2");
  const auto checks = step_identity_checks(sine4_kernel(), step, 6.0, 16);
  REQUIRE(checks.size() == 4);
  for (const auto& c : checks) {
    INFO(c.name);
    CHECK(c.report.pass);
    CHECK(c.report.residual <= 1e-5);
  }
  CHECK_THROWS_AS(step_frcp(sine1_kernel(), step, 6.0), UnsupportedError);
}

TEST_CASE("single piece step scan reduces to condition iv") {
  const double L = 15.0;
  const auto step_row =
      condition_scan_step(sine4_kernel(), StepFunction::indicator(-1.0, 1.0), {L}, 16).front();
  const ConditionRow iv = condition_inner_products(condition_inputs(sine4_kernel(), L, 16), L, 1, 1);
  // Step words a = 0, 1 are D v and D A^dag v; b = 0, 1 are v and A v.
  for (const char* family : {"DAf.Ag", "DAf.Ae"}) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        for (int m = 0; m < 2; ++m) {
          for (int n = 0; n < 2; ++n) {
            const auto* s = find(step_row.entries, family, i, j, m, n);
            const auto* c = find(iv.entries, family, i, j, m, n);
            REQUIRE(s != nullptr);
            REQUIRE(c != nullptr);
            CHECK(std::abs(s->value) == doctest::Approx(std::abs(c->value)).epsilon(1e-6).scale(1.0));
          }
        }
      }
    }
  }
}

TEST_CASE("step scan trace norms stay bounded for separated pieces") {
  const StepFunction step = StepFunction::parse("1:-3:-2,1:2:3");
  const auto rows = condition_scan_step(sine4_kernel(), step, {8.0, 16.0, 32.0}, 8);
  for (const auto& r : rows) CHECK(r.max_cross_trace_norm < 1.0);
  CHECK(rows[2].max_cross_trace_norm <= 1.5 * rows[0].max_cross_trace_norm + 1e-3);
}
