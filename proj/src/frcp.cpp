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

#include "pfclt/frcp.hpp"

#include <algorithm>
#include <cmath>

#include "pfclt/errors.hpp"
#include "pfclt/special.hpp"

namespace pfclt {

bool FrcpData::constraint_holds() const {
  if (lambda == 0.5) return alpha + beta == 1.0;
  if (lambda == 1.0) return alpha + beta == 0.0;
  return false;
}

double FrcpData::commutator_kernel(double x, double y) const {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i](x) * g[i](y);
  return s;
}

double FrcpData::defect_kernel(double x, double y) const {
  double s = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) s += h[i](x) * e[i](y);
  return s;
}

FrcpData sine4_frcp(double L) {
  if (!(L > 0.0)) throw ValidationError("L must be positive");
  FrcpData d;
  d.variant = KernelVariant::Sine4;
  d.L = L;
  d.lambda = 0.5;
  d.rank_bound = 2;
  d.alpha = 1.0;
  d.beta = 0.0;
  auto is_minus = [L](double x) { return sine_integral_is(L - x); };
  auto is_plus = [L](double x) { return sine_integral_is(L + x); };
  d.f = {is_minus, [L](double x) { return -sine_integral_is(L + x); }};
  d.g = {is_minus, is_plus};
  d.h = {[L](double x) { return -sinc_s(L - x); }, [L](double x) { return -sinc_s(L + x); }};
  d.e = {is_minus, is_plus};
  return d;
}

FrcpData sine1_frcp(double L) {
  FrcpData d = sine4_frcp(L);
  d.variant = KernelVariant::Sine1;
  d.lambda = 1.0;
  d.rank_bound = 4;
  d.alpha = 1.0;
  d.beta = -1.0;
  auto half_diff = [L](double x) {
    return 0.5 * (sine_integral_is(L + x) - sine_integral_is(L - x));
  };
  auto one = [](double) { return 1.0; };
  auto zero = [](double) { return 0.0; };
  d.f.push_back(half_diff);
  d.g.push_back(one);
  d.f.push_back(one);
  d.g.push_back(half_diff);
  d.h.push_back([L](double x) { return 0.5 * (sinc_s(L - x) + sinc_s(L + x)); });
  d.e.push_back(one);
  d.h.push_back(zero);
  d.e.push_back(zero);
  return d;
}

FrcpData frcp_for(const MatrixKernel& kernel, double L) {
  switch (kernel.variant) {
    case KernelVariant::Sine4:
      return sine4_frcp(L);
    case KernelVariant::Sine1:
      return sine1_frcp(L);
    default:
      throw UnsupportedError("no finite-rank commutator data for kernel '" +
                             to_string(kernel.variant) + "'");
  }
}

DiscreteOperator commutator_operator(const KernelOperators& ops) {
  return op_sum(op_product(ops.A_dag, ops.B), op_product(ops.B, ops.A), 1.0, -1.0);
}

DiscreteOperator defect_operator(const KernelOperators& ops, double alpha, double beta) {
  DiscreteOperator out = op_product(ops.D, ops.B);
  out.matrix -= alpha * (ops.A.matrix * ops.A.matrix) + beta * ops.A.matrix;
  return out;
}

RankReport rank_check(const DiscreteOperator& op, int declared_rank, double tolerance) {
  if (declared_rank < 0) throw ValidationError("declared rank must be nonnegative");
  RankReport r;
  r.declared_rank = declared_rank;
  r.singular_values = singular_values(op);
  const auto& s = r.singular_values;
  if (s.size() == 0 || s[0] <= kZeroOperatorThreshold) {
    r.tail_ratio = 0.0;
    r.pass = true;
    return r;
  }
  r.tail_ratio = declared_rank < s.size() ? s[declared_rank] / s[0] : 0.0;
  r.pass = r.tail_ratio <= tolerance;
  return r;
}

double closed_form_residual(const DiscreteOperator& op,
                            const std::function<double(double, double)>& closed) {
  const Grid& g = *op.grid;
  double worst = 0.0;
  for (int j = 0; j < g.size(); ++j) {
    for (int i = 0; i < g.size(); ++i) {
      worst = std::max(worst, std::abs(op.kernel_at(i, j) - closed(g.nodes[i], g.nodes[j])));
    }
  }
  return worst;
}

std::vector<IdentityCheck> frcp_identity_checks(const MatrixKernel& kernel, double L,
                                                int nodes) {
  const FrcpData data = frcp_for(kernel, L);
  GridPtr grid = share(make_grid(-L, L, nodes));
  const KernelOperators ops = kernel_operators(kernel, grid);
  const int n = grid->size();

  IdentityCheck comm{"commutator", L, n, rank_check(commutator_operator(ops), data.rank_bound)};
  comm.report.residual = closed_form_residual(
      commutator_operator(ops), [&](double x, double y) { return data.commutator_kernel(x, y); });
  const DiscreteOperator def = defect_operator(ops, data.alpha, data.beta);
  IdentityCheck defect{"defect", L, n, rank_check(def, data.rank_bound)};
  defect.report.residual =
      closed_form_residual(def, [&](double x, double y) { return data.defect_kernel(x, y); });
  return {comm, defect};
}

ConditionInputs condition_inputs(const MatrixKernel& kernel, double L, double density) {
  const FrcpData data = frcp_for(kernel, L);
  GridPtr grid = domain_grid(L, density);
  const KernelOperators ops = kernel_operators(kernel, grid);
  ConditionInputs in{ops.A, ops.A_dag, ops.D, {}, {}, {}, {}};
  for (const auto& p : data.f) in.f.push_back(sample_function(p, *grid));
  for (const auto& p : data.g) in.g.push_back(sample_function(p, *grid));
  for (const auto& p : data.h) in.h.push_back(sample_function(p, *grid));
  for (const auto& p : data.e) in.e.push_back(sample_function(p, *grid));
  return in;
}

namespace {

// v, M v, M^2 v, ..., M^p v.
std::vector<Eigen::VectorXd> krylov(const Eigen::MatrixXd& m, const Eigen::VectorXd& v,
                                    int p) {
  std::vector<Eigen::VectorXd> out{v};
  for (int k = 1; k <= p; ++k) out.push_back(m * out.back());
  return out;
}

void record(ConditionRow& row, const char* family, int i, int j, int m, int n, double v) {
  row.entries.push_back({family, i, j, m, n, v});
  row.max_abs = std::max(row.max_abs, std::abs(v));
}

}  // namespace

ConditionRow condition_inner_products(const ConditionInputs& in, double L, int m_max,
                                      int n_max) {
  if (m_max < 0 || n_max < 0 || m_max > 3 || n_max > 3) {
    throw ValidationError("condition scan limited to m, n <= 3");
  }
  ConditionRow row;
  row.L = L;
  std::vector<std::vector<Eigen::VectorXd>> df;  // D A^dag^m f_i
  for (const auto& f : in.f) {
    auto chain = krylov(in.A_dag.matrix, f, m_max);
    for (auto& v : chain) v = in.D.matrix * v;
    df.push_back(std::move(chain));
  }
  std::vector<std::vector<Eigen::VectorXd>> ag, ae;
  for (const auto& g : in.g) ag.push_back(krylov(in.A.matrix, g, n_max));
  for (const auto& e : in.e) ae.push_back(krylov(in.A.matrix, e, n_max));

  for (std::size_t i = 0; i < df.size(); ++i) {
    for (int m = 0; m <= m_max; ++m) {
      for (std::size_t j = 0; j < ag.size(); ++j) {
        for (int n = 0; n <= n_max; ++n) record(row, "DAf.Ag", i, j, m, n, df[i][m].dot(ag[j][n]));
      }
      for (std::size_t j = 0; j < ae.size(); ++j) {
        for (int n = 0; n <= n_max; ++n) record(row, "DAf.Ae", i, j, m, n, df[i][m].dot(ae[j][n]));
      }
    }
  }
  for (std::size_t i = 0; i < in.h.size(); ++i) {
    for (std::size_t j = 0; j < ag.size(); ++j) {
      for (int n = 0; n <= n_max; ++n) record(row, "h.Ag", i, j, 0, n, in.h[i].dot(ag[j][n]));
    }
    for (std::size_t j = 0; j < ae.size(); ++j) {
      for (int n = 0; n <= n_max; ++n) record(row, "h.Ae", i, j, 0, n, in.h[i].dot(ae[j][n]));
    }
  }
  return row;
}

std::vector<ConditionRow> condition_iv_scan(const MatrixKernel& kernel,
                                            const std::vector<double>& Ls, int m_max,
                                            int n_max, double density) {
  std::vector<ConditionRow> rows;
  for (double L : Ls) {
    rows.push_back(condition_inner_products(condition_inputs(kernel, L, density), L, m_max, n_max));
  }
  return rows;
}

StepFrcpData step_frcp(const MatrixKernel& kernel, const StepFunction& step, double L) {
  if (kernel.variant != KernelVariant::Sine4) {
    throw UnsupportedError("per-piece commutator data is only available for sine4; got '" +
                           to_string(kernel.variant) + "'");
  }
  StepFrcpData d;
  d.L = L;
  d.scaled = step.scaled(L);
  for (const StepPiece& p : d.scaled.pieces()) {
    const double a = p.a;
    const double b = p.b;
    auto is_b = [b](double x) { return sine_integral_is(x - b); };
    auto is_a = [a](double x) { return sine_integral_is(x - a); };
    d.f.push_back({is_b, [a](double x) { return -sine_integral_is(x - a); }});
    d.g.push_back({is_b, is_a});
    d.h.push_back({[b](double x) { return sinc_s(x - b); }, [a](double x) { return -sinc_s(x - a); }});
    d.e.push_back({is_b, is_a});
  }
  return d;
}

std::vector<IdentityCheck> step_identity_checks(const MatrixKernel& kernel,
                                                const StepFunction& step, double L,
                                                double density) {
  const StepFrcpData data = step_frcp(kernel, step, L);
  const auto bps = data.scaled.breakpoints();
  const double len = bps.back() - bps.front();
  GridPtr grid = share(make_panel_grid(bps, std::max(density, kMinGridNodes / len)));
  const KernelOperators ops = kernel_operators(kernel, grid);
  std::vector<IdentityCheck> out;
  const auto& pieces = data.scaled.pieces();
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Eigen::VectorXd chi = chi_projection(pieces[i].a, pieces[i].b, grid).matrix.diagonal();
    const DiscreteOperator comm{
        grid, ops.A_dag.matrix * chi.asDiagonal() * ops.B.matrix -
                  ops.B.matrix * chi.asDiagonal() * ops.A.matrix};
    const DiscreteOperator defect{
        grid, ops.D.matrix * chi.asDiagonal() * ops.B.matrix -
                  ops.A.matrix * chi.asDiagonal() * ops.A.matrix};
    auto closed = [](const std::vector<Profile>& l, const std::vector<Profile>& r) {
      return [&l, &r](double x, double y) {
        double s = 0.0;
        for (std::size_t j = 0; j < l.size(); ++j) s += l[j](x) * r[j](y);
        return s;
      };
    };
    const std::string tag = "piece" + std::to_string(i + 1);
    IdentityCheck c{tag + "_commutator", L, grid->size(), rank_check(comm, 2)};
    c.report.residual = closed_form_residual(comm, closed(data.f[i], data.g[i]));
    IdentityCheck d{tag + "_defect", L, grid->size(), rank_check(defect, 2)};
    d.report.residual = closed_form_residual(defect, closed(data.h[i], data.e[i]));
    out.push_back(std::move(c));
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<StepConditionRow> condition_scan_step(const MatrixKernel& kernel,
                                                  const StepFunction& step,
                                                  const std::vector<double>& Ls,
                                                  double density) {
  const int pieces = static_cast<int>(step.pieces().size());
  if (pieces > 4) throw SizeError("step condition scan limited to 4 pieces");
  std::vector<StepConditionRow> rows;
  for (double L : Ls) {
    const StepFrcpData data = step_frcp(kernel, step, L);
    const auto bps = data.scaled.breakpoints();
    const double len = bps.back() - bps.front();
    GridPtr grid = share(make_panel_grid(bps, std::max(density, kMinGridNodes / len)));
    const KernelOperators ops = kernel_operators(kernel, grid);
    std::vector<Eigen::VectorXd> chi;
    for (const StepPiece& p : data.scaled.pieces()) {
      chi.push_back(chi_projection(p.a, p.b, grid).matrix.diagonal());
    }
    auto sample_all = [&](const std::vector<std::vector<Profile>>& fs) {
      std::vector<Eigen::VectorXd> out;
      for (const auto& per_piece : fs) {
        for (const auto& p : per_piece) out.push_back(sample_function(p, *grid));
      }
      return out;
    };
    const auto f = sample_all(data.f);
    const auto g = sample_all(data.g);
    const auto h = sample_all(data.h);
    const auto e = sample_all(data.e);

    // Left words: chi_i1 D chi_i2 [A^dag chi_i3] v. Right words: chi_j1 v or
    // chi_j1 A chi_j2 v.
    auto left_words = [&](const Eigen::VectorXd& v) {
      std::vector<Eigen::VectorXd> out;
      for (int i2 = 0; i2 < pieces; ++i2) {
        const Eigen::VectorXd dv = ops.D.matrix * chi[i2].cwiseProduct(v);
        for (int i1 = 0; i1 < pieces; ++i1) out.push_back(chi[i1].cwiseProduct(dv));
        for (int i3 = 0; i3 < pieces; ++i3) {
          const Eigen::VectorXd w =
              ops.D.matrix * chi[i2].cwiseProduct(ops.A_dag.matrix * chi[i3].cwiseProduct(v));
          for (int i1 = 0; i1 < pieces; ++i1) out.push_back(chi[i1].cwiseProduct(w));
        }
      }
      return out;
    };
    auto right_words = [&](const Eigen::VectorXd& v) {
      std::vector<Eigen::VectorXd> out;
      for (int j1 = 0; j1 < pieces; ++j1) out.push_back(chi[j1].cwiseProduct(v));
      for (int j2 = 0; j2 < pieces; ++j2) {
        const Eigen::VectorXd av = ops.A.matrix * chi[j2].cwiseProduct(v);
        for (int j1 = 0; j1 < pieces; ++j1) out.push_back(chi[j1].cwiseProduct(av));
      }
      return out;
    };

    StepConditionRow row;
    row.L = L;
    auto pair_up = [&](const char* family, const std::vector<Eigen::VectorXd>& lhs,
                       const std::vector<Eigen::VectorXd>& rhs, bool use_words) {
      for (std::size_t i = 0; i < lhs.size(); ++i) {
        std::vector<Eigen::VectorXd> lw;
        if (use_words) {
          lw = left_words(lhs[i]);
        } else {
          for (int i1 = 0; i1 < pieces; ++i1) lw.push_back(chi[i1].cwiseProduct(lhs[i]));
        }
        for (std::size_t j = 0; j < rhs.size(); ++j) {
          const auto rw = right_words(rhs[j]);
          for (std::size_t a = 0; a < lw.size(); ++a) {
            for (std::size_t b = 0; b < rw.size(); ++b) {
              const double v = lw[a].dot(rw[b]);
              row.entries.push_back({family, static_cast<int>(i), static_cast<int>(j),
                                     static_cast<int>(a), static_cast<int>(b), v});
              row.max_abs_inner = std::max(row.max_abs_inner, std::abs(v));
            }
          }
        }
      }
    };
    pair_up("DAf.Ag", f, g, true);
    pair_up("DAf.Ae", f, e, true);
    pair_up("h.Ag", h, g, false);
    pair_up("h.Ae", h, e, false);

    for (int i = 0; i < pieces; ++i) {
      const Eigen::MatrixXd ci =
          chi[i].asDiagonal() * ops.A.matrix * chi[i].asDiagonal();
      row.max_projection_defect =
          std::max(row.max_projection_defect, singular_values(Eigen::MatrixXd(ci - ci * ci)).sum());
      for (int j = 0; j < pieces; ++j) {
        if (i == j) continue;
        const Eigen::MatrixXd cross = chi[i].asDiagonal() * ops.A.matrix * chi[j].asDiagonal() *
                                      ops.A.matrix * chi[i].asDiagonal();
        row.max_cross_trace_norm =
            std::max(row.max_cross_trace_norm, singular_values(cross).sum());
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace pfclt
