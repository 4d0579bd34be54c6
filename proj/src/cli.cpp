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

#include "pfclt/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pfclt/cumulants.hpp"
#include "pfclt/discretize.hpp"
#include "pfclt/ensembles.hpp"
#include "pfclt/errors.hpp"
#include "pfclt/frcp.hpp"

namespace pfclt::cli {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

Check within(const std::string& name, double value, double target, double rel_tol) {
  const double rel = std::abs(value - target) / std::abs(target);
  return {name, rel <= rel_tol,
          "value=" + fmt(value) + " target=" + fmt(target) + " rel=" + fmt(rel) +
              " tol=" + fmt(rel_tol)};
}

Check close(const std::string& name, double a, double b, double rel_tol) {
  const double rel = std::abs(a - b) / std::max(std::abs(b), 1e-300);
  return {name, rel <= rel_tol,
          "a=" + fmt(a) + " b=" + fmt(b) + " rel=" + fmt(rel) + " tol=" + fmt(rel_tol)};
}

// ||A - A^2||_1 / Var tends to 2 (Sine4) and 1/2 (Sine1); the bound only
// flags growth faster than the variance.
constexpr double kDefectRatioBound = 4.0;

Table start(const RunConfig& c) {
  Table t;
  t.metadata = {{"command", to_string(c.command)},
                {"version", kArtifactVersion},
                {"kernel", to_string(c.kernel)},
                {"L", join(c.Ls)},
                {"grid_density", fmt(c.grid_density)},
                {"nmax", std::to_string(c.n_max)},
                {"kmax", std::to_string(c.k_max)},
                {"seed", std::to_string(c.seed)},
                {"samples", std::to_string(c.samples)},
                {"matrix_size", std::to_string(c.matrix_size)},
                {"nodes", std::to_string(c.nodes)},
                {"step", c.step ? c.step->to_string() : ""}};
  return t;
}

StepFunction statistic_of(const RunConfig& c) {
  return c.step ? *c.step : StepFunction::indicator(-1.0, 1.0);
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::CorrelationEval:
      return "correlation-eval";
    case Command::VarianceScan:
      return "variance-scan";
    case Command::CumulantScan:
      return "cumulant-scan";
    case Command::FrcpCheck:
      return "frcp-check";
    case Command::McClt:
      return "mc-clt";
  }
  return "?";
}

std::vector<double> default_Ls(Command c) {
  switch (c) {
    case Command::CumulantScan:
      return {25, 50, 100};
    case Command::FrcpCheck:
      return {10, 25, 50};
    case Command::McClt:
      return {8, 16, 32};
    default:
      return {25, 50, 100, 200};
  }
}

void RunConfig::validate() const {
  if (command != Command::CorrelationEval) {
    if (Ls.empty()) throw ValidationError("L list must be nonempty");
    for (std::size_t i = 0; i < Ls.size(); ++i) {
      if (!(Ls[i] > 0.0)) throw ValidationError("L values must be positive");
      if (i > 0 && !(Ls[i] > Ls[i - 1])) throw ValidationError("L list must be strictly ascending");
    }
  }
  if (!(grid_density >= 8.0)) throw ValidationError("grid density must be at least 8");
  if (n_max < 1 || n_max > kMaxCumulantOrder) throw ValidationError("nmax must be in [1, 8]");
  if (k_max < 1 || k_max > kMaxTracePower) throw ValidationError("kmax must be in [1, 8]");
  if (kernel == KernelVariant::Custom) throw ValidationError("kernel must be sine1 or sine4");
  if (command == Command::CorrelationEval && point_sets.empty()) {
    throw ValidationError("correlation-eval needs --points or --points-file");
  }
}

bool Table::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::vector<std::vector<double>> parse_points(std::istream& in) {
  std::vector<std::vector<double>> sets;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::string token;
    std::vector<double> points;
    while (fields >> token) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size() || !std::isfinite(v)) {
        throw ParseError("malformed point '" + token + "'", number);
      }
      points.push_back(v);
    }
    if (!points.empty()) sets.push_back(std::move(points));
  }
  if (sets.empty()) throw ParseError("no points found", number);
  return sets;
}

Table cmd_correlation_eval(const RunConfig& c) {
  Table t = start(c);
  const MatrixKernel kernel = kernel_by_variant(c.kernel);
  std::size_t width = 0;
  for (const auto& p : c.point_sets) width = std::max(width, p.size());
  t.columns.push_back("k");
  for (std::size_t i = 1; i <= width; ++i) t.columns.push_back("x" + std::to_string(i));
  t.columns.push_back("rho");
  t.columns.push_back("flag");
  bool nonnegative = true;
  bool degenerate_vanish = true;
  for (const auto& p : c.point_sets) {
    const CorrelationRequest req{p, kernel};
    const double rho = correlation(req);
    const bool dup = req.has_duplicates();
    std::vector<Cell> row{static_cast<long long>(p.size())};
    for (std::size_t i = 0; i < width; ++i) row.push_back(i < p.size() ? Cell{p[i]} : Cell{std::string()});
    row.push_back(rho);
    row.push_back(std::string(dup ? "degenerate" : ""));
    t.rows.push_back(std::move(row));
    nonnegative = nonnegative && rho >= -1e-10;
    if (dup) degenerate_vanish = degenerate_vanish && std::abs(rho) <= 1e-10;
  }
  t.checks.push_back({"rho_nonnegative", nonnegative, "tolerance -1e-10"});
  t.checks.push_back({"degenerate_rho_vanishes", degenerate_vanish, "|rho| <= 1e-10 for duplicate points"});
  return t;
}

Table cmd_variance_scan(const RunConfig& c) {
  Table t = start(c);
  const MatrixKernel kernel = kernel_by_variant(c.kernel);
  const StepFunction f = statistic_of(c);
  t.columns = {"L", "E", "Var", "E_expected", "log_slope"};
  std::vector<double> vars;
  for (double L : c.Ls) {
    const Moments m = expectation_variance(kernel, f, L);
    double expected = 0.0;
    for (const StepPiece& p : f.pieces()) expected += kernel.lambda * p.lambda * (p.b - p.a) * L;
    t.rows.push_back({L, m.expectation, m.variance, expected, std::string()});
    vars.push_back(m.variance);
    t.checks.push_back(close("expectation_L" + fmt(L), m.expectation, expected, 1e-8));
    t.checks.push_back({"variance_positive_L" + fmt(L), m.variance > 0.0, "Var=" + fmt(m.variance)});
  }
  if (c.Ls.size() >= 2) {
    const double slope = log_slope(c.Ls, vars);
    t.rows.push_back({std::string("fit"), std::string(), std::string(), std::string(), slope});
    if (const auto coef = variance_log_coefficient(kernel, c.step)) {
      t.checks.push_back(within("variance_log_slope", slope, *coef, c.step ? 0.15 : 0.10));
    }
  }
  return t;
}

Table cmd_cumulant_scan(const RunConfig& c) {
  Table t = start(c);
  const MatrixKernel kernel = kernel_by_variant(c.kernel);
  const int kmax = std::max(c.k_max, c.n_max);
  t.columns = {"L", "Var_for"};
  for (int k = 1; k <= kmax; ++k) t.columns.push_back("V" + std::to_string(k));
  for (int n = 1; n <= c.n_max; ++n) t.columns.push_back("c" + std::to_string(n));
  for (int n = 3; n <= c.n_max; ++n) t.columns.push_back("norm_c" + std::to_string(n));
  t.columns.push_back("trace_norm_A_minus_A2");
  std::vector<std::vector<double>> normalized;
  std::vector<double> defect_L, defects, defect_vars;
  for (double L : c.Ls) {
    const auto v = v_k_traces(kernel, L, c.grid_density, kmax);
    CumulantReport r;
    r.L = L;
    r.v_k = v;
    r.c_n = cumulants_from_traces(v, c.n_max);
    r.expectation = r.c_n[0];
    r.variance = c.n_max >= 2 ? r.c_n[1] : 0.0;
    const Moments m = expectation_variance(kernel, L);
    std::vector<Cell> row{L, m.variance};
    for (double x : v) row.push_back(x);
    for (double x : r.c_n) row.push_back(x);
    std::vector<double> norm;
    if (c.n_max >= 3) norm = clt_diagnostic(r);
    for (double x : norm) row.push_back(x);
    if (domain_grid(L, c.grid_density)->size() <= kMaxSvdDim) {
      const double defect = projection_defect_norm(kernel, L, c.grid_density);
      row.push_back(defect);
      defect_L.push_back(L);
      defects.push_back(defect);
      defect_vars.push_back(m.variance);
      t.checks.push_back({"projection_defect_over_var_L" + fmt(L), defect <= kDefectRatioBound * m.variance,
                          "ratio=" + fmt(defect / m.variance) + " bound=" + fmt(kDefectRatioBound)});
    } else {
      row.push_back(std::string());
    }
    normalized.push_back(norm);
    t.rows.push_back(std::move(row));
    t.checks.push_back(close("c1_equals_mean_L" + fmt(L), r.c_n[0], m.expectation, 1e-8));
    if (c.n_max >= 2) t.checks.push_back(close("c2_equals_var_for_L" + fmt(L), r.c_n[1], m.variance, 1e-6));
  }
  if (defects.size() >= 2) {
    t.metadata.push_back({"projection_defect_var_exponent", fmt(log_log_slope(defect_vars, defects))});
  }
  if (c.Ls.size() >= 2) {
    for (int n = 3; n <= c.n_max; ++n) {
      bool decreasing = true;
      std::string detail;
      for (std::size_t i = 0; i < normalized.size(); ++i) {
        const double a = std::abs(normalized[i][n - 3]);
        detail += (i ? " " : "") + fmt(a);
        if (i > 0) decreasing = decreasing && a < std::abs(normalized[i - 1][n - 3]);
      }
      t.checks.push_back({"normalized_c" + std::to_string(n) + "_decreasing", decreasing, detail});
    }
  }
  return t;
}

Table cmd_frcp_check(const RunConfig& c) {
  Table t = start(c);
  const MatrixKernel kernel = kernel_by_variant(c.kernel);
  t.columns = {"L", "nodes", "commutator_tail_ratio", "commutator_residual", "defect_tail_ratio",
               "defect_residual", "condition_iv_max_abs", "B_operator_norm"};
  if (c.step) {
    t.columns.insert(t.columns.end(), {"step_identity_max_residual", "step_inner_max_abs",
                                       "step_projection_defect", "step_cross_trace_norm"});
  }
  const FrcpData data = frcp_for(kernel, c.Ls.front());
  t.checks.push_back({"alpha_beta_constraint", data.constraint_holds(),
                      "alpha=" + fmt(data.alpha) + " beta=" + fmt(data.beta) +
                          " lambda=" + fmt(data.lambda)});
  for (double L : c.Ls) {
    const auto ids = frcp_identity_checks(kernel, L, c.nodes);
    const ConditionRow cond =
        condition_inner_products(condition_inputs(kernel, L, c.grid_density), L, 3, 3);
    // Diagnostic only: B is not uniformly bounded in L for Sine4.
    const double b_norm = operator_norm(kernel_operators(kernel, domain_grid(L, c.grid_density)).B);
    std::vector<Cell> row{L, static_cast<long long>(ids[0].nodes), ids[0].report.tail_ratio,
                          ids[0].report.residual, ids[1].report.tail_ratio,
                          ids[1].report.residual, cond.max_abs, b_norm};
    for (const IdentityCheck& id : ids) {
      t.checks.push_back({id.name + "_rank_L" + fmt(L), id.report.pass,
                          "declared=" + std::to_string(id.report.declared_rank) +
                              " tail_ratio=" + fmt(id.report.tail_ratio)});
      t.checks.push_back({id.name + "_closed_form_L" + fmt(L), id.report.residual <= 1e-5,
                          "max_abs=" + fmt(id.report.residual) + " tol=1e-05"});
    }
    if (c.step) {
      const auto step_ids = step_identity_checks(kernel, *c.step, L, c.grid_density);
      double worst = 0.0;
      bool ranks = true;
      for (const auto& id : step_ids) {
        worst = std::max(worst, id.report.residual);
        ranks = ranks && id.report.pass;
      }
      const auto srow = condition_scan_step(kernel, *c.step, {L}, c.grid_density).front();
      row.insert(row.end(), {worst, srow.max_abs_inner, srow.max_projection_defect,
                             srow.max_cross_trace_norm});
      t.checks.push_back({"step_identities_L" + fmt(L), ranks && worst <= 1e-5,
                          "max_abs=" + fmt(worst)});
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table cmd_mc_clt(const RunConfig& c) {
  Table t = start(c);
  const MatrixKernel kernel = kernel_by_variant(c.kernel);
  EnsembleConfig e;
  e.beta = c.kernel == KernelVariant::Sine4 ? 4 : 1;
  e.matrix_size = c.matrix_size;
  e.samples = c.samples;
  e.seed = c.seed;
  e.L = c.Ls.front();
  e.step = c.step;
  t.metadata.push_back({"beta", std::to_string(e.beta)});
  t.metadata.push_back({"rng", "mt19937_64 per sample, seed_seq(seed, index)"});
  const auto rows = fluctuation_scan(e, c.Ls);
  t.columns = {"L", "mean", "expected_mean", "standard_error", "variance", "skewness",
               "excess_kurtosis", "ks", "ks_midpoint", "log_slope"};
  const StepFunction f = statistic_of(c);
  std::vector<double> vars;
  for (const CountSample& s : rows) {
    double expected = 0.0;
    for (const StepPiece& p : f.pieces()) expected += kernel.lambda * p.lambda * (p.b - p.a) * s.L;
    t.rows.push_back({s.L, s.mean, expected, s.standard_error, s.variance, s.skewness,
                      s.excess_kurtosis, s.ks, s.ks_midpoint, std::string()});
    vars.push_back(s.variance);
    const double z = std::abs(s.mean - expected) / s.standard_error;
    t.checks.push_back({"mean_within_3se_L" + fmt(s.L), z <= 3.0,
                        "mean=" + fmt(s.mean) + " expected=" + fmt(expected) + " z=" + fmt(z)});
  }
  if (c.Ls.size() >= 2) {
    const double slope = log_slope(c.Ls, vars);
    t.rows.push_back({std::string("fit"), std::string(), std::string(), std::string(),
                      std::string(), std::string(), std::string(), std::string(), std::string(),
                      slope});
    if (const auto coef = variance_log_coefficient(kernel, c.step)) {
      t.checks.push_back(within("variance_log_slope", slope, *coef, 0.25));
    }
  }
  const CountSample& last = rows.back();
  t.checks.push_back({"ks_at_largest_L", last.ks <= 0.02,
                      "ks=" + fmt(last.ks) + " threshold=0.02 ks_midpoint=" + fmt(last.ks_midpoint)});
  t.checks.push_back({"skewness_within_4se", std::abs(last.skewness) <= 4.0 * last.skewness_se,
                      "skewness=" + fmt(last.skewness) + " se=" + fmt(last.skewness_se)});
  t.checks.push_back({"kurtosis_within_4se",
                      std::abs(last.excess_kurtosis) <= 4.0 * last.kurtosis_se,
                      "excess_kurtosis=" + fmt(last.excess_kurtosis) + " se=" + fmt(last.kurtosis_se)});
  return t;
}

Table run_command(const RunConfig& config) {
  config.validate();
  switch (config.command) {
    case Command::CorrelationEval:
      return cmd_correlation_eval(config);
    case Command::VarianceScan:
      return cmd_variance_scan(config);
    case Command::CumulantScan:
      return cmd_cumulant_scan(config);
    case Command::FrcpCheck:
      return cmd_frcp_check(config);
    case Command::McClt:
      return cmd_mc_clt(config);
  }
  throw ValidationError("unknown command");
}

std::string timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

std::string csv_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return fmt(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

}  // namespace

void write_csv(const Table& t, std::ostream& out, const std::string& timestamp) {
  for (const auto& [k, v] : t.metadata) out << "# " << k << ": " << v << '\n';
  out << "# timestamp: " << timestamp << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
  for (const Check& c : t.checks) {
    out << "#check " << c.name << ',' << (c.pass ? "PASS" : "FAIL") << ',' << c.detail << '\n';
  }
  out << "#status " << (t.all_pass() ? "PASS" : "FAIL") << '\n';
}

void write_json(const Table& t, std::ostream& out, const std::string& timestamp) {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : t.metadata) j["metadata"][k] = v;
  j["metadata"]["timestamp"] = timestamp;
  j["columns"] = t.columns;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const Cell& c : row) {
      std::visit([&r](const auto& v) { r.push_back(v); }, c);
    }
    j["rows"].push_back(r);
  }
  j["checks"] = nlohmann::ordered_json::array();
  for (const Check& c : t.checks) {
    j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  j["status"] = t.all_pass() ? "PASS" : "FAIL";
  out << j.dump(2) << '\n';
}

int run(int argc, char** argv) {
  CLI::App app{"Cumulants, commutator identities and Monte Carlo checks for sine-beta Pfaffian processes"};
  app.require_subcommand(1);
  RunConfig config;
  std::string kernel = "sine4";
  std::string step;
  std::string points;
  std::string points_file;
  std::string format = "csv";
  std::vector<double> Ls;

  struct Entry {
    Command command;
    const char* help;
  };
  const Entry entries[] = {
      {Command::CorrelationEval, "k-point correlation functions at given points"},
      {Command::VarianceScan, "expectation and variance across L by direct quadrature"},
      {Command::CumulantScan, "cumulants from trace powers across L"},
      {Command::FrcpCheck, "commutator identities, ranks and inner-product conditions"},
      {Command::McClt, "Monte Carlo fluctuations of tridiagonal beta ensembles"},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(to_string(e.command), e.help);
    sub->add_option("--kernel", kernel, "sine1 or sine4")->check(CLI::IsMember({"sine1", "sine4"}));
    sub->add_option("--L", Ls, "comma-separated ascending window half-widths")->delimiter(',');
    sub->add_option("--grid-density", config.grid_density, "quadrature nodes per unit length");
    sub->add_option("--nmax", config.n_max, "highest cumulant order");
    sub->add_option("--kmax", config.k_max, "highest trace power");
    sub->add_option("--seed", config.seed, "random seed");
    sub->add_option("--samples", config.samples, "Monte Carlo samples");
    sub->add_option("--matrix-size", config.matrix_size, "tridiagonal matrix size");
    sub->add_option("--nodes", config.nodes, "grid nodes for commutator checks");
    sub->add_option("--step", step, "step function lambda:a:b,lambda:a:b");
    sub->add_option("--points", points, "comma-separated points of one set");
    sub->add_option("--points-file", points_file, "file with one point set per line");
    sub->add_option("--out", config.out, "output path (stdout when omitted)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    subs.push_back({sub, e.command});
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    for (const auto& [sub, command] : subs) {
      if (sub->parsed()) config.command = command;
    }
    config.kernel = parse_kernel_variant(kernel);
    config.Ls = Ls.empty() && config.command != Command::CorrelationEval ? default_Ls(config.command) : Ls;
    config.format = format == "json" ? Format::Json : Format::Csv;
    if (!step.empty()) config.step = StepFunction::parse(step);
    if (!points.empty()) {
      std::istringstream in(points);
      config.point_sets.push_back(parse_points(in).front());
    }
    if (!points_file.empty()) {
      std::ifstream in(points_file);
      if (!in) throw ValidationError("cannot open points file '" + points_file + "'");
      for (auto& p : parse_points(in)) config.point_sets.push_back(std::move(p));
    }
    const Table table = run_command(config);
    const std::string stamp = timestamp_now();
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!config.out.empty()) {
      file.open(config.out);
      if (!file) throw ValidationError("cannot write '" + config.out + "'");
      out = &file;
    }
    if (config.format == Format::Json) {
      write_json(table, *out, stamp);
    } else {
      write_csv(table, *out, stamp);
    }
    for (const Check& c : table.checks) {
      if (!c.pass) std::cerr << "FAIL " << c.name << ": " << c.detail << '\n';
    }
    return table.all_pass() ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace pfclt::cli
