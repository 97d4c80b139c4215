#include "riccati_lab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <set>
#include <string>

#include <Eigen/Eigenvalues>

#include "riccati_lab/construction.hpp"
#include "riccati_lab/counterexample.hpp"
#include "riccati_lab/reports.hpp"
#include "riccati_lab/scenario.hpp"
#include "riccati_lab/slq_mc.hpp"

namespace rlab {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void usage_fail(const std::string& msg) {
  throw ValidationError("BadUsage", msg);
}

struct ParsedArgs {
  std::string command;
  std::string scenario_path;
  CliOverrides overrides;
  bool help = false;
};

const std::set<std::string>& command_set() {
  static const std::set<std::string> kCommands = {
      "riccati", "slq", "tree", "fbsde", "blocks", "galerkin",
      "counterexample"};
  return kCommands;
}

std::uint64_t parse_seed(const std::string& v) {
  if (v.empty() || v[0] == '-')
    usage_fail("--seed must be a non-negative integer");
  try {
    std::size_t pos = 0;
    std::uint64_t out = std::stoull(v, &pos);
    if (pos != v.size()) usage_fail("--seed must be a non-negative integer");
    return out;
  } catch (const std::logic_error&) {
    usage_fail("--seed must be a non-negative integer");
  }
}

std::int64_t parse_paths(const std::string& v) {
  try {
    std::size_t pos = 0;
    std::int64_t out = std::stoll(v, &pos);
    if (pos != v.size()) usage_fail("--paths must be an integer");
    return out;
  } catch (const std::logic_error&) {
    usage_fail("--paths must be an integer");
  }
}

double parse_dt(const std::string& v) {
  try {
    std::size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) usage_fail("--dt must be a number");
    return out;
  } catch (const std::logic_error&) {
    usage_fail("--dt must be a number");
  }
}

ParsedArgs parse_args(const std::vector<std::string>& args) {
  ParsedArgs pa;
  std::vector<std::string> positional;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string a = args[i];
    if (a == "--help" || a == "-h") {
      pa.help = true;
      return pa;
    }
    std::string value;
    bool has_value = false;
    auto eq = a.find('=');
    if (a.rfind("--", 0) == 0 && eq != std::string::npos) {
      value = a.substr(eq + 1);
      a = a.substr(0, eq);
      has_value = true;
    }
    auto take_value = [&]() -> std::string {
      if (has_value) return value;
      if (i + 1 >= args.size()) usage_fail(a + " needs a value");
      return args[++i];
    };
    if (a == "--seed")
      pa.overrides.seed = parse_seed(take_value());
    else if (a == "--paths")
      pa.overrides.n_paths = parse_paths(take_value());
    else if (a == "--dt")
      pa.overrides.dt = parse_dt(take_value());
    else if (a == "--out")
      pa.overrides.out_dir = take_value();
    else if (a.rfind("-", 0) == 0)
      usage_fail("unknown option " + a);
    else
      positional.push_back(a);
  }
  if (positional.size() != 2)
    usage_fail("expected <command> <scenario.json>");
  pa.command = positional[0];
  pa.scenario_path = positional[1];
  if (!command_set().count(pa.command))
    usage_fail("unknown command '" + pa.command + "'");
  return pa;
}

double tolerance_or(const Scenario& s, const char* key, double dflt) {
  if (!s.tolerances.contains(key)) return dflt;
  const Json& j = s.tolerances.at(key);
  if (!j.is_number())
    throw ValidationError("BadScenario", "numerics.tolerances." +
                                             std::string(key) +
                                             " must be a number");
  return j.get<double>();
}

int path_count(const Scenario& s) {
  return static_cast<int>(
      std::min<std::int64_t>(s.n_paths, std::numeric_limits<int>::max()));
}

CoefficientSet lq_coefficients(const Json& problem, const TimeGrid& grid) {
  CoefficientSet cs = coefficient_set_from_json(problem, grid);
  cs.validate(grid);
  return cs;
}

void matrix_columns(std::vector<std::string>& cols, const std::string& prefix,
                    int rows, int n_cols) {
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < n_cols; ++j)
      cols.push_back(prefix + "_" + std::to_string(i) + "_" +
                     std::to_string(j));
}

void matrix_cells(std::vector<CsvCell>& cells, const MatrixXd& M) {
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) cells.push_back(M(i, j));
}

void nan_cells(std::vector<CsvCell>& cells, int rows, int cols) {
  for (int i = 0; i < rows * cols; ++i) cells.push_back(kNan);
}

double min_eigenvalue(const MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(
      0.5 * (M + M.transpose()));
  return es.eigenvalues().minCoeff();
}

Json cmd_riccati(const Scenario& s) {
  TimeGrid grid = s.grid();
  CoefficientSet cs = lq_coefficients(s.problem, grid);
  VectorXd eta = eta_from_json(s.problem, cs.n);
  bool deterministic_lq =
      cs.is_zero(cs.C, grid, 1e-14) && cs.is_zero(cs.D, grid, 1e-14);
  RiccatiSolution sol = deterministic_lq ? solve_riccati_det(cs, grid)
                                         : solve_bsre_det(cs, grid);
  double value = feedback_value(sol, eta);

  if (s.wants("csv")) {
    std::vector<std::string> cols = {"t"};
    matrix_columns(cols, "p", cs.n, cs.n);
    matrix_columns(cols, "theta", cs.m, cs.n);
    CsvWriter csv(s.out_dir + "/riccati.csv", cols);
    for (int k = 0; k <= grid.steps; ++k) {
      std::vector<CsvCell> cells = {grid.node(k)};
      matrix_cells(cells, sol.P[static_cast<std::size_t>(k)]);
      matrix_cells(cells, sol.Theta[static_cast<std::size_t>(k)]);
      csv.row(cells);
    }
    csv.close();
  }

  Json summary;
  summary["command"] = "riccati";
  summary["deterministic_lq"] = deterministic_lq;
  summary["value"] = value;
  summary["p0_min_eigenvalue"] = min_eigenvalue(sol.P0());
  if (deterministic_lq && grid.steps >= 4) {
    AdjointCheck adj = adjoint_identity_check(cs, sol, eta);
    summary["adjoint_max_residual"] = adj.max_residual;
    summary["adjoint_terminal_residual"] = adj.terminal_residual;
  } else {
    summary["adjoint_max_residual"] = nullptr;
    summary["adjoint_terminal_residual"] = nullptr;
  }
  std::printf("riccati: value %.12g\n", value);
  return summary;
}

Json cmd_slq(const Scenario& s) {
  TimeGrid grid = s.grid();
  CoefficientSet cs = lq_coefficients(s.problem, grid);
  VectorXd eta = eta_from_json(s.problem, cs.n);
  RiccatiSolution sol = solve_bsre_det(cs, grid);
  double value = feedback_value(sol, eta);

  const Json& jc = s.problem.at("control");
  std::string ctype = jc.at("type").get<std::string>();
  ControlFn control;
  std::optional<CostReport> lyap;
  if (ctype == "feedback") {
    control = feedback_from_solution(sol);
    lyap = lyapunov_cost(cs, feedback_interpolant(cs, sol), grid, eta);
  } else if (ctype == "zero") {
    control = zero_control(cs.m);
    MatrixXd zero_gain = MatrixXd::Zero(cs.m, cs.n);
    lyap = lyapunov_cost(
        cs, [zero_gain](double) { return zero_gain; }, grid, eta);
  } else {
    VectorXd u = matrix_from_json(jc.at("value"), cs.m, 1, "control.value");
    control = open_loop([u](double) { return u; });
  }

  int n_paths = path_count(s);
  CostReport mc = mc_cost(cs, control, eta, grid, n_paths, s.seed);
  McResidual cos_check =
      completion_of_squares_check(cs, sol, control, eta, n_paths, s.seed);

  if (s.wants("csv")) {
    CsvWriter csv(s.out_dir + "/slq.csv",
                  {"method", "value", "std_error", "n_paths", "steps", "dt",
                   "seed"});
    csv.row({std::string("feedback_value"), value, 0.0, 0ll,
             static_cast<long long>(grid.steps), grid.dt(),
             static_cast<long long>(s.seed)});
    if (lyap)
      csv.row({lyap->method, lyap->value, lyap->std_error,
               static_cast<long long>(lyap->n_paths),
               static_cast<long long>(lyap->steps), lyap->dt,
               static_cast<long long>(lyap->seed)});
    csv.row({mc.method, mc.value, mc.std_error,
             static_cast<long long>(mc.n_paths),
             static_cast<long long>(mc.steps), mc.dt,
             static_cast<long long>(mc.seed)});
    csv.close();
  }

  Json summary;
  summary["command"] = "slq";
  summary["control"] = ctype;
  summary["feedback_value"] = value;
  summary["lyapunov"] = lyap ? Json(lyap->value) : Json(nullptr);
  summary["monte_carlo"] = mc.value;
  summary["mc_std_error"] = mc.std_error;
  summary["completion_residual"] = cos_check.residual;
  summary["completion_std_error"] = cos_check.std_error;
  if (lyap) {
    double sigma = tolerance_or(s, "mc_sigma", 3.0);
    double slack = tolerance_or(s, "dt_slack", 5.0);
    double tol = sigma * mc.std_error +
                 slack * grid.dt() * (1.0 + std::abs(lyap->value));
    summary["mc_vs_lyapunov"] = std::abs(mc.value - lyap->value);
    summary["consistent"] = std::abs(mc.value - lyap->value) <= tol;
  } else {
    summary["mc_vs_lyapunov"] = nullptr;
    summary["consistent"] = nullptr;
  }
  std::printf("slq: feedback value %.12g, monte carlo %.12g (se %.3g)\n",
              value, mc.value, mc.std_error);
  return summary;
}

Json cmd_tree(const Scenario& s) {
  TreeModel tm = tree_model_from_json(s.problem);
  VectorXd eta = eta_from_json(s.problem, tm.n);
  TreeSolution sol = solve_bsre_tree(tm);
  double value = 0.5 * eta.dot(sol.P0() * eta);

  double range_residual = 0.0;
  bool all_feasible = true;
  for (std::size_t k = 0; k < sol.range_residual.size(); ++k)
    for (std::size_t h = 0; h < sol.range_residual[k].size(); ++h) {
      range_residual = std::max(range_residual, sol.range_residual[k][h]);
      all_feasible = all_feasible && sol.feasible[k][h];
    }

  std::optional<QpOracleResult> qp;
  std::int64_t stacked =
      static_cast<std::int64_t>(tm.m) * ((std::int64_t{1} << tm.depth) - 1);
  if (tm.depth <= 12 && stacked <= 2000) qp = qp_oracle(tm, eta);

  int csv_max_step = std::min(tm.depth, 10);
  if (s.wants("csv")) {
    std::vector<std::string> cols = {"step", "history"};
    matrix_columns(cols, "p", tm.n, tm.n);
    matrix_columns(cols, "lambda", tm.n, tm.n);
    matrix_columns(cols, "theta", tm.m, tm.n);
    CsvWriter csv(s.out_dir + "/tree.csv", cols);
    for (int k = 0; k <= csv_max_step; ++k) {
      std::uint32_t width = 1u << k;
      for (std::uint32_t h = 0; h < width; ++h) {
        std::vector<CsvCell> cells = {static_cast<long long>(k),
                                      history_string(h, k)};
        matrix_cells(cells, sol.P[static_cast<std::size_t>(k)][h]);
        if (k < tm.depth) {
          matrix_cells(cells, sol.Lambda[static_cast<std::size_t>(k)][h]);
          matrix_cells(cells, sol.Theta[static_cast<std::size_t>(k)][h]);
        } else {
          nan_cells(cells, tm.n, tm.n);
          nan_cells(cells, tm.m, tm.n);
        }
        csv.row(cells);
      }
    }
    csv.close();
  }

  Json summary;
  summary["command"] = "tree";
  summary["value"] = value;
  summary["all_feasible"] = all_feasible;
  summary["range_residual"] = range_residual;
  summary["qp_value"] = qp ? Json(qp->value) : Json(nullptr);
  summary["qp_gap"] = qp ? Json(std::abs(qp->value - value)) : Json(nullptr);
  summary["qp_stationarity_residual"] =
      qp ? Json(qp->stationarity_residual) : Json(nullptr);
  summary["csv_max_step"] = csv_max_step;
  if (qp)
    std::printf("tree: value %.12g, qp oracle %.12g\n", value, qp->value);
  else
    std::printf("tree: value %.12g (qp oracle skipped at this size)\n", value);
  return summary;
}

Json cmd_fbsde(const Scenario& s) {
  std::vector<double> dt_list;
  for (const Json& e : s.problem.at("dt_list"))
    dt_list.push_back(e.get<double>());

  Json per_dt = Json::array();
  std::optional<CsvWriter> csv;
  if (s.wants("csv"))
    csv.emplace(s.out_dir + "/fbsde.csv",
                std::vector<std::string>{"dt", "t", "err_inverse", "err_P",
                                         "err_Lambda", "bsde_residual"});
  double prev_max = std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (double dt : dt_list) {
    long long st = std::llround((s.horizon - s.t0) / dt);
    if (st < 2 || st > 20000000)
      throw ValidationError("BadScenario",
                            "problem.dt_list entry " + format_double(dt) +
                                " gives an unusable step count");
    TimeGrid grid = TimeGrid::make(s.t0, s.horizon, static_cast<int>(st));
    CoefficientSet cs = lq_coefficients(s.problem, grid);
    RiccatiSolution sol = solve_bsre_det(cs, grid);
    ConstructionDiagnostics diag =
        simulate_construction(cs, sol, path_count(s), s.seed);
    if (csv) {
      for (int k = 0; k <= grid.steps; ++k) {
        double res = k < grid.steps
                         ? diag.bsde_residual[static_cast<std::size_t>(k)]
                         : kNan;
        csv->row({grid.dt(), grid.node(k),
                  diag.err_inverse[static_cast<std::size_t>(k)],
                  diag.err_P[static_cast<std::size_t>(k)],
                  diag.err_Lambda[static_cast<std::size_t>(k)], res});
      }
    }
    Json row;
    row["dt"] = grid.dt();
    row["steps"] = grid.steps;
    row["max_err_inverse"] = diag.max_err_inverse;
    row["max_err_P"] = diag.max_err_P;
    row["max_err_Lambda"] = diag.max_err_Lambda;
    row["max_bsde_residual"] = diag.max_bsde_residual;
    per_dt.push_back(std::move(row));
    monotone = monotone && diag.max_err_inverse < prev_max;
    prev_max = diag.max_err_inverse;
    std::printf("fbsde: dt %.6g, max ||X Xt' - I|| %.6g\n", grid.dt(),
                diag.max_err_inverse);
  }
  if (csv) csv->close();

  Json summary;
  summary["command"] = "fbsde";
  summary["runs"] = std::move(per_dt);
  summary["err_inverse_monotone"] =
      dt_list.size() > 1 ? Json(monotone) : Json(nullptr);
  return summary;
}

Json cmd_blocks(const Scenario& s) {
  TimeGrid grid = s.grid();
  const Json& arr = s.problem.at("blocks");
  std::vector<Block> blocks;
  std::vector<VectorXd> etas;
  for (const Json& jb : arr) {
    Block b = block_from_json(jb, grid);
    b.coeffs.validate(grid);
    etas.push_back(eta_from_json(jb, b.coeffs.n));
    blocks.push_back(std::move(b));
  }
  BlockAssembly assembly = assemble_blocks(blocks, grid, etas);

  if (s.wants("csv")) {
    CsvWriter csv(s.out_dir + "/blocks.csv",
                  {"block", "value_contribution", "picard_iterations",
                   "as8_margin"});
    for (std::size_t i = 0; i < blocks.size(); ++i)
      csv.row({static_cast<long long>(i), assembly.contributions[i],
               static_cast<long long>(assembly.picard_iterations[i]),
               assembly.as8_margins[i]});
    csv.close();
  }

  double phi_max_gap = -1.0;
  Json per_block = Json::array();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    Json row;
    row["value"] = assembly.contributions[i];
    row["picard_iterations"] = assembly.picard_iterations[i];
    row["as8_margin"] = assembly.as8_margins[i];
    row["phi_vs_direct"] = assembly.phi_vs_direct[i] < 0.0
                               ? Json(nullptr)
                               : Json(assembly.phi_vs_direct[i]);
    per_block.push_back(std::move(row));
    phi_max_gap = std::max(phi_max_gap, assembly.phi_vs_direct[i]);
  }

  Json summary;
  summary["command"] = "blocks";
  summary["total"] = assembly.total;
  summary["blocks"] = std::move(per_block);
  summary["phi_max_gap"] =
      phi_max_gap < 0.0 ? Json(nullptr) : Json(phi_max_gap);
  std::printf("blocks: total value %.12g over %zu blocks\n", assembly.total,
              blocks.size());
  return summary;
}

Json cmd_galerkin(const Scenario& s) {
  TimeGrid grid = s.grid();
  SpdeKind kind = parse_spde_kind(s.problem.at("kind").get<std::string>());
  SpdeCoefficients sc =
      spde_coefficients_from_json(s.problem.at("coefficients"));
  std::vector<int> levels;
  for (const Json& e : s.problem.at("levels")) levels.push_back(e.get<int>());
  int block_dim = kind == SpdeKind::heat ? 1 : 2;
  std::vector<VectorXd> etas =
      spectral_etas_from_json(s.problem.at("eta"), levels.back(), block_dim);

  std::optional<CsvWriter> csv;
  if (s.wants("csv"))
    csv.emplace(s.out_dir + "/galerkin.csv",
                std::vector<std::string>{"N", "mode", "value_contribution",
                                         "as8_margin", "hs_partial_sum"});
  Json jlevels = Json::array();
  double prev_value = kNan;
  double hs_tail_at_max = kNan;
  for (int N : levels) {
    SpectralModel model = build_model(kind, N, sc);
    std::vector<VectorXd> eta_n(etas.begin(), etas.begin() + N);
    TruncatedSolve ts = solve_truncated(model, grid, eta_n);
    HsReport hs = hs_embedding_check(model);
    if (csv) {
      for (int j = 1; j <= N; ++j)
        csv->row({static_cast<long long>(N), static_cast<long long>(j),
                  ts.mode_values[static_cast<std::size_t>(j - 1)],
                  ts.as8_margins[static_cast<std::size_t>(j - 1)],
                  hs.weight_partial[static_cast<std::size_t>(j - 1)]});
    }
    Json row;
    row["N"] = N;
    row["value"] = ts.total;
    row["gap"] = std::isnan(prev_value)
                     ? Json(nullptr)
                     : Json(std::abs(ts.total - prev_value) /
                            (1.0 + std::abs(ts.total)));
    jlevels.push_back(std::move(row));
    prev_value = ts.total;
    hs_tail_at_max = hs.weight_tail;
    std::printf("galerkin: N %d, value %.12g\n", N, ts.total);
  }
  if (csv) csv->close();

  Json summary;
  summary["command"] = "galerkin";
  summary["kind"] = spde_kind_name(kind);
  summary["levels"] = std::move(jlevels);
  summary["hs_weight_tail_at_max"] = hs_tail_at_max;
  return summary;
}

Json cmd_counterexample(const Scenario& s) {
  CounterexampleConfig cfg = counterexample_config_from_json(s);
  CounterexampleBatch batch = simulate_paths(cfg);
  MeanSe residual = bsre_residual_check(batch);
  std::vector<HorizonRow> rows = unboundedness_statistic(batch);

  if (s.wants("csv")) {
    CsvWriter csv(s.out_dir + "/counterexample.csv",
                  {"epsilon", "exp_moment_mean", "theta_sq_q50",
                   "theta_sq_q90", "theta_sq_q99"});
    for (const HorizonRow& r : rows)
      csv.row({r.eps_i, r.exp_moment_mean, r.theta_sq_q50, r.theta_sq_q90,
               r.theta_sq_q99});
    csv.close();
  }

  bool monotone = rows.size() > 1;
  for (std::size_t i = 1; i < rows.size(); ++i)
    monotone = monotone && rows[i].exp_moment_mean > rows[i - 1].exp_moment_mean;

  double crossed = 0.0;
  for (std::uint8_t c : batch.crossed) crossed += c;

  Json summary;
  summary["command"] = "counterexample";
  summary["n_paths"] = cfg.n_paths;
  summary["crossed_fraction"] = crossed / static_cast<double>(cfg.n_paths);
  summary["frac_violation_I"] = batch.frac_violation_I;
  summary["frac_violation_Y"] = batch.frac_violation_Y;
  summary["max_overshoot_sigma"] = batch.max_overshoot_sigma;
  summary["residual_mean"] = residual.mean;
  summary["residual_std_error"] = residual.se;
  summary["residual_within_3se"] =
      std::abs(residual.mean) <= 3.0 * residual.se;
  Json jh = Json::array();
  for (const HorizonRow& r : rows) {
    Json row;
    row["epsilon"] = r.eps_i;
    row["exp_moment_mean"] = r.exp_moment_mean;
    row["exp_moment_std_error"] = r.exp_moment_se;
    jh.push_back(std::move(row));
  }
  summary["horizons"] = std::move(jh);
  summary["exp_moment_monotone"] =
      rows.size() > 1 ? Json(monotone) : Json(nullptr);
  std::printf(
      "counterexample: bound violations I %.4g%%, Y %.4g%%, residual %.3g "
      "(se %.3g)\n",
      100.0 * batch.frac_violation_I, 100.0 * batch.frac_violation_Y,
      residual.mean, residual.se);
  return summary;
}

int run_scenario(Scenario& s) {
  if (s.command == "fbsde" && !s.problem.contains("dt_list"))
    s.problem["dt_list"] = Json::array({s.dt()});

  ensure_directory(s.out_dir);
  write_text_file(s.out_dir + "/scenario_resolved.json",
                  s.resolved().dump(2) + "\n");

  Json summary;
  if (s.command == "riccati")
    summary = cmd_riccati(s);
  else if (s.command == "slq")
    summary = cmd_slq(s);
  else if (s.command == "tree")
    summary = cmd_tree(s);
  else if (s.command == "fbsde")
    summary = cmd_fbsde(s);
  else if (s.command == "blocks")
    summary = cmd_blocks(s);
  else if (s.command == "galerkin")
    summary = cmd_galerkin(s);
  else if (s.command == "counterexample")
    summary = cmd_counterexample(s);
  else
    throw ValidationError("BadScenario", "unknown command '" + s.command + "'");

  if (s.wants("json"))
    write_text_file(s.out_dir + "/summary.json", summary.dump(2) + "\n");
  return 0;
}

}  // namespace

std::string cli_usage() {
  return
      "usage: riccati-lab <command> <scenario.json> [options]\n"
      "\n"
      "commands:\n"
      "  riccati         backward Riccati solve: value, gains, adjoint residuals\n"
      "  slq             cost routes: feedback value, Lyapunov ODE, Monte Carlo\n"
      "  tree            binomial-tree backward recursion with QP cross-check\n"
      "  fbsde           forward-backward reconstruction diagnostics\n"
      "  blocks          decoupled block assembly with the inverse-transform route\n"
      "  galerkin        spectral truncation value convergence\n"
      "  counterexample  unbounded-feedback model diagnostics\n"
      "\n"
      "options:\n"
      "  --seed N   override numerics.seed\n"
      "  --paths N  override numerics.n_paths\n"
      "  --dt X     override the step size (recomputes numerics.steps)\n"
      "  --out DIR  override output.directory\n";
}

int run_cli(const std::vector<std::string>& args) {
  try {
    ParsedArgs pa = parse_args(args);
    if (pa.help) {
      std::fputs(cli_usage().c_str(), stdout);
      return 0;
    }
    Scenario s = load_scenario(pa.scenario_path);
    if (s.command != pa.command)
      throw ValidationError("BadScenario",
                            "scenario declares command '" + s.command +
                                "' but '" + pa.command + "' was requested");
    apply_overrides(s, pa.overrides);
    return run_scenario(s);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    if (e.kind() == "BadUsage") std::fputs(cli_usage().c_str(), stderr);
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace rlab
