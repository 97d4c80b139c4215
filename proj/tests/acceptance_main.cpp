// Acceptance checks for the whole laboratory, one numbered criterion per
// line. Run with --criterion N for a single check (the ctest registration)
// or with no arguments for the full list. Exit code 0 iff every selected
// criterion passes.
//
// Criterion 10 runs a bounds clause that demands zero violations across 1e5
// paths; the one-step overshoot allowance is a 3 sigma band, so a handful of
// Gaussian excursions past it are expected and the clause fails by design of
// the statistics, not by a defect. The line reports the measured fractions.

#include "riccati_lab/blocks.hpp"
#include "riccati_lab/cli.hpp"
#include "riccati_lab/construction.hpp"
#include "riccati_lab/counterexample.hpp"
#include "riccati_lab/ode.hpp"
#include "riccati_lab/reports.hpp"
#include "riccati_lab/scenario.hpp"
#include "riccati_lab/slq_mc.hpp"
#include "riccati_lab/spectral.hpp"
#include "riccati_lab/tree.hpp"
#include "test_support.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fcntl.h>
#include <unistd.h>

using namespace rlab;
using namespace rlab::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string source_dir() {
  const char* env = std::getenv("RLAB_SOURCE_DIR");
  return env ? env : ".";
}

// ---------------------------------------------------------------------------
// 1. The quadratic ODE blows up at 1/y0; the guard must locate the time.

Outcome criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  auto field = [](double, const MatrixXd& y) { return MatrixXd(y * y); };
  MatrixXd y0(1, 1);
  y0 << 2.0;
  OdeResult r = integrate_ode(field, y0, TimeGrid::make(0, 1, 200000),
                              Direction::forward);
  const double elapsed = seconds_since(start);
  if (!r.blew_up)
    return {false, "integration of y' = y^2 from y(0) = 2 never blew up"};
  const double estimate = 0.5 * (r.last_valid_time + r.first_invalid_time);
  const double err = std::abs(estimate - 0.5);
  const bool pass = err <= 1e-3 && elapsed < 1.0;
  return {pass, "blow-up time estimate " + num(estimate, 8) + " vs 0.5 (err " +
                    num(err) + ", tol 1e-3), runtime " + num(elapsed, 2) +
                    " s (< 1 s)"};
}

// ---------------------------------------------------------------------------
// 2. Scalar closed form p(0) = tanh(1) and the adjoint identity.

Outcome criterion_2() {
  CoefficientSet cs = constant_set(
      1, 1, MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1), MatrixXd::Zero(1, 1),
      MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1),
      MatrixXd::Zero(1, 1));
  TimeGrid grid = TimeGrid::make(0, 1, 1000);
  RiccatiSolution sol = solve_riccati_det(cs, grid);
  const double p0 = sol.P0()(0, 0);
  const double err = std::abs(p0 - std::tanh(1.0));
  AdjointCheck adj = adjoint_identity_check(cs, sol, VectorXd::Ones(1));
  const double res = std::max(adj.max_residual, adj.terminal_residual);
  const bool pass = err <= 1e-8 && res <= 1e-6;
  return {pass, "p(0) err " + num(err) + " (tol 1e-8), adjoint residual " +
                    num(res) + " (tol 1e-6) at dt = 1e-3"};
}

// ---------------------------------------------------------------------------
// 3. Value identity on random instances: Riccati quadratic form vs moment
//    oracle at dt = 1e-4, Monte Carlo agreement at 1e4 paths.

Outcome criterion_3() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 gen(101);
  TimeGrid fine = TimeGrid::make(0, 1, 10000);
  TimeGrid mc_grid = TimeGrid::make(0, 1, 100);
  double worst_identity = 0.0;
  double worst_mc_margin = -1e300;  // |mc - value| minus its allowance
  for (int trial = 0; trial < 10; ++trial) {
    CoefficientSet cs = random_set(gen, 3, 2, 1.0);
    VectorXd eta = random_vector(gen, 3);
    RiccatiSolution sol = solve_bsre_det(cs, fine);
    const double value = feedback_value(sol, eta);
    CostReport lyap =
        lyapunov_cost(cs, feedback_interpolant(cs, sol), fine, eta);
    worst_identity =
        std::max(worst_identity,
                 std::abs(value - lyap.value) / (1.0 + std::abs(value)));

    CostReport mc = mc_cost(cs, feedback_from_solution(sol), eta, mc_grid,
                            10000, 1000 + static_cast<std::uint64_t>(trial));
    const double allowance = 3.0 * mc.std_error +
                             5.0 * mc_grid.dt() * (1.0 + std::abs(value));
    worst_mc_margin =
        std::max(worst_mc_margin, std::abs(mc.value - value) - allowance);
  }
  const double elapsed = seconds_since(start);
  const bool pass =
      worst_identity <= 1e-6 && worst_mc_margin <= 0.0 && elapsed < 30.0;
  return {pass, "10 instances: worst relative value-vs-moment gap " +
                    num(worst_identity) +
                    " (tol 1e-6), worst MC excess over 3 SE + 5 dt (1+v) " +
                    num(worst_mc_margin) + ", runtime " + num(elapsed, 3) +
                    " s (< 30 s)"};
}

// ---------------------------------------------------------------------------
// 4. Completion of squares under common random numbers at two grids, with
//    the dt-portion of the residual shrinking across the refinement.

Outcome criterion_4() {
  // Moderate noise keeps the cost variance small enough that the residual's
  // dt-portion stands above the Monte Carlo band instead of hiding in it.
  std::mt19937_64 gen(103);
  CoefficientSet cs = random_set(gen, 2, 1, 0.5);
  VectorXd eta = random_vector(gen, 2);
  // A control far from optimal: the quadratic term of the identity is then
  // large, and so is its trapezoid bias, the part that must fall with dt.
  VectorXd still = 4.0 * random_vector(gen, 1);
  ControlFn control = open_loop([still](double) { return still; });

  auto run = [&](int steps) {
    TimeGrid grid = TimeGrid::make(0, 1, steps);
    RiccatiSolution sol = solve_bsre_det(cs, grid);
    McResidual r = completion_of_squares_check(cs, sol, control, eta, 20000,
                                               23);
    return std::pair<McResidual, double>(r, feedback_value(sol, eta));
  };
  auto [coarse, value_c] = run(100);
  auto [fine, value_f] = run(1000);
  const bool in_coarse =
      std::abs(coarse.residual) <=
      3.0 * coarse.std_error + 5.0 * 1e-2 * (1.0 + std::abs(value_c));
  const bool in_fine =
      std::abs(fine.residual) <=
      3.0 * fine.std_error + 5.0 * 1e-3 * (1.0 + std::abs(value_f));
  const bool shrinks = 1.5 * std::abs(fine.residual) <=
                       std::abs(coarse.residual) +
                           3.0 * (coarse.std_error + fine.std_error);
  const bool pass = in_coarse && in_fine && shrinks;
  return {pass, "residual " + num(coarse.residual) + " (se " +
                    num(coarse.std_error) + ") at dt = 1e-2, " +
                    num(fine.residual) + " (se " + num(fine.std_error) +
                    ") at dt = 1e-3 (bounds " +
                    (in_coarse ? "ok" : "VIOLATED") + "/" +
                    (in_fine ? "ok" : "VIOLATED") +
                    "), shrink by >= 1.5x beyond noise: " +
                    (shrinks ? "ok" : "VIOLATED")};
}

// ---------------------------------------------------------------------------
// 5. Transposition identity on randomized instances with deterministic test
//    processes.

Outcome criterion_5() {
  std::mt19937_64 gen(105);
  TimeGrid grid = TimeGrid::make(0, 1, 200);
  double worst_margin = -1e300;
  for (int trial = 0; trial < 5; ++trial) {
    CoefficientSet cs = random_set(gen, 2, 1, 1.0);
    RiccatiSolution sol = solve_bsre_det(cs, grid);
    TranspositionInputs inputs;
    inputs.xi1 = random_vector(gen, 2);
    inputs.xi2 = random_vector(gen, 2);
    VectorXd u1a = random_vector(gen, 2), u1b = random_vector(gen, 2);
    VectorXd u2a = random_vector(gen, 2);
    VectorXd v1a = random_vector(gen, 1);
    VectorXd v2a = random_vector(gen, 1);
    inputs.u1 = [u1a, u1b](double t) { return VectorXd(u1a + t * u1b); };
    inputs.u2 = [u2a](double t) { return VectorXd(std::sin(t) * u2a); };
    inputs.v1 = [v1a](double t) { return VectorXd(std::cos(t) * v1a); };
    inputs.v2 = [v2a](double t) { return VectorXd((1.0 - t) * v2a); };
    McResidual res = transposition_identity_check(
        cs, sol, inputs, 10000, 53 + static_cast<std::uint64_t>(trial));
    const double allowance = 3.0 * res.std_error + 5.0 * grid.dt();
    worst_margin = std::max(worst_margin, std::abs(res.residual) - allowance);
  }
  const bool pass = worst_margin <= 0.0;
  return {pass, "5 instances at 1e4 paths: worst residual excess over "
                "3 SE + 5 dt is " +
                    num(worst_margin)};
}

// ---------------------------------------------------------------------------
// 6. Tree recursion vs the brute-force program, exact completion, feedback
//    family flatness, and the two hand-solved one-step models.

NodeMatrixFn constant_node(MatrixXd M) {
  return [M = std::move(M)](int, std::uint32_t) { return M; };
}

MatrixXd scalar1(double v) {
  MatrixXd m(1, 1);
  m(0, 0) = v;
  return m;
}

TreeModel random_tree_model(std::mt19937_64& gen, int depth, int n, int m) {
  const std::uint64_t salt = gen();
  auto node_matrix = [salt](int rows, int cols, int slot, double scale,
                            bool psd, double floor) {
    return [=](int k, std::uint32_t h) {
      std::mt19937_64 local(salt ^ (static_cast<std::uint64_t>(slot) << 48) ^
                            (static_cast<std::uint64_t>(k) << 32) ^ h);
      std::normal_distribution<double> normal;
      MatrixXd M(rows, cols);
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) M(i, j) = scale * normal(local);
      if (psd)
        M = (M * M.transpose() / std::sqrt(static_cast<double>(rows)) +
             floor * MatrixXd::Identity(rows, rows))
                .eval();
      return M;
    };
  };
  TreeModel model;
  model.depth = depth;
  model.n = n;
  model.m = m;
  model.A = node_matrix(n, n, 1, 0.5, false, 0.0);
  model.B = node_matrix(n, m, 2, 0.7, false, 0.0);
  model.C = node_matrix(n, n, 3, 0.4, false, 0.0);
  model.D = node_matrix(n, m, 4, 0.4, false, 0.0);
  model.Q = node_matrix(n, n, 5, 0.6, true, 0.0);
  model.R = node_matrix(m, m, 6, 0.6, true, 0.3);
  auto leafG = node_matrix(n, n, 7, 0.6, true, 0.0);
  model.G = [leafG, depth](std::uint32_t h) { return leafG(depth, h); };
  return model;
}

Outcome criterion_6() {
  std::mt19937_64 gen(7);
  double worst_qp = 0.0;
  double worst_completion = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int depth = 2 + static_cast<int>(gen() % 7);
    const int n = 1 + static_cast<int>(gen() % 2);
    const int m = depth <= 6 ? 1 + static_cast<int>(gen() % 2) : 1;
    TreeModel model = random_tree_model(gen, depth, n, m);
    VectorXd eta = random_vector(gen, n);
    TreeSolution sol = solve_bsre_tree(model);
    const double dp = 0.5 * eta.dot(sol.P0() * eta);
    QpOracleResult qp = qp_oracle(model, eta);
    worst_qp = std::max(worst_qp,
                        std::abs(qp.value - dp) / (1.0 + std::abs(dp)));

    TreeControls u(static_cast<std::size_t>(model.depth));
    for (int k = 0; k < model.depth; ++k) {
      u[(size_t)k].resize(std::size_t(1) << k);
      for (auto& uk : u[(size_t)k]) uk = random_vector(gen, m);
    }
    worst_completion = std::max(
        worst_completion, std::abs(tree_completion_check(model, sol, u, eta)));
  }

  // A control column that reaches nothing: K singular, flat feedback family.
  std::mt19937_64 gen2(17);
  TreeModel deficient = random_tree_model(gen2, 4, 2, 2);
  auto kill_second = [](const NodeMatrixFn& f) {
    return [f](int k, std::uint32_t h) {
      MatrixXd M = f(k, h);
      M.col(1).setZero();
      return M;
    };
  };
  deficient.B = kill_second(deficient.B);
  deficient.D = kill_second(deficient.D);
  deficient.R = [base = deficient.R](int k, std::uint32_t h) {
    MatrixXd M = base(k, h);
    M.row(1).setZero();
    M.col(1).setZero();
    return M;
  };
  TreeSolution dsol = solve_bsre_tree(deficient);
  const double spread =
      feedback_family_check(deficient, dsol, random_vector(gen2, 2), 19);

  // Hand-solved one-step models: control in the noise with D = 1, and a
  // split terminal weight that forces a martingale term.
  TreeModel worked1;
  worked1.depth = 1;
  worked1.n = worked1.m = 1;
  worked1.A = constant_node(scalar1(1));
  worked1.B = constant_node(scalar1(1));
  worked1.C = constant_node(scalar1(0));
  worked1.D = constant_node(scalar1(1));
  worked1.Q = constant_node(scalar1(0));
  worked1.R = constant_node(scalar1(1));
  worked1.G = [](std::uint32_t) { return scalar1(1); };
  TreeSolution w1 = solve_bsre_tree(worked1);
  const bool worked1_ok =
      std::abs(w1.P0()(0, 0) - 2.0 / 3.0) <= 2e-15 &&
      std::abs(w1.Theta[0][0](0, 0) + 1.0 / 3.0) <= 2e-15;

  TreeModel worked2 = worked1;
  worked2.D = constant_node(scalar1(0));
  worked2.G = [](std::uint32_t h) { return scalar1(h & 1u ? 2.0 : 0.0); };
  TreeSolution w2 = solve_bsre_tree(worked2);
  const bool worked2_ok = std::abs(w2.P0()(0, 0) - 0.5) <= 2e-15 &&
                          std::abs(w2.Theta[0][0](0, 0) + 0.5) <= 2e-15 &&
                          std::abs(w2.Lambda[0][0](0, 0) - 1.0) <= 2e-15;

  const bool pass = worst_qp <= 1e-9 && worst_completion <= 1e-10 &&
                    spread <= 1e-10 && worked1_ok && worked2_ok;
  return {pass, "50 trees: worst qp gap " + num(worst_qp) +
                    " (tol 1e-9), worst completion residual " +
                    num(worst_completion) +
                    " (tol 1e-10), singular-gain family spread " +
                    num(spread) + " (tol 1e-10), worked examples " +
                    ((worked1_ok && worked2_ok) ? "exact" : "WRONG")};
}

// ---------------------------------------------------------------------------
// 7. Pathwise reconstruction: the inverse-flow error falls with dt under a
//    shared Brownian path, the reconstruction errors sit at that scale, and
//    the terminal identity is exact.

Outcome criterion_7() {
  std::mt19937_64 gen(109);
  const int levels[] = {500, 1000, 2000};
  bool monotone = true;
  bool bounded = true;
  bool terminal_exact = true;
  double finest_err = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    CoefficientSet cs = random_set(gen, 2, 1, 0.5);
    IncrementBatch fine = sample_brownian(TimeGrid::make(0, 1, 2000), 100,
                                          19 + static_cast<std::uint64_t>(trial));
    double prev = 1e300;
    for (int steps : levels) {
      TimeGrid grid = TimeGrid::make(0, 1, steps);
      RiccatiSolution sol = solve_bsre_det(cs, grid);
      IncrementBatch batch = steps == 2000 ? fine : coarsen(fine, 2000 / steps);
      ConstructionDiagnostics diag = simulate_construction(cs, sol, batch);
      monotone = monotone && diag.max_err_inverse < prev;
      prev = diag.max_err_inverse;
      bounded = bounded && diag.max_err_P <= 10.0 * diag.max_err_inverse &&
                diag.max_err_Lambda <= 10.0 * diag.max_err_inverse;
      if (steps == 2000) {
        finest_err = std::max(finest_err, diag.max_err_inverse);
        ConstructionPath path =
            simulate_construction_path(cs, sol, batch.increments[0]);
        terminal_exact =
            terminal_exact &&
            max_abs(path.Y.back() - cs.G * path.X.back()) == 0.0;
      }
    }
  }
  const bool pass = monotone && bounded && terminal_exact;
  return {pass, std::string("inverse-flow error ") +
                    (monotone ? "monotone" : "NOT monotone") +
                    " over dt in {2e-3, 1e-3, 5e-4} on 5 instances, "
                    "reconstruction errors " +
                    (bounded ? "within 10x that scale" : "OUT OF SCALE") +
                    ", worst finest-level error " + num(finest_err) +
                    ", terminal identity " +
                    (terminal_exact ? "exact" : "VIOLATED")};
}

// ---------------------------------------------------------------------------
// 8. Both Riccati routes agree on every bundled diagonal block and the
//    structural identity holds there.

Outcome criterion_8() {
  Scenario s = load_scenario(source_dir() + "/scenarios/blocks_pair.json");
  TimeGrid grid = s.grid();
  double worst_gap = 0.0;
  double worst_identity = 0.0;
  int worst_iterations = 0;
  int count = 0;
  for (const Json& jb : s.problem.at("blocks")) {
    Block block = block_from_json(jb, grid);
    block.coeffs.validate(grid);
    As8Report as8 = validate_as8(block, grid);
    worst_identity = std::max(worst_identity, as8.identity_residual);
    if (!as8.pass)
      return {false, "bundled block " + std::to_string(count) +
                         " fails the structural check (margin " +
                         num(as8.margin) + ")"};
    PhiSolveResult phi = phi_picard_solve(block, grid, 100, 1e-8);
    RiccatiSolution direct = solve_bsre_det(block.coeffs, grid);
    double gap = 0.0;
    for (int k = 0; k <= grid.steps; ++k)
      gap = std::max(gap, max_abs(phi.P[(size_t)k] - direct.P[(size_t)k]));
    worst_gap = std::max(worst_gap, gap);
    worst_iterations = std::max(worst_iterations, phi.iterations);
    ++count;
  }
  const bool pass = worst_gap <= 1e-6 && worst_identity <= 1e-10;
  return {pass, std::to_string(count) +
                    " bundled blocks: worst transform-vs-direct gap " +
                    num(worst_gap) + " (tol 1e-6) within " +
                    std::to_string(worst_iterations) +
                    " sweeps, worst structural identity residual " +
                    num(worst_identity) + " (tol 1e-10)"};
}

// ---------------------------------------------------------------------------
// 9. Mode truncations: uncontrolled-heat closed form, support stability,
//    embedding series, and the oscillator spectrum.

Outcome criterion_9() {
  // Uncontrolled heat: P decays at rate 2 j^2 from g = 1.
  SpdeCoefficients plain;
  plain.q = 0.0;
  plain.r = 1.0;
  plain.g = 1.0;
  SpectralModel heat = build_model(SpdeKind::heat, 6, plain);
  TimeGrid grid = TimeGrid::make(0, 1, 800);
  std::vector<VectorXd> ones(6, VectorXd::Ones(1));
  TruncatedSolve plain_solve = solve_truncated(heat, grid, ones);
  double worst_heat = 0.0;
  for (int j = 1; j <= 6; ++j)
    worst_heat = std::max(
        worst_heat, std::abs(plain_solve.mode_values[(size_t)j - 1] -
                             0.5 * std::exp(-2.0 * j * j)));

  // Data on 4 modes: the truncated value must not move past that level.
  SpdeCoefficients damped;
  damped.a1 = 0.1;
  damped.b1 = -0.3;
  damped.a2 = 0.3;
  damped.b2 = 1.0;
  damped.q = 2.0;
  damped.r = 1.0;
  damped.g = 0.5;
  damped.r0 = 0.2;
  auto eta_of = [](int j) {
    VectorXd v(1);
    v << (j <= 4 ? 1.0 / j : 0.0);
    return v;
  };
  double totals[3];
  const int Ns[3] = {4, 6, 9};
  for (int i = 0; i < 3; ++i) {
    SpectralModel model = build_model(SpdeKind::heat, Ns[i], damped);
    std::vector<VectorXd> etas;
    for (int j = 1; j <= Ns[i]; ++j) etas.push_back(eta_of(j));
    totals[i] = solve_truncated(model, TimeGrid::make(0, 1, 400), etas).total;
  }
  const bool support_stable = totals[0] == totals[1] && totals[1] == totals[2];

  // Embedding series at N = 1000.
  const double pi = std::acos(-1.0);
  SpectralModel wide = build_model(SpdeKind::heat, 1000, plain);
  HsReport hs = hs_embedding_check(wide);
  const double hs_err =
      std::max(std::abs(hs.weight_partial.back() - pi * pi / 6.0),
               std::abs(hs.inv_eig_partial.back() - pi * pi / 6.0));

  // Wave blocks: the principal part rotates at the mode frequency.
  SpectralModel wave = build_model(SpdeKind::wave, 6, plain);
  double worst_eig = 0.0;
  for (int j = 1; j <= 6; ++j) {
    Eigen::EigenSolver<MatrixXd> eig(wave.blocks[(size_t)j - 1].coeffs.A(0.0));
    std::complex<double> a = eig.eigenvalues()(0), b = eig.eigenvalues()(1);
    if (a.imag() > b.imag()) std::swap(a, b);
    worst_eig = std::max({worst_eig, std::abs(a - std::complex<double>(0, -j)),
                          std::abs(b - std::complex<double>(0, j))});
  }

  const bool pass = worst_heat <= 1e-8 && support_stable && hs_err <= 1e-3 &&
                    worst_eig <= 1e-12;
  return {pass, "uncontrolled-heat worst gap to the decay closed form " +
                    num(worst_heat) + " (tol 1e-8), 4-mode data " +
                    (support_stable ? "bit-stable" : "NOT bit-stable") +
                    " across N in {4, 6, 9}, embedding series err " +
                    num(hs_err) + " at N = 1000 (tol 1e-3), worst wave "
                    "eigenvalue gap to the mode frequency " +
                    num(worst_eig) + " (tol 1e-12)"};
}

// ---------------------------------------------------------------------------
// 10. Stopped-martingale bounds, backward-equation residual, and the
//     exp-moment growth that stands in for the infinite expectation.

Outcome criterion_10() {
  CounterexampleConfig a;
  a.T = 1.0;
  a.dt = 1e-4;
  a.eps = 1e-2;
  a.n_paths = 100000;
  a.seed = 1;
  a.horizons = {1e-1, 1e-2};
  CounterexampleBatch batch = simulate_paths(a);
  const bool bounds_ok =
      batch.frac_violation_I == 0.0 && batch.frac_violation_Y == 0.0;
  MeanSe res = bsre_residual_check(batch);
  const bool residual_ok = std::abs(res.mean) <= 3.0 * res.se;

  CounterexampleConfig b;
  b.T = 1.0;
  b.dt = 1e-4;
  b.eps = 1e-3;
  b.n_paths = 20000;
  b.seed = 1;
  b.horizons = {1e-1, 1e-2, 1e-3};
  std::vector<HorizonRow> rows = unboundedness_statistic(simulate_paths(b));
  const bool monotone = rows[0].exp_moment_mean < rows[1].exp_moment_mean &&
                        rows[1].exp_moment_mean < rows[2].exp_moment_mean;

  const bool pass = bounds_ok && residual_ok && monotone;
  return {pass,
          "bounds clause " + std::string(bounds_ok ? "ok" : "VIOLATED") +
              " (violation fractions I " + num(batch.frac_violation_I) +
              ", Y " + num(batch.frac_violation_Y) + " of 1e5 paths, worst "
              "overshoot " +
              num(batch.max_overshoot_sigma, 3) +
              " sigma against a 3 sigma allowance); residual mean " +
              num(res.mean) + " (se " + num(res.se) + ") " +
              (residual_ok ? "within" : "OUTSIDE") +
              " 3 SE; exp-moment means " + num(rows[0].exp_moment_mean, 4) +
              " / " + num(rows[1].exp_moment_mean, 4) + " / " +
              num(rows[2].exp_moment_mean, 4) + " " +
              (monotone ? "strictly increasing" : "NOT increasing") +
              " as the horizon closes"};
}

// ---------------------------------------------------------------------------
// 11. Scenario reruns are byte-identical and the committed golden summaries
//     still match.

struct StdoutSilencer {
  int saved = -1;
  StdoutSilencer() {
    std::fflush(stdout);
    saved = dup(1);
    int devnull = open("/dev/null", O_WRONLY);
    dup2(devnull, 1);
    close(devnull);
  }
  ~StdoutSilencer() {
    std::fflush(stdout);
    dup2(saved, 1);
    close(saved);
  }
};

Outcome criterion_11() {
  const struct {
    const char* command;
    const char* file;
    const char* csv;
    int expected_exit;
  } bundle[] = {
      {"riccati", "tanh_scalar.json", "riccati.csv", 0},
      {"riccati", "damped_oscillator.json", "riccati.csv", 0},
      {"slq", "noisy_oscillator.json", "slq.csv", 0},
      {"tree", "tree_basic.json", "tree.csv", 0},
      {"tree", "tree_split_terminal.json", "tree.csv", 0},
      {"tree", "tree_infeasible.json", nullptr, 1},
      {"fbsde", "fbsde_oscillator.json", "fbsde.csv", 0},
      {"blocks", "blocks_pair.json", "blocks.csv", 0},
      {"galerkin", "heat_default.json", "galerkin.csv", 0},
      {"galerkin", "wave_modes.json", "galerkin.csv", 0},
      {"galerkin", "schrodinger_modes.json", "galerkin.csv", 0},
      {"counterexample", "counterexample_default.json", "counterexample.csv",
       0},
  };
  const fs::path root =
      fs::temp_directory_path() / ("rlab_acceptance_" + std::to_string(getpid()));
  fs::remove_all(root);
  fs::create_directories(root);

  int stable = 0;
  std::string failure;
  std::string heat_summary, tree_summary;
  {
    StdoutSilencer quiet;
    for (const auto& entry : bundle) {
      const std::string scenario =
          source_dir() + "/scenarios/" + entry.file;
      const fs::path out_a = root / (std::string(entry.file) + ".a");
      const fs::path out_b = root / (std::string(entry.file) + ".b");
      const int rc_a = run_cli(
          {entry.command, scenario, "--out", out_a.string()});
      const int rc_b = run_cli(
          {entry.command, scenario, "--out", out_b.string()});
      if (rc_a != entry.expected_exit || rc_b != entry.expected_exit) {
        failure = std::string(entry.file) + " exit " + std::to_string(rc_a);
        break;
      }
      const char* probe =
          entry.expected_exit == 0 ? "summary.json" : "scenario_resolved.json";
      const std::string text_a = read_text_file((out_a / probe).string());
      if (text_a != read_text_file((out_b / probe).string())) {
        failure = std::string(entry.file) + " reruns differ";
        break;
      }
      if (entry.csv &&
          read_text_file((out_a / entry.csv).string()) !=
              read_text_file((out_b / entry.csv).string())) {
        failure = std::string(entry.file) + " csv reruns differ";
        break;
      }
      if (std::strcmp(entry.file, "heat_default.json") == 0)
        heat_summary = text_a;
      if (std::strcmp(entry.file, "tree_basic.json") == 0)
        tree_summary = text_a;
      ++stable;
    }
  }
  fs::remove_all(root);
  if (!failure.empty()) return {false, failure};

  const std::string golden_dir = source_dir() + "/scenarios/golden/";
  const bool golden_ok =
      heat_summary ==
          read_text_file(golden_dir + "heat_default_summary.json") &&
      tree_summary == read_text_file(golden_dir + "tree_basic_summary.json");
  const bool pass = stable == 12 && golden_ok;
  return {pass, std::to_string(stable) +
                    " of 12 bundled scenarios re-run byte-identically; "
                    "golden summaries " +
                    (golden_ok ? "match" : "DO NOT match")};
}

using CriterionFn = Outcome (*)();

constexpr CriterionFn kCriteria[] = {
    criterion_1, criterion_2, criterion_3, criterion_4,  criterion_5,
    criterion_6, criterion_7, criterion_8, criterion_9,  criterion_10,
    criterion_11};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      const int id = std::atoi(argv[++i]);
      if (id < 1 || id > 11) {
        std::fprintf(stderr, "criterion id must be 1..11\n");
        return 2;
      }
      selected.push_back(id);
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
      return 2;
    }
  }
  if (selected.empty())
    for (int id = 1; id <= 11; ++id) selected.push_back(id);

  bool all_pass = true;
  for (int id : selected) {
    Outcome outcome;
    try {
      outcome = kCriteria[id - 1]();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %d: %s - %s\n", id, outcome.pass ? "PASS" : "FAIL",
                outcome.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && outcome.pass;
  }
  return all_pass ? 0 : 1;
}
