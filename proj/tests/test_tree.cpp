#include <doctest.h>

#include "riccati_lab/tree.hpp"
#include "test_support.hpp"

#include <cmath>
#include <cstdint>
#include <random>

using namespace rlab;
using namespace rlab::testing;

namespace {

NodeMatrixFn constant_node(MatrixXd M) {
  return [M = std::move(M)](int, std::uint32_t) { return M; };
}

LeafMatrixFn constant_leaf(MatrixXd M) {
  return [M = std::move(M)](std::uint32_t) { return M; };
}

MatrixXd scalar(double v) {
  MatrixXd m(1, 1);
  m(0, 0) = v;
  return m;
}

TreeModel scalar_model(int depth, double a, double b, double c, double d,
                       double q, double r, double g) {
  TreeModel model;
  model.depth = depth;
  model.n = 1;
  model.m = 1;
  model.A = constant_node(scalar(a));
  model.B = constant_node(scalar(b));
  model.C = constant_node(scalar(c));
  model.D = constant_node(scalar(d));
  model.Q = constant_node(scalar(q));
  model.R = constant_node(scalar(r));
  model.G = constant_leaf(scalar(g));
  return model;
}

// Random adapted model: coefficients at (k, h) depend on (k, h) through a
// seeded hash, which is adapted by construction since the recursion only
// queries histories built from bits below k.
TreeModel random_model(std::mt19937_64& gen, int depth, int n, int m) {
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

TreeControls zero_controls(const TreeModel& model) {
  TreeControls u(static_cast<std::size_t>(model.depth));
  for (int k = 0; k < model.depth; ++k)
    u[(size_t)k].assign(std::size_t(1) << k, VectorXd::Zero(model.m));
  return u;
}

}  // namespace

TEST_CASE("history strings read oldest step first") {
  CHECK(history_string(0, 0) == "");
  CHECK(history_string(0b101, 3) == "+-+");
  CHECK(history_string(0b010, 3) == "-+-");
  CHECK(tree_child(0b01, 2, +1) == 0b101);
  CHECK(tree_child(0b01, 2, -1) == 0b001);
}

TEST_CASE("one-step control-in-noise model solves by hand") {
  // A = B = D = 1, C = 0, Q = 0, R = 1, G = 1:
  // K = 1 + 2 = 3, L = 1, Theta = -1/3, P0 = 1 - 1/3 = 2/3.
  TreeModel model = scalar_model(1, 1, 1, 0, 1, 0, 1, 1);
  TreeSolution sol = solve_bsre_tree(model);
  CHECK(sol.K[0][0](0, 0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(sol.L[0][0](0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sol.Theta[0][0](0, 0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  CHECK(sol.P0()(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(sol.Lambda[0][0](0, 0) == 0.0);  // P at both leaves equals G

  VectorXd eta = VectorXd::Ones(1);
  QpOracleResult qp = qp_oracle(model, eta);
  CHECK(std::abs(qp.value - 1.0 / 3.0) <= 1e-12);
  CHECK(qp.stationarity_residual <= 1e-12);
}

TEST_CASE("one-step random terminal weight produces a martingale term") {
  // A = B = 1, C = D = 0, G(+) = 2, G(-) = 0: E[G] = 1, so K = 2, L = 1,
  // P0 = 1/2, Theta = -1/2, and Lambda_0 = E[G w] = 1.
  TreeModel model = scalar_model(1, 1, 1, 0, 0, 0, 1, 0);
  model.G = [](std::uint32_t h) { return scalar(h & 1u ? 2.0 : 0.0); };
  TreeSolution sol = solve_bsre_tree(model);
  CHECK(sol.P0()(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sol.Theta[0][0](0, 0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(sol.Lambda[0][0](0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sol.P[1][0](0, 0) == 0.0);  // leaf P equals G exactly
  CHECK(sol.P[1][1](0, 0) == 2.0);
}

TEST_CASE("uncontrollable models have zero gain and the plain recursion") {
  TreeModel model = scalar_model(4, 1.1, 0, 0.3, 0, 0.5, 1, 2);
  TreeSolution sol = solve_bsre_tree(model);
  double p = 2.0;
  for (int k = 3; k >= 0; --k) {
    for (const auto& Th : sol.Theta[(size_t)k]) CHECK(max_abs(Th) == 0.0);
    p = 0.5 + (1.1 * 1.1 + 0.3 * 0.3) * p;  // Q + E[(A + Cw)^2] P'
    CHECK(sol.P[(size_t)k][0](0, 0) == doctest::Approx(p).epsilon(1e-14));
  }
  VectorXd eta = VectorXd::Ones(1);
  QpOracleResult qp = qp_oracle(model, eta);
  for (const auto& level : qp.controls)
    for (const auto& u : level) CHECK(max_abs(u) <= 1e-12);
}

TEST_CASE("deterministic-coefficient trees have no martingale term") {
  std::mt19937_64 gen(3);
  TreeModel model = random_model(gen, 5, 2, 2);
  model.C = constant_node(MatrixXd::Zero(2, 2));
  model.D = constant_node(MatrixXd::Zero(2, 2));
  const MatrixXd G = random_psd(gen, 2);
  model.G = constant_leaf(G);
  // Deterministic coefficients: make every node's matrices history-free.
  auto flatten = [](const NodeMatrixFn& f) {
    return [f](int k, std::uint32_t) { return f(k, 0); };
  };
  model.A = flatten(model.A);
  model.B = flatten(model.B);
  model.Q = flatten(model.Q);
  model.R = flatten(model.R);
  TreeSolution sol = solve_bsre_tree(model);
  for (const auto& level : sol.Lambda)
    for (const auto& L : level) CHECK(max_abs(L) == 0.0);
}

TEST_CASE("tree value equals the brute-force program on 50 random instances") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int depth = 2 + static_cast<int>(gen() % 7);  // 2..8
    const int n = 1 + static_cast<int>(gen() % 2);
    const int m = depth <= 6 ? 1 + static_cast<int>(gen() % 2) : 1;
    TreeModel model = random_model(gen, depth, n, m);
    VectorXd eta = random_vector(gen, n);
    TreeSolution sol = solve_bsre_tree(model);
    const double dp = 0.5 * eta.dot(sol.P0() * eta);
    QpOracleResult qp = qp_oracle(model, eta);
    CHECK(std::abs(qp.value - dp) <= 1e-9 * (1.0 + std::abs(dp)));
    CHECK(qp.stationarity_residual <= 1e-8);

    // Leaf condition and symmetry, on the same instances.
    for (std::size_t h = 0; h < sol.P.back().size(); ++h)
      CHECK(max_abs(sol.P.back()[h] -
                    model.G(static_cast<std::uint32_t>(h))) == 0.0);
    for (const auto& level : sol.P)
      for (const auto& P : level)
        CHECK(max_abs(P - P.transpose()) <= 1e-12 * (1.0 + max_abs(P)));
  }
}

TEST_CASE("completion of squares is exact for arbitrary adapted controls") {
  std::mt19937_64 gen(11);

  // u = Theta x has a vanishing quadratic term.
  TreeModel model = random_model(gen, 6, 2, 1);
  TreeSolution sol = solve_bsre_tree(model);
  VectorXd eta = random_vector(gen, 2);
  QpOracleResult qp = qp_oracle(model, eta);
  CHECK(std::abs(tree_completion_check(model, sol, qp.controls, eta)) <=
        1e-10);

  // Random adapted controls, scalar depth-8 model.
  TreeModel deep = random_model(gen, 8, 1, 1);
  TreeSolution deep_sol = solve_bsre_tree(deep);
  TreeControls u = zero_controls(deep);
  for (auto& level : u)
    for (auto& uk : level) uk = random_vector(gen, 1);
  VectorXd eta1 = random_vector(gen, 1);
  CHECK(std::abs(tree_completion_check(deep, deep_sol, u, eta1)) <= 1e-10);

  // Zero initial state: the identity survives without the quadratic form.
  CHECK(std::abs(tree_completion_check(deep, deep_sol, u,
                                       VectorXd::Zero(1))) <= 1e-10);
}

TEST_CASE("full-rank gains admit no feedback family beyond the point") {
  std::mt19937_64 gen(13);
  TreeModel model = random_model(gen, 4, 2, 2);
  TreeSolution sol = solve_bsre_tree(model);
  VectorXd eta = random_vector(gen, 2);
  // The projector I - K^+ K is zero up to eigendecomposition roundoff, so
  // the spread sits at the floating-point floor rather than exact zero.
  CHECK(feedback_family_check(model, sol, eta, 17) <= 1e-14);
}

TEST_CASE("a control that affects nothing spans a flat feedback family") {
  // Second control column enters neither B nor D nor R: K is singular with
  // L in its range, and every member of the family costs the same.
  std::mt19937_64 gen(17);
  TreeModel model = random_model(gen, 4, 2, 2);
  auto kill_second = [](const NodeMatrixFn& f) {
    return [f](int k, std::uint32_t h) {
      MatrixXd M = f(k, h);
      M.col(1).setZero();
      return M;
    };
  };
  model.B = kill_second(model.B);
  model.D = kill_second(model.D);
  model.R = [base = model.R](int k, std::uint32_t h) {
    MatrixXd M = base(k, h);
    M.row(1).setZero();
    M.col(1).setZero();
    return M;
  };
  TreeSolution sol = solve_bsre_tree(model);
  VectorXd eta = random_vector(gen, 2);
  CHECK(feedback_family_check(model, sol, eta, 19) <= 1e-10);
}

TEST_CASE("null weights make every feedback optimal") {
  TreeModel model = scalar_model(3, 0.9, 0, 0.2, 0, 0.4, 0, 1.0);
  model.B = constant_node(scalar(0));
  model.D = constant_node(scalar(0));
  model.R = constant_node(scalar(0));
  TreeSolution sol = solve_bsre_tree(model);
  for (const auto& level : sol.K)
    for (const auto& K : level) CHECK(max_abs(K) == 0.0);
  VectorXd eta = VectorXd::Ones(1);
  CHECK(feedback_family_check(model, sol, eta, 23) == 0.0);
}

TEST_CASE("enlarging a state weight never lowers the value") {
  std::mt19937_64 gen(19);
  for (int trial = 0; trial < 10; ++trial) {
    const int depth = 2 + static_cast<int>(gen() % 5);
    TreeModel model = random_model(gen, depth, 2, 1);
    VectorXd eta = random_vector(gen, 2);
    const double base = 0.5 * eta.dot(solve_bsre_tree(model).P0() * eta);

    const int bump_step = static_cast<int>(gen() % depth);
    const MatrixXd bump = random_psd(gen, 2);
    TreeModel bigger = model;
    bigger.Q = [q = model.Q, bump_step, bump](int k, std::uint32_t h) {
      MatrixXd M = q(k, h);
      if (k == bump_step) M += bump;
      return M;
    };
    const double larger = 0.5 * eta.dot(solve_bsre_tree(bigger).P0() * eta);
    CHECK(larger >= base - 1e-12 * (1.0 + std::abs(base)));
  }
}

TEST_CASE("a gain request outside the range of K is rejected") {
  // n = 1, m = 2, one step: D = [1, 0], B = 0, C = A = 1, R = diag(-1, 1),
  // G = 1. Then K = diag(0, 1) while L = (1, 0)', which K cannot reach.
  TreeModel model;
  model.depth = 1;
  model.n = 1;
  model.m = 2;
  model.A = constant_node(scalar(1));
  model.B = constant_node(MatrixXd::Zero(1, 2));
  model.C = constant_node(scalar(1));
  MatrixXd D(1, 2);
  D << 1.0, 0.0;
  model.D = constant_node(D);
  model.Q = constant_node(scalar(0));
  MatrixXd R(2, 2);
  R << -1.0, 0.0, 0.0, 1.0;
  model.R = constant_node(R);
  model.G = constant_leaf(scalar(1));

  CHECK_THROWS_AS(solve_bsre_tree(model), RangeConditionError);
  TreeSolution sol = solve_bsre_tree(model, false);
  CHECK_FALSE(sol.feasible[0][0]);
  CHECK(sol.range_residual[0][0] > 1e-6);
}
