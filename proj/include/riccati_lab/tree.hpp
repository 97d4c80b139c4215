#pragma once

#include "riccati_lab/core.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace rlab {

// Coefficient process on the binomial tree: evaluated at (step k, history h),
// where bit j of h is 1 iff the step-j noise was +1. Only bits below k are
// ever set in h, which is what makes the process adapted by construction.
using NodeMatrixFn = std::function<MatrixXd(int, std::uint32_t)>;

// Terminal weight, indexed by the full depth-bit history.
using LeafMatrixFn = std::function<MatrixXd(std::uint32_t)>;

// Discrete control system on the tree driven by Rademacher noise w = +/-1
// with probability 1/2 each:
//   x_{k+1} = (A_k + C_k w_k) x_k + (B_k + D_k w_k) u_k
//   J(u) = 1/2 E[ sum_k (<Q_k x_k, x_k> + <R_k u_k, u_k>) + <G x_N, x_N> ].
// All conditional expectations are exact two-branch averages, so the backward
// recursion below solves the control problem to machine precision.
struct TreeModel {
  int depth = 0;
  int n = 0;
  int m = 0;
  NodeMatrixFn A;
  NodeMatrixFn B;
  NodeMatrixFn C;
  NodeMatrixFn D;
  NodeMatrixFn Q;
  NodeMatrixFn R;
  LeafMatrixFn G;

  // Checks depth in [1, 20], dimensions at every node, Q and G symmetric PSD,
  // R symmetric. R may be singular or indefinite: the feedback uses the
  // pseudo-inverse of K and the range condition decides feasibility.
  void validate() const;
};

inline std::uint32_t tree_child(std::uint32_t hist, int step, int move) {
  return move > 0 ? (hist | (1u << step)) : hist;
}

// Readable form of a history value: one '+' or '-' per step, oldest first.
std::string history_string(std::uint32_t hist, int length);

// Backward-recursion output. Outer index is the step k, inner index the
// history value (2^k entries at step k). P runs to the leaves (k = depth);
// the gains and Lambda live on steps 0..depth-1.
struct TreeSolution {
  int depth = 0;
  int n = 0;
  int m = 0;
  std::vector<std::vector<MatrixXd>> P;
  std::vector<std::vector<MatrixXd>> Lambda;
  std::vector<std::vector<MatrixXd>> K;
  std::vector<std::vector<MatrixXd>> L;
  std::vector<std::vector<MatrixXd>> Theta;
  std::vector<std::vector<std::uint8_t>> feasible;
  std::vector<std::vector<double>> range_residual;

  const MatrixXd& P0() const { return P[0][0]; }
};

// Exact dynamic programming:
//   K_k = R_k + E_k[(B+Dw)' P_{k+1} (B+Dw)]
//   L_k = E_k[(B+Dw)' P_{k+1} (A+Cw)]
//   P_k = Q_k + E_k[(A+Cw)' P_{k+1} (A+Cw)] - L_k' K_k^+ L_k
//   Theta_k = -K_k^+ L_k,  Lambda_k = E_k[P_{k+1} w].
// A node is feasible when ||(I - K K^+) L|| <= 1e-10 (1 + ||L||); with
// throw_on_violation set (the default), an infeasible node raises
// RangeConditionError instead of being recorded.
TreeSolution solve_bsre_tree(const TreeModel& model,
                             bool throw_on_violation = true);

// Adapted node controls: u[k][hist], each of size m.
using TreeControls = std::vector<std::vector<VectorXd>>;

struct QpOracleResult {
  double value = 0.0;
  TreeControls controls;
  // Residual of the stationarity system at the returned minimizer,
  // ||H u + g|| / (1 + ||g||).
  double stationarity_residual = 0.0;
};

// Independent brute-force solve: stacks every node control into one vector,
// assembles the exact cost Hessian and gradient by enumerating all 2^depth
// paths, and returns the minimum-norm stationary point. Requires depth <= 12
// and stacked dimension m (2^depth - 1) <= 2000.
QpOracleResult qp_oracle(const TreeModel& model, const VectorXd& eta);

// Exact closed-loop cost of u_k = F_k x_k (F node-indexed, m x n) from
// initial state eta, by backward expectation recursion.
double closed_loop_value(const TreeModel& model,
                         const std::vector<std::vector<MatrixXd>>& F,
                         const VectorXd& eta);

// Every member of the feedback family Theta + (I - K^+ K) theta_hat costs the
// same. Draws `trials` random theta_hat processes and returns the largest
// absolute cost difference against Theta itself.
double feedback_family_check(const TreeModel& model, const TreeSolution& sol,
                             const VectorXd& eta, std::uint64_t seed,
                             int trials = 10);

// Exact completion-of-squares residual for an arbitrary adapted control:
//   J(u) - 1/2 <P_0 eta, eta> - 1/2 E sum_k <K_k (u - Theta x), u - Theta x>
// by full path enumeration (depth <= 12).
double tree_completion_check(const TreeModel& model, const TreeSolution& sol,
                             const TreeControls& u, const VectorXd& eta);

}  // namespace rlab
