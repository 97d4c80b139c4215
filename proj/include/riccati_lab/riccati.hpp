#pragma once

// Backward Riccati solvers for the deterministic-coefficient problems and the
// deterministic value/adjoint cross-checks built on them.
//
// Deterministic linear-quadratic case (C = D = 0):
//   dP/dt = -(P A* + A*' P + Q - P B R^{-1} B' P),  P(T) = G,
//   feedback Theta = -R^{-1} B' P.
// General deterministic-coefficient case:
//   dP/dt = -(P A* + A*' P + C' P C + Q - L' K^{-1} L),  P(T) = G,
//   K = R + D' P D,  L = B' P + D' P C,  Theta = -K^{-1} L,
// with A* = A + A1 and the martingale term identically zero.

#include "riccati_lab/coefficients.hpp"
#include "riccati_lab/core.hpp"

#include <functional>

namespace rlab {

// Requires C = D = 0 on the grid. Backward RK4; P symmetrized each step.
RiccatiSolution solve_riccati_det(const CoefficientSet& coeffs,
                                  const TimeGrid& grid);

// General deterministic-coefficient backward equation. Reduces exactly to
// solve_riccati_det when C = D = 0. Throws SingularKError when the smallest
// eigenvalue of K drops below 1e-10 and NonFiniteError past the overflow
// guard.
RiccatiSolution solve_bsre_det(const CoefficientSet& coeffs,
                               const TimeGrid& grid);

struct AdjointCheck {
  double max_residual = 0.0;       // max node inf-norm of psi' + A*' psi + Q xbar
  double terminal_residual = 0.0;  // |psi(T) - G xbar(T)|_inf
};

// Closed-loop trajectory xbar from eta under the optimal feedback, adjoint
// psi = P xbar; the time derivative of psi is estimated with a fourth-order
// five-point stencil so the residual tracks the integrator's own error.
AdjointCheck adjoint_identity_check(const CoefficientSet& coeffs,
                                    const RiccatiSolution& sol,
                                    const VectorXd& eta);

// Optimal value 1/2 <P(t0) eta, eta> for a deterministic initial state.
double feedback_value(const RiccatiSolution& sol, const VectorXd& eta);
// Optimal value 1/2 tr(P(t0) Sigma0) for a random initial state with second
// moment Sigma0.
double feedback_value_moment(const RiccatiSolution& sol,
                             const MatrixXd& sigma0);

using FeedbackFn = std::function<MatrixXd(double)>;  // m x n gain

// Dense-in-time optimal feedback built from the solution: P is interpolated
// with cubic Hermite polynomials (values and stored derivatives), then
// K, L, Theta are recomputed exactly from the interpolated P. At grid nodes
// this reproduces the stored gains.
FeedbackFn feedback_interpolant(const CoefficientSet& coeffs,
                                const RiccatiSolution& sol);

// Exact closed-loop cost of an arbitrary feedback theta_hat via the second
// moment ODE
//   Sigma' = (A* + B Th) Sigma + Sigma (A* + B Th)' + (C + D Th) Sigma (C + D Th)',
// with running cost 1/2 tr((Q + Th' R Th) Sigma) integrated alongside by the
// same RK4 stepping and terminal cost 1/2 tr(G Sigma(T)).
CostReport lyapunov_cost(const CoefficientSet& coeffs,
                         const FeedbackFn& theta_hat, const TimeGrid& grid,
                         const VectorXd& eta);
CostReport lyapunov_cost_moment(const CoefficientSet& coeffs,
                                const FeedbackFn& theta_hat,
                                const TimeGrid& grid, const MatrixXd& sigma0);

}  // namespace rlab
