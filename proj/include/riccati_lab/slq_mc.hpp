#pragma once

#include "riccati_lab/brownian.hpp"
#include "riccati_lab/riccati.hpp"

#include <cstdint>
#include <functional>

namespace rlab {

// State-feedback or open-loop control evaluated along a simulated path.
using ControlFn = std::function<VectorXd(double, const VectorXd&)>;
using VectorFn = std::function<VectorXd(double)>;

// u(t, x) = Theta_k x with Theta taken at the left grid node of t.
ControlFn feedback_from_solution(const RiccatiSolution& sol);

ControlFn open_loop(VectorFn u);
ControlFn zero_control(int m);

// Euler-Maruyama estimate of the quadratic cost under the given control,
// trapezoid quadrature of the running cost along each path.
CostReport mc_cost(const CoefficientSet& coeffs, const ControlFn& control,
                   const VectorXd& eta, const TimeGrid& grid, int n_paths,
                   std::uint64_t seed, Exec exec = Exec::parallel);

struct McResidual {
  double residual = 0.0;
  double std_error = 0.0;
  int n_paths = 0;
};

// Monte Carlo check of the completion-of-squares identity
//   J(u) = 1/2 <P(t0) eta, eta> + 1/2 E int <K(u - Theta x), u - Theta x> dt
// with the same Brownian path driving both sides.
McResidual completion_of_squares_check(const CoefficientSet& coeffs,
                                       const RiccatiSolution& sol,
                                       const ControlFn& control,
                                       const VectorXd& eta, int n_paths,
                                       std::uint64_t seed,
                                       Exec exec = Exec::parallel);

// Deterministic test processes for the transposition identity. v1, v2 are
// control-space functions and enter the dynamics through D.
struct TranspositionInputs {
  VectorXd xi1;
  VectorXd xi2;
  VectorFn u1;
  VectorFn u2;
  VectorFn v1;
  VectorFn v2;
};

// Monte Carlo residual of the duality identity defining the solution pair:
// two forward processes share one Brownian path, and
//   E<G x1(T), x2(T)> + E int [<Q x1, x2> - <K^{-1} L x1, L x2>] dt
// must equal
//   <P(t0) xi1, xi2> + E int [<P u1, x2> + <P x1, u2>
//     + <P C x1, D v2> + <P D v1, C x2 + D v2>] dt.
McResidual transposition_identity_check(const CoefficientSet& coeffs,
                                        const RiccatiSolution& sol,
                                        const TranspositionInputs& inputs,
                                        int n_paths, std::uint64_t seed,
                                        Exec exec = Exec::parallel);

}  // namespace rlab
