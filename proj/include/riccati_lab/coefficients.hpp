#pragma once

// Problem data for the linear-quadratic models: time-dependent coefficient
// matrices for
//   d x = [(A + A1) x + B u] dt + [C x + D u] dW,
//   J(u) = 1/2 E [ integral (<Q x, x> + <R u, u>) dt + <G x(T), x(T)> ].
// A is the principal drift and A1 a bounded perturbation; solvers only ever
// use their sum, but keeping both mirrors how the mode-truncated models are
// assembled.

#include "riccati_lab/core.hpp"
#include "riccati_lab/ode.hpp"

#include <functional>
#include <string>
#include <vector>

namespace rlab {

using MatrixFn = std::function<MatrixXd(double)>;

MatrixFn constant_fn(MatrixXd value);
MatrixFn zero_fn(int rows, int cols);

struct CoefficientSet {
  int n = 0;  // state dimension
  int m = 0;  // control dimension
  MatrixFn A, A1;  // n x n
  MatrixFn B;      // n x m
  MatrixFn C;      // n x n
  MatrixFn D;      // n x m
  MatrixFn Q;      // n x n, symmetric PSD
  MatrixFn R;      // m x m, symmetric with min eigenvalue >= r_min
  MatrixXd G;      // n x n, symmetric PSD

  double r_min = 1e-8;
  double psd_tol = 1e-12;

  MatrixXd a_star(double t) const { return A(t) + A1(t); }

  // Checks dimensions, symmetry, and definiteness at every grid node.
  // Throws ValidationError with kind "BadCoefficients" on failure.
  void validate(const TimeGrid& grid) const;

  // True when the named coefficient vanishes at every grid node.
  bool is_zero(const MatrixFn& f, const TimeGrid& grid, double tol = 0.0) const;
};

// Backward Riccati solution sampled on the grid. For deterministic
// coefficients the martingale term Lambda is identically zero; it is stored
// anyway so downstream interfaces match the general shape.
struct RiccatiSolution {
  TimeGrid grid;
  std::vector<MatrixXd> P;       // n x n per node, symmetric
  std::vector<MatrixXd> Pdot;    // dP/dt per node (the equation's right side)
  std::vector<MatrixXd> K;       // m x m per node
  std::vector<MatrixXd> L;       // m x n per node
  std::vector<MatrixXd> Theta;   // m x n per node, -K^{-1} L
  std::vector<MatrixXd> Lambda;  // n x n per node, zero here

  const MatrixXd& P0() const { return P.front(); }
};

// One cost evaluation: which route produced it and with what sampling.
struct CostReport {
  std::string method;
  double value = 0.0;
  double std_error = 0.0;  // zero for deterministic routes
  std::int64_t n_paths = 0;
  int steps = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
};

}  // namespace rlab
