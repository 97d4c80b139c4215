#pragma once

// Fixed-step classical RK4 for matrix-valued ODEs, forward or backward in
// time, with an overflow guard instead of adaptivity. Backward integration
// substitutes s = T - t and marches forward in s.

#include "riccati_lab/core.hpp"

#include <functional>
#include <vector>

namespace rlab {

enum class Direction { forward, backward };

using MatrixField = std::function<MatrixXd(double, const MatrixXd&)>;

struct OdeResult {
  TimeGrid grid;
  // states[k] is the solution at grid.node(k). When the guard trips the
  // vector still has nodes() entries but only the range between
  // first_valid and last_valid (inclusive) is meaningful.
  std::vector<MatrixXd> states;
  bool blew_up = false;
  int first_valid = 0;
  int last_valid = 0;
  // Time of the furthest node that passed the guard, and of the first node
  // that failed it (meaningful only when blew_up).
  double last_valid_time = 0.0;
  double first_invalid_time = 0.0;
};

OdeResult integrate_ode(const MatrixField& field, const MatrixXd& boundary,
                        const TimeGrid& grid, Direction direction);

// Dense-output flow: node values plus node derivatives, evaluated between
// nodes by cubic Hermite interpolation (O(dt^4), matching RK4 accuracy).
struct MatrixFlow {
  TimeGrid grid;
  std::vector<MatrixXd> value;
  std::vector<MatrixXd> deriv;

  MatrixXd eval(double t) const;
};

// Like integrate_ode but throws NonFiniteError on blow-up and returns the
// flow with derivatives (the field re-evaluated at each node).
MatrixFlow integrate_matrix_flow(const MatrixField& field,
                                 const MatrixXd& boundary,
                                 const TimeGrid& grid, Direction direction);

}  // namespace rlab
