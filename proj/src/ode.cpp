#include "riccati_lab/ode.hpp"

#include <cmath>

namespace rlab {

namespace {

bool passes_guard(const MatrixXd& m) {
  return all_finite(m) && max_abs(m) <= kOverflowGuard;
}

// One classical RK4 step from (t, y) with signed step h.
MatrixXd rk4_step(const MatrixField& f, double t, const MatrixXd& y,
                  double h) {
  const MatrixXd k1 = f(t, y);
  const MatrixXd k2 = f(t + 0.5 * h, y + (0.5 * h) * k1);
  const MatrixXd k3 = f(t + 0.5 * h, y + (0.5 * h) * k2);
  const MatrixXd k4 = f(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

OdeResult integrate_ode(const MatrixField& field, const MatrixXd& boundary,
                        const TimeGrid& grid, Direction direction) {
  OdeResult out;
  out.grid = grid;
  out.states.assign(static_cast<std::size_t>(grid.nodes()), MatrixXd());
  const double h = grid.dt();

  if (!passes_guard(boundary)) {
    throw ValidationError("BadGrid", "boundary value is not finite");
  }

  if (direction == Direction::forward) {
    out.states[0] = boundary;
    out.first_valid = 0;
    out.last_valid = 0;
    out.last_valid_time = grid.node(0);
    for (int k = 0; k < grid.steps; ++k) {
      MatrixXd next = rk4_step(field, grid.node(k), out.states[k], h);
      if (!passes_guard(next)) {
        out.blew_up = true;
        out.first_invalid_time = grid.node(k + 1);
        return out;
      }
      out.states[static_cast<std::size_t>(k + 1)] = std::move(next);
      out.last_valid = k + 1;
      out.last_valid_time = grid.node(k + 1);
    }
    return out;
  }

  // Backward: integrate z(s) = y(T - s) with dz/ds = -field(T - s, z).
  out.states[static_cast<std::size_t>(grid.steps)] = boundary;
  out.first_valid = grid.steps;
  out.last_valid = grid.steps;
  out.last_valid_time = grid.node(grid.steps);
  const double T = grid.t1;
  const MatrixField back = [&](double s, const MatrixXd& z) {
    return MatrixXd(-field(T - s, z));
  };
  for (int k = grid.steps; k > 0; --k) {
    const double s = T - grid.node(k);
    MatrixXd next = rk4_step(back, s, out.states[static_cast<std::size_t>(k)], h);
    if (!passes_guard(next)) {
      out.blew_up = true;
      out.first_invalid_time = grid.node(k - 1);
      return out;
    }
    out.states[static_cast<std::size_t>(k - 1)] = std::move(next);
    out.first_valid = k - 1;
    out.last_valid_time = grid.node(k - 1);
  }
  return out;
}

MatrixXd MatrixFlow::eval(double t) const {
  const double dt = grid.dt();
  int k = static_cast<int>(std::floor((t - grid.t0) / dt));
  if (k < 0) k = 0;
  if (k >= grid.steps) k = grid.steps - 1;
  const double tk = grid.node(k);
  const double u = (t - tk) / dt;
  if (u == 0.0) return value[static_cast<std::size_t>(k)];
  if (t >= grid.t1) return value[static_cast<std::size_t>(grid.steps)];
  // Cubic Hermite basis on [t_k, t_{k+1}].
  const double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
  const double h10 = u * (1.0 - u) * (1.0 - u);
  const double h01 = u * u * (3.0 - 2.0 * u);
  const double h11 = u * u * (u - 1.0);
  const std::size_t i = static_cast<std::size_t>(k);
  return h00 * value[i] + (h10 * dt) * deriv[i] + h01 * value[i + 1] +
         (h11 * dt) * deriv[i + 1];
}

MatrixFlow integrate_matrix_flow(const MatrixField& field,
                                 const MatrixXd& boundary,
                                 const TimeGrid& grid, Direction direction) {
  OdeResult r = integrate_ode(field, boundary, grid, direction);
  if (r.blew_up) {
    throw NonFiniteError("matrix ODE exceeded the overflow guard",
                         r.last_valid_time);
  }
  MatrixFlow flow;
  flow.grid = grid;
  flow.value = std::move(r.states);
  flow.deriv.resize(flow.value.size());
  for (int k = 0; k < grid.nodes(); ++k) {
    flow.deriv[static_cast<std::size_t>(k)] =
        field(grid.node(k), flow.value[static_cast<std::size_t>(k)]);
  }
  return flow;
}

}  // namespace rlab
