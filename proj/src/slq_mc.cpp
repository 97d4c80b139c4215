#include "riccati_lab/slq_mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <utility>
#include <vector>

namespace rlab {

namespace {

int node_index(const TimeGrid& grid, double t) {
  const int k =
      static_cast<int>(std::lround((t - grid.t0) / grid.dt()));
  return std::clamp(k, 0, grid.steps);
}

[[noreturn]] void throw_path_overflow(int path, double t) {
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "path %d exceeded the overflow guard at t = %.6g", path, t);
  throw NonFiniteError(buf, t);
}

}  // namespace

ControlFn feedback_from_solution(const RiccatiSolution& sol) {
  struct Payload {
    TimeGrid grid;
    std::vector<MatrixXd> theta;
  };
  auto payload = std::make_shared<Payload>(Payload{sol.grid, sol.Theta});
  return [payload](double t, const VectorXd& x) {
    const int k = node_index(payload->grid, t);
    return VectorXd(payload->theta[static_cast<std::size_t>(k)] * x);
  };
}

ControlFn open_loop(VectorFn u) {
  return [u = std::move(u)](double t, const VectorXd&) { return u(t); };
}

ControlFn zero_control(int m) {
  return [m](double, const VectorXd&) { return VectorXd(VectorXd::Zero(m)); };
}

CostReport mc_cost(const CoefficientSet& coeffs, const ControlFn& control,
                   const VectorXd& eta, const TimeGrid& grid, int n_paths,
                   std::uint64_t seed, Exec exec) {
  coeffs.validate(grid);
  if (n_paths < 2) {
    throw ValidationError("BadArguments", "mc_cost needs n_paths >= 2");
  }
  if (eta.size() != coeffs.n) {
    throw ValidationError("BadArguments",
                          "initial state dimension does not match n");
  }
  const double h = grid.dt();
  std::vector<double> costs(static_cast<std::size_t>(n_paths), 0.0);

  for_each_path(n_paths, exec, [&](int p) {
    NormalStream stream(seed, static_cast<std::uint64_t>(p));
    VectorXd x = eta;
    double cost = 0.0;
    for (int k = 0; k <= grid.steps; ++k) {
      const double t = grid.node(k);
      const VectorXd u = control(t, x);
      const double running =
          0.5 * (x.dot(coeffs.Q(t) * x) + u.dot(coeffs.R(t) * u));
      const double w = (k == 0 || k == grid.steps) ? 0.5 * h : h;
      cost += w * running;
      if (k == grid.steps) break;
      const double dW = std::sqrt(h) * stream.next();
      x = x + h * (coeffs.a_star(t) * x + coeffs.B(t) * u) +
          dW * (coeffs.C(t) * x + coeffs.D(t) * u);
      if (!all_finite(x) || max_abs(x) > kOverflowGuard) {
        throw_path_overflow(p, t);
      }
    }
    cost += 0.5 * x.dot(coeffs.G * x);
    costs[static_cast<std::size_t>(p)] = cost;
  });

  const MeanSe ms = mean_se(costs);
  CostReport report;
  report.method = "monte_carlo";
  report.value = ms.mean;
  report.std_error = ms.se;
  report.n_paths = n_paths;
  report.steps = grid.steps;
  report.dt = h;
  report.seed = seed;
  return report;
}

McResidual completion_of_squares_check(const CoefficientSet& coeffs,
                                       const RiccatiSolution& sol,
                                       const ControlFn& control,
                                       const VectorXd& eta, int n_paths,
                                       std::uint64_t seed, Exec exec) {
  const TimeGrid& grid = sol.grid;
  coeffs.validate(grid);
  if (n_paths < 2) {
    throw ValidationError("BadArguments",
                          "completion_of_squares_check needs n_paths >= 2");
  }
  const double h = grid.dt();
  const double value = feedback_value(sol, eta);
  std::vector<double> stats(static_cast<std::size_t>(n_paths), 0.0);

  for_each_path(n_paths, exec, [&](int p) {
    NormalStream stream(seed, static_cast<std::uint64_t>(p));
    VectorXd x = eta;
    double cost = 0.0;
    double square = 0.0;
    for (int k = 0; k <= grid.steps; ++k) {
      const double t = grid.node(k);
      const std::size_t i = static_cast<std::size_t>(k);
      const VectorXd u = control(t, x);
      const VectorXd gap = u - sol.Theta[i] * x;
      const double w = (k == 0 || k == grid.steps) ? 0.5 * h : h;
      cost += w * 0.5 * (x.dot(coeffs.Q(t) * x) + u.dot(coeffs.R(t) * u));
      square += w * gap.dot(sol.K[i] * gap);
      if (k == grid.steps) break;
      const double dW = std::sqrt(h) * stream.next();
      x = x + h * (coeffs.a_star(t) * x + coeffs.B(t) * u) +
          dW * (coeffs.C(t) * x + coeffs.D(t) * u);
      if (!all_finite(x) || max_abs(x) > kOverflowGuard) {
        throw_path_overflow(p, t);
      }
    }
    cost += 0.5 * x.dot(coeffs.G * x);
    stats[static_cast<std::size_t>(p)] = cost - 0.5 * square;
  });

  const MeanSe ms = mean_se(stats);
  McResidual out;
  out.residual = ms.mean - value;
  out.std_error = ms.se;
  out.n_paths = n_paths;
  return out;
}

McResidual transposition_identity_check(const CoefficientSet& coeffs,
                                        const RiccatiSolution& sol,
                                        const TranspositionInputs& inputs,
                                        int n_paths, std::uint64_t seed,
                                        Exec exec) {
  const TimeGrid& grid = sol.grid;
  coeffs.validate(grid);
  if (n_paths < 2) {
    throw ValidationError("BadArguments",
                          "transposition_identity_check needs n_paths >= 2");
  }
  if (inputs.xi1.size() != coeffs.n || inputs.xi2.size() != coeffs.n) {
    throw ValidationError("BadArguments",
                          "initial data dimension does not match n");
  }
  const double h = grid.dt();
  const double paired = inputs.xi2.dot(sol.P0() * inputs.xi1);
  std::vector<double> stats(static_cast<std::size_t>(n_paths), 0.0);

  for_each_path(n_paths, exec, [&](int p) {
    NormalStream stream(seed, static_cast<std::uint64_t>(p));
    VectorXd x1 = inputs.xi1;
    VectorXd x2 = inputs.xi2;
    double acc = 0.0;
    for (int k = 0; k <= grid.steps; ++k) {
      const double t = grid.node(k);
      const std::size_t i = static_cast<std::size_t>(k);
      const MatrixXd& P = sol.P[i];
      const MatrixXd Ct = coeffs.C(t);
      const MatrixXd Dt = coeffs.D(t);
      const VectorXd u1 = inputs.u1(t);
      const VectorXd u2 = inputs.u2(t);
      const VectorXd Dv1 = Dt * inputs.v1(t);
      const VectorXd Dv2 = Dt * inputs.v2(t);
      // Theta = -K^{-1} L, so the subtracted bilinear term enters with +Theta.
      double f = x2.dot(coeffs.Q(t) * x1) +
                 (sol.L[i] * x2).dot(sol.Theta[i] * x1) -
                 x2.dot(P * u1) - u2.dot(P * x1) - Dv2.dot(P * Ct * x1) -
                 (Ct * x2 + Dv2).dot(P * Dv1);
      const double w = (k == 0 || k == grid.steps) ? 0.5 * h : h;
      acc += w * f;
      if (k == grid.steps) break;
      const double dW = std::sqrt(h) * stream.next();
      const MatrixXd As = coeffs.a_star(t);
      const VectorXd n1 = x1 + h * (As * x1 + u1) + dW * (Ct * x1 + Dv1);
      const VectorXd n2 = x2 + h * (As * x2 + u2) + dW * (Ct * x2 + Dv2);
      x1 = n1;
      x2 = n2;
      if (!all_finite(x1) || !all_finite(x2) ||
          std::max(max_abs(x1), max_abs(x2)) > kOverflowGuard) {
        throw_path_overflow(p, t);
      }
    }
    stats[static_cast<std::size_t>(p)] =
        x2.dot(coeffs.G * x1) + acc - paired;
  });

  const MeanSe ms = mean_se(stats);
  McResidual out;
  out.residual = ms.mean;
  out.std_error = ms.se;
  out.n_paths = n_paths;
  return out;
}

}  // namespace rlab
