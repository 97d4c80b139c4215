#include "riccati_lab/riccati.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <memory>
#include <utility>

namespace rlab {

namespace {

MatrixXd sym(const MatrixXd& M) { return 0.5 * (M + M.transpose()); }

double min_eig_sym(const MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym(M));
  return eig.eigenvalues()(0);
}

constexpr double kGainGuard = 1e-10;

// Solves K X = Y for the gain computations, guarding the spectrum of K.
MatrixXd solve_spd(const MatrixXd& K, const MatrixXd& Y, double t) {
  if (min_eig_sym(K) < kGainGuard) {
    throw SingularKError("gain matrix K nearly singular", t);
  }
  return K.llt().solve(Y);
}

using RiccatiRhs = std::function<MatrixXd(double, const MatrixXd&)>;

// Backward RK4 sweep from P(T) = G with symmetrization after every step.
std::vector<MatrixXd> backward_sweep(const RiccatiRhs& f, const MatrixXd& G,
                                     const TimeGrid& grid) {
  std::vector<MatrixXd> P(static_cast<std::size_t>(grid.nodes()));
  P[static_cast<std::size_t>(grid.steps)] = sym(G);
  const double h = grid.dt();
  for (int k = grid.steps; k > 0; --k) {
    const double t = grid.node(k);
    const MatrixXd& Pk = P[static_cast<std::size_t>(k)];
    const MatrixXd k1 = -f(t, Pk);
    const MatrixXd k2 = -f(t - 0.5 * h, Pk + (0.5 * h) * k1);
    const MatrixXd k3 = -f(t - 0.5 * h, Pk + (0.5 * h) * k2);
    const MatrixXd k4 = -f(t - h, Pk + h * k3);
    MatrixXd next = sym(Pk + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    if (!all_finite(next) || max_abs(next) > kOverflowGuard) {
      throw NonFiniteError("Riccati state exceeded the overflow guard", t);
    }
    P[static_cast<std::size_t>(k - 1)] = std::move(next);
  }
  return P;
}

RiccatiSolution assemble_solution(const CoefficientSet& coeffs,
                                  const TimeGrid& grid, const RiccatiRhs& f,
                                  std::vector<MatrixXd> P) {
  RiccatiSolution sol;
  sol.grid = grid;
  sol.P = std::move(P);
  const int nodes = grid.nodes();
  sol.Pdot.resize(static_cast<std::size_t>(nodes));
  sol.K.resize(static_cast<std::size_t>(nodes));
  sol.L.resize(static_cast<std::size_t>(nodes));
  sol.Theta.resize(static_cast<std::size_t>(nodes));
  sol.Lambda.assign(static_cast<std::size_t>(nodes),
                    MatrixXd::Zero(coeffs.n, coeffs.n));
  for (int k = 0; k < nodes; ++k) {
    const double t = grid.node(k);
    const std::size_t i = static_cast<std::size_t>(k);
    const MatrixXd& Pk = sol.P[i];
    const MatrixXd Bt = coeffs.B(t);
    const MatrixXd Ct = coeffs.C(t);
    const MatrixXd Dt = coeffs.D(t);
    sol.K[i] = sym(coeffs.R(t) + Dt.transpose() * Pk * Dt);
    sol.L[i] = Bt.transpose() * Pk + Dt.transpose() * Pk * Ct;
    sol.Theta[i] = -solve_spd(sol.K[i], sol.L[i], t);
    sol.Pdot[i] = f(t, Pk);
  }
  return sol;
}

}  // namespace

RiccatiSolution solve_riccati_det(const CoefficientSet& coeffs,
                                  const TimeGrid& grid) {
  coeffs.validate(grid);
  if (!coeffs.is_zero(coeffs.C, grid, 1e-14) ||
      !coeffs.is_zero(coeffs.D, grid, 1e-14)) {
    throw ValidationError("BadCoefficients",
                          "solve_riccati_det requires C = 0 and D = 0");
  }
  const RiccatiRhs f = [&coeffs](double t, const MatrixXd& P) {
    const MatrixXd As = coeffs.a_star(t);
    const MatrixXd Bt = coeffs.B(t);
    const MatrixXd BtP = Bt.transpose() * P;
    const MatrixXd gain = solve_spd(coeffs.R(t), BtP, t);
    return MatrixXd(-(P * As + As.transpose() * P + coeffs.Q(t) -
                      BtP.transpose() * gain));
  };
  return assemble_solution(coeffs, grid, f, backward_sweep(f, coeffs.G, grid));
}

RiccatiSolution solve_bsre_det(const CoefficientSet& coeffs,
                               const TimeGrid& grid) {
  coeffs.validate(grid);
  const RiccatiRhs f = [&coeffs](double t, const MatrixXd& P) {
    const MatrixXd As = coeffs.a_star(t);
    const MatrixXd Bt = coeffs.B(t);
    const MatrixXd Ct = coeffs.C(t);
    const MatrixXd Dt = coeffs.D(t);
    const MatrixXd K = sym(coeffs.R(t) + Dt.transpose() * P * Dt);
    const MatrixXd L = Bt.transpose() * P + Dt.transpose() * P * Ct;
    const MatrixXd KinvL = solve_spd(K, L, t);
    return MatrixXd(-(P * As + As.transpose() * P + Ct.transpose() * P * Ct +
                      coeffs.Q(t) - L.transpose() * KinvL));
  };
  return assemble_solution(coeffs, grid, f, backward_sweep(f, coeffs.G, grid));
}

double feedback_value(const RiccatiSolution& sol, const VectorXd& eta) {
  return 0.5 * eta.dot(sol.P0() * eta);
}

double feedback_value_moment(const RiccatiSolution& sol,
                             const MatrixXd& sigma0) {
  return 0.5 * (sol.P0() * sigma0).trace();
}

namespace {

struct InterpolantPayload {
  CoefficientSet coeffs;
  MatrixFlow pflow;
};

}  // namespace

FeedbackFn feedback_interpolant(const CoefficientSet& coeffs,
                                const RiccatiSolution& sol) {
  auto payload = std::make_shared<InterpolantPayload>();
  payload->coeffs = coeffs;
  payload->pflow.grid = sol.grid;
  payload->pflow.value = sol.P;
  payload->pflow.deriv = sol.Pdot;
  return [payload](double t) {
    const MatrixXd P = payload->pflow.eval(t);
    const CoefficientSet& c = payload->coeffs;
    const MatrixXd Bt = c.B(t);
    const MatrixXd Ct = c.C(t);
    const MatrixXd Dt = c.D(t);
    const MatrixXd K = 0.5 * (c.R(t) + Dt.transpose() * P * Dt +
                              (c.R(t) + Dt.transpose() * P * Dt).transpose());
    const MatrixXd L = Bt.transpose() * P + Dt.transpose() * P * Ct;
    return MatrixXd(-solve_spd(K, L, t));
  };
}

AdjointCheck adjoint_identity_check(const CoefficientSet& coeffs,
                                    const RiccatiSolution& sol,
                                    const VectorXd& eta) {
  const TimeGrid& grid = sol.grid;
  if (grid.nodes() < 5) {
    throw ValidationError("BadGrid",
                          "adjoint check needs at least 5 grid nodes");
  }
  const FeedbackFn theta = feedback_interpolant(coeffs, sol);
  // Closed-loop state as an n x 1 matrix ODE on the shared grid.
  const MatrixField field = [&](double t, const MatrixXd& x) {
    return MatrixXd((coeffs.a_star(t) + coeffs.B(t) * theta(t)) * x);
  };
  MatrixFlow xbar = integrate_matrix_flow(field, eta, grid, Direction::forward);

  const int nodes = grid.nodes();
  std::vector<VectorXd> psi(static_cast<std::size_t>(nodes));
  for (int k = 0; k < nodes; ++k) {
    psi[static_cast<std::size_t>(k)] =
        sol.P[static_cast<std::size_t>(k)] * xbar.value[static_cast<std::size_t>(k)];
  }

  // Fourth-order five-point differentiation of psi on the uniform grid.
  const double h = grid.dt();
  auto dpsi = [&](int k) -> VectorXd {
    auto at = [&](int i) -> const VectorXd& {
      return psi[static_cast<std::size_t>(i)];
    };
    const int N = nodes - 1;
    if (k >= 2 && k <= N - 2) {
      return (at(k - 2) - 8.0 * at(k - 1) + 8.0 * at(k + 1) - at(k + 2)) /
             (12.0 * h);
    }
    if (k == 0) {
      return (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) -
              3.0 * at(4)) /
             (12.0 * h);
    }
    if (k == 1) {
      return (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) +
              at(4)) /
             (12.0 * h);
    }
    if (k == N - 1) {
      return (3.0 * at(N) + 10.0 * at(N - 1) - 18.0 * at(N - 2) +
              6.0 * at(N - 3) - at(N - 4)) /
             (12.0 * h);
    }
    return (25.0 * at(N) - 48.0 * at(N - 1) + 36.0 * at(N - 2) -
            16.0 * at(N - 3) + 3.0 * at(N - 4)) /
           (12.0 * h);
  };

  AdjointCheck out;
  for (int k = 0; k < nodes; ++k) {
    const double t = grid.node(k);
    const VectorXd resid = dpsi(k) +
                           coeffs.a_star(t).transpose() *
                               psi[static_cast<std::size_t>(k)] +
                           coeffs.Q(t) * xbar.value[static_cast<std::size_t>(k)];
    out.max_residual = std::max(out.max_residual, max_abs(resid));
  }
  const VectorXd term = psi[static_cast<std::size_t>(nodes - 1)] -
                        coeffs.G * xbar.value[static_cast<std::size_t>(nodes - 1)];
  out.terminal_residual = max_abs(term);
  return out;
}

namespace {

CostReport lyapunov_impl(const CoefficientSet& coeffs,
                         const FeedbackFn& theta_hat, const TimeGrid& grid,
                         MatrixXd sigma) {
  coeffs.validate(grid);
  sigma = sym(sigma);
  double j = 0.0;
  const double h = grid.dt();

  struct Stage {
    MatrixXd dsigma;
    double dj;
  };
  auto rhs = [&](double t, const MatrixXd& S) -> Stage {
    const MatrixXd Th = theta_hat(t);
    const MatrixXd F = coeffs.a_star(t) + coeffs.B(t) * Th;
    const MatrixXd N = coeffs.C(t) + coeffs.D(t) * Th;
    Stage st;
    st.dsigma = F * S + S * F.transpose() + N * S * N.transpose();
    st.dj = 0.5 * ((coeffs.Q(t) + Th.transpose() * coeffs.R(t) * Th) * S).trace();
    return st;
  };

  for (int k = 0; k < grid.steps; ++k) {
    const double t = grid.node(k);
    const Stage s1 = rhs(t, sigma);
    const Stage s2 = rhs(t + 0.5 * h, sigma + (0.5 * h) * s1.dsigma);
    const Stage s3 = rhs(t + 0.5 * h, sigma + (0.5 * h) * s2.dsigma);
    const Stage s4 = rhs(t + h, sigma + h * s3.dsigma);
    const MatrixXd next =
        sigma + (h / 6.0) * (s1.dsigma + 2.0 * s2.dsigma + 2.0 * s3.dsigma +
                             s4.dsigma);
    sigma = sym(next);
    j += (h / 6.0) * (s1.dj + 2.0 * s2.dj + 2.0 * s3.dj + s4.dj);
    if (!all_finite(sigma) || max_abs(sigma) > kOverflowGuard) {
      throw NonFiniteError("second moment exceeded the overflow guard", t);
    }
  }

  CostReport report;
  report.method = "lyapunov";
  report.value = j + 0.5 * (coeffs.G * sigma).trace();
  report.steps = grid.steps;
  report.dt = grid.dt();
  return report;
}

}  // namespace

CostReport lyapunov_cost(const CoefficientSet& coeffs,
                         const FeedbackFn& theta_hat, const TimeGrid& grid,
                         const VectorXd& eta) {
  return lyapunov_impl(coeffs, theta_hat, grid, eta * eta.transpose());
}

CostReport lyapunov_cost_moment(const CoefficientSet& coeffs,
                                const FeedbackFn& theta_hat,
                                const TimeGrid& grid, const MatrixXd& sigma0) {
  return lyapunov_impl(coeffs, theta_hat, grid, sigma0);
}

}  // namespace rlab
