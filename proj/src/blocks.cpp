#include "riccati_lab/blocks.hpp"

#include "riccati_lab/ode.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <utility>

namespace rlab {

namespace {

MatrixXd sym(const MatrixXd& M) { return 0.5 * (M + M.transpose()); }

constexpr double kAs8Tol = 1e-10;

MatrixXd q_tilde(const Block& block, double t) {
  const CoefficientSet& c = block.coeffs;
  const MatrixXd R = c.R(t);
  const MatrixXd S = c.B(t) * c.C(t) - c.A(t) - c.A1(t);
  return c.Q(t) - block.R1(t) + c.C(t).transpose() * R * c.C(t) + R * S +
         S.transpose() * R;
}

}  // namespace

Block make_block(CoefficientSet coeffs, MatrixFn r1) {
  Block b;
  b.coeffs = std::move(coeffs);
  b.R1 = std::move(r1);
  return b;
}

Block make_block(CoefficientSet coeffs) {
  const MatrixFn R = coeffs.R;
  MatrixFn r1 = [R](double t) {
    const double delta = 1e-6;
    return MatrixXd((R(t + delta) - R(t - delta)) / (2.0 * delta));
  };
  return make_block(std::move(coeffs), std::move(r1));
}

As8Report validate_as8(const Block& block, const TimeGrid& grid) {
  const CoefficientSet& c = block.coeffs;
  As8Report report;
  if (c.n != c.m) {
    // The identity R B + C' R pairs control and state spaces; it only
    // typechecks for square blocks. Non-square blocks never qualify.
    report.pass = false;
    report.identity_residual = std::numeric_limits<double>::quiet_NaN();
    report.margin = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  report.margin = std::numeric_limits<double>::infinity();
  report.qtilde_min_eig.reserve(static_cast<std::size_t>(grid.nodes()));
  for (int k = 0; k < grid.nodes(); ++k) {
    const double t = grid.node(k);
    const MatrixXd R = c.R(t);
    const MatrixXd identity_part = R * c.B(t) + c.C(t).transpose() * R;
    report.identity_residual =
        std::max(report.identity_residual, max_abs(identity_part));
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym(q_tilde(block, t)));
    const double lo = eig.eigenvalues()(0);
    report.qtilde_min_eig.push_back(lo);
    report.margin = std::min(report.margin, lo);
  }
  report.pass =
      report.identity_residual <= kAs8Tol && report.margin >= -kAs8Tol;
  return report;
}

PhiSolveResult phi_picard_solve(const Block& block, const TimeGrid& grid,
                                int max_iter, double tol) {
  const CoefficientSet& c = block.coeffs;
  c.validate(grid);
  if (c.n != c.m) {
    throw ValidationError("BadBlock",
                          "the inverse transform needs square blocks (m = n)");
  }
  for (int k = 0; k < grid.nodes(); ++k) {
    const double t = grid.node(k);
    if (max_abs(c.D(t) - MatrixXd::Identity(c.n, c.n)) > 1e-12) {
      throw ValidationError("BadBlock",
                            "the inverse transform requires D = I (control "
                            "enters the noise with unit weight)");
    }
  }
  const As8Report as8 = validate_as8(block, grid);
  if (!as8.pass) {
    throw ValidationError("BadBlock",
                          "block fails the structural weight conditions "
                          "needed by the inverse transform");
  }

  const int n = c.n;
  const int nodes = grid.nodes();
  const MatrixXd terminal =
      sym(MatrixXd((c.R(grid.t1) + c.G).llt().solve(
          MatrixXd::Identity(n, n))));

  // The previous iterate enters the RK4 stages at half-step times, so it is
  // carried as a Hermite flow rather than node values.
  MatrixFlow prev;
  prev.grid = grid;
  prev.value.assign(static_cast<std::size_t>(nodes), MatrixXd::Zero(n, n));
  prev.deriv.assign(static_cast<std::size_t>(nodes), MatrixXd::Zero(n, n));

  PhiSolveResult out;
  out.grid = grid;

  const double h = grid.dt();
  for (int iter = 1; iter <= max_iter; ++iter) {
    auto rhs = [&](double t, const MatrixXd& phi) {
      const MatrixXd Ah = c.A(t) + c.A1(t) - c.B(t) * c.C(t);
      const MatrixXd Bt = c.B(t);
      const MatrixXd Qt = q_tilde(block, t);
      const MatrixXd prev_phi = prev.eval(t);
      return MatrixXd(Ah * phi + phi * Ah.transpose() -
                      Bt * phi * Bt.transpose() + phi * Qt * prev_phi +
                      prev_phi * Qt * phi - prev_phi * Qt * prev_phi);
    };

    std::vector<MatrixXd> phi(static_cast<std::size_t>(nodes));
    std::vector<MatrixXd> deriv(static_cast<std::size_t>(nodes));
    phi[static_cast<std::size_t>(grid.steps)] = terminal;
    for (int k = grid.steps; k > 0; --k) {
      const double t = grid.node(k);
      const MatrixXd& pk = phi[static_cast<std::size_t>(k)];
      const MatrixXd k1 = -rhs(t, pk);
      const MatrixXd k2 = -rhs(t - 0.5 * h, pk + (0.5 * h) * k1);
      const MatrixXd k3 = -rhs(t - 0.5 * h, pk + (0.5 * h) * k2);
      const MatrixXd k4 = -rhs(t - h, pk + h * k3);
      MatrixXd next = sym(pk + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
      if (!all_finite(next) || max_abs(next) > kOverflowGuard) {
        throw NonFiniteError("transform iterate exceeded the overflow guard",
                             t);
      }
      phi[static_cast<std::size_t>(k - 1)] = std::move(next);
    }
    double gap = 0.0;
    for (int k = 0; k < nodes; ++k) {
      const std::size_t i = static_cast<std::size_t>(k);
      gap = std::max(gap, max_abs(phi[i] - prev.value[i]));
      deriv[i] = rhs(grid.node(k), phi[i]);
    }
    out.iterates.push_back(PhiIterate{iter, gap});
    prev.value = std::move(phi);
    prev.deriv = std::move(deriv);
    if (gap <= tol) {
      out.iterations = iter;
      break;
    }
    if (iter == max_iter) {
      throw NotConvergedError("transform iteration did not reach tolerance",
                              iter, gap);
    }
  }

  out.phi = prev.value;
  out.P.resize(static_cast<std::size_t>(nodes));
  for (int k = 0; k < nodes; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    Eigen::LLT<MatrixXd> llt(out.phi[i]);
    if (llt.info() != Eigen::Success) {
      throw SingularPhiError(
          "transform iterate lost positive definiteness at a node");
    }
    out.P[i] = sym(MatrixXd(llt.solve(MatrixXd::Identity(n, n))) -
                   c.R(grid.node(k)));
  }
  return out;
}

BlockAssembly assemble_blocks(const std::vector<Block>& blocks,
                              const TimeGrid& grid,
                              const std::vector<VectorXd>& etas, Exec exec) {
  if (blocks.size() != etas.size()) {
    throw ValidationError("BadArguments",
                          "one initial vector per block is required");
  }
  const int count = static_cast<int>(blocks.size());
  BlockAssembly out;
  out.contributions.assign(blocks.size(), 0.0);
  out.picard_iterations.assign(blocks.size(), 0);
  out.as8_margins.assign(blocks.size(), 0.0);
  out.phi_vs_direct.assign(blocks.size(), -1.0);

  for_each_path(count, exec, [&](std::int64_t b) {
    const std::size_t i = static_cast<std::size_t>(b);
    const Block& block = blocks[i];
    const RiccatiSolution direct = solve_bsre_det(block.coeffs, grid);
    out.contributions[i] = feedback_value(direct, etas[i]);
    const As8Report as8 = validate_as8(block, grid);
    out.as8_margins[i] = as8.margin;
    bool square_unit_d = block.coeffs.n == block.coeffs.m;
    for (int k = 0; square_unit_d && k < grid.nodes(); ++k) {
      square_unit_d = max_abs(block.coeffs.D(grid.node(k)) -
                              MatrixXd::Identity(block.coeffs.n,
                                                 block.coeffs.n)) <= 1e-12;
    }
    if (as8.pass && square_unit_d) {
      const PhiSolveResult phi = phi_picard_solve(block, grid);
      out.picard_iterations[i] = phi.iterations;
      out.phi_vs_direct[i] = max_abs(phi.P0() - direct.P0());
    }
  });

  out.total = sorted_sum(out.contributions);
  return out;
}

}  // namespace rlab
