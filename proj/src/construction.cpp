#include "riccati_lab/construction.hpp"

#include <cmath>
#include <vector>

namespace rlab {

namespace {

ConstructionPath run_path(const CoefficientSet& coeffs,
                          const RiccatiSolution& sol,
                          const std::vector<double>& dw) {
  const TimeGrid& grid = sol.grid;
  const int n = coeffs.n;
  ConstructionPath out;
  out.grid = grid;
  out.dW = dw;
  const std::size_t nodes = static_cast<std::size_t>(grid.nodes());
  out.X.resize(nodes);
  out.Xt.resize(nodes);
  out.Y.resize(nodes);
  out.Z.resize(nodes);
  out.X[0] = MatrixXd::Identity(n, n);
  out.Xt[0] = MatrixXd::Identity(n, n);

  const double h = grid.dt();
  for (int k = 0; k < grid.steps; ++k) {
    const double t = grid.node(k);
    const std::size_t i = static_cast<std::size_t>(k);
    const MatrixXd F =
        coeffs.a_star(t) + coeffs.B(t) * sol.Theta[i];
    const MatrixXd Gn = coeffs.C(t) + coeffs.D(t) * sol.Theta[i];
    const double dWk = dw[i];
    out.X[i + 1] = out.X[i] + h * (F * out.X[i]) + dWk * (Gn * out.X[i]);
    out.Xt[i + 1] = out.Xt[i] +
                    h * ((Gn * Gn - F).transpose() * out.Xt[i]) -
                    dWk * (Gn.transpose() * out.Xt[i]);
    if (!all_finite(out.X[i + 1]) || !all_finite(out.Xt[i + 1]) ||
        std::max(max_abs(out.X[i + 1]), max_abs(out.Xt[i + 1])) >
            kOverflowGuard) {
      throw NonFiniteError("matrix flow exceeded the overflow guard", t);
    }
  }
  for (int k = 0; k <= grid.steps; ++k) {
    const double t = grid.node(k);
    const std::size_t i = static_cast<std::size_t>(k);
    const MatrixXd Gn = coeffs.C(t) + coeffs.D(t) * sol.Theta[i];
    out.Y[i] = sol.P[i] * out.X[i];
    out.Z[i] = sol.P[i] * Gn * out.X[i];
  }
  return out;
}

}  // namespace

ConstructionPath simulate_construction_path(const CoefficientSet& coeffs,
                                            const RiccatiSolution& sol,
                                            std::uint64_t seed,
                                            std::uint64_t path) {
  NormalStream stream(seed, path);
  const double root_h = std::sqrt(sol.grid.dt());
  std::vector<double> dw(static_cast<std::size_t>(sol.grid.steps));
  for (double& d : dw) d = root_h * stream.next();
  return run_path(coeffs, sol, dw);
}

ConstructionPath simulate_construction_path(const CoefficientSet& coeffs,
                                            const RiccatiSolution& sol,
                                            const std::vector<double>& dw) {
  if (static_cast<int>(dw.size()) != sol.grid.steps) {
    throw ValidationError("BadArguments",
                          "increment count does not match the grid");
  }
  return run_path(coeffs, sol, dw);
}

double bsde_residual_max(const ConstructionPath& path,
                         const CoefficientSet& coeffs) {
  const TimeGrid& grid = path.grid;
  const double h = grid.dt();
  double worst = 0.0;
  for (int k = 0; k < grid.steps; ++k) {
    const double t = grid.node(k);
    const std::size_t i = static_cast<std::size_t>(k);
    const MatrixXd resid =
        path.Y[i + 1] - path.Y[i] +
        h * (coeffs.a_star(t).transpose() * path.Y[i] +
             coeffs.C(t).transpose() * path.Z[i] + coeffs.Q(t) * path.X[i]) -
        path.dW[i] * path.Z[i];
    worst = std::max(worst, resid.norm());
  }
  return worst;
}

namespace {

ConstructionDiagnostics run_batch(
    const CoefficientSet& coeffs, const RiccatiSolution& sol, int n_paths,
    Exec exec,
    const std::function<std::vector<double>(int)>& increments_for) {
  const TimeGrid& grid = sol.grid;
  if (n_paths < 1) {
    throw ValidationError("BadArguments", "n_paths must be >= 1");
  }
  const int n = coeffs.n;
  const std::size_t nodes = static_cast<std::size_t>(grid.nodes());
  const std::size_t steps = static_cast<std::size_t>(grid.steps);
  const double h = grid.dt();

  // Per-path norm rows, reduced sequentially afterwards so the result does
  // not depend on the schedule.
  std::vector<std::vector<double>> inv_rows(static_cast<std::size_t>(n_paths));
  std::vector<std::vector<double>> p_rows(static_cast<std::size_t>(n_paths));
  std::vector<std::vector<double>> lam_rows(static_cast<std::size_t>(n_paths));
  std::vector<std::vector<double>> res_rows(static_cast<std::size_t>(n_paths));

  for_each_path(n_paths, exec, [&](std::int64_t p) {
    const ConstructionPath path =
        run_path(coeffs, sol, increments_for(static_cast<int>(p)));
    std::vector<double> inv(nodes), perr(nodes), lam(nodes), res(steps);
    const MatrixXd eye = MatrixXd::Identity(n, n);
    for (std::size_t i = 0; i < nodes; ++i) {
      const double t = grid.node(static_cast<int>(i));
      const MatrixXd Gn = coeffs.C(t) + coeffs.D(t) * sol.Theta[i];
      const MatrixXd XtT = path.Xt[i].transpose();
      const MatrixXd Phat = path.Y[i] * XtT;
      inv[i] = (path.X[i] * XtT - eye).norm();
      perr[i] = (Phat - sol.P[i]).norm();
      lam[i] = (path.Z[i] * XtT - Phat * Gn).norm();
    }
    for (std::size_t i = 0; i < steps; ++i) {
      const double t = grid.node(static_cast<int>(i));
      const MatrixXd resid =
          path.Y[i + 1] - path.Y[i] +
          h * (coeffs.a_star(t).transpose() * path.Y[i] +
               coeffs.C(t).transpose() * path.Z[i] +
               coeffs.Q(t) * path.X[i]) -
          path.dW[i] * path.Z[i];
      res[i] = resid.norm();
    }
    const std::size_t ps = static_cast<std::size_t>(p);
    inv_rows[ps] = std::move(inv);
    p_rows[ps] = std::move(perr);
    lam_rows[ps] = std::move(lam);
    res_rows[ps] = std::move(res);
  });

  ConstructionDiagnostics diag;
  diag.grid = grid;
  diag.n_paths = n_paths;
  diag.err_inverse.assign(nodes, 0.0);
  diag.err_P.assign(nodes, 0.0);
  diag.err_Lambda.assign(nodes, 0.0);
  diag.bsde_residual.assign(steps, 0.0);
  for (int p = 0; p < n_paths; ++p) {
    const std::size_t ps = static_cast<std::size_t>(p);
    for (std::size_t i = 0; i < nodes; ++i) {
      diag.err_inverse[i] += inv_rows[ps][i];
      diag.err_P[i] += p_rows[ps][i];
      diag.err_Lambda[i] += lam_rows[ps][i];
    }
    for (std::size_t i = 0; i < steps; ++i) {
      diag.bsde_residual[i] += res_rows[ps][i];
    }
  }
  for (std::size_t i = 0; i < nodes; ++i) {
    diag.err_inverse[i] /= n_paths;
    diag.err_P[i] /= n_paths;
    diag.err_Lambda[i] /= n_paths;
    diag.max_err_inverse = std::max(diag.max_err_inverse, diag.err_inverse[i]);
    diag.max_err_P = std::max(diag.max_err_P, diag.err_P[i]);
    diag.max_err_Lambda = std::max(diag.max_err_Lambda, diag.err_Lambda[i]);
  }
  for (std::size_t i = 0; i < steps; ++i) {
    diag.bsde_residual[i] /= n_paths;
    diag.max_bsde_residual =
        std::max(diag.max_bsde_residual, diag.bsde_residual[i]);
  }
  return diag;
}

}  // namespace

ConstructionDiagnostics simulate_construction(const CoefficientSet& coeffs,
                                              const RiccatiSolution& sol,
                                              int n_paths, std::uint64_t seed,
                                              Exec exec) {
  const double root_h = std::sqrt(sol.grid.dt());
  const std::size_t steps = static_cast<std::size_t>(sol.grid.steps);
  ConstructionDiagnostics diag = run_batch(
      coeffs, sol, n_paths, exec, [&](int p) {
        NormalStream stream(seed, static_cast<std::uint64_t>(p));
        std::vector<double> dw(steps);
        for (double& d : dw) d = root_h * stream.next();
        return dw;
      });
  diag.seed = seed;
  return diag;
}

ConstructionDiagnostics simulate_construction(const CoefficientSet& coeffs,
                                              const RiccatiSolution& sol,
                                              const IncrementBatch& increments,
                                              Exec exec) {
  const TimeGrid& g = increments.grid;
  if (g.steps != sol.grid.steps || g.t0 != sol.grid.t0 ||
      g.t1 != sol.grid.t1) {
    throw ValidationError("BadArguments",
                          "increment grid does not match the solution grid");
  }
  ConstructionDiagnostics diag = run_batch(
      coeffs, sol, increments.n_paths, exec,
      [&](int p) { return increments.increments[static_cast<std::size_t>(p)]; });
  diag.seed = increments.seed;
  return diag;
}

}  // namespace rlab
