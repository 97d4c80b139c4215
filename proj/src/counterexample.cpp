#include "riccati_lab/counterexample.hpp"

#include "riccati_lab/brownian.hpp"

#include <algorithm>
#include <cmath>

namespace rlab {

namespace {

constexpr double kPiSqOver8 = 1.2337005501361697;

void validate_cutoff(double T, double dt, double eps) {
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw ValidationError("BadCutoff", "horizon T must be positive");
  }
  if (!(eps > 0.0) || eps >= T / 10.0) {
    throw ValidationError("BadCutoff",
                          "cutoff eps must satisfy 0 < eps < T/10");
  }
  if (!(dt > 0.0) || dt > eps / 10.0) {
    throw ValidationError("BadCutoff", "step dt must satisfy dt <= eps/10");
  }
}

CounterexamplePath build_path(double T, double dt, double eps,
                              std::vector<double> dw) {
  validate_cutoff(T, dt, eps);
  const int steps = static_cast<int>(std::lround((T - eps) / dt));
  if (steps < 2) {
    throw ValidationError("BadCutoff", "grid must have at least 2 steps");
  }
  if (static_cast<int>(dw.size()) != steps) {
    throw ValidationError("BadArguments",
                          "increment count does not match the grid");
  }
  const TimeGrid grid{0.0, T - eps, steps};
  const double h = grid.dt();
  const double cp = kCounterexampleCp;

  CounterexamplePath path;
  path.grid = grid;
  path.T = T;
  path.eps = eps;
  path.dW = std::move(dw);
  const std::size_t nodes = static_cast<std::size_t>(grid.nodes());
  path.M.assign(nodes, 0.0);
  path.I.assign(nodes, 0.0);
  path.Y.assign(nodes, 0.0);
  path.Z.assign(nodes, 0.0);
  path.P.assign(nodes, 0.0);
  path.Lambda.assign(nodes, 0.0);
  path.Theta.assign(nodes, 0.0);

  // Euler sums for M and the first grid crossing of |M| > 1.
  int tau = steps;
  bool crossed = false;
  for (int k = 0; k < steps; ++k) {
    const double t = grid.node(k);
    const std::size_t i = static_cast<std::size_t>(k);
    path.M[i + 1] = path.M[i] + path.dW[i] / std::sqrt(T - t);
    if (!crossed && std::abs(path.M[i + 1]) > 1.0) {
      crossed = true;
      tau = k + 1;
    }
  }
  path.tau_index = tau;
  path.crossed = crossed;

  // Integrand magnitude on the step that produced the stop (or the last
  // active step), which sets the one-step overshoot allowance.
  const int last_active = std::max(0, tau - 1);
  const double zeta_last = cp / std::sqrt(T - grid.node(last_active));
  path.tol_disc = 3.0 * zeta_last * std::sqrt(h);

  for (int k = 0; k <= steps; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    const double m_stopped = path.M[static_cast<std::size_t>(std::min(k, tau))];
    path.I[i] = cp * m_stopped;
    path.Y[i] = path.I[i] + cp + 1.0;
    path.Z[i] = k < tau ? cp / std::sqrt(T - grid.node(k)) : 0.0;
    path.P[i] = 1.0 / path.Y[i] - kCounterexampleR;
    path.Lambda[i] = -path.Z[i] / (path.Y[i] * path.Y[i]);
    path.Theta[i] = -path.Z[i] / path.Y[i];
  }
  return path;
}

}  // namespace

CounterexamplePath simulate_single_path(double T, double dt, double eps,
                                        const std::vector<double>& dw) {
  return build_path(T, dt, eps, dw);
}

CounterexamplePath simulate_single_path(double T, double dt, double eps,
                                        std::uint64_t seed,
                                        std::uint64_t path_id) {
  validate_cutoff(T, dt, eps);
  const int steps = static_cast<int>(std::lround((T - eps) / dt));
  if (steps < 2) {
    throw ValidationError("BadCutoff", "grid must have at least 2 steps");
  }
  const double h = (T - eps) / steps;
  NormalStream stream(seed, path_id);
  std::vector<double> dw(static_cast<std::size_t>(steps));
  const double root_h = std::sqrt(h);
  for (double& d : dw) d = root_h * stream.next();
  return build_path(T, dt, eps, std::move(dw));
}

double path_residual_mean(const CounterexamplePath& path) {
  const int steps = path.grid.steps;
  const double h = path.grid.dt();
  double sum = 0.0;
  for (int k = 0; k < steps; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    const double dP = path.P[i + 1] - path.P[i];
    // (R + P)^{-1} = Y.
    sum += dP - path.Y[i] * path.Lambda[i] * path.Lambda[i] * h -
           path.Lambda[i] * path.dW[i];
  }
  return sum / steps;
}

CounterexampleBatch simulate_paths(const CounterexampleConfig& config,
                                   Exec exec) {
  validate_cutoff(config.T, config.dt, config.eps);
  if (config.n_paths < 1) {
    throw ValidationError("BadArguments", "n_paths must be >= 1");
  }
  for (std::size_t i = 0; i < config.horizons.size(); ++i) {
    const double e = config.horizons[i];
    if (!(e >= config.eps) || e >= config.T) {
      throw ValidationError("BadCutoff",
                            "each horizon eps_i must satisfy eps <= eps_i < T");
    }
    if (i > 0 && e >= config.horizons[i - 1]) {
      throw ValidationError("BadCutoff", "horizons must be decreasing");
    }
  }

  CounterexampleBatch batch;
  batch.config = config;
  const int steps = static_cast<int>(std::lround((config.T - config.eps) /
                                                 config.dt));
  batch.grid = TimeGrid{0.0, config.T - config.eps, steps};
  const double h = batch.grid.dt();
  const std::size_t np = static_cast<std::size_t>(config.n_paths);
  const std::size_t nh = config.horizons.size();
  batch.tau_index.assign(np, 0);
  batch.tau_time.assign(np, 0.0);
  batch.crossed.assign(np, 0);
  batch.violated_I.assign(np, 0);
  batch.violated_Y.assign(np, 0);
  batch.overshoot_sigma.assign(np, 0.0);
  batch.residual_mean.assign(np, 0.0);
  batch.zeta_sq_closed.assign(nh, std::vector<double>(np, 0.0));
  batch.theta_sq.assign(nh, std::vector<double>(np, 0.0));

  // Steps strictly before each horizon endpoint (shared by all paths).
  std::vector<int> horizon_end(nh, 0);
  for (std::size_t hi = 0; hi < nh; ++hi) {
    const double t_end = config.T - config.horizons[hi];
    int count = 0;
    while (count < steps && batch.grid.node(count) < t_end) ++count;
    horizon_end[hi] = count;
  }

  const double cp = kCounterexampleCp;
  const double y_lo = 1.0;
  const double y_hi = 2.0 * cp + 1.0;

  for_each_path(config.n_paths, exec, [&](std::int64_t p) {
    const CounterexamplePath path = simulate_single_path(
        config.T, config.dt, config.eps, config.seed,
        static_cast<std::uint64_t>(p));
    const std::size_t ps = static_cast<std::size_t>(p);
    batch.tau_index[ps] = path.tau_index;
    batch.tau_time[ps] = path.grid.node(path.tau_index);
    batch.crossed[ps] = path.crossed ? 1 : 0;

    const double sigma_unit = path.tol_disc / 3.0;
    bool bad_i = false;
    bool bad_y = false;
    double worst = 0.0;
    for (double v : path.I) {
      const double excess = std::abs(v) - cp;
      if (excess > path.tol_disc) bad_i = true;
      worst = std::max(worst, excess / sigma_unit);
    }
    for (double v : path.Y) {
      if (v < y_lo - path.tol_disc || v > y_hi + path.tol_disc) bad_y = true;
    }
    batch.violated_I[ps] = bad_i ? 1 : 0;
    batch.violated_Y[ps] = bad_y ? 1 : 0;
    batch.overshoot_sigma[ps] = std::max(0.0, worst);
    batch.residual_mean[ps] = path_residual_mean(path);

    double cum = 0.0;
    int next_h = 0;
    // horizon_end is nondecreasing in hi because horizons decrease.
    for (int k = 0; k <= steps && next_h < static_cast<int>(nh); ++k) {
      while (next_h < static_cast<int>(nh) &&
             horizon_end[static_cast<std::size_t>(next_h)] == k) {
        batch.theta_sq[static_cast<std::size_t>(next_h)][ps] = cum;
        ++next_h;
      }
      if (k < steps) {
        const double th = path.Theta[static_cast<std::size_t>(k)];
        cum += th * th * h;
      }
    }
    for (std::size_t hi = 0; hi < nh; ++hi) {
      const double t_end = config.T - config.horizons[hi];
      const double stop = std::min(batch.tau_time[ps], t_end);
      batch.zeta_sq_closed[hi][ps] =
          kPiSqOver8 * std::log(config.T / (config.T - stop));
    }
  });

  int viol_i = 0;
  int viol_y = 0;
  for (std::size_t p = 0; p < np; ++p) {
    viol_i += batch.violated_I[p];
    viol_y += batch.violated_Y[p];
    batch.max_overshoot_sigma =
        std::max(batch.max_overshoot_sigma, batch.overshoot_sigma[p]);
  }
  batch.frac_violation_I = static_cast<double>(viol_i) / config.n_paths;
  batch.frac_violation_Y = static_cast<double>(viol_y) / config.n_paths;
  return batch;
}

MeanSe bsre_residual_check(const CounterexampleBatch& batch) {
  return mean_se(batch.residual_mean);
}

std::vector<HorizonRow> unboundedness_statistic(
    const CounterexampleBatch& batch) {
  std::vector<HorizonRow> rows;
  const std::size_t nh = batch.config.horizons.size();
  for (std::size_t hi = 0; hi < nh; ++hi) {
    HorizonRow row;
    row.eps_i = batch.config.horizons[hi];
    std::vector<double> expv(batch.zeta_sq_closed[hi].size());
    for (std::size_t p = 0; p < expv.size(); ++p) {
      expv[p] = std::exp(batch.zeta_sq_closed[hi][p]);
    }
    const MeanSe ms = mean_se(expv);
    row.exp_moment_mean = ms.mean;
    row.exp_moment_se = ms.se;

    std::vector<double> th = batch.theta_sq[hi];
    std::sort(th.begin(), th.end());
    auto quantile = [&](double q) {
      const std::size_t idx = static_cast<std::size_t>(
          std::lround(q * (static_cast<double>(th.size()) - 1.0)));
      return th[std::min(idx, th.size() - 1)];
    };
    row.theta_sq_q50 = quantile(0.5);
    row.theta_sq_q90 = quantile(0.9);
    row.theta_sq_q99 = quantile(0.99);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rlab
