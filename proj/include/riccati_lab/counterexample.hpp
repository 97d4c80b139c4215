#pragma once

#include "riccati_lab/core.hpp"

#include <cstdint>
#include <vector>

namespace rlab {

// Scalar model with R = 1/4 whose optimal feedback fails to be bounded:
//   M(t)    = int_0^t dW / sqrt(T - s)        (Euler sums on the grid)
//   tau     = first grid time with |M| > 1    (T - eps when never crossed)
//   zeta(t) = cp / sqrt(T - t) on [0, tau], 0 after, with cp = pi/(2 sqrt 2)
//   I(t)    = cp M(t ^ tau),  Y = I + cp + 1,  Z = zeta
//   P       = 1/Y - 1/4,  Lambda = -Z/Y^2,  Theta = -Z/Y.
// The grid stops at T - eps to keep the integrand finite; the stopping at tau
// is what keeps Y inside [1, pi/sqrt(2) + 1] up to a one-step overshoot.
inline constexpr double kCounterexampleCp = 1.1107207345395915;  // pi/(2 sqrt 2)
inline constexpr double kCounterexampleR = 0.25;

struct CounterexamplePath {
  TimeGrid grid;  // [0, T - eps]
  double T = 1.0;
  double eps = 0.0;
  int tau_index = 0;      // node index of tau
  bool crossed = false;   // |M| > 1 happened before T - eps
  double tol_disc = 0.0;  // 3 zeta(tau-) sqrt(dt), the overshoot allowance
  std::vector<double> dW;  // per step
  std::vector<double> M;   // per node, unstopped
  std::vector<double> I;
  std::vector<double> Y;
  std::vector<double> Z;
  std::vector<double> P;
  std::vector<double> Lambda;
  std::vector<double> Theta;
};

CounterexamplePath simulate_single_path(double T, double dt, double eps,
                                        std::uint64_t seed,
                                        std::uint64_t path);

// Forced increments (e.g. all zero) for closed-form checks.
CounterexamplePath simulate_single_path(double T, double dt, double eps,
                                        const std::vector<double>& dw);

// Time-mean of the one-step residual of dP = (R+P)^{-1} Lambda^2 dt
// + Lambda dW along one path.
double path_residual_mean(const CounterexamplePath& path);

struct CounterexampleConfig {
  double T = 1.0;
  double dt = 1e-3;
  double eps = 1e-2;
  int n_paths = 1000;
  std::uint64_t seed = 1;
  std::vector<double> horizons = {1e-1, 1e-2};  // decreasing eps_i, >= eps
};

// Streaming batch: per-path summaries only, so large path counts stay cheap.
struct CounterexampleBatch {
  CounterexampleConfig config;
  TimeGrid grid;
  std::vector<int> tau_index;
  std::vector<double> tau_time;
  std::vector<std::uint8_t> crossed;
  std::vector<std::uint8_t> violated_I;  // |I| left its bound + allowance
  std::vector<std::uint8_t> violated_Y;  // Y left its range + allowance
  std::vector<double> overshoot_sigma;   // worst |I| excess in sigma units
  std::vector<double> residual_mean;     // per-path time-mean BSRE residual
  // Indexed [horizon][path]:
  std::vector<std::vector<double>> zeta_sq_closed;  // closed-form int zeta^2
  std::vector<std::vector<double>> theta_sq;        // numeric int Theta^2 dt
  // Summary:
  double frac_violation_I = 0.0;
  double frac_violation_Y = 0.0;
  double max_overshoot_sigma = 0.0;
};

CounterexampleBatch simulate_paths(const CounterexampleConfig& config,
                                   Exec exec = Exec::parallel);

// Mean and standard error across paths of the per-path time-mean residual.
MeanSe bsre_residual_check(const CounterexampleBatch& batch);

struct HorizonRow {
  double eps_i = 0.0;
  // Sample moments of exp(int_0^{T-eps_i} zeta^2 dt), evaluated through the
  // closed form (T/(T - tau^(T-eps_i)))^{pi^2/8}. The continuous-time
  // expectation is infinite; the sample mean can only grow as eps_i shrinks,
  // which is the observable form of that statement.
  double exp_moment_mean = 0.0;
  double exp_moment_se = 0.0;
  double theta_sq_q50 = 0.0;
  double theta_sq_q90 = 0.0;
  double theta_sq_q99 = 0.0;
};

std::vector<HorizonRow> unboundedness_statistic(
    const CounterexampleBatch& batch);

}  // namespace rlab
