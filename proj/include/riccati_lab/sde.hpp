#pragma once

// Euler-Maruyama simulation of d x = f(t, x) dt + g(t, x) dW with a scalar
// Brownian motion, fixed step, no adaptivity. Paths draw from per-path keyed
// streams, so results are independent of scheduling.

#include "riccati_lab/brownian.hpp"
#include "riccati_lab/core.hpp"

#include <functional>
#include <vector>

namespace rlab {

using VectorField = std::function<VectorXd(double, const VectorXd&)>;

struct PathBatch {
  TimeGrid grid;
  std::int64_t n_paths = 0;
  std::uint64_t seed = 0;
  // states[p][k] is path p at node k.
  std::vector<std::vector<VectorXd>> states;
};

// Simulates n_paths trajectories from x0. Throws NonFiniteError (with the
// last valid time) if any path leaves the finite range; the error reported
// is the one from the lowest path index.
PathBatch euler_maruyama(const VectorField& drift, const VectorField& diffusion,
                         const VectorXd& x0, const TimeGrid& grid,
                         std::int64_t n_paths, std::uint64_t seed,
                         Exec exec = Exec::parallel);

// Single-path stepper for callers that stream statistics instead of storing
// trajectories. Increments come from the caller-provided stream.
void euler_maruyama_path(const VectorField& drift, const VectorField& diffusion,
                         const VectorXd& x0, const TimeGrid& grid,
                         NormalStream& stream,
                         const std::function<void(int, double, const VectorXd&,
                                                  double)>& on_node);

}  // namespace rlab
