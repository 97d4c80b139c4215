#include "riccati_lab/sde.hpp"

#include <cmath>

namespace rlab {

namespace {

bool vec_ok(const VectorXd& v) {
  return all_finite(v) && max_abs(v) <= kOverflowGuard;
}

}  // namespace

void euler_maruyama_path(const VectorField& drift, const VectorField& diffusion,
                         const VectorXd& x0, const TimeGrid& grid,
                         NormalStream& stream,
                         const std::function<void(int, double, const VectorXd&,
                                                  double)>& on_node) {
  const double dt = grid.dt();
  const double sdt = std::sqrt(dt);
  VectorXd x = x0;
  if (!vec_ok(x)) {
    throw NonFiniteError("initial state is not finite", grid.t0);
  }
  for (int k = 0; k < grid.steps; ++k) {
    const double t = grid.node(k);
    const double dW = sdt * stream.next();
    on_node(k, t, x, dW);
    x = x + dt * drift(t, x) + dW * diffusion(t, x);
    if (!vec_ok(x)) {
      throw NonFiniteError("state exceeded the overflow guard", t);
    }
  }
  on_node(grid.steps, grid.t1, x, 0.0);
}

PathBatch euler_maruyama(const VectorField& drift, const VectorField& diffusion,
                         const VectorXd& x0, const TimeGrid& grid,
                         std::int64_t n_paths, std::uint64_t seed, Exec exec) {
  if (n_paths < 1) {
    throw ValidationError("BadBatch", "require n_paths >= 1");
  }
  PathBatch batch;
  batch.grid = grid;
  batch.n_paths = n_paths;
  batch.seed = seed;
  batch.states.assign(static_cast<std::size_t>(n_paths), {});
  for_each_path(n_paths, exec, [&](std::int64_t p) {
    NormalStream stream(seed, p);
    auto& traj = batch.states[static_cast<std::size_t>(p)];
    traj.assign(static_cast<std::size_t>(grid.nodes()), VectorXd());
    euler_maruyama_path(
        drift, diffusion, x0, grid, stream,
        [&](int k, double, const VectorXd& x, double) {
          traj[static_cast<std::size_t>(k)] = x;
        });
  });
  return batch;
}

}  // namespace rlab
