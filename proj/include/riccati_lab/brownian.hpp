#pragma once

// Deterministic Gaussian streams for Monte Carlo paths.
//
// The stream for path p of a run seeded with s depends on (s, p) only, never
// on thread count or on which other paths were sampled. Any partition of the
// path range therefore reproduces identical numbers, and regenerating a batch
// with the same (grid, n_paths, seed) is bit-identical.

#include "riccati_lab/core.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace rlab {

// Standard normal stream from a per-path mt19937_64 via the Box-Muller pair
// transform. Pairs are cached so successive calls consume the generator in a
// fixed pattern regardless of caller.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::int64_t path);

  double next();

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Brownian increments on a grid: increments[p][k] = W(t_{k+1}) - W(t_k).
struct IncrementBatch {
  TimeGrid grid;
  std::int64_t n_paths = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> increments;
};

IncrementBatch sample_brownian(const TimeGrid& grid, std::int64_t n_paths,
                               std::uint64_t seed,
                               Exec exec = Exec::parallel);

// Aggregates consecutive fine increments into coarse ones (factor must divide
// the step count). Used to share one Brownian path across refinement levels.
IncrementBatch coarsen(const IncrementBatch& fine, int factor);

}  // namespace rlab
