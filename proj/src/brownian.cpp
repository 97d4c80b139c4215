#include "riccati_lab/brownian.hpp"

#include <cmath>

namespace rlab {

namespace {

// splitmix64: mixes (seed, path) into one well-spread 64-bit generator seed.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

NormalStream::NormalStream(std::uint64_t seed, std::int64_t path)
    : gen_(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(path) +
                                        0xA5A5A5A5A5A5A5A5ULL))) {}

double NormalStream::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // 53-bit uniforms; u1 is shifted into (0,1] so log(u1) is finite.
  const double inv = 0x1.0p-53;
  double u1 = 1.0 - static_cast<double>(gen_() >> 11) * inv;
  double u2 = static_cast<double>(gen_() >> 11) * inv;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

IncrementBatch sample_brownian(const TimeGrid& grid, std::int64_t n_paths,
                               std::uint64_t seed, Exec exec) {
  if (n_paths < 1) {
    throw ValidationError("BadBatch", "require n_paths >= 1");
  }
  IncrementBatch batch;
  batch.grid = grid;
  batch.n_paths = n_paths;
  batch.seed = seed;
  batch.increments.assign(static_cast<std::size_t>(n_paths), {});
  const double sdt = std::sqrt(grid.dt());
  for_each_path(n_paths, exec, [&](std::int64_t p) {
    NormalStream stream(seed, p);
    auto& row = batch.increments[static_cast<std::size_t>(p)];
    row.resize(static_cast<std::size_t>(grid.steps));
    for (int k = 0; k < grid.steps; ++k) {
      row[static_cast<std::size_t>(k)] = sdt * stream.next();
    }
  });
  return batch;
}

IncrementBatch coarsen(const IncrementBatch& fine, int factor) {
  if (factor < 1 || fine.grid.steps % factor != 0) {
    throw ValidationError("BadBatch", "coarsen factor must divide steps");
  }
  IncrementBatch out;
  out.grid = TimeGrid{fine.grid.t0, fine.grid.t1, fine.grid.steps / factor};
  out.n_paths = fine.n_paths;
  out.seed = fine.seed;
  out.increments.assign(fine.increments.size(), {});
  for (std::size_t p = 0; p < fine.increments.size(); ++p) {
    auto& row = out.increments[p];
    row.resize(static_cast<std::size_t>(out.grid.steps));
    for (int k = 0; k < out.grid.steps; ++k) {
      double s = 0.0;
      for (int j = 0; j < factor; ++j) {
        s += fine.increments[p][static_cast<std::size_t>(k * factor + j)];
      }
      row[static_cast<std::size_t>(k)] = s;
    }
  }
  return out;
}

}  // namespace rlab
