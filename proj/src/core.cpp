#include "riccati_lab/core.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

namespace rlab {

TimeGrid TimeGrid::make(double t0, double t1, int steps) {
  if (!(t1 > t0)) {
    throw ValidationError("BadGrid", "require t1 > t0");
  }
  if (steps < 1) {
    throw ValidationError("BadGrid", "require steps >= 1");
  }
  if (!std::isfinite(t0) || !std::isfinite(t1)) {
    throw ValidationError("BadGrid", "grid endpoints must be finite");
  }
  return TimeGrid{t0, t1, steps};
}

int worker_count() {
  const char* env = std::getenv("RICCATI_LAB_THREADS");
  if (env != nullptr && *env != '\0') {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != nullptr && *end == '\0' && v > 0) {
      return static_cast<int>(v);
    }
  }
  return omp_get_max_threads();
}

void for_each_path(std::int64_t n, Exec exec,
                   const std::function<void(std::int64_t)>& fn) {
  if (n <= 0) return;
  if (exec == Exec::serial) {
    for (std::int64_t p = 0; p < n; ++p) fn(p);
    return;
  }

  std::exception_ptr first_error = nullptr;
  std::int64_t first_error_path = n;
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (std::int64_t p = 0; p < n; ++p) {
    try {
      fn(p);
    } catch (...) {
#pragma omp critical(rlab_path_error)
      {
        if (p < first_error_path) {
          first_error_path = p;
          first_error = std::current_exception();
        }
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

double sorted_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe out;
  const std::size_t n = values.size();
  if (n == 0) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(n);
  if (n < 2) return out;
  double ss = 0.0;
  for (double v : values) {
    const double d = v - out.mean;
    ss += d * d;
  }
  out.se = std::sqrt(ss / static_cast<double>(n - 1)) /
           std::sqrt(static_cast<double>(n));
  return out;
}

double max_abs(const MatrixXd& m) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double v = m(i, j);
      if (std::isnan(v)) return std::numeric_limits<double>::infinity();
      best = std::max(best, std::abs(v));
    }
  }
  return best;
}

bool all_finite(const MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j))) return false;
    }
  }
  return true;
}

}  // namespace rlab
