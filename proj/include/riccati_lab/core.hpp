#pragma once

// Shared plumbing: time grids, numeric guards, error types, and the
// serial/parallel path loop used by every Monte Carlo kernel.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rlab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// States whose largest entry magnitude exceeds this are treated as blown up.
inline constexpr double kOverflowGuard = 1e12;

// Uniform grid on [t0, t1]. Nodes are t0 + k*dt except the last, which is
// pinned to t1 so terminal conditions land on the exact endpoint.
struct TimeGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  int steps = 1;

  double dt() const { return (t1 - t0) / steps; }
  int nodes() const { return steps + 1; }
  double node(int k) const { return k == steps ? t1 : t0 + k * dt(); }

  // Throws ValidationError on t1 <= t0 or steps < 1.
  static TimeGrid make(double t0, double t1, int steps);
};

// Error with a stable machine-readable kind ("NonFinite", "SingularK", ...).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

// Input or model validation failure (bad grid, bad depth, bad block, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A state left the finite range during integration or simulation.
class NonFiniteError : public Error {
 public:
  NonFiniteError(const std::string& what, double last_valid_time)
      : Error("NonFinite", what), last_valid_time(last_valid_time) {}
  double last_valid_time;
};

class NotSymmetricError : public Error {
 public:
  explicit NotSymmetricError(const std::string& what)
      : Error("NotSymmetric", what) {}
};

class SingularKError : public Error {
 public:
  SingularKError(const std::string& what, double t)
      : Error("SingularK", what), t(t) {}
  double t;
};

class SingularPhiError : public Error {
 public:
  explicit SingularPhiError(const std::string& what)
      : Error("SingularPhi", what) {}
};

class NotConvergedError : public Error {
 public:
  NotConvergedError(const std::string& what, int iterations, double gap)
      : Error("NotConverged", what), iterations(iterations), gap(gap) {}
  int iterations;
  double gap;
};

class RangeConditionError : public Error {
 public:
  RangeConditionError(const std::string& what, int step, std::uint32_t history)
      : Error("RangeConditionViolated", what), step(step), history(history) {}
  int step;
  std::uint32_t history;
};

// Execution policy for path loops. The parallel variant must produce results
// bit-identical to the serial one; per-path random streams and ordered
// reductions make that possible.
enum class Exec { serial, parallel };

// Worker cap: RICCATI_LAB_THREADS, with 0 or unset meaning all hardware
// threads. Non-numeric values fall back to auto.
int worker_count();

// Runs fn(path) for path in [0, n). Exceptions thrown by fn are captured and
// the one with the lowest path index is rethrown after the loop, so failure
// reporting does not depend on the schedule.
void for_each_path(std::int64_t n, Exec exec,
                   const std::function<void(std::int64_t)>& fn);

// Sum in ascending value order: invariant under permutation of the inputs,
// which keeps assembled totals bit-stable when block order changes.
double sorted_sum(std::vector<double> values);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

// Sample mean and standard error (sample std with n-1 divisor over sqrt(n)).
MeanSe mean_se(const std::vector<double>& values);

// Largest entry magnitude; guards against NaN by returning +inf if any.
double max_abs(const MatrixXd& m);

bool all_finite(const MatrixXd& m);

}  // namespace rlab
