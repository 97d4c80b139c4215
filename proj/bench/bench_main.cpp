// Times the OpenMP path kernels against the serial reference on the same
// seeds and checks that both produce bit-identical results.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "riccati_lab/construction.hpp"
#include "riccati_lab/riccati.hpp"
#include "riccati_lab/slq_mc.hpp"

using namespace rlab;

namespace {

double seconds(const std::chrono::steady_clock::time_point& a,
               const std::chrono::steady_clock::time_point& b) {
  return std::chrono::duration<double>(b - a).count();
}

CoefficientSet bench_instance() {
  MatrixXd A(3, 3);
  A << 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, -0.5, -0.4, -0.3;
  MatrixXd B(3, 2);
  B << 1.0, 0.0, 0.0, 1.0, 0.5, -0.5;
  MatrixXd C = 0.2 * MatrixXd::Identity(3, 3);
  MatrixXd D(3, 2);
  D << 0.1, 0.0, 0.0, 0.1, 0.0, 0.0;
  CoefficientSet cs;
  cs.n = 3;
  cs.m = 2;
  cs.A = constant_fn(A);
  cs.A1 = zero_fn(3, 3);
  cs.B = constant_fn(B);
  cs.C = constant_fn(C);
  cs.D = constant_fn(D);
  cs.Q = constant_fn(MatrixXd::Identity(3, 3));
  cs.R = constant_fn(MatrixXd::Identity(2, 2));
  cs.G = MatrixXd::Identity(3, 3);
  return cs;
}

}  // namespace

int main(int argc, char** argv) {
  int n_paths = 20000;
  int steps = 500;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--paths") && i + 1 < argc)
      n_paths = std::atoi(argv[++i]);
    else if (!std::strcmp(argv[i], "--steps") && i + 1 < argc)
      steps = std::atoi(argv[++i]);
    else {
      std::fprintf(stderr, "usage: bench_paths [--paths N] [--steps N]\n");
      return 2;
    }
  }
  if (n_paths < 2 || steps < 2) {
    std::fprintf(stderr, "bench_paths needs --paths >= 2 and --steps >= 2\n");
    return 2;
  }

  CoefficientSet cs = bench_instance();
  TimeGrid grid = TimeGrid::make(0.0, 1.0, steps);
  RiccatiSolution sol = solve_bsre_det(cs, grid);
  ControlFn control = feedback_from_solution(sol);
  VectorXd eta(3);
  eta << 1.0, -0.5, 0.25;

  std::printf("workers: %d (serial reference vs OpenMP)\n", worker_count());
  std::printf("%-18s %8s %7s %10s %12s %8s %6s\n", "kernel", "paths", "steps",
              "serial[s]", "parallel[s]", "speedup", "match");

  bool all_match = true;

  {
    auto t0 = std::chrono::steady_clock::now();
    CostReport serial =
        mc_cost(cs, control, eta, grid, n_paths, 42, Exec::serial);
    auto t1 = std::chrono::steady_clock::now();
    CostReport parallel =
        mc_cost(cs, control, eta, grid, n_paths, 42, Exec::parallel);
    auto t2 = std::chrono::steady_clock::now();
    bool match = serial.value == parallel.value &&
                 serial.std_error == parallel.std_error;
    all_match = all_match && match;
    double ts = seconds(t0, t1);
    double tp = seconds(t1, t2);
    std::printf("%-18s %8d %7d %10.3f %12.3f %7.2fx %6s\n", "monte_carlo",
                n_paths, steps, ts, tp, ts / tp, match ? "yes" : "NO");
  }

  {
    int cpaths = std::max(2, n_paths / 10);
    auto t0 = std::chrono::steady_clock::now();
    ConstructionDiagnostics serial =
        simulate_construction(cs, sol, cpaths, 42, Exec::serial);
    auto t1 = std::chrono::steady_clock::now();
    ConstructionDiagnostics parallel =
        simulate_construction(cs, sol, cpaths, 42, Exec::parallel);
    auto t2 = std::chrono::steady_clock::now();
    bool match = serial.max_err_inverse == parallel.max_err_inverse &&
                 serial.max_err_P == parallel.max_err_P &&
                 serial.max_bsde_residual == parallel.max_bsde_residual;
    all_match = all_match && match;
    double ts = seconds(t0, t1);
    double tp = seconds(t1, t2);
    std::printf("%-18s %8d %7d %10.3f %12.3f %7.2fx %6s\n", "construction",
                cpaths, steps, ts, tp, ts / tp, match ? "yes" : "NO");
  }

  if (!all_match) {
    std::fprintf(stderr, "serial and parallel results differ\n");
    return 1;
  }
  return 0;
}
