#pragma once

// Instance builders shared by the test binaries. Randomness always flows
// through an explicit engine so every test is a fixed-seed reproduction.

#include "riccati_lab/coefficients.hpp"

#include <random>

namespace rlab::testing {

inline MatrixXd random_matrix(std::mt19937_64& gen, int rows, int cols,
                              double scale = 1.0) {
  std::normal_distribution<double> normal;
  MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = scale * normal(gen);
  return M;
}

inline MatrixXd random_psd(std::mt19937_64& gen, int n, double scale = 1.0) {
  MatrixXd W = random_matrix(gen, n, n, scale);
  return MatrixXd(W * W.transpose() / std::sqrt(static_cast<double>(n)));
}

inline MatrixXd random_spd(std::mt19937_64& gen, int n, double floor = 0.5,
                           double scale = 1.0) {
  return MatrixXd(random_psd(gen, n, scale) +
                  floor * MatrixXd::Identity(n, n));
}

inline CoefficientSet constant_set(int n, int m, MatrixXd A, MatrixXd B,
                                   MatrixXd C, MatrixXd D, MatrixXd Q,
                                   MatrixXd R, MatrixXd G) {
  CoefficientSet cs;
  cs.n = n;
  cs.m = m;
  cs.A = constant_fn(std::move(A));
  cs.A1 = zero_fn(n, n);
  cs.B = constant_fn(std::move(B));
  cs.C = constant_fn(std::move(C));
  cs.D = constant_fn(std::move(D));
  cs.Q = constant_fn(std::move(Q));
  cs.R = constant_fn(std::move(R));
  cs.G = std::move(G);
  return cs;
}

// Random constant-coefficient instance with PSD weights. `noise` scales the
// C and D couplings; zero gives the deterministic LQ case.
inline CoefficientSet random_set(std::mt19937_64& gen, int n, int m,
                                 double noise) {
  return constant_set(n, m, random_matrix(gen, n, n, 0.6),
                      random_matrix(gen, n, m, 0.8),
                      random_matrix(gen, n, n, 0.4 * noise),
                      random_matrix(gen, n, m, 0.4 * noise),
                      random_psd(gen, n), random_spd(gen, m),
                      random_psd(gen, n));
}

inline VectorXd random_vector(std::mt19937_64& gen, int n,
                              double scale = 1.0) {
  std::normal_distribution<double> normal;
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * normal(gen);
  return v;
}

}  // namespace rlab::testing
