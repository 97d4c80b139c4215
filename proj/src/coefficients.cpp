#include "riccati_lab/coefficients.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <utility>

namespace rlab {

MatrixFn constant_fn(MatrixXd value) {
  return [value = std::move(value)](double) { return value; };
}

MatrixFn zero_fn(int rows, int cols) {
  return constant_fn(MatrixXd::Zero(rows, cols));
}

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw ValidationError("BadCoefficients", what);
}

void check_shape(const MatrixXd& M, int rows, int cols,
                 const std::string& name) {
  require(M.rows() == rows && M.cols() == cols,
          name + " has wrong shape at some node");
  require(all_finite(M), name + " has non-finite entries");
}

double min_eig_sym(const MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (M + M.transpose()));
  return eig.eigenvalues()(0);
}

void check_psd(const MatrixXd& M, double tol, const std::string& name) {
  const double scale = std::max(1.0, max_abs(M));
  require(max_abs(M - M.transpose()) <= tol * scale, name + " not symmetric");
  require(min_eig_sym(M) >= -tol * scale, name + " not positive semidefinite");
}

}  // namespace

void CoefficientSet::validate(const TimeGrid& grid) const {
  require(n >= 1 && m >= 1, "require n >= 1 and m >= 1");
  require(A && A1 && B && C && D && Q && R, "all coefficient maps must be set");
  check_psd(G, psd_tol, "G");
  check_shape(G, n, n, "G");
  for (int k = 0; k < grid.nodes(); ++k) {
    const double t = grid.node(k);
    check_shape(A(t), n, n, "A");
    check_shape(A1(t), n, n, "A1");
    check_shape(B(t), n, m, "B");
    check_shape(C(t), n, n, "C");
    check_shape(D(t), n, m, "D");
    const MatrixXd Qt = Q(t);
    check_shape(Qt, n, n, "Q");
    check_psd(Qt, psd_tol, "Q");
    const MatrixXd Rt = R(t);
    check_shape(Rt, m, m, "R");
    const double scale = std::max(1.0, max_abs(Rt));
    require(max_abs(Rt - Rt.transpose()) <= psd_tol * scale,
            "R not symmetric");
    require(min_eig_sym(Rt) >= r_min,
            "R min eigenvalue below r_min at some node");
  }
}

bool CoefficientSet::is_zero(const MatrixFn& f, const TimeGrid& grid,
                             double tol) const {
  for (int k = 0; k < grid.nodes(); ++k) {
    if (max_abs(f(grid.node(k))) > tol) return false;
  }
  return true;
}

}  // namespace rlab
