#include "riccati_lab/pinv.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace rlab {

PinvResult pinv_psd(const MatrixXd& K, double tol) {
  if (K.rows() != K.cols()) {
    throw ValidationError("BadMatrix", "pinv_psd requires a square matrix");
  }
  const double scale = std::max(1.0, max_abs(K));
  const double asym = max_abs(K - K.transpose());
  if (!(asym <= 1e-12 * scale)) {
    throw NotSymmetricError("asymmetry " + std::to_string(asym) +
                            " exceeds guard");
  }
  const MatrixXd S = 0.5 * (K + K.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(S);
  if (eig.info() != Eigen::Success) {
    throw ValidationError("BadMatrix", "eigendecomposition failed");
  }
  const VectorXd& lam = eig.eigenvalues();
  const MatrixXd& V = eig.eigenvectors();
  const double lam_max = lam(lam.size() - 1);
  const double cutoff = tol * std::max(1.0, lam_max);

  PinvResult out;
  out.min_eigenvalue = lam(0);
  out.negative_spectrum = lam(0) < -tol;
  VectorXd inv = VectorXd::Zero(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (std::abs(lam(i)) > cutoff) {
      inv(i) = 1.0 / lam(i);
      ++out.rank;
    }
  }
  out.pinv = V * inv.asDiagonal() * V.transpose();
  return out;
}

}  // namespace rlab
