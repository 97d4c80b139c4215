#pragma once

// Moore-Penrose pseudo-inverse of a symmetric matrix through its
// eigendecomposition, with a relative spectral cutoff. Intended for the
// positive semidefinite gain matrices K = R + D'PD; a negative-spectrum flag
// reports inputs that are not PSD beyond tolerance.

#include "riccati_lab/core.hpp"

namespace rlab {

struct PinvResult {
  MatrixXd pinv;
  int rank = 0;
  double min_eigenvalue = 0.0;
  bool negative_spectrum = false;
};

// Eigenvalues with magnitude below tol * max(1, lambda_max) are treated as
// zero. Throws NotSymmetricError when the asymmetry of K exceeds
// 1e-12 * max(1, |K|); otherwise K is symmetrized before decomposition.
PinvResult pinv_psd(const MatrixXd& K, double tol = 1e-10);

}  // namespace rlab
