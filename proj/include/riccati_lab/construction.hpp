#pragma once

#include "riccati_lab/brownian.hpp"
#include "riccati_lab/riccati.hpp"

#include <cstdint>
#include <vector>

namespace rlab {

// One simulated path of the forward matrix flows
//   dX  = (A* + B Theta) X dt + (C + D Theta) X dW,          X(t0) = I
//   dXt = [-(A* + B Theta) + (C + D Theta)^2]' Xt dt
//         - (C + D Theta)' Xt dW,                            Xt(t0) = I
// together with Y = P X and Z = P (C + D Theta) X built from the Riccati
// solution. Xt is the candidate inverse-transpose flow: X Xt' stays near I
// pathwise, which is what turns (Y, Z) into a reconstruction of (P, Lambda).
struct ConstructionPath {
  TimeGrid grid;
  std::vector<MatrixXd> X;
  std::vector<MatrixXd> Xt;
  std::vector<MatrixXd> Y;
  std::vector<MatrixXd> Z;
  std::vector<double> dW;
};

ConstructionPath simulate_construction_path(const CoefficientSet& coeffs,
                                            const RiccatiSolution& sol,
                                            std::uint64_t seed,
                                            std::uint64_t path);

// Same flow driven by externally supplied increments (one row of a batch).
ConstructionPath simulate_construction_path(const CoefficientSet& coeffs,
                                            const RiccatiSolution& sol,
                                            const std::vector<double>& dw);

// Largest step residual of the backward equation along one path:
//   || Y_{k+1} - Y_k + [A*' Y + C' Z + Q X] dt - Z dW ||_F.
double bsde_residual_max(const ConstructionPath& path,
                         const CoefficientSet& coeffs);

// Path-mean Frobenius diagnostics per node (residual per step), plus maxima
// over time. err_inverse tracks X Xt' - I, err_P tracks Y Xt' - P, and
// err_Lambda tracks Z Xt' - (Y Xt')(C + D Theta), which reconstructs the
// martingale coefficient and must vanish for deterministic coefficients.
struct ConstructionDiagnostics {
  TimeGrid grid;
  int n_paths = 0;
  std::uint64_t seed = 0;
  std::vector<double> err_inverse;
  std::vector<double> err_P;
  std::vector<double> err_Lambda;
  std::vector<double> bsde_residual;
  double max_err_inverse = 0.0;
  double max_err_P = 0.0;
  double max_err_Lambda = 0.0;
  double max_bsde_residual = 0.0;
};

ConstructionDiagnostics simulate_construction(const CoefficientSet& coeffs,
                                              const RiccatiSolution& sol,
                                              int n_paths, std::uint64_t seed,
                                              Exec exec = Exec::parallel);

// Variant with shared increments, for refinement studies where the same
// Brownian path must drive every grid (coarsen a fine batch between runs).
ConstructionDiagnostics simulate_construction(const CoefficientSet& coeffs,
                                              const RiccatiSolution& sol,
                                              const IncrementBatch& increments,
                                              Exec exec = Exec::parallel);

}  // namespace rlab
