#pragma once

#include "riccati_lab/blocks.hpp"

#include <functional>
#include <string>
#include <vector>

namespace rlab {

// Spectral truncations of controlled SPDEs on (0, pi) with Dirichlet
// boundary: the Laplacian eigenpairs are lambda_hat_j = j^2 with sin(j x)
// eigenfunctions, and spatially constant coefficients make the modes decouple
// into independent finite blocks.
enum class SpdeKind { heat, wave, schrodinger };

SpdeKind parse_spde_kind(const std::string& name);
std::string spde_kind_name(SpdeKind kind);

// Scalar-in-space data: drift perturbation a1, control gain b1, state noise
// coupling a2, control noise coupling b2; cost weights q (state), g
// (terminal), and the control weight R(t) = (r + r0 t) I.
struct SpdeCoefficients {
  double a1 = 0.0;
  double b1 = 0.0;
  double a2 = 0.0;
  double b2 = 0.0;
  double q = 0.0;
  double r = 1.0;
  double g = 0.0;
  double r0 = 0.0;
};

struct SpectralModel {
  SpdeKind kind = SpdeKind::heat;
  int N = 0;
  int block_dim = 1;
  SpdeCoefficients coeffs;
  std::vector<double> lambda_hat;  // j^2, j = 1..N
  std::vector<double> v_weight;    // 1/j, square-summable embedding weights
  std::vector<Block> blocks;       // one per mode, in mode order
};

inline double dirichlet_eigenvalue(int j) {
  return static_cast<double>(j) * static_cast<double>(j);
}

// Per-mode blocks:
//   heat:        scalar, drift split A = -j^2, A1 = a1; B = b1, C = a2,
//                D = b2.
//   wave:        2x2 position/velocity, A = [[0,1],[-j^2,0]] with the
//                perturbations acting on the velocity row; energy-norm cost
//                weights diag(j^2, 1) on Q and G.
//   schrodinger: 2x2 real embedding of the complex scalar mode,
//                A = [[0,j^2],[-j^2,0]]; all other couplings scalar
//                multiples of the identity.
SpectralModel build_model(SpdeKind kind, int N, const SpdeCoefficients& sc);

struct TruncatedSolve {
  std::vector<double> mode_values;  // 1/2 <P_j(t0) eta_j, eta_j>
  std::vector<double> as8_margins;  // NaN where the identity does not apply
  double total = 0.0;               // permutation-invariant mode sum
};

TruncatedSolve solve_truncated(const SpectralModel& model,
                               const TimeGrid& grid,
                               const std::vector<VectorXd>& eta,
                               Exec exec = Exec::parallel);

// Partial sums of the embedding weight series and of the inverse eigenvalue
// series, with analytic limits/tails for the default 1/j weights (both series
// are sum 1/j^2 -> pi^2/6).
struct HsReport {
  std::vector<double> weight_partial;
  std::vector<double> inv_eig_partial;
  double weight_limit = 0.0;
  double weight_tail = 0.0;
  double inv_eig_tail = 0.0;
};

HsReport hs_embedding_check(const SpectralModel& model);

struct GalerkinRow {
  int N = 0;
  double value = 0.0;
  // |V_N - V_prev| / (1 + |V_N|) against the previous row; NaN on the first.
  double gap = 0.0;
};

// Value-convergence study across truncation levels with mode data given by
// eta_of_mode(j) (size block_dim).
std::vector<GalerkinRow> galerkin_convergence(
    SpdeKind kind, const SpdeCoefficients& sc, const std::vector<int>& levels,
    const TimeGrid& grid, const std::function<VectorXd(int)>& eta_of_mode,
    Exec exec = Exec::parallel);

}  // namespace rlab
