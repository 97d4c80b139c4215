#include "riccati_lab/tree.hpp"

#include "riccati_lab/brownian.hpp"
#include "riccati_lab/pinv.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <string>

namespace rlab {

namespace {

constexpr int kMaxDepth = 20;
constexpr int kMaxEnumDepth = 12;
constexpr int kMaxStackedDim = 2000;
constexpr double kRangeTol = 1e-10;

MatrixXd sym(const MatrixXd& M) { return 0.5 * (M + M.transpose()); }

void check_matrix(const MatrixXd& M, int rows, int cols, const char* name,
                  int k, std::uint32_t hist) {
  if (M.rows() != rows || M.cols() != cols || !all_finite(M)) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "%s at step %d, history %u must be a finite %dx%d matrix",
                  name, k, hist, rows, cols);
    throw ValidationError("BadTreeModel", buf);
  }
}

void check_sym_psd(const MatrixXd& M, const char* name, int k,
                   std::uint32_t hist, bool require_psd) {
  const double scale = std::max(1.0, max_abs(M));
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s at step %d, history %u not symmetric",
                  name, k, hist);
    throw ValidationError("BadTreeModel", buf);
  }
  if (require_psd) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym(M));
    if (eig.eigenvalues()(0) < -1e-12 * scale) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "%s at step %d, history %u not positive semidefinite",
                    name, k, hist);
      throw ValidationError("BadTreeModel", buf);
    }
  }
}

double branch_sign(std::uint32_t leaf, int step) {
  return (leaf >> step) & 1u ? 1.0 : -1.0;
}

}  // namespace

std::string history_string(std::uint32_t hist, int length) {
  std::string out;
  out.reserve(static_cast<std::size_t>(length));
  for (int j = 0; j < length; ++j)
    out += ((hist >> j) & 1u) ? '+' : '-';
  return out;
}

void TreeModel::validate() const {
  if (depth < 1 || depth > kMaxDepth) {
    throw ValidationError("BadTreeModel",
                          "depth must be between 1 and " +
                              std::to_string(kMaxDepth));
  }
  if (n < 1 || m < 1) {
    throw ValidationError("BadTreeModel", "state and control dims must be >= 1");
  }
  if (!A || !B || !C || !D || !Q || !R || !G) {
    throw ValidationError("BadTreeModel", "all coefficient processes must be set");
  }
  for (int k = 0; k < depth; ++k) {
    for (std::uint32_t h = 0; h < (1u << k); ++h) {
      check_matrix(A(k, h), n, n, "A", k, h);
      check_matrix(B(k, h), n, m, "B", k, h);
      check_matrix(C(k, h), n, n, "C", k, h);
      check_matrix(D(k, h), n, m, "D", k, h);
      const MatrixXd Qk = Q(k, h);
      check_matrix(Qk, n, n, "Q", k, h);
      check_sym_psd(Qk, "Q", k, h, true);
      const MatrixXd Rk = R(k, h);
      check_matrix(Rk, m, m, "R", k, h);
      check_sym_psd(Rk, "R", k, h, false);
    }
  }
  for (std::uint32_t h = 0; h < (1u << depth); ++h) {
    const MatrixXd Gh = G(h);
    check_matrix(Gh, n, n, "G", depth, h);
    check_sym_psd(Gh, "G", depth, h, true);
  }
}

TreeSolution solve_bsre_tree(const TreeModel& model, bool throw_on_violation) {
  model.validate();
  const int N = model.depth;
  TreeSolution sol;
  sol.depth = N;
  sol.n = model.n;
  sol.m = model.m;
  sol.P.resize(static_cast<std::size_t>(N) + 1);
  sol.Lambda.resize(static_cast<std::size_t>(N));
  sol.K.resize(static_cast<std::size_t>(N));
  sol.L.resize(static_cast<std::size_t>(N));
  sol.Theta.resize(static_cast<std::size_t>(N));
  sol.feasible.resize(static_cast<std::size_t>(N));
  sol.range_residual.resize(static_cast<std::size_t>(N));

  auto& leaves = sol.P[static_cast<std::size_t>(N)];
  leaves.resize(std::size_t{1} << N);
  for (std::uint32_t h = 0; h < (1u << N); ++h) {
    leaves[h] = sym(model.G(h));
  }

  for (int k = N - 1; k >= 0; --k) {
    const std::size_t count = std::size_t{1} << k;
    const std::size_t kk = static_cast<std::size_t>(k);
    sol.P[kk].resize(count);
    sol.Lambda[kk].resize(count);
    sol.K[kk].resize(count);
    sol.L[kk].resize(count);
    sol.Theta[kk].resize(count);
    sol.feasible[kk].assign(count, 1);
    sol.range_residual[kk].assign(count, 0.0);
    const auto& next = sol.P[kk + 1];

    for_each_path(static_cast<std::int64_t>(count), Exec::parallel,
                  [&](std::int64_t hi) {
      const std::uint32_t h = static_cast<std::uint32_t>(hi);
      const MatrixXd& Pp = next[tree_child(h, k, +1)];
      const MatrixXd& Pm = next[tree_child(h, k, -1)];
      const MatrixXd Ak = model.A(k, h);
      const MatrixXd Bk = model.B(k, h);
      const MatrixXd Ck = model.C(k, h);
      const MatrixXd Dk = model.D(k, h);
      const MatrixXd Mp = Ak + Ck;
      const MatrixXd Mm = Ak - Ck;
      const MatrixXd Np = Bk + Dk;
      const MatrixXd Nm = Bk - Dk;

      const MatrixXd K = sym(model.R(k, h) +
                             0.5 * (Np.transpose() * Pp * Np +
                                    Nm.transpose() * Pm * Nm));
      const MatrixXd L = 0.5 * (Np.transpose() * Pp * Mp +
                                Nm.transpose() * Pm * Mm);
      const PinvResult pr = pinv_psd(K, kRangeTol);
      const double residual = max_abs(L - K * (pr.pinv * L));
      const bool ok = residual <= kRangeTol * (1.0 + max_abs(L));
      if (!ok && throw_on_violation) {
        throw RangeConditionError("L leaves the range of K at step " +
                                      std::to_string(k) + ", history '" +
                                      history_string(h, k) + "'",
                                  k, h);
      }
      const MatrixXd Theta = -(pr.pinv * L);
      sol.K[kk][h] = K;
      sol.L[kk][h] = L;
      sol.Theta[kk][h] = Theta;
      sol.range_residual[kk][h] = residual;
      sol.feasible[kk][h] = ok ? 1 : 0;
      sol.P[kk][h] = sym(model.Q(k, h) +
                         0.5 * (Mp.transpose() * Pp * Mp +
                                Mm.transpose() * Pm * Mm) +
                         L.transpose() * Theta);
      sol.Lambda[kk][h] = 0.5 * (Pp - Pm);
    });
  }
  return sol;
}

QpOracleResult qp_oracle(const TreeModel& model, const VectorXd& eta) {
  model.validate();
  const int N = model.depth;
  if (N > kMaxEnumDepth) {
    throw ValidationError("BadTreeModel",
                          "qp_oracle enumerates paths; depth must be <= " +
                              std::to_string(kMaxEnumDepth));
  }
  if (eta.size() != model.n) {
    throw ValidationError("BadArguments", "eta dimension does not match n");
  }
  const int m = model.m;
  const int dim = m * ((1 << N) - 1);
  if (dim > kMaxStackedDim) {
    throw ValidationError("BadTreeModel",
                          "stacked control dimension exceeds " +
                              std::to_string(kMaxStackedDim));
  }
  std::vector<int> offset(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) offset[static_cast<std::size_t>(k)] = m * ((1 << k) - 1);
  auto col_of = [&](int k, std::uint32_t hist) {
    return offset[static_cast<std::size_t>(k)] + static_cast<int>(hist) * m;
  };

  MatrixXd H = MatrixXd::Zero(dim, dim);
  VectorXd g = VectorXd::Zero(dim);
  double c = 0.0;
  const double p = std::ldexp(1.0, -N);

  std::vector<int> cols(static_cast<std::size_t>(N));
  std::vector<MatrixXd> W(static_cast<std::size_t>(N));
  for (std::uint32_t leaf = 0; leaf < (1u << N); ++leaf) {
    VectorXd f = eta;
    for (int k = 0; k <= N; ++k) {
      const std::uint32_t hist = leaf & ((1u << k) - 1u);
      const MatrixXd weight = k < N ? model.Q(k, hist) : model.G(leaf);
      // Quadratic form of the state at step k through the affine path map
      // x_k = f + sum_j W_j u_j.
      c += 0.5 * p * f.dot(weight * f);
      for (int j = 0; j < k; ++j) {
        const std::size_t js = static_cast<std::size_t>(j);
        g.segment(cols[js], m) += p * (W[js].transpose() * (weight * f));
        for (int j2 = 0; j2 < k; ++j2) {
          const std::size_t j2s = static_cast<std::size_t>(j2);
          H.block(cols[js], cols[j2s], m, m) +=
              p * (W[js].transpose() * weight * W[j2s]);
        }
      }
      if (k == N) break;
      H.block(col_of(k, hist), col_of(k, hist), m, m) += p * model.R(k, hist);
      const double w = branch_sign(leaf, k);
      const MatrixXd M = model.A(k, hist) + w * model.C(k, hist);
      const MatrixXd Nk = model.B(k, hist) + w * model.D(k, hist);
      f = M * f;
      for (int j = 0; j < k; ++j) {
        const std::size_t js = static_cast<std::size_t>(j);
        W[js] = M * W[js];
      }
      W[static_cast<std::size_t>(k)] = Nk;
      cols[static_cast<std::size_t>(k)] = col_of(k, hist);
    }
  }

  H = sym(H);
  const PinvResult pr = pinv_psd(H, 1e-12);
  if (pr.min_eigenvalue < -1e-10) {
    throw ValidationError("Infeasible",
                          "cost Hessian has a negative eigenvalue; "
                          "the stacked problem is unbounded below");
  }
  const VectorXd u = -(pr.pinv * g);

  QpOracleResult out;
  out.value = 0.5 * u.dot(H * u) + g.dot(u) + c;
  out.stationarity_residual = max_abs(H * u + g) / (1.0 + max_abs(g));
  out.controls.resize(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) {
    auto& level = out.controls[static_cast<std::size_t>(k)];
    level.resize(std::size_t{1} << k);
    for (std::uint32_t h = 0; h < (1u << k); ++h) {
      level[h] = u.segment(col_of(k, h), m);
    }
  }
  return out;
}

double closed_loop_value(const TreeModel& model,
                         const std::vector<std::vector<MatrixXd>>& F,
                         const VectorXd& eta) {
  const int N = model.depth;
  std::vector<MatrixXd> V(std::size_t{1} << N);
  for (std::uint32_t h = 0; h < (1u << N); ++h) V[h] = model.G(h);
  for (int k = N - 1; k >= 0; --k) {
    std::vector<MatrixXd> Vk(std::size_t{1} << k);
    for (std::uint32_t h = 0; h < (1u << k); ++h) {
      const MatrixXd& Fk = F[static_cast<std::size_t>(k)][h];
      const MatrixXd Ak = model.A(k, h);
      const MatrixXd Bk = model.B(k, h);
      const MatrixXd Ck = model.C(k, h);
      const MatrixXd Dk = model.D(k, h);
      const MatrixXd closed_p = (Ak + Ck) + (Bk + Dk) * Fk;
      const MatrixXd closed_m = (Ak - Ck) + (Bk - Dk) * Fk;
      Vk[h] = model.Q(k, h) + Fk.transpose() * model.R(k, h) * Fk +
              0.5 * (closed_p.transpose() * V[tree_child(h, k, +1)] * closed_p +
                     closed_m.transpose() * V[tree_child(h, k, -1)] * closed_m);
    }
    V = std::move(Vk);
  }
  return 0.5 * eta.dot(V[0] * eta);
}

double feedback_family_check(const TreeModel& model, const TreeSolution& sol,
                             const VectorXd& eta, std::uint64_t seed,
                             int trials) {
  const int N = model.depth;
  const double base = closed_loop_value(model, sol.Theta, eta);
  double spread = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    NormalStream stream(seed, static_cast<std::uint64_t>(trial));
    std::vector<std::vector<MatrixXd>> F(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) {
      auto& level = F[static_cast<std::size_t>(k)];
      level.resize(std::size_t{1} << k);
      for (std::uint32_t h = 0; h < (1u << k); ++h) {
        MatrixXd theta_hat(model.m, model.n);
        for (int r = 0; r < model.m; ++r)
          for (int c = 0; c < model.n; ++c) theta_hat(r, c) = stream.next();
        const MatrixXd& K = sol.K[static_cast<std::size_t>(k)][h];
        const MatrixXd Kpinv = pinv_psd(K, kRangeTol).pinv;
        const MatrixXd null_proj =
            MatrixXd::Identity(model.m, model.m) - Kpinv * K;
        level[h] = sol.Theta[static_cast<std::size_t>(k)][h] +
                   null_proj * theta_hat;
      }
    }
    spread = std::max(spread,
                      std::abs(closed_loop_value(model, F, eta) - base));
  }
  return spread;
}

double tree_completion_check(const TreeModel& model, const TreeSolution& sol,
                             const TreeControls& u, const VectorXd& eta) {
  const int N = model.depth;
  if (N > kMaxEnumDepth) {
    throw ValidationError("BadTreeModel",
                          "tree_completion_check enumerates paths; depth must "
                          "be <= " + std::to_string(kMaxEnumDepth));
  }
  const double p = std::ldexp(1.0, -N);
  double cost = 0.0;
  double square = 0.0;
  for (std::uint32_t leaf = 0; leaf < (1u << N); ++leaf) {
    VectorXd x = eta;
    for (int k = 0; k < N; ++k) {
      const std::uint32_t hist = leaf & ((1u << k) - 1u);
      const std::size_t kk = static_cast<std::size_t>(k);
      const VectorXd& uk = u[kk][hist];
      cost += 0.5 * p * (x.dot(model.Q(k, hist) * x) +
                         uk.dot(model.R(k, hist) * uk));
      const VectorXd gap = uk - sol.Theta[kk][hist] * x;
      square += p * gap.dot(sol.K[kk][hist] * gap);
      const double w = branch_sign(leaf, k);
      x = (model.A(k, hist) + w * model.C(k, hist)) * x +
          (model.B(k, hist) + w * model.D(k, hist)) * uk;
    }
    cost += 0.5 * p * x.dot(model.G(leaf) * x);
  }
  return cost - 0.5 * eta.dot(sol.P0() * eta) - 0.5 * square;
}

}  // namespace rlab
