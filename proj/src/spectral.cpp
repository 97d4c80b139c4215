#include "riccati_lab/spectral.hpp"

#include <cmath>
#include <limits>

namespace rlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

MatrixXd scalar_mat(double v) {
  MatrixXd m(1, 1);
  m(0, 0) = v;
  return m;
}

Block heat_block(double lambda, const SpdeCoefficients& sc) {
  CoefficientSet c;
  c.n = 1;
  c.m = 1;
  c.A = constant_fn(scalar_mat(-lambda));
  c.A1 = constant_fn(scalar_mat(sc.a1));
  c.B = constant_fn(scalar_mat(sc.b1));
  c.C = constant_fn(scalar_mat(sc.a2));
  c.D = constant_fn(scalar_mat(sc.b2));
  c.Q = constant_fn(scalar_mat(sc.q));
  const double r = sc.r, r0 = sc.r0;
  c.R = [r, r0](double t) { return scalar_mat(r + r0 * t); };
  c.G = scalar_mat(sc.g);
  return make_block(std::move(c), constant_fn(scalar_mat(sc.r0)));
}

Block wave_block(double lambda, const SpdeCoefficients& sc) {
  CoefficientSet c;
  c.n = 2;
  c.m = 1;
  MatrixXd A(2, 2);
  A << 0, 1, -lambda, 0;
  MatrixXd A1 = MatrixXd::Zero(2, 2);
  A1(1, 0) = sc.a1;
  MatrixXd B(2, 1);
  B << 0, sc.b1;
  MatrixXd C = MatrixXd::Zero(2, 2);
  C(1, 0) = sc.a2;
  MatrixXd D(2, 1);
  D << 0, sc.b2;
  // Energy-norm weights: |d_x y|^2 contributes lambda per mode, |d_t y|^2
  // contributes 1.
  MatrixXd W = MatrixXd::Zero(2, 2);
  W(0, 0) = lambda;
  W(1, 1) = 1.0;
  c.A = constant_fn(A);
  c.A1 = constant_fn(A1);
  c.B = constant_fn(B);
  c.C = constant_fn(C);
  c.D = constant_fn(D);
  c.Q = constant_fn(MatrixXd(sc.q * W));
  const double r = sc.r, r0 = sc.r0;
  c.R = [r, r0](double t) { return scalar_mat(r + r0 * t); };
  c.G = sc.g * W;
  return make_block(std::move(c), constant_fn(scalar_mat(sc.r0)));
}

Block schrodinger_block(double lambda, const SpdeCoefficients& sc) {
  CoefficientSet c;
  c.n = 2;
  c.m = 2;
  // Real embedding of the complex scalar: multiplication by -i lambda
  // becomes the rotation [[0, lambda], [-lambda, 0]].
  MatrixXd A(2, 2);
  A << 0, lambda, -lambda, 0;
  const MatrixXd I2 = MatrixXd::Identity(2, 2);
  c.A = constant_fn(A);
  c.A1 = constant_fn(MatrixXd(sc.a1 * I2));
  c.B = constant_fn(MatrixXd(sc.b1 * I2));
  c.C = constant_fn(MatrixXd(sc.a2 * I2));
  c.D = constant_fn(MatrixXd(sc.b2 * I2));
  c.Q = constant_fn(MatrixXd(sc.q * I2));
  const double r = sc.r, r0 = sc.r0;
  c.R = [r, r0, I2](double t) { return MatrixXd((r + r0 * t) * I2); };
  c.G = sc.g * I2;
  return make_block(std::move(c),
                    constant_fn(MatrixXd(sc.r0 * I2)));
}

}  // namespace

SpdeKind parse_spde_kind(const std::string& name) {
  if (name == "heat") return SpdeKind::heat;
  if (name == "wave") return SpdeKind::wave;
  if (name == "schrodinger") return SpdeKind::schrodinger;
  throw ValidationError("BadKind", "unknown model kind '" + name +
                                       "' (heat, wave, schrodinger)");
}

std::string spde_kind_name(SpdeKind kind) {
  switch (kind) {
    case SpdeKind::heat: return "heat";
    case SpdeKind::wave: return "wave";
    case SpdeKind::schrodinger: return "schrodinger";
  }
  return "unknown";
}

SpectralModel build_model(SpdeKind kind, int N, const SpdeCoefficients& sc) {
  if (N < 1) {
    throw ValidationError("BadN", "truncation level must be >= 1");
  }
  for (double v : {sc.a1, sc.b1, sc.a2, sc.b2, sc.q, sc.r, sc.g, sc.r0}) {
    if (!std::isfinite(v)) {
      throw ValidationError("BadCoefficients",
                            "model coefficients must be finite");
    }
  }
  SpectralModel model;
  model.kind = kind;
  model.N = N;
  model.coeffs = sc;
  model.block_dim = kind == SpdeKind::heat ? 1 : 2;
  model.lambda_hat.reserve(static_cast<std::size_t>(N));
  model.v_weight.reserve(static_cast<std::size_t>(N));
  model.blocks.reserve(static_cast<std::size_t>(N));
  for (int j = 1; j <= N; ++j) {
    const double lambda = dirichlet_eigenvalue(j);
    model.lambda_hat.push_back(lambda);
    model.v_weight.push_back(1.0 / j);
    switch (kind) {
      case SpdeKind::heat:
        model.blocks.push_back(heat_block(lambda, sc));
        break;
      case SpdeKind::wave:
        model.blocks.push_back(wave_block(lambda, sc));
        break;
      case SpdeKind::schrodinger:
        model.blocks.push_back(schrodinger_block(lambda, sc));
        break;
    }
  }
  return model;
}

TruncatedSolve solve_truncated(const SpectralModel& model,
                               const TimeGrid& grid,
                               const std::vector<VectorXd>& eta, Exec exec) {
  if (static_cast<int>(eta.size()) != model.N) {
    throw ValidationError("BadArguments",
                          "one initial vector per mode is required");
  }
  TruncatedSolve out;
  out.mode_values.assign(eta.size(), 0.0);
  out.as8_margins.assign(eta.size(), 0.0);

  for_each_path(model.N, exec, [&](std::int64_t j) {
    const std::size_t i = static_cast<std::size_t>(j);
    const Block& block = model.blocks[i];
    if (eta[i].size() != block.coeffs.n) {
      throw ValidationError("BadArguments",
                            "mode initial data has the wrong dimension");
    }
    const RiccatiSolution sol = solve_bsre_det(block.coeffs, grid);
    out.mode_values[i] = feedback_value(sol, eta[i]);
    out.as8_margins[i] = validate_as8(block, grid).margin;
  });

  out.total = sorted_sum(out.mode_values);
  return out;
}

HsReport hs_embedding_check(const SpectralModel& model) {
  HsReport report;
  report.weight_limit = kPi * kPi / 6.0;
  double ws = 0.0;
  double es = 0.0;
  for (int j = 1; j <= model.N; ++j) {
    const double w = model.v_weight[static_cast<std::size_t>(j - 1)];
    ws += w * w;
    es += 1.0 / model.lambda_hat[static_cast<std::size_t>(j - 1)];
    report.weight_partial.push_back(ws);
    report.inv_eig_partial.push_back(es);
  }
  report.weight_tail = report.weight_limit - ws;
  report.inv_eig_tail = report.weight_limit - es;
  return report;
}

std::vector<GalerkinRow> galerkin_convergence(
    SpdeKind kind, const SpdeCoefficients& sc, const std::vector<int>& levels,
    const TimeGrid& grid, const std::function<VectorXd(int)>& eta_of_mode,
    Exec exec) {
  if (levels.empty()) {
    throw ValidationError("BadArguments", "need at least one level");
  }
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i] <= levels[i - 1]) {
      throw ValidationError("BadArguments",
                            "levels must be strictly increasing");
    }
  }
  std::vector<GalerkinRow> rows;
  double prev = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const int N = levels[i];
    const SpectralModel model = build_model(kind, N, sc);
    std::vector<VectorXd> eta;
    eta.reserve(static_cast<std::size_t>(N));
    for (int j = 1; j <= N; ++j) eta.push_back(eta_of_mode(j));
    const TruncatedSolve solve = solve_truncated(model, grid, eta, exec);
    GalerkinRow row;
    row.N = N;
    row.value = solve.total;
    row.gap = i == 0 ? std::numeric_limits<double>::quiet_NaN()
                     : std::abs(row.value - prev) / (1.0 + std::abs(row.value));
    prev = row.value;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rlab
