#pragma once

#include "riccati_lab/blocks.hpp"
#include "riccati_lab/coefficients.hpp"
#include "riccati_lab/counterexample.hpp"
#include "riccati_lab/spectral.hpp"
#include "riccati_lab/tree.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rlab {

// Insertion-ordered so the resolved echo is reproducible byte for byte.
using Json = nlohmann::ordered_json;

// A parsed and normalized scenario: the problem block is canonicalized
// (defaults filled in, matrices as nested arrays) so that re-running on the
// emitted echo reproduces the run exactly.
struct Scenario {
  std::string command;
  Json problem;
  double t0 = 0.0;
  double horizon = 1.0;  // final time T
  int steps = 1000;
  std::int64_t n_paths = 1000;
  std::uint64_t seed = 1;
  Json tolerances;  // optional per-command report tolerances, echoed verbatim
  std::string out_dir = "out";
  std::vector<std::string> formats = {"csv", "json"};

  TimeGrid grid() const { return TimeGrid::make(t0, horizon, steps); }
  double dt() const { return grid().dt(); }
  bool wants(const std::string& format) const;

  // Fully explicit scenario document, suitable for re-running.
  Json resolved() const;
};

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> n_paths;
  std::optional<double> dt;
  std::optional<std::string> out_dir;
};

// Throw ValidationError with kind "BadScenario" naming the offending field.
Scenario parse_scenario(const Json& root);
Scenario load_scenario(const std::string& path);
void apply_overrides(Scenario& s, const CliOverrides& o);

// Matrix specifications: a number (1x1 or a vector entry), a flat array
// (vector), or nested arrays (matrix). Time-dependent coefficients may also
// be piecewise-constant tables {"breaks": [t...], "values": [matrix...]}
// with breaks aligned to the grid.
MatrixXd matrix_from_json(const Json& j, int rows, int cols,
                          const std::string& field);
MatrixFn matrix_fn_from_json(const Json& j, int rows, int cols,
                             const std::string& field, const TimeGrid& grid);

// Builders for the normalized problem blocks.
CoefficientSet coefficient_set_from_json(const Json& problem,
                                         const TimeGrid& grid);
VectorXd eta_from_json(const Json& problem, int n);
TreeModel tree_model_from_json(const Json& problem);
Block block_from_json(const Json& jb, const TimeGrid& grid);
SpdeCoefficients spde_coefficients_from_json(const Json& jc);
std::vector<VectorXd> spectral_etas_from_json(const Json& jeta, int n_modes,
                                              int block_dim);
CounterexampleConfig counterexample_config_from_json(const Scenario& s);

}  // namespace rlab
