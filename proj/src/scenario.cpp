#include "riccati_lab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <set>

#include "riccati_lab/reports.hpp"

namespace rlab {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw ValidationError("BadScenario", msg);
}

void require_object(const Json& j, const std::string& where) {
  if (!j.is_object()) fail(where + " must be an object");
}

const Json& require_key(const Json& obj, const char* key,
                        const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    fail(where + ": missing required field '" + std::string(key) + "'");
  return *it;
}

void reject_unknown(const Json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      fail(where + ": unknown field '" + it.key() + "'");
}

double as_double(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where + " must be a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) fail(where + " must be finite");
  return v;
}

std::int64_t as_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where + " must be an integer");
  return j.get<std::int64_t>();
}

std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) fail(where + " must be a string");
  return j.get<std::string>();
}

int as_dim(const Json& j, const std::string& where) {
  std::int64_t v = as_int(j, where);
  if (v < 1 || v > 1000) fail(where + " must be between 1 and 1000");
  return static_cast<int>(v);
}

Json matrix_to_json(const MatrixXd& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

VectorXd vector_from_json(const Json& j, int len, const std::string& field) {
  MatrixXd M = matrix_from_json(j, len, 1, field);
  return M.col(0);
}

// Constant matrix or a piecewise-constant table over time.
struct MatrixSpec {
  bool piecewise = false;
  MatrixXd constant;
  std::vector<double> breaks;
  std::vector<MatrixXd> values;
};

MatrixSpec parse_matrix_spec(const Json& j, int rows, int cols,
                             const std::string& field, bool allow_time) {
  MatrixSpec spec;
  if (j.is_object()) {
    if (!allow_time) fail(field + " must be a constant matrix");
    reject_unknown(j, {"breaks", "values"}, field);
    const Json& jb = require_key(j, "breaks", field);
    const Json& jv = require_key(j, "values", field);
    if (!jb.is_array() || !jv.is_array() || jb.empty() ||
        jb.size() != jv.size())
      fail(field + ": breaks and values must be equal-length non-empty arrays");
    spec.piecewise = true;
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < jb.size(); ++i) {
      double b = as_double(jb[i], field + ".breaks");
      if (!(b > prev)) fail(field + ".breaks must be strictly increasing");
      prev = b;
      spec.breaks.push_back(b);
      spec.values.push_back(matrix_from_json(jv[i], rows, cols, field));
    }
    return spec;
  }
  spec.constant = matrix_from_json(j, rows, cols, field);
  return spec;
}

Json matrix_spec_to_json(const MatrixSpec& spec) {
  if (!spec.piecewise) return matrix_to_json(spec.constant);
  Json out;
  Json jb = Json::array();
  for (double b : spec.breaks) jb.push_back(b);
  Json jv = Json::array();
  for (const MatrixXd& M : spec.values) jv.push_back(matrix_to_json(M));
  out["breaks"] = std::move(jb);
  out["values"] = std::move(jv);
  return out;
}

MatrixFn matrix_spec_fn(const MatrixSpec& spec, const TimeGrid& grid,
                        const std::string& field) {
  if (!spec.piecewise) return constant_fn(spec.constant);
  double h = grid.dt();
  for (std::size_t i = 0; i < spec.breaks.size(); ++i) {
    double r = (spec.breaks[i] - grid.t0) / h;
    long long k = std::llround(r);
    if (std::abs(r - static_cast<double>(k)) > 1e-6)
      fail(field + ": break " + format_double(spec.breaks[i]) +
           " is not aligned to the grid");
    if (i == 0 && k != 0)
      fail(field + ": the first break must equal t0");
    if (k < 0 || k >= grid.steps)
      fail(field + ": break " + format_double(spec.breaks[i]) +
           " lies outside [t0, T)");
  }
  auto table = std::make_shared<MatrixSpec>(spec);
  double nudge = h * 1e-9;
  return [table, nudge](double t) -> MatrixXd {
    auto it = std::upper_bound(table->breaks.begin(), table->breaks.end(),
                               t + nudge);
    std::size_t idx = it == table->breaks.begin()
                          ? 0
                          : static_cast<std::size_t>(it - table->breaks.begin()) - 1;
    return table->values[idx];
  };
}

// Tree coefficient tables: constant, one matrix per step, or per-history with
// an optional "" fallback.
struct TreeTable {
  enum class Mode { constant, by_step, by_history } mode = Mode::constant;
  MatrixXd constant;
  std::vector<MatrixXd> by_step;
  std::map<std::string, MatrixXd> by_history;
};

TreeTable parse_tree_table(const Json& j, int rows, int cols,
                           const std::string& field, int depth, bool leaf) {
  TreeTable tab;
  if (j.is_object() && j.contains("by_step")) {
    if (leaf) fail(field + ": leaf weights cannot vary by step");
    reject_unknown(j, {"by_step"}, field);
    const Json& arr = j.at("by_step");
    if (!arr.is_array() || arr.size() != static_cast<std::size_t>(depth))
      fail(field + ".by_step must list exactly one matrix per step");
    tab.mode = TreeTable::Mode::by_step;
    for (const Json& e : arr)
      tab.by_step.push_back(matrix_from_json(e, rows, cols, field));
    return tab;
  }
  if (j.is_object() && j.contains("by_history")) {
    reject_unknown(j, {"by_history"}, field);
    const Json& obj = j.at("by_history");
    require_object(obj, field + ".by_history");
    tab.mode = TreeTable::Mode::by_history;
    std::map<int, std::size_t> count_by_length;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      const std::string& key = it.key();
      for (char c : key)
        if (c != '+' && c != '-')
          fail(field + ".by_history key '" + key + "' must use only + and -");
      int max_len = leaf ? depth : depth - 1;
      if (!key.empty() && static_cast<int>(key.size()) > max_len)
        fail(field + ".by_history key '" + key + "' is longer than the last " +
             (leaf ? std::string("leaf") : std::string("step")));
      if (leaf && !key.empty() && static_cast<int>(key.size()) != depth)
        fail(field + ".by_history leaf keys must have length depth");
      tab.by_history[key] = matrix_from_json(it.value(), rows, cols, field);
      count_by_length[static_cast<int>(key.size())]++;
    }
    if (!tab.by_history.count("")) {
      bool covered = true;
      if (leaf) {
        covered = count_by_length[depth] == (std::size_t{1} << depth);
      } else {
        for (int k = 0; k < depth && covered; ++k)
          covered = count_by_length[k] == (std::size_t{1} << k);
      }
      if (!covered)
        fail(field + ".by_history does not cover every node; add a \"\" default");
    }
    return tab;
  }
  tab.constant = matrix_from_json(j, rows, cols, field);
  return tab;
}

Json tree_table_to_json(const TreeTable& tab) {
  switch (tab.mode) {
    case TreeTable::Mode::constant:
      return matrix_to_json(tab.constant);
    case TreeTable::Mode::by_step: {
      Json arr = Json::array();
      for (const MatrixXd& M : tab.by_step) arr.push_back(matrix_to_json(M));
      Json out;
      out["by_step"] = std::move(arr);
      return out;
    }
    case TreeTable::Mode::by_history: {
      Json obj = Json::object();
      for (const auto& [key, M] : tab.by_history) obj[key] = matrix_to_json(M);
      Json out;
      out["by_history"] = std::move(obj);
      return out;
    }
  }
  fail("unreachable tree table mode");
}

NodeMatrixFn tree_table_fn(const TreeTable& tab) {
  auto shared = std::make_shared<TreeTable>(tab);
  return [shared](int step, std::uint32_t hist) -> MatrixXd {
    switch (shared->mode) {
      case TreeTable::Mode::constant:
        return shared->constant;
      case TreeTable::Mode::by_step:
        return shared->by_step[static_cast<std::size_t>(step)];
      case TreeTable::Mode::by_history: {
        auto it = shared->by_history.find(history_string(hist, step));
        if (it != shared->by_history.end()) return it->second;
        return shared->by_history.at("");
      }
    }
    return shared->constant;
  };
}

LeafMatrixFn leaf_table_fn(const TreeTable& tab, int depth) {
  auto shared = std::make_shared<TreeTable>(tab);
  return [shared, depth](std::uint32_t hist) -> MatrixXd {
    if (shared->mode == TreeTable::Mode::by_history) {
      auto it = shared->by_history.find(history_string(hist, depth));
      if (it != shared->by_history.end()) return it->second;
      return shared->by_history.at("");
    }
    return shared->constant;
  };
}

const std::set<std::string> kLqKeys = {"n", "m", "A", "A1", "B", "C",
                                       "D", "Q", "R", "G"};

// Normalizes the nine coefficient fields (defaults: zero everywhere, R = I)
// into canonical nested-array or table form.
void normalize_lq_fields(Json& out, const Json& p, int n, int m) {
  auto coeff = [&](const char* key, int r, int c, const MatrixXd& dflt,
                   bool allow_time) {
    if (p.contains(key))
      out[key] = matrix_spec_to_json(
          parse_matrix_spec(p.at(key), r, c, key, allow_time));
    else
      out[key] = matrix_to_json(dflt);
  };
  coeff("A", n, n, MatrixXd::Zero(n, n), true);
  coeff("A1", n, n, MatrixXd::Zero(n, n), true);
  coeff("B", n, m, MatrixXd::Zero(n, m), true);
  coeff("C", n, n, MatrixXd::Zero(n, n), true);
  coeff("D", n, m, MatrixXd::Zero(n, m), true);
  coeff("Q", n, n, MatrixXd::Zero(n, n), true);
  coeff("R", m, m, MatrixXd::Identity(m, m), true);
  coeff("G", n, n, MatrixXd::Zero(n, n), false);
}

Json normalize_lq_base(const Json& p) {
  int n = as_dim(require_key(p, "n", "problem"), "problem.n");
  int m = as_dim(require_key(p, "m", "problem"), "problem.m");
  Json out;
  out["n"] = n;
  out["m"] = m;
  normalize_lq_fields(out, p, n, m);
  return out;
}

Json normalize_control(const Json& j, int m) {
  require_object(j, "problem.control");
  std::string type = as_string(require_key(j, "type", "problem.control"),
                               "problem.control.type");
  Json out;
  out["type"] = type;
  if (type == "feedback" || type == "zero") {
    reject_unknown(j, {"type"}, "problem.control");
    return out;
  }
  if (type == "constant") {
    reject_unknown(j, {"type", "value"}, "problem.control");
    out["value"] = vector_to_json(vector_from_json(
        require_key(j, "value", "problem.control"), m, "problem.control.value"));
    return out;
  }
  fail("problem.control.type must be feedback, zero, or constant");
}

Json normalize_riccati(const Json& p) {
  auto allowed = kLqKeys;
  allowed.insert("eta");
  reject_unknown(p, allowed, "problem");
  Json out = normalize_lq_base(p);
  int n = out["n"].get<int>();
  out["eta"] = vector_to_json(
      vector_from_json(require_key(p, "eta", "problem"), n, "problem.eta"));
  return out;
}

Json normalize_slq(const Json& p) {
  auto allowed = kLqKeys;
  allowed.insert("eta");
  allowed.insert("control");
  reject_unknown(p, allowed, "problem");
  Json out = normalize_lq_base(p);
  int n = out["n"].get<int>();
  int m = out["m"].get<int>();
  out["eta"] = vector_to_json(
      vector_from_json(require_key(p, "eta", "problem"), n, "problem.eta"));
  if (p.contains("control"))
    out["control"] = normalize_control(p.at("control"), m);
  else
    out["control"] = Json{{"type", "feedback"}};
  return out;
}

Json normalize_fbsde(const Json& p) {
  auto allowed = kLqKeys;
  allowed.insert("dt_list");
  reject_unknown(p, allowed, "problem");
  Json out = normalize_lq_base(p);
  if (p.contains("dt_list")) {
    const Json& arr = p.at("dt_list");
    if (!arr.is_array() || arr.empty())
      fail("problem.dt_list must be a non-empty array");
    Json canon = Json::array();
    double prev = std::numeric_limits<double>::infinity();
    for (const Json& e : arr) {
      double dt = as_double(e, "problem.dt_list");
      if (!(dt > 0.0)) fail("problem.dt_list entries must be positive");
      if (!(dt < prev)) fail("problem.dt_list must be strictly decreasing");
      prev = dt;
      canon.push_back(dt);
    }
    out["dt_list"] = std::move(canon);
  }
  return out;
}

Json normalize_tree(const Json& p) {
  reject_unknown(p,
                 {"depth", "n", "m", "A", "B", "C", "D", "Q", "R", "G", "eta"},
                 "problem");
  int depth = static_cast<int>(as_int(require_key(p, "depth", "problem"),
                                      "problem.depth"));
  if (depth < 1 || depth > 20) fail("problem.depth must be between 1 and 20");
  int n = as_dim(require_key(p, "n", "problem"), "problem.n");
  int m = as_dim(require_key(p, "m", "problem"), "problem.m");
  Json out;
  out["depth"] = depth;
  out["n"] = n;
  out["m"] = m;
  auto table = [&](const char* key, int r, int c, const MatrixXd* dflt) {
    if (p.contains(key))
      out[key] = tree_table_to_json(
          parse_tree_table(p.at(key), r, c, key, depth, false));
    else if (dflt)
      out[key] = matrix_to_json(*dflt);
    else
      fail("problem: missing required field '" + std::string(key) + "'");
  };
  MatrixXd zero_nn = MatrixXd::Zero(n, n);
  MatrixXd zero_nm = MatrixXd::Zero(n, m);
  MatrixXd eye_m = MatrixXd::Identity(m, m);
  table("A", n, n, nullptr);
  table("B", n, m, nullptr);
  table("C", n, n, &zero_nn);
  table("D", n, m, &zero_nm);
  table("Q", n, n, &zero_nn);
  table("R", m, m, &eye_m);
  out["G"] = tree_table_to_json(
      parse_tree_table(require_key(p, "G", "problem"), n, n, "G", depth, true));
  out["eta"] = vector_to_json(
      vector_from_json(require_key(p, "eta", "problem"), n, "problem.eta"));
  return out;
}

Json normalize_block_entry(const Json& jb, std::size_t index) {
  std::string where = "problem.blocks[" + std::to_string(index) + "]";
  require_object(jb, where);
  auto allowed = kLqKeys;
  allowed.insert("R1");
  allowed.insert("eta");
  reject_unknown(jb, allowed, where);
  Json out = normalize_lq_base(jb);
  int n = out["n"].get<int>();
  int m = out["m"].get<int>();
  if (jb.contains("R1") && !jb.at("R1").is_null())
    out["R1"] = matrix_spec_to_json(
        parse_matrix_spec(jb.at("R1"), m, m, where + ".R1", true));
  else
    out["R1"] = nullptr;
  out["eta"] = vector_to_json(vector_from_json(require_key(jb, "eta", where),
                                               n, where + ".eta"));
  return out;
}

Json normalize_blocks(const Json& p) {
  reject_unknown(p, {"blocks"}, "problem");
  const Json& arr = require_key(p, "blocks", "problem");
  if (!arr.is_array() || arr.empty())
    fail("problem.blocks must be a non-empty array");
  Json out_arr = Json::array();
  for (std::size_t i = 0; i < arr.size(); ++i)
    out_arr.push_back(normalize_block_entry(arr[i], i));
  Json out;
  out["blocks"] = std::move(out_arr);
  return out;
}

Json normalize_galerkin(const Json& p) {
  reject_unknown(p, {"kind", "N", "levels", "coefficients", "eta"}, "problem");
  std::string kind =
      as_string(require_key(p, "kind", "problem"), "problem.kind");
  if (kind != "heat" && kind != "wave" && kind != "schrodinger")
    fail("problem.kind must be heat, wave, or schrodinger");
  int block_dim = kind == "heat" ? 1 : 2;
  if (p.contains("N") && p.contains("levels"))
    fail("problem: give either N or levels, not both");
  std::vector<int> levels;
  if (p.contains("levels")) {
    const Json& arr = p.at("levels");
    if (!arr.is_array() || arr.empty())
      fail("problem.levels must be a non-empty array");
    int prev = 0;
    for (const Json& e : arr) {
      int N = static_cast<int>(as_int(e, "problem.levels"));
      if (N < 1 || N > 100000) fail("problem.levels entries must be in [1, 1e5]");
      if (N <= prev) fail("problem.levels must be strictly increasing");
      prev = N;
      levels.push_back(N);
    }
  } else {
    int N = static_cast<int>(
        as_int(require_key(p, "N", "problem"), "problem.N"));
    if (N < 1 || N > 100000) fail("problem.N must be in [1, 1e5]");
    levels.push_back(N);
  }
  Json jc = p.value("coefficients", Json::object());
  require_object(jc, "problem.coefficients");
  reject_unknown(jc, {"a1", "b1", "a2", "b2", "q", "r", "g", "r0"},
                 "problem.coefficients");
  auto num = [&](const char* key, double dflt) {
    return jc.contains(key)
               ? as_double(jc.at(key), "problem.coefficients." + std::string(key))
               : dflt;
  };
  Json coeffs;
  coeffs["a1"] = num("a1", 0.0);
  coeffs["b1"] = num("b1", 0.0);
  coeffs["a2"] = num("a2", 0.0);
  coeffs["b2"] = num("b2", 0.0);
  coeffs["q"] = num("q", 1.0);
  coeffs["r"] = num("r", 1.0);
  coeffs["g"] = num("g", 0.0);
  coeffs["r0"] = num("r0", 0.0);

  const Json& jeta = require_key(p, "eta", "problem");
  require_object(jeta, "problem.eta");
  Json eta;
  if (jeta.contains("modes")) {
    reject_unknown(jeta, {"modes"}, "problem.eta");
    const Json& arr = jeta.at("modes");
    if (!arr.is_array() ||
        arr.size() < static_cast<std::size_t>(levels.back()))
      fail("problem.eta.modes must list at least max(levels) mode vectors");
    Json modes = Json::array();
    for (const Json& e : arr)
      modes.push_back(vector_to_json(
          vector_from_json(e, block_dim, "problem.eta.modes")));
    eta["modes"] = std::move(modes);
  } else {
    reject_unknown(jeta, {"decay_power", "amplitude"}, "problem.eta");
    double power = as_double(require_key(jeta, "decay_power", "problem.eta"),
                             "problem.eta.decay_power");
    if (power < 0.0) fail("problem.eta.decay_power must be >= 0");
    double amp = jeta.contains("amplitude")
                     ? as_double(jeta.at("amplitude"), "problem.eta.amplitude")
                     : 1.0;
    eta["decay_power"] = power;
    eta["amplitude"] = amp;
  }

  Json out;
  out["kind"] = kind;
  Json jl = Json::array();
  for (int N : levels) jl.push_back(N);
  out["levels"] = std::move(jl);
  out["coefficients"] = std::move(coeffs);
  out["eta"] = std::move(eta);
  return out;
}

Json normalize_counterexample(const Json& p) {
  reject_unknown(p, {"eps", "horizons"}, "problem");
  double eps =
      p.contains("eps") ? as_double(p.at("eps"), "problem.eps") : 1e-2;
  if (!(eps > 0.0)) fail("problem.eps must be positive");
  Json horizons = Json::array();
  if (p.contains("horizons")) {
    const Json& arr = p.at("horizons");
    if (!arr.is_array() || arr.empty())
      fail("problem.horizons must be a non-empty array");
    double prev = std::numeric_limits<double>::infinity();
    for (const Json& e : arr) {
      double h = as_double(e, "problem.horizons");
      if (!(h > 0.0)) fail("problem.horizons entries must be positive");
      if (!(h < prev)) fail("problem.horizons must be strictly decreasing");
      prev = h;
      horizons.push_back(h);
    }
  } else {
    horizons.push_back(1e-1);
    horizons.push_back(1e-2);
  }
  Json out;
  out["eps"] = eps;
  out["horizons"] = std::move(horizons);
  return out;
}

Json normalize_problem(const std::string& command, const Json& p) {
  require_object(p, "problem");
  if (command == "riccati") return normalize_riccati(p);
  if (command == "slq") return normalize_slq(p);
  if (command == "tree") return normalize_tree(p);
  if (command == "fbsde") return normalize_fbsde(p);
  if (command == "blocks") return normalize_blocks(p);
  if (command == "galerkin") return normalize_galerkin(p);
  if (command == "counterexample") return normalize_counterexample(p);
  fail("unknown command '" + command + "'");
}

}  // namespace

MatrixXd matrix_from_json(const Json& j, int rows, int cols,
                          const std::string& field) {
  std::string dims =
      std::to_string(rows) + "x" + std::to_string(cols);
  if (j.is_number()) {
    if (rows != 1 || cols != 1)
      fail(field + ": scalar given where a " + dims + " matrix is required");
    MatrixXd M(1, 1);
    M(0, 0) = j.get<double>();
    return M;
  }
  if (!j.is_array() || j.empty())
    fail(field + " must be a number, a vector, or a " + dims + " matrix");
  if (j.front().is_array()) {
    if (j.size() != static_cast<std::size_t>(rows))
      fail(field + " has " + std::to_string(j.size()) + " rows, expected " +
           std::to_string(rows));
    MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i) {
      const Json& row = j[static_cast<std::size_t>(i)];
      if (!row.is_array() || row.size() != static_cast<std::size_t>(cols))
        fail(field + " row " + std::to_string(i) + " must have " +
             std::to_string(cols) + " entries");
      for (int k = 0; k < cols; ++k)
        M(i, k) = as_double(row[static_cast<std::size_t>(k)], field);
    }
    return M;
  }
  // Flat array: a column or row vector, whichever dimension matches.
  if (cols == 1 && j.size() == static_cast<std::size_t>(rows)) {
    MatrixXd M(rows, 1);
    for (int i = 0; i < rows; ++i)
      M(i, 0) = as_double(j[static_cast<std::size_t>(i)], field);
    return M;
  }
  if (rows == 1 && j.size() == static_cast<std::size_t>(cols)) {
    MatrixXd M(1, cols);
    for (int k = 0; k < cols; ++k)
      M(0, k) = as_double(j[static_cast<std::size_t>(k)], field);
    return M;
  }
  fail(field + " has size " + std::to_string(j.size()) + ", expected " + dims);
}

MatrixFn matrix_fn_from_json(const Json& j, int rows, int cols,
                             const std::string& field, const TimeGrid& grid) {
  return matrix_spec_fn(parse_matrix_spec(j, rows, cols, field, true), grid,
                        field);
}

bool Scenario::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

Json Scenario::resolved() const {
  Json j;
  j["command"] = command;
  j["problem"] = problem;
  Json num;
  num["t0"] = t0;
  num["T"] = horizon;
  num["steps"] = steps;
  num["n_paths"] = n_paths;
  num["seed"] = seed;
  num["tolerances"] = tolerances.is_object() ? tolerances : Json::object();
  j["numerics"] = std::move(num);
  Json out;
  out["directory"] = out_dir;
  Json jf = Json::array();
  for (const std::string& f : formats) jf.push_back(f);
  out["formats"] = std::move(jf);
  j["output"] = std::move(out);
  return j;
}

Scenario parse_scenario(const Json& root) {
  require_object(root, "scenario");
  reject_unknown(root, {"command", "problem", "numerics", "output"},
                 "scenario");
  Scenario s;
  s.command = as_string(require_key(root, "command", "scenario"), "command");
  static const std::set<std::string> kCommands = {
      "riccati", "slq", "tree", "fbsde", "blocks", "galerkin",
      "counterexample"};
  if (!kCommands.count(s.command)) fail("unknown command '" + s.command + "'");

  Json num = root.value("numerics", Json::object());
  require_object(num, "numerics");
  reject_unknown(num, {"t0", "T", "steps", "n_paths", "seed", "tolerances"},
                 "numerics");
  s.t0 = num.contains("t0") ? as_double(num.at("t0"), "numerics.t0") : 0.0;
  s.horizon = num.contains("T") ? as_double(num.at("T"), "numerics.T") : 1.0;
  if (!(s.horizon > s.t0)) fail("numerics.T must exceed numerics.t0");
  if (num.contains("steps")) {
    std::int64_t st = as_int(num.at("steps"), "numerics.steps");
    if (st < 2 || st > 100000000)
      fail("numerics.steps must be between 2 and 1e8");
    s.steps = static_cast<int>(st);
  }
  if (num.contains("n_paths")) {
    std::int64_t np = as_int(num.at("n_paths"), "numerics.n_paths");
    if (np < 1 || np > 1000000000)
      fail("numerics.n_paths must be between 1 and 1e9");
    s.n_paths = np;
  }
  if (num.contains("seed")) {
    const Json& js = num.at("seed");
    if (!js.is_number_integer() && !js.is_number_unsigned())
      fail("numerics.seed must be a non-negative integer");
    if (js.is_number_integer() && !js.is_number_unsigned() &&
        js.get<std::int64_t>() < 0)
      fail("numerics.seed must be a non-negative integer");
    s.seed = js.get<std::uint64_t>();
  }
  s.tolerances = num.value("tolerances", Json::object());
  require_object(s.tolerances, "numerics.tolerances");

  Json out = root.value("output", Json::object());
  require_object(out, "output");
  reject_unknown(out, {"directory", "formats"}, "output");
  if (out.contains("directory")) {
    s.out_dir = as_string(out.at("directory"), "output.directory");
    if (s.out_dir.empty()) fail("output.directory must be non-empty");
  }
  if (out.contains("formats")) {
    const Json& jf = out.at("formats");
    if (!jf.is_array() || jf.empty())
      fail("output.formats must be a non-empty array");
    s.formats.clear();
    for (const Json& e : jf) {
      std::string f = as_string(e, "output.formats");
      if (f != "csv" && f != "json")
        fail("output.formats entries must be csv or json");
      s.formats.push_back(f);
    }
  }

  s.problem = normalize_problem(s.command, root.value("problem", Json::object()));
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::string text = read_text_file(path);
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail("cannot parse " + path + ": " + e.what());
  }
  return parse_scenario(root);
}

void apply_overrides(Scenario& s, const CliOverrides& o) {
  if (o.seed) s.seed = *o.seed;
  if (o.n_paths) {
    if (*o.n_paths < 1 || *o.n_paths > 1000000000)
      fail("--paths must be between 1 and 1e9");
    s.n_paths = *o.n_paths;
  }
  if (o.dt) {
    if (!(*o.dt > 0.0) || !std::isfinite(*o.dt))
      fail("--dt must be positive");
    long long st = std::llround((s.horizon - s.t0) / *o.dt);
    if (st < 2) fail("--dt is too large for the horizon");
    if (st > 100000000) fail("--dt is too small for the horizon");
    s.steps = static_cast<int>(st);
  }
  if (o.out_dir) {
    if (o.out_dir->empty()) fail("--out must be non-empty");
    s.out_dir = *o.out_dir;
  }
}

CoefficientSet coefficient_set_from_json(const Json& problem,
                                         const TimeGrid& grid) {
  CoefficientSet cs;
  cs.n = as_dim(require_key(problem, "n", "problem"), "problem.n");
  cs.m = as_dim(require_key(problem, "m", "problem"), "problem.m");
  int n = cs.n;
  int m = cs.m;
  cs.A = matrix_fn_from_json(require_key(problem, "A", "problem"), n, n, "A",
                             grid);
  cs.A1 = matrix_fn_from_json(require_key(problem, "A1", "problem"), n, n,
                              "A1", grid);
  cs.B = matrix_fn_from_json(require_key(problem, "B", "problem"), n, m, "B",
                             grid);
  cs.C = matrix_fn_from_json(require_key(problem, "C", "problem"), n, n, "C",
                             grid);
  cs.D = matrix_fn_from_json(require_key(problem, "D", "problem"), n, m, "D",
                             grid);
  cs.Q = matrix_fn_from_json(require_key(problem, "Q", "problem"), n, n, "Q",
                             grid);
  cs.R = matrix_fn_from_json(require_key(problem, "R", "problem"), m, m, "R",
                             grid);
  cs.G = matrix_from_json(require_key(problem, "G", "problem"), n, n, "G");
  return cs;
}

VectorXd eta_from_json(const Json& problem, int n) {
  return vector_from_json(require_key(problem, "eta", "problem"), n,
                          "problem.eta");
}

TreeModel tree_model_from_json(const Json& problem) {
  TreeModel tm;
  tm.depth = static_cast<int>(
      as_int(require_key(problem, "depth", "problem"), "problem.depth"));
  tm.n = as_dim(require_key(problem, "n", "problem"), "problem.n");
  tm.m = as_dim(require_key(problem, "m", "problem"), "problem.m");
  auto table = [&](const char* key, int r, int c) {
    return tree_table_fn(parse_tree_table(require_key(problem, key, "problem"),
                                          r, c, key, tm.depth, false));
  };
  tm.A = table("A", tm.n, tm.n);
  tm.B = table("B", tm.n, tm.m);
  tm.C = table("C", tm.n, tm.n);
  tm.D = table("D", tm.n, tm.m);
  tm.Q = table("Q", tm.n, tm.n);
  tm.R = table("R", tm.m, tm.m);
  tm.G = leaf_table_fn(parse_tree_table(require_key(problem, "G", "problem"),
                                        tm.n, tm.n, "G", tm.depth, true),
                       tm.depth);
  return tm;
}

Block block_from_json(const Json& jb, const TimeGrid& grid) {
  CoefficientSet cs = coefficient_set_from_json(jb, grid);
  if (jb.contains("R1") && !jb.at("R1").is_null()) {
    MatrixFn r1 =
        matrix_fn_from_json(jb.at("R1"), cs.m, cs.m, "R1", grid);
    return make_block(std::move(cs), std::move(r1));
  }
  return make_block(std::move(cs));
}

SpdeCoefficients spde_coefficients_from_json(const Json& jc) {
  require_object(jc, "problem.coefficients");
  SpdeCoefficients sc;
  auto num = [&](const char* key, double dflt) {
    return jc.contains(key)
               ? as_double(jc.at(key), "problem.coefficients." + std::string(key))
               : dflt;
  };
  sc.a1 = num("a1", 0.0);
  sc.b1 = num("b1", 0.0);
  sc.a2 = num("a2", 0.0);
  sc.b2 = num("b2", 0.0);
  sc.q = num("q", 1.0);
  sc.r = num("r", 1.0);
  sc.g = num("g", 0.0);
  sc.r0 = num("r0", 0.0);
  return sc;
}

std::vector<VectorXd> spectral_etas_from_json(const Json& jeta, int n_modes,
                                              int block_dim) {
  require_object(jeta, "problem.eta");
  std::vector<VectorXd> etas;
  etas.reserve(static_cast<std::size_t>(n_modes));
  if (jeta.contains("modes")) {
    const Json& arr = jeta.at("modes");
    if (!arr.is_array() || arr.size() < static_cast<std::size_t>(n_modes))
      fail("problem.eta.modes must list at least " + std::to_string(n_modes) +
           " mode vectors");
    for (int j = 0; j < n_modes; ++j)
      etas.push_back(vector_from_json(arr[static_cast<std::size_t>(j)],
                                      block_dim, "problem.eta.modes"));
    return etas;
  }
  double power = as_double(require_key(jeta, "decay_power", "problem.eta"),
                           "problem.eta.decay_power");
  double amp = jeta.contains("amplitude")
                   ? as_double(jeta.at("amplitude"), "problem.eta.amplitude")
                   : 1.0;
  for (int j = 1; j <= n_modes; ++j)
    etas.push_back(amp * std::pow(static_cast<double>(j), -power) *
                   VectorXd::Ones(block_dim));
  return etas;
}

CounterexampleConfig counterexample_config_from_json(const Scenario& s) {
  if (s.t0 != 0.0)
    fail("counterexample requires numerics.t0 = 0");
  if (s.n_paths > 100000000) fail("counterexample caps n_paths at 1e8");
  CounterexampleConfig cfg;
  cfg.T = s.horizon;
  cfg.dt = s.dt();
  cfg.eps = as_double(require_key(s.problem, "eps", "problem"), "problem.eps");
  cfg.n_paths = static_cast<int>(s.n_paths);
  cfg.seed = s.seed;
  cfg.horizons.clear();
  const Json& arr = require_key(s.problem, "horizons", "problem");
  if (!arr.is_array() || arr.empty())
    fail("problem.horizons must be a non-empty array");
  for (const Json& e : arr)
    cfg.horizons.push_back(as_double(e, "problem.horizons"));
  return cfg;
}

}  // namespace rlab
