#include "afree/diffop.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace afree {

using json = nlohmann::json;

void DiffOp::validate() const {
  if (dim < 1) throw std::invalid_argument("operator: dimension must be >= 1");
  if (fiber_in < 1 || fiber_out < 1) throw std::invalid_argument("operator: empty fiber");
  if (coeffs.empty()) throw std::invalid_argument("operator: no coefficients");
  double maxabs = 0.0;
  for (const auto& [alpha, mat] : coeffs) {
    if (alpha.dim() != dim) throw std::invalid_argument("operator: multi-index dimension mismatch");
    if (alpha.order() != order) throw std::invalid_argument("coefficient order mismatch");
    if (mat.rows() != fiber_out || mat.cols() != fiber_in)
      throw std::invalid_argument("operator: coefficient matrix shape mismatch");
    maxabs = std::max(maxabs, mat.cwiseAbs().maxCoeff());
  }
  if (maxabs == 0.0) throw std::invalid_argument("operator: all coefficients are zero");
}

namespace {

int get_param(const std::map<std::string, int>& params, const std::string& key, int fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

// Row-major index of entry (i, b) of an m x d matrix field.
int matfield_index(int i, int b, int d) { return i * d + b; }

DiffOp make_grad(int m, int d) {
  DiffOp op;
  op.dim = d;
  op.fiber_in = m;
  op.fiber_out = m * d;
  op.order = 1;
  op.name = "grad";
  for (int a = 0; a < d; ++a) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(op.fiber_out, op.fiber_in);
    for (int i = 0; i < m; ++i) A(matfield_index(i, a, d), i) = 1.0;
    op.coeffs.emplace(unit_index(d, a), std::move(A));
  }
  return op;
}

// Row-wise matrix curl; component order is rows-by-pairs (a<b), entry
// d_b F_{ia} - d_a F_{ib}, so that for m=1, d=2 the symbol is
// 2*pi*i*(xi2*l1 - xi1*l2).
DiffOp make_curl(int m, int d) {
  if (d < 2) throw std::invalid_argument("curl: requires d >= 2");
  DiffOp op;
  op.dim = d;
  op.fiber_in = m * d;
  op.fiber_out = m * d * (d - 1) / 2;
  op.order = 1;
  op.name = "curl";
  op.potential_tag = "grad";
  for (int a = 0; a < d; ++a) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(op.fiber_out, op.fiber_in);
    int row = 0;
    for (int i = 0; i < m; ++i)
      for (int p = 0; p < d; ++p)
        for (int q = p + 1; q < d; ++q) {
          if (a == q) A(row, matfield_index(i, p, d)) += 1.0;
          if (a == p) A(row, matfield_index(i, q, d)) -= 1.0;
          ++row;
        }
    op.coeffs.emplace(unit_index(d, a), std::move(A));
  }
  return op;
}

DiffOp make_curl3() {
  DiffOp op;
  op.dim = 3;
  op.fiber_in = 3;
  op.fiber_out = 3;
  op.order = 1;
  op.name = "curl3";
  // (curl u)_i = eps_{iab} d_a u_b
  auto levi = [](int i, int j, int k) -> double {
    if (i == j || j == k || i == k) return 0.0;
    if ((j - i + 3) % 3 == 1) return 1.0;
    return -1.0;
  };
  for (int a = 0; a < 3; ++a) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int b = 0; b < 3; ++b) A(i, b) = levi(i, a, b);
    op.coeffs.emplace(unit_index(3, a), std::move(A));
  }
  return op;
}

DiffOp make_div(int d) {
  DiffOp op;
  op.dim = d;
  op.fiber_in = d;
  op.fiber_out = 1;
  op.order = 1;
  op.name = "div";
  if (d == 3) op.potential_tag = "curl3";
  for (int a = 0; a < d; ++a) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(1, d);
    A(0, a) = 1.0;
    op.coeffs.emplace(unit_index(d, a), std::move(A));
  }
  return op;
}

// Symmetrized gradient of u in R^2 in Mandel components
// (E11, E22, sqrt(2) E12): B u = (d1 u1, d2 u2, (d1 u2 + d2 u1)/sqrt(2)).
DiffOp make_symgrad(int d) {
  if (d != 2) throw std::invalid_argument("symgrad: only d=2 is supported");
  DiffOp op;
  op.dim = 2;
  op.fiber_in = 2;
  op.fiber_out = 3;
  op.order = 1;
  op.name = "symgrad";
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXd A1 = Eigen::MatrixXd::Zero(3, 2);
  A1(0, 0) = 1.0;
  A1(2, 1) = s;
  Eigen::MatrixXd A2 = Eigen::MatrixXd::Zero(3, 2);
  A2(1, 1) = 1.0;
  A2(2, 0) = s;
  op.coeffs.emplace(unit_index(2, 0), std::move(A1));
  op.coeffs.emplace(unit_index(2, 1), std::move(A2));
  return op;
}

// Saint-Venant compatibility operator on Mandel fields (E11, E22, sqrt2 E12):
// curlcurl E = d22 E11 + d11 E22 - sqrt(2) d12 (sqrt2 E12).
DiffOp make_curlcurl(int d) {
  if (d != 2) throw std::invalid_argument("curlcurl: only d=2 is supported");
  DiffOp op;
  op.dim = 2;
  op.fiber_in = 3;
  op.fiber_out = 1;
  op.order = 2;
  op.name = "curlcurl";
  op.potential_tag = "symgrad";
  Eigen::MatrixXd A20 = Eigen::MatrixXd::Zero(1, 3);
  A20(0, 1) = 1.0; // d11 E22
  Eigen::MatrixXd A02 = Eigen::MatrixXd::Zero(1, 3);
  A02(0, 0) = 1.0; // d22 E11
  Eigen::MatrixXd A11 = Eigen::MatrixXd::Zero(1, 3);
  A11(0, 2) = -std::sqrt(2.0); // -2 d12 E12 in Mandel scaling
  op.coeffs.emplace(MultiIndex({2, 0}), std::move(A20));
  op.coeffs.emplace(MultiIndex({0, 2}), std::move(A02));
  op.coeffs.emplace(MultiIndex({1, 1}), std::move(A11));
  return op;
}

} // namespace

DiffOp make_operator(const std::string& tag, const std::map<std::string, int>& params) {
  DiffOp op;
  if (tag == "grad") {
    op = make_grad(get_param(params, "m", 1), get_param(params, "d", 2));
  } else if (tag == "curl") {
    op = make_curl(get_param(params, "m", 1), get_param(params, "d", 2));
  } else if (tag == "curl3") {
    op = make_curl3();
  } else if (tag == "div") {
    op = make_div(get_param(params, "d", 3));
  } else if (tag == "symgrad") {
    op = make_symgrad(get_param(params, "d", 2));
  } else if (tag == "curlcurl") {
    op = make_curlcurl(get_param(params, "d", 2));
  } else {
    throw std::invalid_argument("unknown operator tag: " + tag);
  }
  op.validate();
  return op;
}

DiffOp make_operator(int dim, int fiber_in, int fiber_out,
                     const std::vector<std::pair<MultiIndex, Eigen::MatrixXd>>& table,
                     const std::string& name) {
  DiffOp op;
  op.dim = dim;
  op.fiber_in = fiber_in;
  op.fiber_out = fiber_out;
  op.name = name;
  if (table.empty()) throw std::invalid_argument("operator: no coefficients");
  op.order = table.front().first.order();
  for (const auto& [alpha, mat] : table) {
    if (alpha.order() != op.order) throw std::invalid_argument("coefficient order mismatch");
    auto [it, inserted] = op.coeffs.emplace(alpha, mat);
    if (!inserted) it->second += mat;
  }
  op.validate();
  return op;
}

DiffOp operator_from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  if (j.contains("tag")) {
    std::map<std::string, int> params;
    if (j.contains("params"))
      for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
        params[it.key()] = it.value().get<int>();
    return make_operator(j["tag"].get<std::string>(), params);
  }
  const int d = j.at("d").get<int>();
  const int N = j.at("N").get<int>();
  const int M = j.at("M").get<int>();
  const int k = j.at("k").get<int>();
  std::vector<std::pair<MultiIndex, Eigen::MatrixXd>> table;
  for (const auto& entry : j.at("coeffs")) {
    MultiIndex alpha(entry.at("alpha").get<std::vector<int>>());
    const auto rows = entry.at("matrix").get<std::vector<std::vector<double>>>();
    Eigen::MatrixXd mat(M, N);
    if (static_cast<int>(rows.size()) != M) throw std::invalid_argument("operator: matrix row count");
    for (int r = 0; r < M; ++r) {
      if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != N)
        throw std::invalid_argument("operator: matrix column count");
      for (int c = 0; c < N; ++c) mat(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    table.emplace_back(std::move(alpha), std::move(mat));
  }
  auto op = make_operator(d, N, M, table, j.value("name", "custom"));
  if (op.order != k) throw std::invalid_argument("operator: declared order disagrees with table");
  return op;
}

std::optional<DiffOp> partner_potential(const DiffOp& op) {
  if (!op.potential_tag) return std::nullopt;
  const std::string& tag = *op.potential_tag;
  if (tag == "grad") {
    // curl(m,d) fields are m x d matrices; the potential is grad on R^m.
    const int d = op.dim;
    const int m = op.fiber_in / d;
    return make_operator("grad", {{"m", m}, {"d", d}});
  }
  if (tag == "curl3") return make_operator("curl3");
  if (tag == "symgrad") return make_operator("symgrad", {{"d", op.dim}});
  return std::nullopt;
}

} // namespace afree
