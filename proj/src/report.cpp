#include "afree/report.hpp"

#include <cstdio>

namespace afree {

using json = nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path) {
  if (!out_) throw std::runtime_error("csv: cannot open " + path);
}

void CsvWriter::header(const std::vector<std::string>& names) { raw_row(names); }

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  raw_row(cells);
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ",";
    out_ << cells[i];
  }
  out_ << "\n";
}

namespace {

json vec_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

json eigvec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

} // namespace

json to_json(const RankReport& r) {
  json j;
  j["min_rank"] = r.min_rank;
  j["max_rank"] = r.max_rank;
  j["sample_count"] = r.sample_count;
  j["tol"] = r.tol;
  j["is_constant_rank"] = r.is_constant_rank;
  json w = json::array();
  for (const auto& xi : r.witness_xis) w.push_back(eigvec_json(xi));
  j["witness_xis"] = w;
  return j;
}

json to_json(const CompatReport& r) {
  json j;
  j["max_product_residual"] = r.max_product_residual;
  j["rank_defect_count"] = r.rank_defect_count;
  j["sample_count"] = r.sample_count;
  j["compatible"] = r.compatible;
  return j;
}

json to_json(const SymbolSample& s) {
  json j;
  j["xi"] = eigvec_json(s.xi);
  j["rank"] = s.rank;
  j["singular_values"] = vec_json(s.singular_values);
  json mat = json::array();
  for (int r = 0; r < s.matrix.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < s.matrix.cols(); ++c)
      row.push_back(json::array({s.matrix(r, c).real(), s.matrix(r, c).imag()}));
    mat.push_back(row);
  }
  j["matrix_re_im"] = mat;
  j["kernel_dim"] = s.kernel_basis.cols();
  return j;
}

json to_json(const PrimitiveBoundsReport& r) {
  return json{{"c_ii", r.c_ii}, {"c_iii", r.c_iii}, {"c_iv", r.c_iv}};
}

json to_json(const DecompositionDiagnostics& d) {
  json j;
  j["thresholds_T"] = vec_json(d.thresholds_T);
  j["thresholds_delta"] = vec_json(d.thresholds_delta);
  json tm = json::array(), tmp = json::array(), ma = json::array();
  for (const auto& v : d.tail_mass) tm.push_back(vec_json(v));
  for (const auto& v : d.tail_mass_p) tmp.push_back(vec_json(v));
  for (const auto& v : d.measure_above) ma.push_back(vec_json(v));
  j["tail_mass"] = tm;
  j["tail_mass_p"] = tmp;
  j["measure_above"] = ma;
  j["weak_pairing_residual"] = vec_json(d.weak_pairing_residual);
  j["additivity_residual"] = vec_json(d.additivity_residual);
  return j;
}

json to_json(const DensityCheckReport& r) {
  json j;
  j["max_grad_fd_error"] = r.max_grad_fd_error;
  j["max_hess_fd_error"] = r.max_hess_fd_error;
  j["h3_ok"] = r.h3_ok;
  j["h4_ok"] = r.h4_ok;
  j["worst_h3_margin"] = r.worst_h3_margin;
  j["worst_h4_margin"] = r.worst_h4_margin;
  return j;
}

json to_json(const ExcessBoundsReport& r) {
  json j;
  j["C_a"] = r.C_a;
  j["C_a_lipschitz"] = r.C_a_lipschitz;
  j["C_a_vbound"] = r.C_a_vbound;
  j["delta_grid"] = vec_json(r.delta_grid);
  j["R_of_delta"] = vec_json(r.R_of_delta);
  j["C_c"] = r.C_c;
  j["C_c_tilde"] = r.C_c_tilde;
  j["has_C_d"] = r.has_C_d;
  if (r.has_C_d) j["C_d"] = r.C_d;
  j["gamma_detected"] = r.gamma_detected;
  return j;
}

json to_json(const LambdaConvexityReport& r) {
  json j;
  j["min_quadratic_on_cone"] = r.min_quadratic_on_cone;
  j["is_lambda_convex"] = r.is_lambda_convex;
  if (r.argmin_direction.size() > 0) j["argmin_direction"] = eigvec_json(r.argmin_direction);
  return j;
}

json to_json(const AqcReport& r) {
  json j;
  j["min_gap"] = r.min_gap;
  j["violation"] = r.violation;
  j["violation_tol"] = r.violation_tol;
  j["has_certificate"] = r.certificate_field.has_value();
  j["energy_evaluations"] = r.energy_evaluations;
  j["warnings"] = r.warnings;
  return j;
}

json to_json(const GardingReport& r) {
  json j;
  j["C0_fit"] = r.C0_fit;
  j["C1_fit"] = r.C1_fit;
  j["epsilon0_estimate"] = r.epsilon0_estimate;
  j["worst_ratio_field_id"] = r.worst_ratio_field_id;
  j["n_fields"] = r.n_fields;
  j["excess_route_ok"] = r.excess_route_ok;
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back(json{{"field_id", row.field_id},
                        {"lhs", row.lhs},
                        {"excess", row.excess},
                        {"penalty", row.penalty},
                        {"wneg_p", row.wneg_p}});
  j["rows"] = rows;
  return j;
}

json to_json(const QuadraticGardingReport& r) {
  json j;
  j["c0_delta_fit"] = r.c0_delta_fit;
  j["c1_fit"] = r.c1_fit;
  j["c0_frozen"] = r.c0_frozen;
  j["row_quadratic"] = vec_json(r.row_quadratic);
  j["row_mass"] = vec_json(r.row_mass);
  j["row_lower"] = vec_json(r.row_lower);
  return j;
}

json to_json(const EntropyCompatReport& r) {
  return json{{"max_residual_q", r.max_residual_q},
              {"max_residual_symmetry", r.max_residual_symmetry}};
}

json to_json(const StabilityReport& r) {
  json j;
  j["times"] = vec_json(r.times);
  j["relative_entropy"] = vec_json(r.relative_entropy);
  j["v_distance"] = vec_json(r.v_distance);
  j["involution_drift"] = vec_json(r.involution_drift);
  j["dissipation_margin"] = vec_json(r.dissipation_margin);
  j["C1"] = r.C1;
  j["C2"] = r.C2;
  j["degenerate"] = r.degenerate;
  j["blown_up"] = r.blown_up;
  j["bound_value"] = vec_json(r.bound_value);
  return j;
}

json to_json(const MinimalityReport& r) {
  json j;
  j["el_residual"] = r.el_residual;
  j["second_variation_min"] = r.second_variation_min;
  j["epsilon0_used"] = r.epsilon0_used;
  j["C_fit"] = r.C_fit;
  j["el_ok"] = r.el_ok;
  j["second_variation_ok"] = r.second_variation_ok;
  j["aqc_ok"] = r.aqc_ok;
  j["pass"] = r.pass;
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back(json{{"wneg_p", row.wneg_p},
                        {"energy_gap", row.energy_gap},
                        {"v_distance", row.v_distance}});
  j["rows"] = rows;
  j["diagnostics"] = r.diagnostics;
  return j;
}

std::string fnv1a_hex(const std::string& text) {
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", h);
  return buf;
}

} // namespace afree
