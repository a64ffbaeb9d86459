#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>

#include "afree/multiindex.hpp"

namespace afree {

/// Homogeneous constant-coefficient differential operator
///   (L u)_m = sum_{|alpha|=order} coeffs[alpha](m, :) . d^alpha u.
/// Acts on fields with `fiber_in` components and produces `fiber_out`.
struct DiffOp {
  int dim = 0;       // spatial dimension d
  int fiber_in = 0;  // source fiber (N)
  int fiber_out = 0; // target fiber (M)
  int order = 0;     // homogeneity k
  std::map<MultiIndex, Eigen::MatrixXd> coeffs;
  std::string name;
  // Registered potential partner tag, when one is known (e.g. curl <-> grad).
  std::optional<std::string> potential_tag;

  void validate() const;
};

/// Built-in operator registry. Recognized tags:
///   grad(m,d)      gradient of R^m-valued potentials, fields in R^{m x d}
///   curl(m,d)      row-wise matrix curl on R^{m x d} fields
///   curl3          classical vector curl in d=3
///   div(d)         divergence of R^d vector fields
///   symgrad(d=2)   symmetrized gradient, Mandel components (E11,E22,sqrt2 E12)
///   curlcurl(d=2)  Saint-Venant compatibility operator on Mandel fields
DiffOp make_operator(const std::string& tag, const std::map<std::string, int>& params = {});

/// Explicit coefficient table constructor (order and shapes are checked).
DiffOp make_operator(int dim, int fiber_in, int fiber_out,
                     const std::vector<std::pair<MultiIndex, Eigen::MatrixXd>>& table,
                     const std::string& name = "custom");

/// Parse {"d":..,"N":..,"M":..,"k":..,"coeffs":[{"alpha":[..],"matrix":[[..]]}]}
/// or {"tag":..,"params":{..}} from a JSON string.
DiffOp operator_from_json(const std::string& json_text);

/// The registered potential of a built-in operator, if any.
std::optional<DiffOp> partner_potential(const DiffOp& op);

} // namespace afree
