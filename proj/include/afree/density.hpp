#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace afree {

/// Stored-energy density W with analytic first and second derivatives and
/// p-growth metadata: |W(z)| <= c_upper (1+|z|^p), W(z) >= c_lower (|z|^p - 1).
struct EnergyDensity {
  int fiber = 0;  // N
  double p = 2.0; // growth exponent, >= 2
  std::function<double(const Eigen::VectorXd&)> eval;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hess;
  double c_upper = 1.0;
  double c_lower = 0.0; // 0 when the density is not coercive
  std::string name;
  std::vector<std::string> warnings;
};

/// W(z) = 0.5 z.M z for symmetric M.
EnergyDensity density_quadratic(const Eigen::MatrixXd& M, const std::string& name = "quadratic");

/// W(F) = |F|^2 + gamma det F on 2x2 matrices (row-major, N = 4).
EnergyDensity density_quaddet(double gamma);

/// W(z) = sum_j coeffs[j] |z|^(2j); coeffs[0] is the constant term.
/// Default coeffs {0,-1,1} is the double-well |z|^4 - |z|^2.
EnergyDensity density_radial_poly(int fiber, const std::vector<double>& coeffs,
                                  const std::string& name = "radial_poly");

/// Registry lookup from a JSON spec: {"entry":"quadratic","matrix":[[..]]} |
/// {"entry":"quaddet","gamma":g} | {"entry":"radial_poly","N":n,"coeffs":[..]}.
EnergyDensity density_from_json(const std::string& json_text);

/// The 2x2 determinant as a symmetric quadratic form: det F = 0.5 z.H z.
Eigen::MatrixXd det2_form();

struct DensityCheckReport {
  double max_grad_fd_error = 0.0; // relative, against central differences
  double max_hess_fd_error = 0.0;
  bool h3_ok = false;
  bool h4_ok = false;
  double worst_h3_margin = 0.0;
  double worst_h4_margin = 0.0;
};

/// Samples the (H1) surrogate (derivative consistency) and the (H3)/(H4)
/// growth envelopes on a radius sweep.
DensityCheckReport check_density(const EnergyDensity& W, double radius = 4.0,
                                 int n_samples = 200, unsigned long long seed = 7);

} // namespace afree
