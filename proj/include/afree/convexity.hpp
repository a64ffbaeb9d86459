#pragma once

#include <optional>

#include "afree/density.hpp"
#include "afree/diffop.hpp"
#include "afree/field.hpp"

namespace afree {

/// Relative (excess) function W(a+z|a) = W(a+z) - W(a) - DW(a).z.
double excess(const EnergyDensity& W, const Eigen::VectorXd& a, const Eigen::VectorXd& z);

/// Same quantity through the integral form int_0^1 (1-s) D^2W(a+sz) z.z ds
/// with 32-point Gauss-Legendre quadrature; agreement oracle for excess().
double excess_quadrature(const EnergyDensity& W, const Eigen::VectorXd& a,
                         const Eigen::VectorXd& z);

/// |V(z)|^2 = |z|^2 + |z|^p as an EnergyDensity (strongly convex for p >= 2).
EnergyDensity density_vsq(int fiber, double p);

/// W - c2 |V|^2; derivatives assembled analytically. A warning is recorded
/// on the result when the sampled coercivity (H4) check fails.
EnergyDensity tilde_shift(const EnergyDensity& W, double c2);

struct ExcessBoundsReport {
  double C_a_lipschitz = 0.0; // smallest C in the two-point bound
  double C_a_vbound = 0.0;    // smallest C with |f(l+z|l)| <= C |V(z)|^2
  double C_a = 0.0;           // max of the two
  std::vector<double> delta_grid;
  std::vector<double> R_of_delta; // largest R valid for each delta
  double C_c = 0.0;               // f(l+z|l) >= C_c |z|^p - C_c_tilde |z|^2
  double C_c_tilde = 0.0;
  bool has_C_d = false; // only when the Hessian is uniformly positive on samples
  double C_d = 0.0;     // f(l+z|l) >= C_d |V(z)|^2
  double gamma_detected = 0.0;
};

/// Realized constants of the technical excess bounds over |lambda| <= K and
/// a radius sweep in z (report only; nothing is certified beyond the sweep).
ExcessBoundsReport excess_bounds_check(const EnergyDensity& W, double K, int n_samples,
                                       unsigned long long seed = 11);

struct LambdaConvexityReport {
  double min_quadratic_on_cone = 0.0;
  bool is_lambda_convex = false;
  Eigen::VectorXd argmin_direction;
};

/// min over sampled wave-cone directions of M lambda . lambda (unit lambda),
/// computed per direction as the smallest eigenvalue of the kernel-restricted
/// form.
LambdaConvexityReport lambda_convexity_check(const Eigen::MatrixXd& Mform, const DiffOp& opA,
                                             int n_dirs, unsigned seed = 12345);

/// int_Q M psi . psi evaluated spectrally (sum over modes of M psi_hat .
/// conj(psi_hat)); psi must be A-free and zero-mean within tolerance.
double quadratic_aqc_value(const Eigen::MatrixXd& Mform, const DiffOp& opA,
                           const PeriodicField& psi, double afree_tol = 1e-8);

struct AqcBudget {
  int n_random = 4;
  int n_descent_steps = 200;
  int band = 2;
  double c0_probe = 0.0;
  int grid_n = 0;           // 0: smallest alias-safe odd grid for the band
  double start_amplitude = 0.5;
  unsigned long long seed = 2024;
};

struct AqcReport {
  double min_gap = 0.0;
  bool violation = false;
  double violation_tol = 0.0;
  std::optional<PeriodicField> certificate_field;
  int energy_evaluations = 0;
  std::vector<std::string> warnings;
};

/// Adversarial test of (strong, when c0_probe > 0) A-quasiconvexity at
/// lambda: minimizes G(psi) = int [W(lambda+psi) - W(lambda)] - c0_probe
/// int |V(psi)|^2 over A-free zero-mean band-limited psi by seeded random
/// starts and projected gradient descent on Fourier coefficients. Can only
/// falsify, never certify.
AqcReport aqc_test(const EnergyDensity& W, const Eigen::VectorXd& lambda, const DiffOp& opA,
                   const AqcBudget& budget);

struct GardingRow {
  int field_id = 0;
  double lhs = 0.0;     // int |V(psi)|^2
  double excess = 0.0;  // int W(Ubar+psi|Ubar)
  double penalty = 0.0; // ||psi||^2_{W^{-1,(2,p)}}
  double wneg_p = 0.0;  // ||psi||_{W^{-1,p}}
};

struct GardingReport {
  double C0_fit = 0.0;
  double C1_fit = 0.0;
  double epsilon0_estimate = 0.0;
  int worst_ratio_field_id = -1;
  int n_fields = 0;
  std::vector<GardingRow> rows;
  bool excess_route_ok = false; // all small-norm rows have positive excess
};

/// Fits (C0, C1) majorizing every row of the sampled inequality
///   lhs <= C0 * excess + C1 * penalty.
/// C0 is the largest lhs/excess ratio over the small-norm prefix (rows with
/// ||psi||_{W^{-1,p}} below the estimated epsilon0), C1 the smallest
/// constant absorbing the remaining slack.
GardingReport garding_verify(const EnergyDensity& W, const PeriodicField& Ubar,
                             const DiffOp& opA, const std::vector<PeriodicField>& test_fields,
                             double p);

struct QuadraticGardingReport {
  double c0_delta_fit = 0.0; // target c0 (1 - delta) with the delta=1/2 policy
  double c1_fit = 0.0;
  double c0_frozen = 0.0; // mode-wise strong positivity constant of D^2 tilde W
  std::vector<double> row_quadratic; // int D^2 tilde W(Ubar) B phi . B phi
  std::vector<double> row_mass;      // int |B phi|^2
  std::vector<double> row_lower;     // sum_{i=1..l} ||phi||^2 multipliers of order l-i
};

/// Sampled lower bound for the frozen-coefficient quadratic form of
/// tilde W = W - c2 |V|^2 along potentials phi.
QuadraticGardingReport quadratic_garding_check(const EnergyDensity& W, const PeriodicField& Ubar,
                                               const DiffOp& opB,
                                               const std::vector<PeriodicField>& phis,
                                               double c2 = 0.125);

} // namespace afree
