#pragma once

#include "afree/convexity.hpp"
#include "afree/density.hpp"
#include "afree/diffop.hpp"
#include "afree/field.hpp"

namespace afree {

/// Grid mean of W(U(x)); the energy functional on the torus.
double energy_mean(const EnergyDensity& W, const PeriodicField& U);

/// L2 norm of the A-free zero-mean projection of DW(Ubar); vanishes exactly
/// when Ubar is a critical point against all discrete A-free zero-mean
/// variations.
double euler_lagrange_residual(const EnergyDensity& W, const PeriodicField& Ubar,
                               const DiffOp& opA);

struct SecondVariationReport {
  double min_quotient = 0.0; // min of int D2W(Ubar) psi.psi / int |psi|^2
  bool converged = false;
  int iterations = 0;
  double last_change = 0.0; // width of the final bracket
};

/// Smallest Rayleigh quotient of psi -> P(D^2 W(Ubar) psi) on A-free
/// zero-mean fields, by shifted power iteration (tolerance 1e-8, seeded
/// deterministic start).
SecondVariationReport second_variation_min(const EnergyDensity& W, const PeriodicField& Ubar,
                                           const DiffOp& opA, int iters = 10000,
                                           unsigned long long seed = 31);

/// Frozen-coefficient oracle for a constant background: min over lattice
/// modes 0 < |xi|_inf <= band of the smallest eigenvalue of the Hessian
/// restricted to ker A(xi).
double second_variation_frozen(const EnergyDensity& W, const Eigen::VectorXd& Ubar_value,
                               const DiffOp& opA, int band);

struct MinimalityRow {
  double wneg_p = 0.0;     // ||U - Ubar||_{W^{-1,p}}
  double energy_gap = 0.0; // W[U] - W[Ubar]
  double v_distance = 0.0; // int |V(U - Ubar)|^2
};

struct MinimalityReport {
  double el_residual = 0.0;
  double second_variation_min = 0.0;
  double epsilon0_used = 0.0;
  double C_fit = 0.0; // min over rows of gap / v_distance
  bool el_ok = false;
  bool second_variation_ok = false;
  bool aqc_ok = false;
  bool pass = false;
  std::vector<MinimalityRow> rows;
  std::vector<std::string> diagnostics;
};

/// Quantitative minimality sweep: checks the three sufficiency conditions,
/// then samples A-free perturbations with ||psi||_{W^{-1,p}} in (0, eps0]
/// and fits the smallest gap/V-distance ratio. epsilon0 <= 0 selects the
/// default 0.1 ||Ubar||_{W^{-1,p}} + 0.01 (mean-free part).
MinimalityReport minimality_check(const EnergyDensity& W, const PeriodicField& Ubar,
                                  const DiffOp& opA, double epsilon0, int n_samples,
                                  unsigned long long seed, int band = 0);

} // namespace afree
