#pragma once

#include "afree/diffop.hpp"
#include "afree/field.hpp"
#include "afree/transform.hpp"

namespace afree {

/// Frequency-wise projection onto the A-free zero-mean subspace:
/// v_hat(xi) -> Proj_{ker A(xi)} v_hat(xi) for xi != 0, and 0 at xi = 0.
/// Linear and idempotent.
PeriodicField project_afree(const DiffOp& opA, const PeriodicField& field);
SpectralField project_afree(const DiffOp& opA, const SpectralField& field);

struct PrimitivePair {
  PeriodicField psi; // the A-free zero-mean field
  PeriodicField phi; // its canonical primitive (fiber = opB.fiber_in)
  DiffOp opB;
};

struct PrimitiveRangeError : std::runtime_error {
  PrimitiveRangeError(const std::string& msg, std::vector<int> freq, double res)
      : std::runtime_error(msg), worst_frequency(std::move(freq)), residual(res) {}
  std::vector<int> worst_frequency;
  double residual;
};

/// Canonical primitive phi with phi_hat(xi) = Bdagger(xi) psi_hat(xi); throws
/// PrimitiveRangeError when psi leaves im B(xi) at some frequency beyond tol.
PrimitivePair primitive(const DiffOp& opB, const PeriodicField& psi, double tol = 1e-9);

struct PrimitiveBoundsReport {
  double c_ii = 0.0;  // ||phi||_{L^p} / ||psi||_{W^{-l,p}}
  double c_iii = 0.0; // ||phi||_{W^{l,p}} / ||psi||_{L^p}
  double c_iv = 0.0;  // max_i ||phi||_{W^{l-i,p}} / ||psi||_{W^{-1,p}}
};

PrimitiveBoundsReport primitive_bounds_report(const PrimitivePair& pair, double p);

/// Pointwise radial truncation tau_k: z for |z| <= k, k z/|z| otherwise.
PeriodicField truncate(const PeriodicField& field, double k);

struct DecompositionDiagnostics {
  std::vector<double> thresholds_T;       // tail-mass grid
  std::vector<double> thresholds_delta;   // superlevel grid
  // per input index:
  std::vector<std::vector<double>> tail_mass;      // int_{|F_j|>T} |F_j|^2
  std::vector<std::vector<double>> tail_mass_p;    // int_{|F_j|>T} |F_j|^p
  std::vector<std::vector<double>> measure_above;  // |{ |B_j| > delta }|
  std::vector<double> weak_pairing_residual;       // max_{|xi|_inf<=2} |F_j_hat(xi)|
  std::vector<double> additivity_residual;         // L2 of input - (limit+osc+conc)
};

struct DecompositionResult {
  std::vector<PeriodicField> oscillation;   // projected truncations
  std::vector<PeriodicField> concentration; // remainders
  PeriodicField limit;                      // Cesaro coefficient average
  DecompositionDiagnostics diagnostics;
};

/// Splits an A-free zero-mean sequence into oscillation and concentration
/// parts around its Cesaro average: truncate at k_schedule[j], remove the
/// mean, project A-free; the remainder carries the concentration. The
/// asymptotic properties of the construction are reported as finite proxies,
/// never as booleans.
DecompositionResult decompose_sequence(const DiffOp& opA, const DiffOp& opB,
                                       const std::vector<PeriodicField>& fields,
                                       const std::vector<double>& k_schedule, double p,
                                       double afree_tol = 1e-8);

} // namespace afree
