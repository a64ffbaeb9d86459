#pragma once

#include "afree/diffop.hpp"
#include "afree/field.hpp"

namespace afree {

/// Forward transform: coeffs(xi) = (1/n^d) sum_x psi(x) e^{-2 pi i xi.x}.
SpectralField transform(const PeriodicField& field);

/// Inverse transform: psi(x) = sum_xi coeffs(xi) e^{+2 pi i xi.x}; the
/// imaginary residue of a conjugate-symmetric input is dropped.
PeriodicField inverse_transform(const SpectralField& field);

/// Largest |Im| encountered by the last inverse_transform on this thread;
/// diagnostic for conjugate-symmetry violations.
double last_inverse_imag_residue();

/// Apply the operator frequency-wise: psi_hat(xi) -> A(xi) psi_hat(xi) with
/// the symbol at integer xi (homogeneity included). Exact for band-limited
/// fields.
SpectralField apply_operator(const DiffOp& op, const SpectralField& field);
PeriodicField apply_operator(const DiffOp& op, const PeriodicField& field);

/// Remove the mean (coefficient at xi=0); idempotent.
PeriodicField zero_mean(const PeriodicField& field);
SpectralField zero_mean(const SpectralField& field);

/// Fiber-wise mean over the grid.
Eigen::VectorXd field_mean(const PeriodicField& field);

/// Thrown by random_afree_field when ker A(xi) = {0} at every sampled mode.
struct EllipticOperatorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Seeded random band-limited A-free zero-mean real field with L2 norm
/// `amplitude`: psi_hat(xi) = P(xi) g_hat(xi) for complex Gaussian g.
PeriodicField random_afree_field(const DiffOp& op, const Grid& grid, int band,
                                 unsigned long long seed, double amplitude = 1.0);

/// L2 norm via Plancherel (grid mean of |psi|^2, square-rooted).
double l2_norm(const PeriodicField& field);
double l2_norm(const SpectralField& field);

} // namespace afree
