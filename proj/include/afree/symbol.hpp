#pragma once

#include <complex>
#include <vector>

#include "afree/diffop.hpp"

namespace afree {

using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Principal symbol evaluated at a frequency direction.
struct SymbolSample {
  RealVector xi;              // unit direction
  ComplexMatrix matrix;       // (2*pi*i)^k sum A_alpha xi^alpha
  int rank = 0;
  ComplexMatrix kernel_basis; // orthonormal columns spanning ker
  std::vector<double> singular_values;
};

struct RankReport {
  int min_rank = 0;
  int max_rank = 0;
  int sample_count = 0;
  double tol = 0.0;
  bool is_constant_rank = false;
  std::vector<RealVector> witness_xis; // realizing min and max rank
};

struct CompatReport {
  double max_product_residual = 0.0; // relative ||A(xi)B(xi)||
  int rank_defect_count = 0;         // samples with rank B != dim ker A
  int sample_count = 0;
  bool compatible = false;
};

inline constexpr double kRankTol = 1e-10;

/// Raw symbol (2*pi*i)^k sum_alpha A_alpha xi^alpha; xi is not normalized,
/// so the k-homogeneity is included.
ComplexMatrix symbol_matrix(const DiffOp& op, const RealVector& xi);

/// SymbolSample at xi/|xi| with SVD rank and orthonormal kernel basis.
SymbolSample symbol(const DiffOp& op, const RealVector& xi, double tol = kRankTol);

/// Orthogonal projector onto ker A(xi); 0-homogeneous, idempotent, Hermitian.
ComplexMatrix projector_symbol(const DiffOp& op, const RealVector& xi, double tol = kRankTol);

/// Moore-Penrose pseudo-inverse of the raw symbol at xi ((-k)-homogeneous).
ComplexMatrix pseudo_inverse_symbol(const DiffOp& op, const RealVector& xi, double tol = kRankTol);

/// Real orthonormal kernel basis of the reduced real symbol sum A_alpha xi^alpha.
/// Valid for every homogeneous operator since A(xi) = (2*pi*i)^k * real matrix.
Eigen::MatrixXd real_kernel_basis(const DiffOp& op, const RealVector& xi, double tol = kRankTol);

/// Quasi-uniform unit directions: axes, small integer lattice directions,
/// a Fibonacci-type lattice, and seeded uniform samples, at least n_samples
/// in total.
std::vector<RealVector> sample_directions(int dim, int n_samples, unsigned seed = 12345);

RankReport constant_rank_check(const DiffOp& op, int n_samples, double tol = kRankTol,
                               unsigned seed = 12345);

/// Kernel bases along the given directions; the union approximates the wave
/// cone. Bases are real (see real_kernel_basis).
std::vector<std::pair<RealVector, Eigen::MatrixXd>>
wave_cone_sample(const DiffOp& op, const std::vector<RealVector>& xis, double tol = kRankTol);

/// Checks im B(xi) = ker A(xi) over sampled directions: the product residual
/// ||A(xi)B(xi)|| relative to ||A|| ||B||, and rank B(xi) vs dim ker A(xi).
CompatReport potential_compat_check(const DiffOp& opA, const DiffOp& opB, int n_samples,
                                    double tol = kRankTol, unsigned seed = 12345);

} // namespace afree
