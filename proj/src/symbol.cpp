#include "afree/symbol.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/SVD>

#include "afree/kernels.hpp"

namespace afree {

namespace {

// (2*pi*i)^k
std::complex<double> two_pi_i_pow(int k) {
  const std::complex<double> base{0.0, 2.0 * std::numbers::pi};
  std::complex<double> p{1.0, 0.0};
  for (int j = 0; j < k; ++j) p *= base;
  return p;
}

Eigen::MatrixXd reduced_symbol(const DiffOp& op, const RealVector& xi) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(op.fiber_out, op.fiber_in);
  for (const auto& [alpha, mat] : op.coeffs) m += alpha.monomial(xi) * mat;
  return m;
}

void check_nonzero(const RealVector& xi) {
  if (xi.norm() == 0.0) throw std::invalid_argument("symbol: xi must be nonzero");
}

} // namespace

ComplexMatrix symbol_matrix(const DiffOp& op, const RealVector& xi) {
  check_nonzero(xi);
  if (xi.size() != op.dim) throw std::invalid_argument("symbol: xi dimension mismatch");
  return two_pi_i_pow(op.order) * reduced_symbol(op, xi).cast<std::complex<double>>();
}

SymbolSample symbol(const DiffOp& op, const RealVector& xi, double tol) {
  check_nonzero(xi);
  SymbolSample s;
  s.xi = xi / xi.norm();
  s.matrix = symbol_matrix(op, s.xi);
  Eigen::JacobiSVD<ComplexMatrix> svd(s.matrix, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  s.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) >= tol * smax && sv(i) > 0.0) ++rank;
  s.rank = rank;
  s.kernel_basis = svd.matrixV().rightCols(op.fiber_in - rank);
  return s;
}

ComplexMatrix projector_symbol(const DiffOp& op, const RealVector& xi, double tol) {
  const SymbolSample s = symbol(op, xi, tol);
  return s.kernel_basis * s.kernel_basis.adjoint();
}

ComplexMatrix pseudo_inverse_symbol(const DiffOp& op, const RealVector& xi, double tol) {
  check_nonzero(xi);
  const ComplexMatrix m = symbol_matrix(op, xi);
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  Eigen::VectorXcd inv = Eigen::VectorXcd::Zero(sv.size());
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) >= tol * smax && sv(i) > 0.0) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

Eigen::MatrixXd real_kernel_basis(const DiffOp& op, const RealVector& xi, double tol) {
  check_nonzero(xi);
  const RealVector u = xi / xi.norm();
  const Eigen::MatrixXd m = reduced_symbol(op, u);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) >= tol * smax && sv(i) > 0.0) ++rank;
  return svd.matrixV().rightCols(op.fiber_in - rank);
}

std::vector<RealVector> sample_directions(int dim, int n_samples, unsigned seed) {
  std::vector<RealVector> dirs;
  // Signed axes.
  for (int a = 0; a < dim; ++a)
    for (int s : {+1, -1}) {
      RealVector v = RealVector::Zero(dim);
      v(a) = s;
      dirs.push_back(v);
    }
  // Integer lattice directions with |xi|_inf <= 2 (torus frequencies are the
  // directions used downstream).
  if (dim <= 3) {
    std::vector<int> idx(static_cast<std::size_t>(dim), -2);
    while (true) {
      RealVector v(dim);
      for (int a = 0; a < dim; ++a) v(a) = idx[static_cast<std::size_t>(a)];
      if (v.norm() > 0.0) dirs.push_back(v / v.norm());
      int a = dim - 1;
      while (a >= 0 && idx[static_cast<std::size_t>(a)] == 2) {
        idx[static_cast<std::size_t>(a)] = -2;
        --a;
      }
      if (a < 0) break;
      ++idx[static_cast<std::size_t>(a)];
    }
  }
  // Quasi-uniform lattice.
  const int n_quasi = std::max(0, n_samples / 2 - static_cast<int>(dirs.size()));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n_quasi; ++i) {
    RealVector v(dim);
    if (dim == 1) {
      v(0) = i % 2 == 0 ? 1.0 : -1.0;
    } else if (dim == 2) {
      const double t = 2.0 * std::numbers::pi * (i + 0.5) / n_quasi;
      v << std::cos(t), std::sin(t);
    } else if (dim == 3) {
      const double y = 1.0 - 2.0 * (i + 0.5) / n_quasi;
      const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
      const double t = golden * i;
      v << r * std::cos(t), y, r * std::sin(t);
    } else {
      v.setZero();
      v(i % dim) = 1.0; // higher dims fall back to axes; random fills below
    }
    dirs.push_back(v);
  }
  // Seeded uniform directions.
  std::mt19937_64 rng(seed);
  auto unit = [&rng]() {
    // uniform in [-1, 1) from the top 53 bits
    return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
  };
  while (static_cast<int>(dirs.size()) < n_samples) {
    RealVector v(dim);
    double nrm2 = 0.0;
    do {
      for (int a = 0; a < dim; ++a) v(a) = unit();
      nrm2 = v.squaredNorm();
    } while (nrm2 < 1e-8 || nrm2 > 1.0);
    dirs.push_back(v / std::sqrt(nrm2));
  }
  return dirs;
}

RankReport constant_rank_check(const DiffOp& op, int n_samples, double tol, unsigned seed) {
  if (n_samples < 1) throw std::invalid_argument("constant_rank_check: n_samples >= 1");
  if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("constant_rank_check: tol in (0,1)");
  const auto dirs = sample_directions(op.dim, n_samples, seed);
  std::vector<int> ranks(dirs.size());
  kernels::parallel_for(dirs.size(), [&](std::size_t i) {
    ranks[i] = symbol(op, dirs[i], tol).rank;
  });
  RankReport rep;
  rep.tol = tol;
  rep.sample_count = static_cast<int>(dirs.size());
  rep.min_rank = ranks[0];
  rep.max_rank = ranks[0];
  std::size_t imin = 0, imax = 0;
  for (std::size_t i = 1; i < ranks.size(); ++i) {
    if (ranks[i] < rep.min_rank) { rep.min_rank = ranks[i]; imin = i; }
    if (ranks[i] > rep.max_rank) { rep.max_rank = ranks[i]; imax = i; }
  }
  rep.is_constant_rank = rep.min_rank == rep.max_rank;
  rep.witness_xis = {dirs[imin], dirs[imax]};
  return rep;
}

std::vector<std::pair<RealVector, Eigen::MatrixXd>>
wave_cone_sample(const DiffOp& op, const std::vector<RealVector>& xis, double tol) {
  std::vector<std::pair<RealVector, Eigen::MatrixXd>> out(xis.size());
  kernels::parallel_for(xis.size(), [&](std::size_t i) {
    const RealVector u = xis[i] / xis[i].norm();
    out[i] = {u, real_kernel_basis(op, u, tol)};
  });
  return out;
}

CompatReport potential_compat_check(const DiffOp& opA, const DiffOp& opB, int n_samples,
                                    double tol, unsigned seed) {
  if (opB.fiber_out != opA.fiber_in)
    throw std::invalid_argument("potential_compat_check: fiber dimensions do not compose");
  if (opB.dim != opA.dim)
    throw std::invalid_argument("potential_compat_check: spatial dimension mismatch");
  const auto dirs = sample_directions(opA.dim, n_samples, seed);
  std::vector<double> residual(dirs.size());
  std::vector<int> defect(dirs.size());
  kernels::parallel_for(dirs.size(), [&](std::size_t i) {
    const ComplexMatrix A = symbol_matrix(opA, dirs[i]);
    const SymbolSample sa = symbol(opA, dirs[i], tol);
    const ComplexMatrix B = symbol_matrix(opB, dirs[i]);
    Eigen::JacobiSVD<ComplexMatrix> svdB(B);
    const auto& sv = svdB.singularValues();
    const double bmax = sv.size() > 0 ? sv(0) : 0.0;
    int rankB = 0;
    for (int r = 0; r < sv.size(); ++r)
      if (sv(r) >= tol * bmax && sv(r) > 0.0) ++rankB;
    const int kerA = opA.fiber_in - sa.rank;
    defect[i] = rankB != kerA ? 1 : 0;
    const double denom = A.norm() * B.norm();
    residual[i] = denom > 0.0 ? (A * B).norm() / denom : 0.0;
  });
  CompatReport rep;
  rep.sample_count = static_cast<int>(dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    rep.max_product_residual = std::max(rep.max_product_residual, residual[i]);
    rep.rank_defect_count += defect[i];
  }
  rep.compatible = rep.max_product_residual <= tol && rep.rank_defect_count == 0;
  return rep;
}

} // namespace afree
