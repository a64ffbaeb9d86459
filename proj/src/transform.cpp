#include "afree/transform.hpp"

#include <cmath>

#include "afree/kernels.hpp"
#include "afree/rng.hpp"
#include "afree/symbol.hpp"

namespace afree {

namespace {

thread_local double g_last_imag_residue = 0.0;

void run_passes(std::complex<double>* data, const Grid& g, int fiber, int sign) {
  const auto tw = kernels::make_twiddle(g.n, sign);
  for (int axis = 0; axis < g.dim; ++axis)
    kernels::dft_axis_pass(data, tw.data(), g.n, axis, g.dim, fiber);
}

void check_finite(const PeriodicField& f) {
  for (double v : f.samples)
    if (!std::isfinite(v)) throw std::invalid_argument("field: non-finite samples");
}

} // namespace

SpectralField transform(const PeriodicField& field) {
  check_finite(field);
  SpectralField out(field.grid, field.fiber);
  const std::size_t total = field.samples.size();
  kernels::parallel_for(total, [&](std::size_t i) { out.coeffs[i] = field.samples[i]; });
  run_passes(out.coeffs.data(), field.grid, field.fiber, -1);
  const double scale = 1.0 / static_cast<double>(field.grid.points());
  kernels::parallel_for(total, [&](std::size_t i) { out.coeffs[i] *= scale; });
  return out;
}

PeriodicField inverse_transform(const SpectralField& field) {
  std::vector<std::complex<double>> work(field.coeffs);
  run_passes(work.data(), field.grid, field.fiber, +1);
  PeriodicField out(field.grid, field.fiber);
  double imax = 0.0;
  for (std::size_t i = 0; i < work.size(); ++i) {
    out.samples[i] = work[i].real();
    imax = std::max(imax, std::abs(work[i].imag()));
  }
  g_last_imag_residue = imax;
  return out;
}

double last_inverse_imag_residue() { return g_last_imag_residue; }

SpectralField apply_operator(const DiffOp& op, const SpectralField& field) {
  if (op.dim != field.grid.dim) throw std::invalid_argument("apply_operator: dimension mismatch");
  if (op.fiber_in != field.fiber) throw std::invalid_argument("apply_operator: fiber mismatch");
  SpectralField out(field.grid, op.fiber_out);
  const Grid& g = field.grid;
  kernels::parallel_for(static_cast<std::size_t>(g.points()), [&](std::size_t i) {
    const long long flat = static_cast<long long>(i);
    std::vector<int> idx(static_cast<std::size_t>(g.dim));
    g.decode(flat, idx.data());
    RealVector xi(g.dim);
    bool zero = true;
    for (int a = 0; a < g.dim; ++a) {
      xi(a) = g.freq_of_index(idx[static_cast<std::size_t>(a)]);
      zero = zero && xi(a) == 0.0;
    }
    Eigen::Map<const Eigen::VectorXcd> in(field.at(flat), field.fiber);
    Eigen::Map<Eigen::VectorXcd> dst(out.at(flat), out.fiber);
    if (zero) {
      dst.setZero(); // homogeneous symbol vanishes at xi = 0
      return;
    }
    dst = symbol_matrix(op, xi) * in;
  });
  return out;
}

PeriodicField apply_operator(const DiffOp& op, const PeriodicField& field) {
  return inverse_transform(apply_operator(op, transform(field)));
}

Eigen::VectorXd field_mean(const PeriodicField& field) {
  Eigen::VectorXd mean(field.fiber);
  const long long pts = field.grid.points();
  for (int c = 0; c < field.fiber; ++c) {
    mean(c) = kernels::reduce_sum(static_cast<std::size_t>(pts), [&](std::size_t p) {
                return field.samples[p * static_cast<std::size_t>(field.fiber) + static_cast<std::size_t>(c)];
              }) /
              static_cast<double>(pts);
  }
  return mean;
}

PeriodicField zero_mean(const PeriodicField& field) {
  PeriodicField out = field;
  const Eigen::VectorXd mean = field_mean(field);
  const long long pts = field.grid.points();
  kernels::parallel_for(static_cast<std::size_t>(pts), [&](std::size_t p) {
    for (int c = 0; c < field.fiber; ++c) out.at(static_cast<long long>(p))[c] -= mean(c);
  });
  return out;
}

SpectralField zero_mean(const SpectralField& field) {
  SpectralField out = field;
  for (int c = 0; c < field.fiber; ++c) out.coeffs[static_cast<std::size_t>(c)] = 0.0;
  return out;
}

double l2_norm(const SpectralField& field) {
  const double s = kernels::reduce_sum(field.coeffs.size(), [&](std::size_t i) {
    return std::norm(field.coeffs[i]);
  });
  return std::sqrt(s);
}

double l2_norm(const PeriodicField& field) {
  const double s = kernels::reduce_sum(field.samples.size(), [&](std::size_t i) {
    return field.samples[i] * field.samples[i];
  });
  return std::sqrt(s / static_cast<double>(field.grid.points()));
}

PeriodicField random_afree_field(const DiffOp& op, const Grid& grid, int band,
                                 unsigned long long seed, double amplitude) {
  if (band < 1) throw std::invalid_argument("random_afree_field: band must be >= 1");
  if (band > grid.half_band())
    throw std::invalid_argument("random_afree_field: band exceeds the grid frequency set");
  if (op.dim != grid.dim) throw std::invalid_argument("random_afree_field: dimension mismatch");

  SpectralField out(grid, op.fiber_in);
  Rng rng(seed);

  // Enumerate the band cube in lexicographic order; keep the canonical half
  // (first nonzero frequency positive) and mirror the conjugate.
  std::vector<int> freq(static_cast<std::size_t>(grid.dim), -band);
  bool any_kernel = false;
  while (true) {
    int first_nonzero = 0;
    for (int a = 0; a < grid.dim; ++a) {
      if (freq[static_cast<std::size_t>(a)] != 0) {
        first_nonzero = freq[static_cast<std::size_t>(a)];
        break;
      }
    }
    if (first_nonzero > 0) {
      RealVector xi(grid.dim);
      for (int a = 0; a < grid.dim; ++a) xi(a) = freq[static_cast<std::size_t>(a)];
      Eigen::VectorXcd gvec(op.fiber_in);
      for (int c = 0; c < op.fiber_in; ++c) gvec(c) = {rng.gaussian(), rng.gaussian()};
      const ComplexMatrix P = projector_symbol(op, xi);
      const Eigen::VectorXcd coef = P * gvec;
      if (coef.norm() > 1e-12 * gvec.norm()) any_kernel = true;
      const long long flat = mode_index(grid, freq.data());
      Eigen::Map<Eigen::VectorXcd>(out.at(flat), out.fiber) = coef;
      std::vector<int> nfreq(freq);
      for (auto& v : nfreq) v = -v;
      const long long nflat = mode_index(grid, nfreq.data());
      Eigen::Map<Eigen::VectorXcd>(out.at(nflat), out.fiber) = coef.conjugate();
    }
    int a = grid.dim - 1;
    while (a >= 0 && freq[static_cast<std::size_t>(a)] == band) {
      freq[static_cast<std::size_t>(a)] = -band;
      --a;
    }
    if (a < 0) break;
    ++freq[static_cast<std::size_t>(a)];
  }

  if (!any_kernel)
    throw EllipticOperatorError(
        "random_afree_field: the symbol kernel is trivial at every sampled mode "
        "(elliptic operator; only the zero field is admissible)");

  const double nrm = l2_norm(out);
  if (nrm > 0.0 && amplitude > 0.0) {
    const double s = amplitude / nrm;
    for (auto& c : out.coeffs) c *= s;
  }
  return inverse_transform(out);
}

} // namespace afree
