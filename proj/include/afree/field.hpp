#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace afree {

/// Uniform grid on the unit torus Q=(0,1)^d with n points per axis.
/// n must be odd so the frequency set {-(n-1)/2,...,(n-1)/2}^d is symmetric.
struct Grid {
  int dim = 0;
  int n = 0;

  Grid() = default;
  Grid(int d, int n_) : dim(d), n(n_) {
    if (d < 1) throw std::invalid_argument("grid: dimension must be >= 1");
    if (n_ < 3 || n_ % 2 == 0) throw std::invalid_argument("grid: n must be odd and >= 3");
  }

  long long points() const {
    long long p = 1;
    for (int a = 0; a < dim; ++a) p *= n;
    return p;
  }
  int half_band() const { return (n - 1) / 2; }
  double spacing() const { return 1.0 / n; }

  bool operator==(const Grid& o) const { return dim == o.dim && n == o.n; }
  bool operator!=(const Grid& o) const { return !(*this == o); }

  /// Integer frequency of storage index m along one axis (DFT order).
  int freq_of_index(int m) const { return m <= half_band() ? m : m - n; }
  /// Storage index of an integer frequency in [-(n-1)/2, (n-1)/2].
  int index_of_freq(int f) const { return f >= 0 ? f : f + n; }

  /// Decode a flat row-major point index into per-axis indices.
  void decode(long long flat, int* idx) const {
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(flat % n);
      flat /= n;
    }
  }
};

/// Real field sampled on the grid; samples are row-major over the grid with
/// the fiber index fastest.
struct PeriodicField {
  Grid grid;
  int fiber = 0;
  std::vector<double> samples;

  PeriodicField() = default;
  PeriodicField(const Grid& g, int N)
      : grid(g), fiber(N), samples(static_cast<std::size_t>(g.points()) * N, 0.0) {
    if (N < 1) throw std::invalid_argument("field: fiber must be >= 1");
  }

  double* at(long long point) { return samples.data() + point * fiber; }
  const double* at(long long point) const { return samples.data() + point * fiber; }

  Eigen::Map<const Eigen::VectorXd> value(long long point) const {
    return {at(point), fiber};
  }
  Eigen::Map<Eigen::VectorXd> value(long long point) {
    return {at(point), fiber};
  }
};

/// Fourier-coefficient form; coeffs(xi) approximates the coefficient
/// int_Q psi(x) e^{-2 pi i xi . x} dx, stored in DFT index order.
struct SpectralField {
  Grid grid;
  int fiber = 0;
  std::vector<std::complex<double>> coeffs;

  SpectralField() = default;
  SpectralField(const Grid& g, int N)
      : grid(g), fiber(N), coeffs(static_cast<std::size_t>(g.points()) * N, {0.0, 0.0}) {
    if (N < 1) throw std::invalid_argument("field: fiber must be >= 1");
  }

  std::complex<double>* at(long long mode) { return coeffs.data() + mode * fiber; }
  const std::complex<double>* at(long long mode) const { return coeffs.data() + mode * fiber; }
};

/// Flat mode index of an integer frequency vector.
long long mode_index(const Grid& g, const int* freq);

/// Iterate all modes, calling f(flat_index, freq_vector). freq points into a
/// scratch buffer owned by the loop; copy it if it must outlive the call.
void for_each_mode(const Grid& g, const std::function<void(long long, const int*)>& f);

/// Euclidean norm of the integer frequency vector of a flat mode index.
double mode_norm(const Grid& g, long long flat);

} // namespace afree
