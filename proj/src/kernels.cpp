#include "afree/kernels.hpp"

#include <cmath>
#include <numbers>

#include <omp.h>

namespace afree::kernels {

double reduce_sum(std::size_t count, const std::function<double(std::size_t)>& f) {
  if (count == 0) return 0.0;
  const std::size_t nblocks = (count + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
    const std::size_t hi = std::min(lo + kReduceBlock, count);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += f(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double reduce_sum(const double* data, std::size_t count) {
  return reduce_sum(count, [data](std::size_t i) { return data[i]; });
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& f) {
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(count); ++i)
    f(static_cast<std::size_t>(i));
}

std::vector<std::complex<double>> make_twiddle(int n, int sign) {
  std::vector<std::complex<double>> w(static_cast<std::size_t>(n) * n);
  for (int m = 0; m < n; ++m)
    for (int j = 0; j < n; ++j) {
      const long long r = (static_cast<long long>(m) * j) % n;
      const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(r) / n;
      w[static_cast<std::size_t>(m) * n + j] = {std::cos(angle), std::sin(angle)};
    }
  return w;
}

void dft_axis_pass(std::complex<double>* data, const std::complex<double>* twiddle,
                   int n, int axis, int dim, int fiber) {
  // Strides for row-major [i_0]...[i_{d-1}][c] storage.
  long long stride = fiber;
  for (int a = dim - 1; a > axis; --a) stride *= n;
  long long npoints = 1;
  for (int a = 0; a < dim; ++a) npoints *= n;
  const long long nlines = npoints / n * fiber;

#pragma omp parallel
  {
    std::vector<std::complex<double>> line(static_cast<std::size_t>(n));
#pragma omp for schedule(static)
    for (long long li = 0; li < nlines; ++li) {
      // Decompose the line id into (outer, component, inner) so that the
      // base points enumerate all positions with index 0 along `axis`.
      const long long inner_count = stride; // includes fiber
      const long long inner = li % inner_count;
      const long long outer = li / inner_count;
      std::complex<double>* base = data + outer * stride * n + inner;
      for (int j = 0; j < n; ++j) line[static_cast<std::size_t>(j)] = base[j * stride];
      for (int m = 0; m < n; ++m) {
        const std::complex<double>* wrow = twiddle + static_cast<std::size_t>(m) * n;
        std::complex<double> acc{0.0, 0.0};
        for (int j = 0; j < n; ++j) acc += wrow[j] * line[static_cast<std::size_t>(j)];
        base[m * stride] = acc;
      }
    }
  }
}

} // namespace afree::kernels

namespace afree::ref {

double reduce_sum(std::size_t count, const std::function<double(std::size_t)>& f) {
  const std::size_t kb = kernels::kReduceBlock;
  double total = 0.0;
  for (std::size_t lo = 0; lo < count; lo += kb) {
    const std::size_t hi = std::min(lo + kb, count);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += f(i);
    total += s;
  }
  return total;
}

void dft_direct(const std::complex<double>* in, std::complex<double>* out,
                int n, int dim, int fiber, int sign) {
  long long npoints = 1;
  for (int a = 0; a < dim; ++a) npoints *= n;
  std::vector<int> mi(static_cast<std::size_t>(dim)), ji(static_cast<std::size_t>(dim));
  for (long long m = 0; m < npoints; ++m) {
    long long r = m;
    for (int a = dim - 1; a >= 0; --a) { mi[static_cast<std::size_t>(a)] = static_cast<int>(r % n); r /= n; }
    for (int c = 0; c < fiber; ++c) {
      std::complex<double> acc{0.0, 0.0};
      for (long long j = 0; j < npoints; ++j) {
        long long s = j;
        long long dot = 0;
        for (int a = dim - 1; a >= 0; --a) {
          ji[static_cast<std::size_t>(a)] = static_cast<int>(s % n);
          s /= n;
          dot += static_cast<long long>(mi[static_cast<std::size_t>(a)]) * ji[static_cast<std::size_t>(a)];
        }
        const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(dot % n) / n;
        acc += in[j * fiber + c] * std::complex<double>{std::cos(angle), std::sin(angle)};
      }
      out[m * fiber + c] = acc;
    }
  }
}

} // namespace afree::ref
