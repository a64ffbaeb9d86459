#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

// Data-parallel cores shared by the whole toolkit. Every kernel here has a
// plain serial twin in afree::ref used as the test oracle; the OpenMP
// versions must reproduce the reference bit-for-bit, so reductions are
// blocked with a fixed block size and the per-block partials are summed in
// block order regardless of thread count.

namespace afree::kernels {

inline constexpr std::size_t kReduceBlock = 1024;

// Deterministic sum of f(i) for i in [0, count).
double reduce_sum(std::size_t count, const std::function<double(std::size_t)>& f);

// Deterministic sum over a raw array.
double reduce_sum(const double* data, std::size_t count);

// Apply f(i) for i in [0, count) in parallel; f must be reentrant and
// write only to disjoint locations.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& f);

// One separable DFT pass along `axis` of a complex rank-d array with
// `fiber` interleaved components per point (row-major, last axis fastest,
// component index fastest of all). `twiddle` is the n-by-n matrix
// W[m][j] = exp(sign * 2*pi*i * m * j / n) stored row-major.
void dft_axis_pass(std::complex<double>* data, const std::complex<double>* twiddle,
                   int n, int axis, int dim, int fiber);

// Twiddle table for dft_axis_pass; sign=-1 forward, +1 inverse. Angles are
// reduced mod n before calling exp so large m*j products lose no precision.
std::vector<std::complex<double>> make_twiddle(int n, int sign);

} // namespace afree::kernels

namespace afree::ref {

// Serial reference reduction (straight left-to-right loop over blocks of
// kernels::kReduceBlock; same association as the parallel kernel).
double reduce_sum(std::size_t count, const std::function<double(std::size_t)>& f);

// Direct evaluation of the full d-dimensional DFT from its definition:
// out[m] = sum_j in[j] * exp(sign*2*pi*i*<m,j>/n). O((n^d)^2) per component;
// test oracle only.
void dft_direct(const std::complex<double>* in, std::complex<double>* out,
                int n, int dim, int fiber, int sign);

} // namespace afree::ref
