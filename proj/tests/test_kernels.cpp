#include <doctest.h>

#include <complex>

#include "afree/field.hpp"
#include "afree/kernels.hpp"
#include "afree/rng.hpp"
#include "afree/transform.hpp"

using namespace afree;

TEST_CASE("blocked reduction matches the serial reference bit for bit") {
  Rng rng(42);
  std::vector<double> data(10000);
  for (auto& v : data) v = rng.gaussian();
  auto f = [&](std::size_t i) { return data[i]; };
  const double par = kernels::reduce_sum(data.size(), f);
  const double ser = ref::reduce_sum(data.size(), f);
  CHECK(par == ser);
}

TEST_CASE("separable DFT agrees with the direct definition") {
  for (int dim : {1, 2, 3}) {
    const int n = dim == 3 ? 5 : 9;
    const int fiber = 2;
    Grid g(dim, n);
    Rng rng(7 + dim);
    std::vector<std::complex<double>> in(static_cast<std::size_t>(g.points()) * fiber);
    for (auto& c : in) c = {rng.gaussian(), rng.gaussian()};

    std::vector<std::complex<double>> direct(in.size());
    ref::dft_direct(in.data(), direct.data(), n, dim, fiber, -1);

    std::vector<std::complex<double>> sep(in);
    const auto tw = kernels::make_twiddle(n, -1);
    for (int axis = 0; axis < dim; ++axis)
      kernels::dft_axis_pass(sep.data(), tw.data(), n, axis, dim, fiber);

    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < in.size(); ++i) {
      err = std::max(err, std::abs(sep[i] - direct[i]));
      scale = std::max(scale, std::abs(direct[i]));
    }
    CHECK(err <= 1e-12 * scale);
  }
}

TEST_CASE("transform round trip and Plancherel") {
  Grid g(2, 9);
  PeriodicField f(g, 3);
  Rng rng(3);
  for (auto& v : f.samples) v = rng.gaussian();

  const SpectralField hat = transform(f);
  const PeriodicField back = inverse_transform(hat);
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < f.samples.size(); ++i) {
    err = std::max(err, std::abs(back.samples[i] - f.samples[i]));
    scale = std::max(scale, std::abs(f.samples[i]));
  }
  CHECK(err <= 1e-12 * scale);

  const double grid_mean_sq = kernels::reduce_sum(f.samples.size(), [&](std::size_t i) {
                                return f.samples[i] * f.samples[i];
                              }) / static_cast<double>(g.points());
  double coeff_sq = 0.0;
  for (const auto& c : hat.coeffs) coeff_sq += std::norm(c);
  CHECK(grid_mean_sq == doctest::Approx(coeff_sq).epsilon(1e-10));
}

TEST_CASE("mode indexing round trip") {
  Grid g(3, 7);
  for_each_mode(g, [&](long long flat, const int* freq) {
    CHECK(mode_index(g, freq) == flat);
    double s = 0.0;
    for (int a = 0; a < 3; ++a) s += static_cast<double>(freq[a]) * freq[a];
    CHECK(mode_norm(g, flat) == doctest::Approx(std::sqrt(s)));
  });
}
