#include <doctest.h>

#include <cmath>
#include <numbers>

#include "afree/kernels.hpp"
#include "afree/norms.hpp"
#include "afree/rng.hpp"
#include "afree/symbol.hpp"
#include "afree/transform.hpp"

using namespace afree;

namespace {
const double kTwoPi = 2.0 * std::numbers::pi;

PeriodicField cosine_mode(const Grid& g, int fiber, int component, int axis, int freq,
                          double amplitude) {
  PeriodicField f(g, fiber);
  std::vector<int> idx(static_cast<std::size_t>(g.dim));
  for (long long q = 0; q < g.points(); ++q) {
    g.decode(q, idx.data());
    const double x = static_cast<double>(idx[static_cast<std::size_t>(axis)]) / g.n;
    f.at(q)[component] = amplitude * std::cos(kTwoPi * freq * x);
  }
  return f;
}
} // namespace

TEST_CASE("transform of elementary fields") {
  Grid g(2, 9);
  SUBCASE("constant field concentrates at xi = 0") {
    PeriodicField f(g, 2);
    for (long long q = 0; q < g.points(); ++q) {
      f.at(q)[0] = 3.25;
      f.at(q)[1] = -1.5;
    }
    const SpectralField hat = transform(f);
    CHECK(std::abs(hat.at(0)[0] - 3.25) <= 1e-13);
    CHECK(std::abs(hat.at(0)[1] + 1.5) <= 1e-13);
    double rest = 0.0;
    for (std::size_t i = 2; i < hat.coeffs.size(); ++i) rest = std::max(rest, std::abs(hat.coeffs[i]));
    CHECK(rest <= 1e-13);
  }
  SUBCASE("cos(2 pi x1) has coefficients 1/2 at +-e1") {
    const PeriodicField f = cosine_mode(g, 1, 0, 0, 1, 1.0);
    const SpectralField hat = transform(f);
    int fp[2] = {1, 0};
    int fm[2] = {-1, 0};
    CHECK(std::abs(hat.at(mode_index(g, fp))[0] - 0.5) <= 1e-13);
    CHECK(std::abs(hat.at(mode_index(g, fm))[0] - 0.5) <= 1e-13);
  }
  SUBCASE("non-finite samples rejected") {
    PeriodicField f(g, 1);
    f.samples[3] = std::nan("");
    CHECK_THROWS_AS(transform(f), std::invalid_argument);
  }
}

TEST_CASE("apply_operator") {
  SUBCASE("div of (sin 2 pi x1, 0, 0) is 2 pi cos(2 pi x1)") {
    Grid g(3, 9);
    PeriodicField f(g, 3);
    std::vector<int> idx(3);
    for (long long q = 0; q < g.points(); ++q) {
      g.decode(q, idx.data());
      f.at(q)[0] = std::sin(kTwoPi * idx[0] / g.n);
    }
    const PeriodicField out = apply_operator(make_operator("div", {{"d", 3}}), f);
    double err = 0.0;
    for (long long q = 0; q < g.points(); ++q) {
      g.decode(q, idx.data());
      err = std::max(err, std::abs(out.at(q)[0] - kTwoPi * std::cos(kTwoPi * idx[0] / g.n)));
    }
    CHECK(err <= 1e-10);
  }
  SUBCASE("curl of a gradient vanishes") {
    Grid g(2, 15);
    // random smooth periodic potential, phi in R^2
    const DiffOp grad = make_operator("grad", {{"m", 2}, {"d", 2}});
    const DiffOp curl = make_operator("curl", {{"m", 2}, {"d", 2}});
    Rng rng(12);
    PeriodicField phi(g, 2);
    for (auto& v : phi.samples) v = rng.gaussian();
    const PeriodicField psi = apply_operator(grad, phi);
    CHECK(l2_norm(apply_operator(curl, psi)) <= 1e-10 * std::max(1.0, l2_norm(psi)));
  }
  SUBCASE("wave with amplitude in the symbol kernel is annihilated") {
    Grid g(2, 15);
    const DiffOp curl = make_operator("curl", {{"m", 2}, {"d", 2}});
    RealVector xi(2);
    xi << 2, -1;
    const Eigen::MatrixXd K = real_kernel_basis(curl, xi);
    REQUIRE(K.cols() > 0);
    PeriodicField f(g, 4);
    std::vector<int> idx(2);
    for (long long q = 0; q < g.points(); ++q) {
      g.decode(q, idx.data());
      const double phase = kTwoPi * (2.0 * idx[0] - 1.0 * idx[1]) / g.n;
      for (int c = 0; c < 4; ++c) f.at(q)[c] = K(c, 0) * std::cos(phase);
    }
    CHECK(l2_norm(apply_operator(curl, f)) <= 1e-10 * l2_norm(f));
  }
  SUBCASE("dimension mismatch") {
    Grid g(2, 9);
    PeriodicField f(g, 3);
    CHECK_THROWS_AS(apply_operator(make_operator("div", {{"d", 3}}), f), std::invalid_argument);
  }
}

TEST_CASE("zero_mean") {
  Grid g(2, 9);
  Rng rng(4);
  PeriodicField f(g, 2);
  for (auto& v : f.samples) v = rng.gaussian();
  const PeriodicField z = zero_mean(f);
  CHECK(field_mean(z).cwiseAbs().maxCoeff() <= 1e-14);
  // adding a constant does not change the output
  PeriodicField shifted = f;
  for (long long q = 0; q < g.points(); ++q) shifted.at(q)[0] += 2.5;
  const PeriodicField z2 = zero_mean(shifted);
  double diff = 0.0;
  for (std::size_t i = 0; i < z.samples.size(); ++i)
    diff = std::max(diff, std::abs(z.samples[i] - z2.samples[i]));
  CHECK(diff <= 1e-12);
  // idempotence
  const PeriodicField z3 = zero_mean(z);
  diff = 0.0;
  for (std::size_t i = 0; i < z.samples.size(); ++i)
    diff = std::max(diff, std::abs(z.samples[i] - z3.samples[i]));
  CHECK(diff <= 1e-14);
}

TEST_CASE("sobolev norms") {
  Grid g(2, 9);
  SUBCASE("single cosine mode, s=-1, p=2") {
    const double lambda = 1.7;
    const PeriodicField f = cosine_mode(g, 2, 1, 0, 1, lambda);
    // coefficients lambda/2 at +-e1, multiplier 1/|xi| = 1:
    // Plancherel gives sqrt(2 (lambda/2)^2) = lambda/sqrt(2)
    CHECK(sobolev_norm(f, -1, 2.0) == doctest::Approx(lambda / std::sqrt(2.0)).epsilon(1e-12));
  }
  SUBCASE("zero field") { CHECK(sobolev_norm(PeriodicField(g, 3), -2, 4.0) == 0.0); }
  SUBCASE("W^{-1,2} is dominated by L2 on the integer lattice") {
    Rng rng(8);
    for (int t = 0; t < 5; ++t) {
      PeriodicField f(g, 2);
      for (auto& v : f.samples) v = rng.gaussian();
      const PeriodicField z = zero_mean(f);
      CHECK(sobolev_norm(z, -1, 2.0) <= lp_norm(z, 2.0) * (1.0 + 1e-12));
    }
  }
  SUBCASE("negative order requires zero mean") {
    PeriodicField f(g, 1);
    for (auto& v : f.samples) v = 1.0;
    CHECK_THROWS_AS(sobolev_norm(f, -1, 2.0), std::invalid_argument);
  }
  SUBCASE("p=2 Plancherel shortcut agrees with the multiplier route") {
    Rng rng(9);
    PeriodicField f(g, 2);
    for (auto& v : f.samples) v = rng.gaussian();
    const PeriodicField z = zero_mean(f);
    const double fast = sobolev_norm(z, -1, 2.0);
    // independent route: scale coefficients, inverse transform, grid L2
    SpectralField hat = transform(z);
    for_each_mode(g, [&](long long flat, const int*) {
      const double nrm = mode_norm(g, flat);
      for (int c = 0; c < hat.fiber; ++c)
        hat.at(flat)[c] *= nrm == 0.0 ? 0.0 : 1.0 / nrm;
    });
    const double slow = lp_norm(inverse_transform(hat), 2.0);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-10));
  }
}

TEST_CASE("v_energy") {
  Grid g(2, 9);
  SUBCASE("zero field") { CHECK(v_energy(PeriodicField(g, 3), 4.0) == 0.0); }
  SUBCASE("unit vector field at p=4 gives 2") {
    PeriodicField f(g, 3);
    for (long long q = 0; q < g.points(); ++q) f.at(q)[1] = 1.0;
    CHECK(v_energy(f, 4.0) == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("p=2 equals twice the squared L2 norm, same summation") {
    Rng rng(10);
    PeriodicField f(g, 2);
    for (auto& v : f.samples) v = rng.gaussian();
    const double n2 = lp_norm(f, 2.0);
    CHECK(v_energy(f, 2.0) == 2.0 * n2 * n2);
  }
  SUBCASE("p < 2 rejected") {
    CHECK_THROWS_AS(v_energy(PeriodicField(g, 1), 1.5), std::invalid_argument);
  }
}

TEST_CASE("mixed negative norm") {
  Grid g(2, 9);
  SUBCASE("zero field") { CHECK(mixed_negative_norm(PeriodicField(g, 2), 4.0) == 0.0); }
  SUBCASE("p=2 collapses to sqrt(2) W^{-1,2}") {
    Rng rng(11);
    PeriodicField f(g, 2);
    for (auto& v : f.samples) v = rng.gaussian();
    const PeriodicField z = zero_mean(f);
    CHECK(mixed_negative_norm(z, 2.0) ==
          doctest::Approx(std::sqrt(2.0) * sobolev_norm(z, -1, 2.0)).epsilon(1e-12));
  }
  SUBCASE("single mode assembles from the two Sobolev norms") {
    const PeriodicField f = cosine_mode(g, 2, 0, 1, 1, 0.8);
    const double n2 = sobolev_norm(f, -1, 2.0);
    const double n4 = sobolev_norm(f, -1, 4.0);
    CHECK(mixed_negative_norm(f, 4.0) ==
          doctest::Approx(std::sqrt(n2 * n2 + std::pow(n4, 4.0))).epsilon(1e-12));
  }
  SUBCASE("monotone under amplitude scaling in (0,1]") {
    Rng rng(13);
    PeriodicField f(g, 2);
    for (auto& v : f.samples) v = rng.gaussian();
    const PeriodicField z = zero_mean(f);
    const double full = mixed_negative_norm(z, 4.0);
    for (double t : {0.1, 0.5, 0.9, 1.0}) {
      PeriodicField scaled = z;
      for (auto& v : scaled.samples) v *= t;
      CHECK(mixed_negative_norm(scaled, 4.0) <= full * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("random A-free fields") {
  Grid g(2, 15);
  const DiffOp curl = make_operator("curl", {{"m", 2}, {"d", 2}});
  SUBCASE("A-free, zero mean, band-limited, normalized") {
    const PeriodicField psi = random_afree_field(curl, g, 3, 77, 2.0);
    CHECK(l2_norm(apply_operator(curl, psi)) <= 1e-9 * l2_norm(psi));
    CHECK(field_mean(psi).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(l2_norm(psi) == doctest::Approx(2.0).epsilon(1e-12));
    const SpectralField hat = transform(psi);
    double out_of_band = 0.0;
    for_each_mode(g, [&](long long flat, const int* freq) {
      for (int a = 0; a < 2; ++a)
        if (std::abs(freq[a]) > 3)
          for (int c = 0; c < 4; ++c)
            out_of_band = std::max(out_of_band, std::abs(hat.at(flat)[c]));
    });
    CHECK(out_of_band <= 1e-13);
  }
  SUBCASE("deterministic given the seed") {
    const PeriodicField a = random_afree_field(curl, g, 3, 42, 1.0);
    const PeriodicField b = random_afree_field(curl, g, 3, 42, 1.0);
    CHECK(a.samples == b.samples);
    const PeriodicField c = random_afree_field(curl, g, 3, 43, 1.0);
    bool same = true;
    for (std::size_t i = 0; i < c.samples.size(); ++i) same = same && c.samples[i] == a.samples[i];
    CHECK_FALSE(same);
  }
  SUBCASE("elliptic operator is signaled") {
    const DiffOp grad = make_operator("grad", {{"m", 2}, {"d", 2}});
    CHECK_THROWS_AS(random_afree_field(grad, g, 3, 1, 1.0), EllipticOperatorError);
  }
}
