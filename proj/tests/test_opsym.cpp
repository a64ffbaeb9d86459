#include <doctest.h>

#include <complex>
#include <numbers>

#include "afree/rng.hpp"
#include "afree/symbol.hpp"

using namespace afree;

namespace {
const double kTwoPi = 2.0 * std::numbers::pi;

RealVector vec(std::initializer_list<double> v) {
  RealVector x(static_cast<int>(v.size()));
  int i = 0;
  for (double a : v) x(i++) = a;
  return x;
}
} // namespace

TEST_CASE("div builtin: unit row coefficients") {
  const DiffOp op = make_operator("div", {{"d", 3}});
  CHECK(op.fiber_in == 3);
  CHECK(op.fiber_out == 1);
  CHECK(op.order == 1);
  for (int a = 0; a < 3; ++a) {
    const auto& A = op.coeffs.at(unit_index(3, a));
    for (int c = 0; c < 3; ++c) CHECK(A(0, c) == (c == a ? 1.0 : 0.0));
  }
}

TEST_CASE("planar curl symbol is 2 pi i (xi2 l1 - xi1 l2)") {
  const DiffOp op = make_operator("curl", {{"m", 1}, {"d", 2}});
  CHECK(op.fiber_out == 1);
  const auto m = symbol_matrix(op, vec({0.3, -0.7}));
  CHECK(m(0, 0).imag() == doctest::Approx(kTwoPi * -0.7));
  CHECK(m(0, 1).imag() == doctest::Approx(kTwoPi * -0.3));
  CHECK(m(0, 0).real() == doctest::Approx(0.0));
}

TEST_CASE("coefficient order mismatch is rejected") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(1, 2);
  std::vector<std::pair<MultiIndex, Eigen::MatrixXd>> table;
  table.emplace_back(MultiIndex({2, 0}), m);
  table.emplace_back(MultiIndex({1, 0}), m);
  CHECK_THROWS_WITH_AS(make_operator(2, 2, 1, table), "coefficient order mismatch",
                       std::invalid_argument);
}

TEST_CASE("unknown tag and zero coefficients are rejected") {
  CHECK_THROWS_AS(make_operator("rot"), std::invalid_argument);
  std::vector<std::pair<MultiIndex, Eigen::MatrixXd>> table;
  table.emplace_back(MultiIndex({1, 0}), Eigen::MatrixXd::Zero(1, 2));
  CHECK_THROWS_AS(make_operator(2, 2, 1, table), std::invalid_argument);
}

TEST_CASE("symbol samples: div, curl, grad") {
  SUBCASE("div d=3 at e1") {
    const SymbolSample s = symbol(make_operator("div", {{"d", 3}}), vec({1, 0, 0}));
    CHECK(s.rank == 1);
    CHECK(s.matrix(0, 0) == std::complex<double>(0.0, kTwoPi));
    CHECK(std::abs(s.matrix(0, 1)) == 0.0);
    REQUIRE(s.kernel_basis.cols() == 2);
    // kernel = span{e2, e3}: first component of every kernel vector vanishes
    CHECK(std::abs(s.kernel_basis(0, 0)) <= 1e-12);
    CHECK(std::abs(s.kernel_basis(0, 1)) <= 1e-12);
  }
  SUBCASE("curl m=1 d=2 at (1,0): kernel is span{xi}") {
    const SymbolSample s = symbol(make_operator("curl", {{"m", 1}, {"d", 2}}), vec({1, 0}));
    REQUIRE(s.kernel_basis.cols() == 1);
    CHECK(std::abs(s.kernel_basis(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(s.kernel_basis(1, 0)) <= 1e-12);
  }
  SUBCASE("grad scalar d=2 at (0,1): injective column") {
    const SymbolSample s = symbol(make_operator("grad", {{"m", 1}, {"d", 2}}), vec({0, 1}));
    CHECK(s.rank == 1);
    CHECK(s.kernel_basis.cols() == 0);
    CHECK(s.matrix(1, 0) == std::complex<double>(0.0, kTwoPi));
  }
  SUBCASE("xi = 0 rejected") {
    CHECK_THROWS_AS(symbol(make_operator("div", {{"d", 3}}), vec({0, 0, 0})),
                    std::invalid_argument);
  }
}

TEST_CASE("constant rank checks") {
  CHECK(constant_rank_check(make_operator("curl", {{"m", 2}, {"d", 2}}), 500).is_constant_rank);
  const RankReport div3 = constant_rank_check(make_operator("div", {{"d", 3}}), 500);
  CHECK(div3.min_rank == 1);
  CHECK(div3.max_rank == 1);

  // symbol diag(xi1, xi2): rank drops to 1 on the axes
  Eigen::MatrixXd A1 = Eigen::MatrixXd::Zero(2, 2), A2 = Eigen::MatrixXd::Zero(2, 2);
  A1(0, 0) = 1.0;
  A2(1, 1) = 1.0;
  std::vector<std::pair<MultiIndex, Eigen::MatrixXd>> table{{MultiIndex({1, 0}), A1},
                                                            {MultiIndex({0, 1}), A2}};
  const RankReport r = constant_rank_check(make_operator(2, 2, 2, table, "diag"), 500);
  CHECK_FALSE(r.is_constant_rank);
  CHECK(r.min_rank == 1);
  CHECK(r.max_rank == 2);
}

TEST_CASE("wave cone samples") {
  SUBCASE("curl 2x2: every kernel element is rank one") {
    const DiffOp op = make_operator("curl", {{"m", 2}, {"d", 2}});
    const auto dirs = sample_directions(2, 40);
    for (const auto& [xi, basis] : wave_cone_sample(op, dirs)) {
      REQUIRE(basis.cols() == 2);
      for (int c = 0; c < basis.cols(); ++c) {
        Eigen::Matrix2d F;
        F << basis(0, c), basis(1, c), basis(2, c), basis(3, c);
        CHECK(std::abs(F.determinant()) <= 1e-12);
        // and the row space is along xi
        CHECK(std::abs(F.row(0).dot(Eigen::Vector2d(-xi(1), xi(0)))) <= 1e-10);
      }
    }
  }
  SUBCASE("div d=3: union over two directions spans R^3") {
    const DiffOp op = make_operator("div", {{"d", 3}});
    const auto cone = wave_cone_sample(op, {vec({1, 0, 0}), vec({0, 1, 1})});
    Eigen::MatrixXd all(3, 4);
    all << cone[0].second, cone[1].second;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(all);
    CHECK(svd.singularValues()(2) > 1e-8);
  }
  SUBCASE("empty input") {
    CHECK(wave_cone_sample(make_operator("div", {{"d", 3}}), {}).empty());
  }
}

TEST_CASE("pseudo-inverse of the gradient symbol") {
  const DiffOp grad = make_operator("grad", {{"m", 1}, {"d", 2}});
  SUBCASE("closed form at (1,0)") {
    const ComplexMatrix Bd = pseudo_inverse_symbol(grad, vec({1, 0}));
    REQUIRE(Bd.rows() == 1);
    REQUIRE(Bd.cols() == 2);
    // (1,0)/(2 pi i) as a row
    CHECK(std::abs(Bd(0, 0) - std::complex<double>(0.0, -1.0 / kTwoPi)) <= 1e-14);
    CHECK(std::abs(Bd(0, 1)) <= 1e-14);
  }
  SUBCASE("(-l)-homogeneity") {
    const ComplexMatrix a = pseudo_inverse_symbol(grad, vec({2, 0}));
    const ComplexMatrix b = pseudo_inverse_symbol(grad, vec({1, 0}));
    CHECK((a - 0.5 * b).norm() <= 1e-14);
  }
}

TEST_CASE("Moore-Penrose identities hold for builtin symbols") {
  Rng rng(99);
  for (const char* tag : {"grad", "curl", "div", "curl3", "symgrad", "curlcurl"}) {
    std::map<std::string, int> params;
    if (std::string(tag) == "grad" || std::string(tag) == "curl") params = {{"m", 2}, {"d", 2}};
    if (std::string(tag) == "div" || std::string(tag) == "curl3") params = {{"d", 3}};
    const DiffOp op = make_operator(tag, params);
    for (int t = 0; t < 25; ++t) {
      RealVector xi(op.dim);
      for (int a = 0; a < op.dim; ++a) xi(a) = rng.gaussian();
      if (xi.norm() < 1e-3) continue;
      const ComplexMatrix B = symbol_matrix(op, xi);
      const ComplexMatrix D = pseudo_inverse_symbol(op, xi);
      const double scale = B.norm() * std::max(1.0, D.norm());
      CHECK((B * D * B - B).norm() <= 1e-10 * scale);
      CHECK((D * B * D - D).norm() <= 1e-10 * scale);
      CHECK(((B * D).adjoint() - B * D).norm() <= 1e-10 * scale);
      CHECK(((D * B).adjoint() - D * B).norm() <= 1e-10 * scale);
    }
  }
}

TEST_CASE("projector properties") {
  SUBCASE("div d=3 at (0,0,1) projects onto xi-perp") {
    const ComplexMatrix P = projector_symbol(make_operator("div", {{"d", 3}}), vec({0, 0, 1}));
    ComplexMatrix expected = ComplexMatrix::Zero(3, 3);
    expected(0, 0) = 1.0;
    expected(1, 1) = 1.0;
    CHECK((P - expected).norm() <= 1e-12);
  }
  SUBCASE("idempotent, Hermitian, annihilated at 100 random directions") {
    const DiffOp op = make_operator("curl", {{"m", 2}, {"d", 2}});
    Rng rng(5);
    for (int t = 0; t < 100; ++t) {
      RealVector xi(2);
      xi << rng.gaussian(), rng.gaussian();
      if (xi.norm() < 1e-3) continue;
      const ComplexMatrix P = projector_symbol(op, xi);
      CHECK((P * P - P).norm() <= 1e-12);
      CHECK((P - P.adjoint()).norm() <= 1e-12);
      const ComplexMatrix A = symbol_matrix(op, xi);
      CHECK((A * P).norm() <= 1e-10 * A.norm());
    }
  }
  SUBCASE("curl 2x2 at (1,0): trace equals the kernel dimension 2") {
    const ComplexMatrix P =
        projector_symbol(make_operator("curl", {{"m", 2}, {"d", 2}}), vec({1, 0}));
    CHECK(P.trace().real() == doctest::Approx(2.0));
    CHECK(P.trace().imag() == doctest::Approx(0.0));
  }
  SUBCASE("0-homogeneous") {
    const DiffOp op = make_operator("curlcurl", {{"d", 2}});
    const ComplexMatrix a = projector_symbol(op, vec({0.4, -1.1}));
    const ComplexMatrix b = projector_symbol(op, vec({0.8, -2.2}));
    CHECK((a - b).norm() <= 1e-12);
  }
}

TEST_CASE("symbol homogeneity of degree k") {
  Rng rng(17);
  for (const char* tag : {"div", "curlcurl"}) {
    const DiffOp op = make_operator(tag, std::string(tag) == "div"
                                             ? std::map<std::string, int>{{"d", 3}}
                                             : std::map<std::string, int>{{"d", 2}});
    for (int t = 0; t < 20; ++t) {
      RealVector xi(op.dim);
      for (int a = 0; a < op.dim; ++a) xi(a) = rng.gaussian();
      if (xi.norm() < 1e-3) continue;
      const double s = 0.5 + rng.uniform();
      const ComplexMatrix m1 = symbol_matrix(op, s * xi);
      const ComplexMatrix m2 = std::pow(s, op.order) * symbol_matrix(op, xi);
      CHECK((m1 - m2).norm() <= 1e-12 * m2.norm());
    }
  }
}

TEST_CASE("potential compatibility of the builtin pairs") {
  SUBCASE("curl 2x2 with grad") {
    const DiffOp A = make_operator("curl", {{"m", 2}, {"d", 2}});
    const auto B = partner_potential(A);
    REQUIRE(B.has_value());
    CHECK(B->name == "grad");
    CHECK(potential_compat_check(A, *B, 500).compatible);
  }
  SUBCASE("div d=3 with curl3") {
    const DiffOp A = make_operator("div", {{"d", 3}});
    const auto B = partner_potential(A);
    REQUIRE(B.has_value());
    CHECK(B->name == "curl3");
    CHECK(potential_compat_check(A, *B, 500).compatible);
  }
  SUBCASE("curlcurl with symgrad") {
    const DiffOp A = make_operator("curlcurl", {{"d", 2}});
    const auto B = partner_potential(A);
    REQUIRE(B.has_value());
    CHECK(potential_compat_check(A, *B, 500).compatible);
  }
  SUBCASE("div d=3 with grad is incompatible") {
    const DiffOp A = make_operator("div", {{"d", 3}});
    const DiffOp B = make_operator("grad", {{"m", 1}, {"d", 3}});
    const CompatReport r = potential_compat_check(A, B, 200);
    CHECK_FALSE(r.compatible);
    // A(xi) B(xi) = -4 pi^2 |xi|^2 at unit xi: residual is order one
    CHECK(r.max_product_residual > 0.1);
  }
  SUBCASE("fiber mismatch throws") {
    CHECK_THROWS_AS(potential_compat_check(make_operator("div", {{"d", 3}}),
                                           make_operator("grad", {{"m", 2}, {"d", 2}}), 10),
                    std::invalid_argument);
  }
}

TEST_CASE("operator JSON load") {
  const char* text = R"({"d":2,"N":2,"M":1,"k":1,
    "coeffs":[{"alpha":[1,0],"matrix":[[0,-1]]},{"alpha":[0,1],"matrix":[[1,0]]}]})";
  const DiffOp op = operator_from_json(text);
  CHECK(op.dim == 2);
  const auto m = symbol_matrix(op, vec({1, 0}));
  CHECK(m(0, 1) == std::complex<double>(0.0, -kTwoPi));
  CHECK_THROWS_AS(operator_from_json(R"({"tag":"nope"})"), std::invalid_argument);
}
