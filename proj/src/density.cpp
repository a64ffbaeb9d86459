#include "afree/density.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>

#include "afree/rng.hpp"

namespace afree {

using json = nlohmann::json;

EnergyDensity density_quadratic(const Eigen::MatrixXd& M, const std::string& name) {
  if (M.rows() != M.cols()) throw std::invalid_argument("density: matrix must be square");
  if (!M.isApprox(M.transpose(), 1e-12))
    throw std::invalid_argument("density: matrix must be symmetric");
  EnergyDensity W;
  W.fiber = static_cast<int>(M.rows());
  W.p = 2.0;
  W.name = name;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  W.c_upper = 0.5 * lmax + 1.0;
  W.c_lower = lmin > 0.0 ? 0.5 * lmin : 0.0;
  W.eval = [M](const Eigen::VectorXd& z) { return 0.5 * z.dot(M * z); };
  W.grad = [M](const Eigen::VectorXd& z) -> Eigen::VectorXd { return M * z; };
  W.hess = [M](const Eigen::VectorXd& z) -> Eigen::MatrixXd {
    (void)z;
    return M;
  };
  return W;
}

Eigen::MatrixXd det2_form() {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(4, 4);
  // z = (F11, F12, F21, F22); det F = F11 F22 - F12 F21 = 0.5 z.H z
  H(0, 3) = H(3, 0) = 1.0;
  H(1, 2) = H(2, 1) = -1.0;
  return H;
}

EnergyDensity density_quaddet(double gamma) {
  Eigen::MatrixXd M = 2.0 * Eigen::MatrixXd::Identity(4, 4) + gamma * det2_form();
  EnergyDensity W = density_quadratic(M, "quaddet");
  W.name = "quaddet(" + std::to_string(gamma) + ")";
  return W;
}

EnergyDensity density_radial_poly(int fiber, const std::vector<double>& coeffs,
                                  const std::string& name) {
  if (fiber < 1) throw std::invalid_argument("density: fiber must be >= 1");
  if (coeffs.empty()) throw std::invalid_argument("density: empty coefficient list");
  EnergyDensity W;
  W.fiber = fiber;
  W.name = name;
  const int J = static_cast<int>(coeffs.size()) - 1;
  W.p = std::max(2.0, 2.0 * J);
  double cu = 1.0;
  for (double c : coeffs) cu += std::abs(c);
  W.c_upper = cu;
  W.c_lower = J >= 1 && coeffs.back() > 0.0 ? 0.5 * coeffs.back() : 0.0;
  W.eval = [coeffs](const Eigen::VectorXd& z) {
    const double r2 = z.squaredNorm();
    double v = 0.0, pw = 1.0;
    for (double c : coeffs) {
      v += c * pw;
      pw *= r2;
    }
    return v;
  };
  W.grad = [coeffs](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    const double r2 = z.squaredNorm();
    double s = 0.0, pw = 1.0; // s = sum_j 2 j c_j r^(2j-2)
    for (std::size_t j = 1; j < coeffs.size(); ++j) {
      s += 2.0 * static_cast<double>(j) * coeffs[j] * pw;
      pw *= r2;
    }
    return s * z;
  };
  W.hess = [coeffs](const Eigen::VectorXd& z) -> Eigen::MatrixXd {
    const double r2 = z.squaredNorm();
    double s = 0.0, t = 0.0, pw = 1.0, pw2 = 1.0;
    for (std::size_t j = 1; j < coeffs.size(); ++j) {
      s += 2.0 * static_cast<double>(j) * coeffs[j] * pw;
      pw *= r2;
    }
    for (std::size_t j = 2; j < coeffs.size(); ++j) {
      t += 2.0 * static_cast<double>(j) * (2.0 * static_cast<double>(j) - 2.0) * coeffs[j] * pw2;
      pw2 *= r2;
    }
    Eigen::MatrixXd H = s * Eigen::MatrixXd::Identity(z.size(), z.size());
    H += t * z * z.transpose();
    return H;
  };
  return W;
}

EnergyDensity density_from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  const std::string entry = j.at("entry").get<std::string>();
  if (entry == "quadratic") {
    const auto rows = j.at("matrix").get<std::vector<std::vector<double>>>();
    const int n = static_cast<int>(rows.size());
    Eigen::MatrixXd M(n, n);
    for (int r = 0; r < n; ++r) {
      if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != n)
        throw std::invalid_argument("density: matrix must be square");
      for (int c = 0; c < n; ++c) M(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    return density_quadratic(M, j.value("name", "quadratic"));
  }
  if (entry == "quaddet") return density_quaddet(j.at("gamma").get<double>());
  if (entry == "radial_poly")
    return density_radial_poly(j.at("N").get<int>(), j.at("coeffs").get<std::vector<double>>(),
                               j.value("name", "radial_poly"));
  throw std::invalid_argument("density: unknown registry entry " + entry);
}

DensityCheckReport check_density(const EnergyDensity& W, double radius, int n_samples,
                                 unsigned long long seed) {
  DensityCheckReport rep;
  Rng rng(seed);
  const int N = W.fiber;
  rep.h3_ok = true;
  rep.h4_ok = W.c_lower > 0.0;
  rep.worst_h3_margin = std::numeric_limits<double>::infinity();
  rep.worst_h4_margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_samples; ++s) {
    Eigen::VectorXd z(N);
    for (int c = 0; c < N; ++c) z(c) = rng.gaussian();
    z *= radius * rng.uniform();
    const double scale = std::max(1.0, std::abs(W.eval(z)));
    const Eigen::VectorXd g = W.grad(z);
    const Eigen::MatrixXd H = W.hess(z);
    const double h = 1e-5 * std::max(1.0, z.norm());
    for (int c = 0; c < N; ++c) {
      Eigen::VectorXd zp = z, zm = z;
      zp(c) += h;
      zm(c) -= h;
      const double fd = (W.eval(zp) - W.eval(zm)) / (2.0 * h);
      rep.max_grad_fd_error = std::max(rep.max_grad_fd_error, std::abs(fd - g(c)) / scale);
      const Eigen::VectorXd fdg = (W.grad(zp) - W.grad(zm)) / (2.0 * h);
      rep.max_hess_fd_error =
          std::max(rep.max_hess_fd_error, (fdg - H.col(c)).norm() / std::max(1.0, H.norm()));
    }
    const double zp_pow = std::pow(z.norm(), W.p);
    const double h3 = W.c_upper * (1.0 + zp_pow) - std::abs(W.eval(z));
    rep.worst_h3_margin = std::min(rep.worst_h3_margin, h3);
    if (h3 < 0.0) rep.h3_ok = false;
    if (W.c_lower > 0.0) {
      const double h4 = W.eval(z) - W.c_lower * (zp_pow - 1.0);
      rep.worst_h4_margin = std::min(rep.worst_h4_margin, h4);
      if (h4 < 0.0) rep.h4_ok = false;
    }
  }
  return rep;
}

} // namespace afree
