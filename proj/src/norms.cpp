#include "afree/norms.hpp"

#include <cmath>

#include "afree/kernels.hpp"

namespace afree {

namespace {

double pointwise_lp(const PeriodicField& field, double p) {
  const long long pts = field.grid.points();
  const double mean = kernels::reduce_sum(static_cast<std::size_t>(pts), [&](std::size_t i) {
    const double a = field.value(static_cast<long long>(i)).norm();
    return std::pow(a, p);
  }) / static_cast<double>(pts);
  return std::pow(mean, 1.0 / p);
}

double mean_abs_sq(const PeriodicField& field) {
  const long long pts = field.grid.points();
  return kernels::reduce_sum(field.samples.size(), [&](std::size_t i) {
    return field.samples[i] * field.samples[i];
  }) / static_cast<double>(pts);
}

} // namespace

double lp_norm(const PeriodicField& field, double p) {
  if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (p == 2.0) return std::sqrt(mean_abs_sq(field));
  return pointwise_lp(field, p);
}

double sobolev_norm(const PeriodicField& field, int s, double p) {
  if (p < 1.0) throw std::invalid_argument("sobolev_norm: p must be >= 1");
  if (s == 0) return lp_norm(field, p);
  SpectralField hat = transform(field);
  if (s < 0) {
    const double mean = Eigen::Map<const Eigen::VectorXcd>(hat.at(0), hat.fiber).norm();
    const double scale = l2_norm(hat);
    if (mean > 1e-10 * std::max(scale, 1.0))
      throw std::invalid_argument("sobolev_norm: negative order requires a zero-mean field");
  }
  const Grid& g = hat.grid;
  kernels::parallel_for(static_cast<std::size_t>(g.points()), [&](std::size_t flat) {
    const double nrm = mode_norm(g, static_cast<long long>(flat));
    const double mult = nrm == 0.0 ? 0.0 : std::pow(nrm, s);
    for (int c = 0; c < hat.fiber; ++c) hat.at(static_cast<long long>(flat))[c] *= mult;
  });
  if (p == 2.0) return l2_norm(hat); // Plancherel shortcut
  return lp_norm(inverse_transform(hat), p);
}

double wlp_norm(const PeriodicField& field, int l, double p) {
  if (l < 0) throw std::invalid_argument("wlp_norm: order must be >= 0");
  double s = 0.0;
  for (int j = 0; j <= l; ++j) {
    const double nj = sobolev_norm(field, j, p);
    s += nj * nj;
  }
  return std::sqrt(s);
}

double v_energy(const PeriodicField& field, double p) {
  if (p < 2.0) throw std::invalid_argument("v_energy: p must be >= 2");
  const long long pts = field.grid.points();
  if (p == 2.0) return 2.0 * mean_abs_sq(field);
  return kernels::reduce_sum(static_cast<std::size_t>(pts), [&](std::size_t i) {
    const double a2 = field.value(static_cast<long long>(i)).squaredNorm();
    return a2 + std::pow(a2, p / 2.0);
  }) / static_cast<double>(pts);
}

double mixed_negative_norm(const PeriodicField& field, double p) {
  if (p < 2.0) throw std::invalid_argument("mixed_negative_norm: p must be >= 2");
  const double n2 = sobolev_norm(field, -1, 2.0);
  const double np = sobolev_norm(field, -1, p);
  return std::sqrt(n2 * n2 + std::pow(np, p));
}

} // namespace afree
