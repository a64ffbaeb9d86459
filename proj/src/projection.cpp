#include "afree/projection.hpp"

#include <cmath>

#include "afree/kernels.hpp"
#include "afree/norms.hpp"
#include "afree/symbol.hpp"

namespace afree {

namespace {

RealVector freq_vector(const Grid& g, long long flat) {
  std::vector<int> idx(static_cast<std::size_t>(g.dim));
  g.decode(flat, idx.data());
  RealVector xi(g.dim);
  for (int a = 0; a < g.dim; ++a) xi(a) = g.freq_of_index(idx[static_cast<std::size_t>(a)]);
  return xi;
}

} // namespace

SpectralField project_afree(const DiffOp& opA, const SpectralField& field) {
  if (opA.dim != field.grid.dim) throw std::invalid_argument("project_afree: dimension mismatch");
  if (opA.fiber_in != field.fiber) throw std::invalid_argument("project_afree: fiber mismatch");
  SpectralField out(field.grid, field.fiber);
  const Grid& g = field.grid;
  kernels::parallel_for(static_cast<std::size_t>(g.points()), [&](std::size_t i) {
    const long long flat = static_cast<long long>(i);
    const RealVector xi = freq_vector(g, flat);
    Eigen::Map<Eigen::VectorXcd> dst(out.at(flat), out.fiber);
    if (xi.norm() == 0.0) {
      dst.setZero();
      return;
    }
    Eigen::Map<const Eigen::VectorXcd> src(field.at(flat), field.fiber);
    dst = projector_symbol(opA, xi) * src;
  });
  return out;
}

PeriodicField project_afree(const DiffOp& opA, const PeriodicField& field) {
  return inverse_transform(project_afree(opA, transform(field)));
}

PrimitivePair primitive(const DiffOp& opB, const PeriodicField& psi, double tol) {
  if (opB.dim != psi.grid.dim) throw std::invalid_argument("primitive: dimension mismatch");
  if (opB.fiber_out != psi.fiber) throw std::invalid_argument("primitive: fiber mismatch");
  const SpectralField hat = transform(psi);
  const Grid& g = psi.grid;
  SpectralField phi_hat(g, opB.fiber_in);
  const double scale = l2_norm(hat);

  double worst_res = 0.0;
  std::vector<int> worst_freq(static_cast<std::size_t>(g.dim), 0);
  std::vector<double> residuals(static_cast<std::size_t>(g.points()), 0.0);
  kernels::parallel_for(static_cast<std::size_t>(g.points()), [&](std::size_t i) {
    const long long flat = static_cast<long long>(i);
    const RealVector xi = freq_vector(g, flat);
    Eigen::Map<Eigen::VectorXcd> dst(phi_hat.at(flat), phi_hat.fiber);
    if (xi.norm() == 0.0) {
      dst.setZero();
      return;
    }
    Eigen::Map<const Eigen::VectorXcd> src(hat.at(flat), hat.fiber);
    const ComplexMatrix Bd = pseudo_inverse_symbol(opB, xi);
    dst = Bd * src;
    // Range check: B Bdagger is the projector onto im B(xi).
    const Eigen::VectorXcd back = symbol_matrix(opB, xi) * dst;
    residuals[i] = (back - src).norm();
  });
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (residuals[i] > worst_res) {
      worst_res = residuals[i];
      const RealVector xi = freq_vector(g, static_cast<long long>(i));
      for (int a = 0; a < g.dim; ++a) worst_freq[static_cast<std::size_t>(a)] = static_cast<int>(xi(a));
    }
  }
  if (worst_res > tol * std::max(scale, 1e-300))
    throw PrimitiveRangeError("primitive: input leaves the range of the potential symbol",
                              worst_freq, worst_res / std::max(scale, 1e-300));

  PrimitivePair pair;
  pair.psi = psi;
  pair.phi = inverse_transform(phi_hat);
  pair.opB = opB;
  return pair;
}

PrimitiveBoundsReport primitive_bounds_report(const PrimitivePair& pair, double p) {
  const int l = pair.opB.order;
  const double psi_lp = lp_norm(pair.psi, p);
  const double psi_wm1 = sobolev_norm(pair.psi, -1, p);
  const double psi_wml = sobolev_norm(pair.psi, -l, p);
  if (psi_lp == 0.0 || psi_wm1 == 0.0 || psi_wml == 0.0)
    throw std::invalid_argument("primitive_bounds_report: zero field");
  PrimitiveBoundsReport rep;
  rep.c_ii = lp_norm(pair.phi, p) / psi_wml;
  rep.c_iii = wlp_norm(pair.phi, l, p) / psi_lp;
  rep.c_iv = 0.0;
  for (int i = 1; i <= l; ++i)
    rep.c_iv = std::max(rep.c_iv, wlp_norm(pair.phi, l - i, p) / psi_wm1);
  return rep;
}

PeriodicField truncate(const PeriodicField& field, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("truncate: threshold must be positive");
  PeriodicField out = field;
  kernels::parallel_for(static_cast<std::size_t>(field.grid.points()), [&](std::size_t i) {
    auto v = out.value(static_cast<long long>(i));
    const double a = v.norm();
    if (a > k) v *= k / a;
  });
  return out;
}

DecompositionResult decompose_sequence(const DiffOp& opA, const DiffOp& opB,
                                       const std::vector<PeriodicField>& fields,
                                       const std::vector<double>& k_schedule, double p,
                                       double afree_tol) {
  if (fields.empty()) throw std::invalid_argument("decompose_sequence: empty sequence");
  if (k_schedule.size() != fields.size())
    throw std::invalid_argument("decompose_sequence: schedule length mismatch");
  const Grid& g = fields.front().grid;
  const int N = fields.front().fiber;
  for (const auto& f : fields) {
    if (f.grid != g || f.fiber != N)
      throw std::invalid_argument("decompose_sequence: inhomogeneous sequence");
    const double nrm = l2_norm(f);
    const double drift = l2_norm(apply_operator(opA, f));
    if (drift > afree_tol * std::max(nrm, 1.0))
      throw std::invalid_argument("decompose_sequence: input is not A-free within tolerance");
  }
  // The parts are returned as B-images; their canonical primitives are
  // recoverable with primitive(opB, .) in the gauge fixed by opB.
  (void)opB;
  const std::size_t J = fields.size();

  // Cesaro coefficient average as the weak-limit stand-in.
  SpectralField limit_hat(g, N);
  for (const auto& f : fields) {
    const SpectralField h = transform(f);
    for (std::size_t i = 0; i < h.coeffs.size(); ++i) limit_hat.coeffs[i] += h.coeffs[i];
  }
  for (auto& c : limit_hat.coeffs) c /= static_cast<double>(J);
  PeriodicField limit = inverse_transform(limit_hat);

  DecompositionResult res;
  res.limit = limit;
  res.oscillation.resize(J);
  res.concentration.resize(J);

  // Threshold grids scaled to the data.
  double sup = 0.0;
  for (const auto& f : fields)
    for (double v : f.samples) sup = std::max(sup, std::abs(v));
  sup = std::max(sup, 1e-12);
  auto& diag = res.diagnostics;
  for (int t = 0; t < 6; ++t) diag.thresholds_T.push_back(sup * std::pow(2.0, t - 4));
  for (int t = 0; t < 6; ++t) diag.thresholds_delta.push_back(sup * std::pow(2.0, t - 6));
  diag.tail_mass.resize(J);
  diag.tail_mass_p.resize(J);
  diag.measure_above.resize(J);
  diag.weak_pairing_residual.resize(J);
  diag.additivity_residual.resize(J);

  const long long pts = g.points();
  for (std::size_t j = 0; j < J; ++j) {
    PeriodicField u = fields[j];
    for (std::size_t i = 0; i < u.samples.size(); ++i) u.samples[i] -= limit.samples[i];
    const PeriodicField v = truncate(u, k_schedule[j]);
    const PeriodicField F = project_afree(opA, zero_mean(v));
    PeriodicField B = u;
    for (std::size_t i = 0; i < B.samples.size(); ++i) B.samples[i] -= F.samples[i];
    res.oscillation[j] = F;
    res.concentration[j] = B;

    for (double T : diag.thresholds_T) {
      const double mass = kernels::reduce_sum(static_cast<std::size_t>(pts), [&](std::size_t q) {
        const double a2 = F.value(static_cast<long long>(q)).squaredNorm();
        return a2 > T * T ? a2 : 0.0;
      }) / static_cast<double>(pts);
      diag.tail_mass[j].push_back(mass);
      const double mass_p = kernels::reduce_sum(static_cast<std::size_t>(pts), [&](std::size_t q) {
        const double a = F.value(static_cast<long long>(q)).norm();
        return a > T ? std::pow(a, p) : 0.0;
      }) / static_cast<double>(pts);
      diag.tail_mass_p[j].push_back(mass_p);
    }
    for (double dlt : diag.thresholds_delta) {
      const double meas = kernels::reduce_sum(static_cast<std::size_t>(pts), [&](std::size_t q) {
        return B.value(static_cast<long long>(q)).norm() > dlt ? 1.0 : 0.0;
      }) / static_cast<double>(pts);
      diag.measure_above[j].push_back(meas);
    }
    // Pairings against low modes stand in for weak convergence of F_j.
    const SpectralField Fh = transform(F);
    double wp = 0.0;
    for_each_mode(g, [&](long long flat, const int* freq) {
      for (int a = 0; a < g.dim; ++a)
        if (std::abs(freq[a]) > 2) return;
      wp = std::max(wp, Eigen::Map<const Eigen::VectorXcd>(Fh.at(flat), N).norm());
    });
    diag.weak_pairing_residual[j] = wp;

    double add2 = kernels::reduce_sum(static_cast<std::size_t>(pts) * static_cast<std::size_t>(N),
                                      [&](std::size_t q) {
      const double r = fields[j].samples[q] - limit.samples[q] - F.samples[q] - B.samples[q];
      return r * r;
    });
    diag.additivity_residual[j] = std::sqrt(add2 / static_cast<double>(pts));
  }
  return res;
}

} // namespace afree
