#include "afree/statics.hpp"

#include <cmath>

#include "afree/kernels.hpp"
#include "afree/norms.hpp"
#include "afree/projection.hpp"
#include "afree/symbol.hpp"
#include "afree/transform.hpp"

namespace afree {

namespace {

PeriodicField gradient_field(const EnergyDensity& W, const PeriodicField& U) {
  PeriodicField out(U.grid, U.fiber);
  kernels::parallel_for(static_cast<std::size_t>(U.grid.points()), [&](std::size_t q) {
    Eigen::Map<Eigen::VectorXd>(out.at(static_cast<long long>(q)), out.fiber) =
        W.grad(U.value(static_cast<long long>(q)));
  });
  return out;
}

double inner(const PeriodicField& a, const PeriodicField& b) {
  return kernels::reduce_sum(a.samples.size(), [&](std::size_t i) {
    return a.samples[i] * b.samples[i];
  }) / static_cast<double>(a.grid.points());
}

void require_admissible(const DiffOp& opA, const PeriodicField& Ubar, const char* who) {
  // Constants are always annihilated by a homogeneous operator, so only the
  // mean-free part is constrained.
  const PeriodicField mf = zero_mean(Ubar);
  const double nrm = l2_norm(mf);
  const double drift = l2_norm(apply_operator(opA, mf));
  if (drift > 1e-8 * std::max(nrm, 1.0))
    throw std::invalid_argument(std::string(who) + ": background is not A-free");
}

} // namespace

double energy_mean(const EnergyDensity& W, const PeriodicField& U) {
  return kernels::reduce_sum(static_cast<std::size_t>(U.grid.points()), [&](std::size_t q) {
    return W.eval(U.value(static_cast<long long>(q)));
  }) / static_cast<double>(U.grid.points());
}

double euler_lagrange_residual(const EnergyDensity& W, const PeriodicField& Ubar,
                               const DiffOp& opA) {
  if (Ubar.fiber != W.fiber) throw std::invalid_argument("euler_lagrange_residual: fiber mismatch");
  require_admissible(opA, Ubar, "euler_lagrange_residual");
  const PeriodicField g = gradient_field(W, Ubar);
  return l2_norm(project_afree(opA, zero_mean(g)));
}

SecondVariationReport second_variation_min(const EnergyDensity& W, const PeriodicField& Ubar,
                                           const DiffOp& opA, int iters,
                                           unsigned long long seed) {
  require_admissible(opA, Ubar, "second_variation_min");
  const Grid& g = Ubar.grid;

  auto hess_apply = [&](const PeriodicField& psi) {
    PeriodicField out(g, psi.fiber);
    kernels::parallel_for(static_cast<std::size_t>(g.points()), [&](std::size_t q) {
      Eigen::Map<Eigen::VectorXd>(out.at(static_cast<long long>(q)), out.fiber) =
          W.hess(Ubar.value(static_cast<long long>(q))) * psi.value(static_cast<long long>(q));
    });
    return out;
  };
  auto T_apply = [&](const PeriodicField& psi) { return project_afree(opA, hess_apply(psi)); };
  auto quotient = [&](const PeriodicField& psi) {
    const double den = inner(psi, psi);
    return den > 0.0 ? inner(psi, hess_apply(psi)) / den : 0.0;
  };

  SecondVariationReport rep;
  PeriodicField psi = random_afree_field(opA, g, g.half_band(), seed, 1.0);

  // Stage 1: dominant |eigenvalue| of T for the shift.
  double mu = 0.0;
  for (int it = 0; it < 64; ++it) {
    PeriodicField next = T_apply(psi);
    const double nrm = l2_norm(next);
    if (nrm < 1e-300) {
      mu = 0.0;
      break;
    }
    mu = nrm / std::max(l2_norm(psi), 1e-300);
    const double inv = 1.0 / nrm;
    for (auto& v : next.samples) v *= inv;
    psi = std::move(next);
  }
  mu = std::abs(mu) * (1.0 + 1e-3) + 1e-12;

  // Stage 2: power iteration on mu I - T converges to mu - lambda_min.
  psi = random_afree_field(opA, g, g.half_band(), seed + 1, 1.0);
  double q_prev = quotient(psi);
  int used = iters;
  for (int it = 0; it < iters; ++it) {
    PeriodicField tpsi = T_apply(psi);
    PeriodicField next = psi;
    for (std::size_t i = 0; i < next.samples.size(); ++i)
      next.samples[i] = mu * psi.samples[i] - tpsi.samples[i];
    const double nrm = l2_norm(next);
    if (nrm < 1e-300) {
      // T = mu I on the subspace; the quotient of any field is the answer.
      rep.converged = true;
      used = it + 1;
      break;
    }
    const double inv = 1.0 / nrm;
    for (auto& v : next.samples) v *= inv;
    psi = std::move(next);
    const double q_now = quotient(psi);
    rep.last_change = std::abs(q_now - q_prev);
    if (rep.last_change < 1e-8 * std::max(1.0, std::abs(q_now))) {
      rep.converged = true;
      q_prev = q_now;
      used = it + 1;
      break;
    }
    q_prev = q_now;
  }
  rep.iterations = used;
  rep.min_quotient = q_prev;
  return rep;
}

double second_variation_frozen(const EnergyDensity& W, const Eigen::VectorXd& Ubar_value,
                               const DiffOp& opA, int band) {
  const Eigen::MatrixXd H = W.hess(Ubar_value);
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> freq(static_cast<std::size_t>(opA.dim), -band);
  while (true) {
    bool nonzero = false;
    for (int v : freq) nonzero = nonzero || v != 0;
    if (nonzero) {
      RealVector xi(opA.dim);
      for (int a = 0; a < opA.dim; ++a) xi(a) = freq[static_cast<std::size_t>(a)];
      const Eigen::MatrixXd K = real_kernel_basis(opA, xi);
      if (K.cols() > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K.transpose() * H * K);
        best = std::min(best, es.eigenvalues().minCoeff());
      }
    }
    int a = opA.dim - 1;
    while (a >= 0 && freq[static_cast<std::size_t>(a)] == band) {
      freq[static_cast<std::size_t>(a)] = -band;
      --a;
    }
    if (a < 0) break;
    ++freq[static_cast<std::size_t>(a)];
  }
  return std::isfinite(best) ? best : 0.0;
}

MinimalityReport minimality_check(const EnergyDensity& W, const PeriodicField& Ubar,
                                  const DiffOp& opA, double epsilon0, int n_samples,
                                  unsigned long long seed, int band) {
  MinimalityReport rep;
  const Grid& g = Ubar.grid;
  const double p = W.p;
  if (band <= 0) band = g.half_band();

  rep.el_residual = euler_lagrange_residual(W, Ubar, opA);
  rep.el_ok = rep.el_residual <= 1e-8;
  if (!rep.el_ok)
    rep.diagnostics.push_back("Euler-Lagrange residual above tolerance: " +
                              std::to_string(rep.el_residual));

  const SecondVariationReport sv = second_variation_min(W, Ubar, opA);
  rep.second_variation_min = sv.min_quotient;
  rep.second_variation_ok = sv.min_quotient > 0.0;
  if (!sv.converged)
    rep.diagnostics.push_back("second variation iteration not converged; last bracket " +
                              std::to_string(sv.last_change));
  if (!rep.second_variation_ok)
    rep.diagnostics.push_back("second variation not strongly positive");

  // Spot-check strong A-quasiconvexity at up to 64 sampled background values.
  rep.aqc_ok = true;
  const long long pts = g.points();
  const long long stride = std::max<long long>(1, pts / 64);
  AqcBudget budget;
  budget.n_random = 2;
  budget.n_descent_steps = 60;
  budget.band = 1;
  budget.c0_probe = 1e-3;
  budget.seed = seed;
  for (long long q = 0; q < pts; q += stride) {
    const AqcReport aqc = aqc_test(W, Ubar.value(q), opA, budget);
    if (aqc.violation) {
      rep.aqc_ok = false;
      rep.diagnostics.push_back("strong A-quasiconvexity violated at a sampled background value");
      break;
    }
  }

  const PeriodicField mf = zero_mean(Ubar);
  const double base = l2_norm(mf) > 0.0 ? sobolev_norm(mf, -1, p) : 0.0;
  rep.epsilon0_used = epsilon0 > 0.0 ? epsilon0 : 0.1 * base + 0.01;

  double cmin = std::numeric_limits<double>::infinity();
  const double w_ubar = energy_mean(W, Ubar);
  for (int j = 1; j <= n_samples; ++j) {
    PeriodicField psi = random_afree_field(opA, g, band, seed + static_cast<unsigned>(j), 1.0);
    const double s_now = sobolev_norm(psi, -1, p);
    if (s_now <= 0.0) continue;
    const double target = rep.epsilon0_used * static_cast<double>(j) / n_samples;
    const double scale = target / s_now;
    for (auto& v : psi.samples) v *= scale;
    PeriodicField U = Ubar;
    for (std::size_t i = 0; i < U.samples.size(); ++i) U.samples[i] += psi.samples[i];
    MinimalityRow row;
    row.wneg_p = target;
    row.energy_gap = energy_mean(W, U) - w_ubar;
    row.v_distance = v_energy(psi, p);
    rep.rows.push_back(row);
    if (row.v_distance > 0.0) cmin = std::min(cmin, row.energy_gap / row.v_distance);
  }
  rep.C_fit = std::isfinite(cmin) ? cmin : 0.0;
  rep.pass = rep.el_ok && rep.second_variation_ok && rep.aqc_ok && rep.C_fit > 0.0;
  return rep;
}

} // namespace afree
