#include "afree/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "afree/kernels.hpp"
#include "afree/norms.hpp"
#include "afree/projection.hpp"
#include "afree/rng.hpp"
#include "afree/symbol.hpp"
#include "afree/transform.hpp"

namespace afree {

namespace {

// 32-point Gauss-Legendre rule on [0,1], nodes by Newton iteration.
struct GaussLegendre {
  std::array<double, 32> node{};
  std::array<double, 32> weight{};
  GaussLegendre() {
    const int n = 32;
    for (int i = 0; i < n / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      node[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
      node[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (1.0 + x);
      weight[static_cast<std::size_t>(i)] = 0.5 * w;
      weight[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
    }
  }
};

const GaussLegendre& gauss_legendre() {
  static const GaussLegendre g;
  return g;
}

RealVector freq_vector(const Grid& g, long long flat) {
  std::vector<int> idx(static_cast<std::size_t>(g.dim));
  g.decode(flat, idx.data());
  RealVector xi(g.dim);
  for (int a = 0; a < g.dim; ++a) xi(a) = g.freq_of_index(idx[static_cast<std::size_t>(a)]);
  return xi;
}

void require_afree(const DiffOp& opA, const PeriodicField& psi, double tol, const char* who) {
  const double nrm = l2_norm(psi);
  const double drift = l2_norm(apply_operator(opA, psi));
  if (drift > tol * std::max(nrm, 1.0))
    throw std::invalid_argument(std::string(who) + ": field is not A-free within tolerance");
}

// Relative roundoff floor below which a fitted slack counts as zero.
constexpr double kSlackEps = 1e-12;

} // namespace

double excess(const EnergyDensity& W, const Eigen::VectorXd& a, const Eigen::VectorXd& z) {
  return W.eval(a + z) - W.eval(a) - W.grad(a).dot(z);
}

double excess_quadrature(const EnergyDensity& W, const Eigen::VectorXd& a,
                         const Eigen::VectorXd& z) {
  const auto& gl = gauss_legendre();
  double acc = 0.0;
  for (int q = 0; q < 32; ++q) {
    const double s = gl.node[static_cast<std::size_t>(q)];
    acc += gl.weight[static_cast<std::size_t>(q)] * (1.0 - s) * z.dot(W.hess(a + s * z) * z);
  }
  return acc;
}

EnergyDensity density_vsq(int fiber, double p) {
  if (p < 2.0) throw std::invalid_argument("density_vsq: p must be >= 2");
  EnergyDensity f;
  f.fiber = fiber;
  f.p = p;
  f.name = "vsq";
  f.c_upper = 2.0;
  f.c_lower = 1.0;
  f.eval = [p](const Eigen::VectorXd& z) {
    const double r2 = z.squaredNorm();
    return r2 + std::pow(r2, p / 2.0);
  };
  f.grad = [p](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    const double r = z.norm();
    const double s = r == 0.0 ? (p == 2.0 ? p : 0.0) : p * std::pow(r, p - 2.0);
    return (2.0 + s) * z;
  };
  f.hess = [p, fiber](const Eigen::VectorXd& z) -> Eigen::MatrixXd {
    const double r = z.norm();
    Eigen::MatrixXd H = 2.0 * Eigen::MatrixXd::Identity(fiber, fiber);
    if (p == 2.0) return 2.0 * H;
    if (r > 0.0) {
      H += p * std::pow(r, p - 2.0) * Eigen::MatrixXd::Identity(fiber, fiber);
      H += p * (p - 2.0) * std::pow(r, p - 4.0) * z * z.transpose();
    }
    return H;
  };
  return f;
}

EnergyDensity tilde_shift(const EnergyDensity& W, double c2) {
  if (c2 < 0.0) throw std::invalid_argument("tilde_shift: c2 must be >= 0");
  const EnergyDensity vsq = density_vsq(W.fiber, W.p);
  EnergyDensity out;
  out.fiber = W.fiber;
  out.p = W.p;
  out.name = W.name + "~";
  out.c_upper = W.c_upper + 2.0 * c2;
  out.c_lower = std::max(0.0, W.c_lower - 2.0 * c2);
  auto we = W.eval, ve = vsq.eval;
  auto wg = W.grad, vg = vsq.grad;
  auto wh = W.hess, vh = vsq.hess;
  out.eval = [we, ve, c2](const Eigen::VectorXd& z) { return we(z) - c2 * ve(z); };
  out.grad = [wg, vg, c2](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    return wg(z) - c2 * vg(z);
  };
  out.hess = [wh, vh, c2](const Eigen::VectorXd& z) -> Eigen::MatrixXd {
    return wh(z) - c2 * vh(z);
  };
  if (c2 > 0.0) {
    const DensityCheckReport chk = check_density(out);
    if (out.c_lower == 0.0 || !chk.h4_ok)
      out.warnings.push_back("tilde_shift: sampled coercivity (H4) fails for c2=" +
                             std::to_string(c2));
  }
  return out;
}

ExcessBoundsReport excess_bounds_check(const EnergyDensity& W, double K, int n_samples,
                                       unsigned long long seed) {
  if (!(K > 0.0)) throw std::invalid_argument("excess_bounds_check: K must be positive");
  ExcessBoundsReport rep;
  Rng rng(seed);
  const int N = W.fiber;
  const double zmax = std::max(2.0, 2.0 * K);

  struct PairSample {
    double dist = 0.0;  // |l1 - l2|
    double ratio = 0.0; // |f(l1+z|l1) - f(l2+z|l2)| / |V(z)|^2
  };
  std::vector<PairSample> pair_samples;
  pair_samples.reserve(static_cast<std::size_t>(n_samples));

  double gamma = std::numeric_limits<double>::infinity();
  double cd = std::numeric_limits<double>::infinity();

  auto rand_ball = [&](double R) {
    Eigen::VectorXd v(N);
    for (int c = 0; c < N; ++c) v(c) = rng.gaussian();
    const double r = v.norm();
    if (r > 0.0) v *= R * std::pow(rng.uniform(), 1.0 / N) / r;
    return v;
  };

  for (int s = 0; s < n_samples; ++s) {
    const Eigen::VectorXd l1 = rand_ball(K);
    const Eigen::VectorXd l2 = rand_ball(K);
    // Radius sweep in z, plus Hessian eigendirections so that branch (d)
    // realizes the sharp constant for quadratics.
    std::vector<Eigen::VectorXd> zs;
    zs.push_back(rand_ball(zmax));
    if (s % 8 == 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W.hess(l1));
      for (int c = 0; c < N; ++c) {
        zs.push_back(es.eigenvectors().col(c) * (0.25 * zmax));
        zs.push_back(es.eigenvectors().col(c) * zmax);
      }
    }
    for (const auto& z : zs) {
      const double vz = z.squaredNorm() + std::pow(z.norm(), W.p);
      if (vz <= 0.0) continue;
      const double f1 = excess(W, l1, z);
      const double f2 = excess(W, l2, z);
      rep.C_a_vbound = std::max(rep.C_a_vbound, std::abs(f1) / vz);
      pair_samples.push_back({(l1 - l2).norm(), std::abs(f1 - f2) / vz});
      // (a) two-point bound in z at fixed lambda.
      const Eigen::VectorXd z2 = rand_ball(zmax);
      const double dz = (z - z2).norm();
      if (dz > 1e-12) {
        const double den = (z.norm() + z2.norm() + std::pow(z.norm(), W.p - 1.0) +
                            std::pow(z2.norm(), W.p - 1.0)) * dz;
        if (den > 0.0)
          rep.C_a_lipschitz =
              std::max(rep.C_a_lipschitz, std::abs(f1 - excess(W, l1, z2)) / den);
      }
      // (c) two-constant lower bound bookkeeping happens below.
      // (d) ratio against |V|^2.
      cd = std::min(cd, f1 / vz);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W.hess(l1));
    gamma = std::min(gamma, es.eigenvalues().minCoeff());
  }
  rep.C_a = std::max(rep.C_a_lipschitz, rep.C_a_vbound);

  // (b): sort two-background samples by |l1-l2| and scan the prefix maximum.
  std::sort(pair_samples.begin(), pair_samples.end(),
            [](const PairSample& a, const PairSample& b) { return a.dist < b.dist; });
  rep.delta_grid = {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0};
  for (double dlt : rep.delta_grid) {
    double R = pair_samples.empty() ? 0.0 : pair_samples.back().dist;
    double prefix_max = 0.0;
    for (const auto& ps : pair_samples) {
      prefix_max = std::max(prefix_max, ps.ratio);
      if (prefix_max > dlt) {
        R = ps.dist;
        break;
      }
    }
    rep.R_of_delta.push_back(R);
  }

  // (c): realized pair; C from the outer shell of the sweep, C_tilde as the
  // smallest compensator over a fresh sweep.
  {
    Rng rng2(seed + 1);
    auto rand_ball2 = [&](double R) {
      Eigen::VectorXd v(N);
      for (int c = 0; c < N; ++c) v(c) = rng2.gaussian();
      const double r = v.norm();
      if (r > 0.0) v *= R * std::pow(rng2.uniform(), 1.0 / N) / r;
      return v;
    };
    double c_shell = std::numeric_limits<double>::infinity();
    std::vector<std::array<double, 3>> rows; // {|z|^p, |z|^2, f}
    for (int s = 0; s < n_samples; ++s) {
      const Eigen::VectorXd l = rand_ball2(K);
      Eigen::VectorXd z = rand_ball2(zmax);
      if (s % 3 == 0 && z.norm() > 0.0) z *= zmax / z.norm(); // outer shell
      const double f = excess(W, l, z);
      const double zp = std::pow(z.norm(), W.p);
      const double z2 = z.squaredNorm();
      rows.push_back({zp, z2, f});
      if (z.norm() >= 0.9 * zmax && zp > 0.0) c_shell = std::min(c_shell, f / zp);
    }
    rep.C_c = std::isfinite(c_shell) ? std::max(0.5 * c_shell, 1e-6) : 1e-6;
    double ct = 0.0;
    for (const auto& r : rows)
      if (r[1] > 1e-12) ct = std::max(ct, (rep.C_c * r[0] - r[2]) / r[1]);
    rep.C_c_tilde = ct;
  }

  rep.gamma_detected = gamma;
  if (gamma > 0.0) {
    rep.has_C_d = true;
    rep.C_d = cd;
  }
  return rep;
}

LambdaConvexityReport lambda_convexity_check(const Eigen::MatrixXd& Mform, const DiffOp& opA,
                                             int n_dirs, unsigned seed) {
  if (!Mform.isApprox(Mform.transpose(), 1e-12))
    throw std::invalid_argument("lambda_convexity_check: form must be symmetric");
  const auto dirs = sample_directions(opA.dim, n_dirs, seed);
  LambdaConvexityReport rep;
  rep.min_quadratic_on_cone = std::numeric_limits<double>::infinity();
  std::vector<double> mins(dirs.size(), std::numeric_limits<double>::infinity());
  std::vector<Eigen::VectorXd> argmins(dirs.size());
  kernels::parallel_for(dirs.size(), [&](std::size_t i) {
    const Eigen::MatrixXd K = real_kernel_basis(opA, dirs[i]);
    if (K.cols() == 0) return;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K.transpose() * Mform * K);
    mins[i] = es.eigenvalues().minCoeff();
    int arg = 0;
    es.eigenvalues().minCoeff(&arg);
    argmins[i] = K * es.eigenvectors().col(arg);
  });
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (mins[i] < rep.min_quadratic_on_cone) {
      rep.min_quadratic_on_cone = mins[i];
      rep.argmin_direction = argmins[i];
    }
  }
  if (!std::isfinite(rep.min_quadratic_on_cone)) rep.min_quadratic_on_cone = 0.0; // empty cone
  rep.is_lambda_convex = rep.min_quadratic_on_cone >= -1e-10;
  return rep;
}

double quadratic_aqc_value(const Eigen::MatrixXd& Mform, const DiffOp& opA,
                           const PeriodicField& psi, double afree_tol) {
  if (Mform.rows() != psi.fiber)
    throw std::invalid_argument("quadratic_aqc_value: form size mismatch");
  require_afree(opA, psi, afree_tol, "quadratic_aqc_value");
  const SpectralField hat = transform(psi);
  const Eigen::MatrixXcd M = Mform.cast<std::complex<double>>();
  const long long modes = hat.grid.points();
  return kernels::reduce_sum(static_cast<std::size_t>(modes), [&](std::size_t i) {
    Eigen::Map<const Eigen::VectorXcd> c(hat.at(static_cast<long long>(i)), hat.fiber);
    return (c.adjoint() * M * c).real()(0);
  });
}

namespace {

struct AqcWorkspace {
  Grid grid;
  std::vector<long long> canon_modes;          // canonical flat indices
  std::vector<long long> mirror_modes;         // conjugate partners
  std::vector<ComplexMatrix> projectors;       // P(xi) per canonical mode
};

AqcWorkspace make_aqc_workspace(const DiffOp& opA, const AqcBudget& b) {
  AqcWorkspace ws;
  int n = b.grid_n;
  if (n == 0) n = 4 * b.band + 1; // quartic products of band-limited fields stay alias-free
  if (n % 2 == 0) ++n;
  ws.grid = Grid(opA.dim, n);
  if (b.band > ws.grid.half_band())
    throw std::invalid_argument("aqc_test: band exceeds the grid frequency set");
  std::vector<int> freq(static_cast<std::size_t>(opA.dim), -b.band);
  while (true) {
    int first_nonzero = 0;
    for (int a = 0; a < opA.dim; ++a)
      if (freq[static_cast<std::size_t>(a)] != 0) {
        first_nonzero = freq[static_cast<std::size_t>(a)];
        break;
      }
    if (first_nonzero > 0) {
      RealVector xi(opA.dim);
      for (int a = 0; a < opA.dim; ++a) xi(a) = freq[static_cast<std::size_t>(a)];
      ws.canon_modes.push_back(mode_index(ws.grid, freq.data()));
      std::vector<int> nfreq(freq);
      for (auto& v : nfreq) v = -v;
      ws.mirror_modes.push_back(mode_index(ws.grid, nfreq.data()));
      ws.projectors.push_back(projector_symbol(opA, xi));
    }
    int a = opA.dim - 1;
    while (a >= 0 && freq[static_cast<std::size_t>(a)] == b.band) {
      freq[static_cast<std::size_t>(a)] = -b.band;
      --a;
    }
    if (a < 0) break;
    ++freq[static_cast<std::size_t>(a)];
  }
  return ws;
}

} // namespace

AqcReport aqc_test(const EnergyDensity& W, const Eigen::VectorXd& lambda, const DiffOp& opA,
                   const AqcBudget& budget) {
  if (lambda.size() != W.fiber || opA.fiber_in != W.fiber)
    throw std::invalid_argument("aqc_test: fiber mismatch");
  const AqcWorkspace ws = make_aqc_workspace(opA, budget);
  const int N = W.fiber;
  const long long pts = ws.grid.points();
  const double Wl = W.eval(lambda);

  AqcReport rep;
  rep.violation_tol = 1e-8;
  rep.min_gap = std::numeric_limits<double>::infinity();

  const EnergyDensity vsq = density_vsq(N, W.p);

  auto gap_of = [&](const SpectralField& hat, PeriodicField* out_field) {
    const PeriodicField psi = inverse_transform(hat);
    ++rep.energy_evaluations;
    const double g = kernels::reduce_sum(static_cast<std::size_t>(pts), [&](std::size_t q) {
      const Eigen::VectorXd z = psi.value(static_cast<long long>(q));
      double v = W.eval(lambda + z) - Wl;
      if (budget.c0_probe != 0.0) v -= budget.c0_probe * vsq.eval(z);
      return v;
    }) / static_cast<double>(pts);
    if (out_field) *out_field = psi;
    return g;
  };

  auto gradient = [&](const SpectralField& hat) {
    const PeriodicField psi = inverse_transform(hat);
    PeriodicField r(ws.grid, N);
    kernels::parallel_for(static_cast<std::size_t>(pts), [&](std::size_t q) {
      const Eigen::VectorXd z = psi.value(static_cast<long long>(q));
      Eigen::VectorXd g = W.grad(lambda + z);
      if (budget.c0_probe != 0.0) g -= budget.c0_probe * vsq.grad(z);
      Eigen::Map<Eigen::VectorXd>(r.at(static_cast<long long>(q)), N) = g;
    });
    SpectralField rhat = transform(r);
    // Projected gradient on the canonical coefficients (factor 2 from the
    // mirrored conjugate modes; constant factors only rescale the step).
    SpectralField ghat(ws.grid, N);
    for (std::size_t m = 0; m < ws.canon_modes.size(); ++m) {
      Eigen::Map<const Eigen::VectorXcd> rv(rhat.at(ws.canon_modes[m]), N);
      const Eigen::VectorXcd pv = 2.0 * (ws.projectors[m] * rv);
      Eigen::Map<Eigen::VectorXcd>(ghat.at(ws.canon_modes[m]), N) = pv;
      Eigen::Map<Eigen::VectorXcd>(ghat.at(ws.mirror_modes[m]), N) = pv.conjugate();
    }
    return ghat;
  };

  Rng rng(budget.seed);
  for (int start = 0; start < budget.n_random; ++start) {
    SpectralField hat(ws.grid, N);
    for (std::size_t m = 0; m < ws.canon_modes.size(); ++m) {
      Eigen::VectorXcd g(N);
      for (int c = 0; c < N; ++c) g(c) = {rng.gaussian(), rng.gaussian()};
      const Eigen::VectorXcd coef = ws.projectors[m] * g;
      Eigen::Map<Eigen::VectorXcd>(hat.at(ws.canon_modes[m]), N) = coef;
      Eigen::Map<Eigen::VectorXcd>(hat.at(ws.mirror_modes[m]), N) = coef.conjugate();
    }
    const double nrm = l2_norm(hat);
    if (nrm > 0.0)
      for (auto& c : hat.coeffs) c *= budget.start_amplitude / nrm;

    double g_cur = gap_of(hat, nullptr);
    if (!std::isfinite(g_cur)) {
      rep.warnings.push_back("aqc_test: non-finite energy at a random start; start skipped");
      continue;
    }
    double step = 0.1;
    PeriodicField best_field;
    for (int it = 0; it < budget.n_descent_steps; ++it) {
      const SpectralField ghat = gradient(hat);
      const double gnorm = l2_norm(ghat);
      if (gnorm < 1e-14) break;
      bool accepted = false;
      for (int bt = 0; bt < 30; ++bt) {
        SpectralField trial = hat;
        for (std::size_t i = 0; i < trial.coeffs.size(); ++i)
          trial.coeffs[i] -= step * ghat.coeffs[i];
        const double g_trial = gap_of(trial, nullptr);
        if (std::isfinite(g_trial) && g_trial < g_cur) {
          hat = std::move(trial);
          g_cur = g_trial;
          step *= 1.5;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      if (g_cur < -1e3) break; // unbounded descent; the certificate is ample
    }
    PeriodicField field;
    g_cur = gap_of(hat, &field);
    if (g_cur < rep.min_gap) {
      rep.min_gap = g_cur;
      if (g_cur < -rep.violation_tol) rep.certificate_field = field;
    }
  }
  // The zero field is always admissible; the gap there is 0.
  rep.min_gap = std::min(rep.min_gap, 0.0);
  rep.violation = rep.min_gap < -rep.violation_tol;
  return rep;
}

GardingReport garding_verify(const EnergyDensity& W, const PeriodicField& Ubar,
                             const DiffOp& opA, const std::vector<PeriodicField>& test_fields,
                             double p) {
  if (test_fields.empty()) throw std::invalid_argument("garding_verify: no test fields");
  const Grid& g = Ubar.grid;
  if (Ubar.fiber != W.fiber) throw std::invalid_argument("garding_verify: fiber mismatch");
  GardingReport rep;
  rep.n_fields = static_cast<int>(test_fields.size());
  rep.rows.resize(test_fields.size());

  for (std::size_t i = 0; i < test_fields.size(); ++i) {
    const PeriodicField& psi = test_fields[i];
    if (psi.grid != g || psi.fiber != W.fiber)
      throw std::invalid_argument("garding_verify: test field shape mismatch");
    require_afree(opA, psi, 1e-8, "garding_verify");
    GardingRow row;
    row.field_id = static_cast<int>(i);
    row.lhs = v_energy(psi, p);
    row.excess = kernels::reduce_sum(static_cast<std::size_t>(g.points()), [&](std::size_t q) {
      const double e = excess(W, Ubar.value(static_cast<long long>(q)),
                              psi.value(static_cast<long long>(q)));
      return e;
    }) / static_cast<double>(g.points());
    if (!std::isfinite(row.excess))
      throw std::runtime_error("garding_verify: excess evaluated non-finite");
    const double mixed = mixed_negative_norm(psi, p);
    row.penalty = mixed * mixed;
    row.wneg_p = sobolev_norm(psi, -1, p);
    rep.rows[i] = row;
  }

  // Order rows by the small-norm parameter.
  std::vector<std::size_t> order(rep.rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rep.rows[a].wneg_p < rep.rows[b].wneg_p;
  });

  // epsilon0: largest prefix (in ||psi||_{W^{-1,p}}) on which the excess term
  // alone can majorize; C0 is fitted there, C1 absorbs the rest.
  double c0 = 0.0;
  double eps0 = 0.0;
  bool prefix_ok = true;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const GardingRow& row = rep.rows[order[k]];
    if (row.lhs <= 0.0) continue; // zero field contributes nothing
    if (row.excess <= 0.0) {
      prefix_ok = false;
      break;
    }
    const double ratio = row.lhs / row.excess;
    if (ratio > c0) {
      c0 = ratio;
      rep.worst_ratio_field_id = row.field_id;
    }
    eps0 = row.wneg_p;
  }
  rep.C0_fit = c0;
  rep.epsilon0_estimate = eps0;
  rep.excess_route_ok = prefix_ok;

  double c1 = 0.0;
  for (const GardingRow& row : rep.rows) {
    if (row.penalty <= 0.0) continue;
    const double slack = row.lhs - rep.C0_fit * row.excess;
    if (slack > kSlackEps * std::max(row.lhs, 1e-300))
      c1 = std::max(c1, slack / row.penalty);
  }
  rep.C1_fit = c1;
  return rep;
}

QuadraticGardingReport quadratic_garding_check(const EnergyDensity& W, const PeriodicField& Ubar,
                                               const DiffOp& opB,
                                               const std::vector<PeriodicField>& phis,
                                               double c2) {
  QuadraticGardingReport rep;
  const EnergyDensity Wt = tilde_shift(W, c2);
  const Grid& g = Ubar.grid;
  const int l = opB.order;

  // Frozen-coefficient strong-positivity constant: min over subsampled
  // background values and lattice directions of the smallest eigenvalue of
  // the Hessian restricted to im B(xi).
  const long long pts = g.points();
  const long long stride = std::max<long long>(1, pts / 64);
  double c0 = std::numeric_limits<double>::infinity();
  const auto dirs = sample_directions(g.dim, 64);
  for (long long q = 0; q < pts; q += stride) {
    const Eigen::MatrixXd H = Wt.hess(Ubar.value(q));
    const Eigen::MatrixXcd Hc = H.cast<std::complex<double>>();
    for (const auto& xi : dirs) {
      const ComplexMatrix B = symbol_matrix(opB, xi);
      Eigen::JacobiSVD<ComplexMatrix> svd(B, Eigen::ComputeThinU);
      const auto& sv = svd.singularValues();
      const double smax = sv.size() > 0 ? sv(0) : 0.0;
      int rank = 0;
      for (int r = 0; r < sv.size(); ++r)
        if (sv(r) >= kRankTol * smax && sv(r) > 0.0) ++rank;
      if (rank == 0) continue;
      const ComplexMatrix Q = svd.matrixU().leftCols(rank);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(Q.adjoint() * Hc * Q);
      c0 = std::min(c0, es.eigenvalues().minCoeff());
    }
  }
  if (!std::isfinite(c0)) c0 = 0.0;
  rep.c0_frozen = c0;

  // Realized pair at the delta = 1/2 policy.
  const double target = 0.5 * std::max(c0, 0.0);
  rep.c0_delta_fit = target;
  for (const PeriodicField& phi : phis) {
    if (phi.grid != g || phi.fiber != opB.fiber_in)
      throw std::invalid_argument("quadratic_garding_check: potential shape mismatch");
    const PeriodicField u = apply_operator(opB, phi);
    const double quad = kernels::reduce_sum(static_cast<std::size_t>(pts), [&](std::size_t q) {
      const Eigen::VectorXd z = u.value(static_cast<long long>(q));
      return z.dot(Wt.hess(Ubar.value(static_cast<long long>(q))) * z);
    }) / static_cast<double>(pts);
    const double mass = kernels::reduce_sum(static_cast<std::size_t>(pts), [&](std::size_t q) {
      return u.value(static_cast<long long>(q)).squaredNorm();
    }) / static_cast<double>(pts);
    double lower = 0.0;
    const PeriodicField phi0 = zero_mean(phi);
    for (int i = 1; i <= l; ++i) {
      const double nj = sobolev_norm(phi0, l - i, 2.0);
      lower += nj * nj;
    }
    rep.row_quadratic.push_back(quad);
    rep.row_mass.push_back(mass);
    rep.row_lower.push_back(lower);
  }
  double c1 = 0.0;
  for (std::size_t i = 0; i < rep.row_mass.size(); ++i) {
    const double slack = target * rep.row_mass[i] - rep.row_quadratic[i];
    if (rep.row_lower[i] > 1e-14)
      c1 = std::max(c1, std::max(0.0, slack) / rep.row_lower[i]);
    else if (slack > kSlackEps * std::max(std::abs(rep.row_quadratic[i]), 1.0))
      rep.c0_delta_fit = std::min(rep.c0_delta_fit, rep.row_quadratic[i] / rep.row_mass[i]);
  }
  rep.c1_fit = c1;
  return rep;
}

} // namespace afree
