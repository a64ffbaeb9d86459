#include "afree/dynamics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "afree/convexity.hpp"
#include "afree/kernels.hpp"
#include "afree/norms.hpp"
#include "afree/rng.hpp"
#include "afree/transform.hpp"

namespace afree {

using json = nlohmann::json;

ConservationSystem make_psystem1d(double a, double b) {
  ConservationSystem s;
  s.state_dim = 2; // U = (v, u)
  s.dim = 1;
  s.p = b != 0.0 ? 4.0 : 2.0;
  s.name = "psystem1d";
  auto sigma = [a, b](double u) { return a * u + b * u * u * u; };
  auto dsigma = [a, b](double u) { return a + 3.0 * b * u * u; };
  s.flux = [sigma](const Eigen::VectorXd& U) -> Eigen::MatrixXd {
    Eigen::MatrixXd f(2, 1);
    f(0, 0) = -sigma(U(1));
    f(1, 0) = -U(0);
    return f;
  };
  s.flux_jacobian = [dsigma](const Eigen::VectorXd& U) {
    std::vector<Eigen::MatrixXd> J(1, Eigen::MatrixXd::Zero(2, 2));
    J[0](0, 1) = -dsigma(U(1));
    J[0](1, 0) = -1.0;
    return J;
  };
  // eta = v^2/2 + W(u), W' = sigma
  EnergyDensity eta;
  eta.fiber = 2;
  eta.p = s.p;
  eta.name = "psystem_entropy";
  eta.c_upper = 1.0 + std::abs(a) + std::abs(b);
  eta.c_lower = b != 0.0 ? 0.125 * b : 0.25 * a;
  eta.eval = [a, b](const Eigen::VectorXd& U) {
    const double u = U(1);
    return 0.5 * U(0) * U(0) + 0.5 * a * u * u + 0.25 * b * u * u * u * u;
  };
  eta.grad = [sigma](const Eigen::VectorXd& U) -> Eigen::VectorXd {
    Eigen::VectorXd g(2);
    g << U(0), sigma(U(1));
    return g;
  };
  eta.hess = [dsigma](const Eigen::VectorXd& U) -> Eigen::MatrixXd {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2, 2);
    H(0, 0) = 1.0;
    H(1, 1) = dsigma(U(1));
    return H;
  };
  s.entropy = eta;
  s.entropy_flux = [sigma](const Eigen::VectorXd& U) -> Eigen::VectorXd {
    Eigen::VectorXd q(1);
    q(0) = -U(0) * sigma(U(1));
    return q;
  };
  return s;
}

ConservationSystem make_elasticity2d(const EnergyDensity& W) {
  if (W.fiber != 4) throw std::invalid_argument("elasticity2d: W must act on 2x2 gradients");
  ConservationSystem s;
  s.state_dim = 6; // (v1, v2, F11, F12, F21, F22)
  s.dim = 2;
  s.p = std::max(2.0, W.p);
  s.name = "elasticity2d";
  auto Fpart = [](const Eigen::VectorXd& U) -> Eigen::VectorXd { return U.segment(2, 4); };
  s.flux = [W, Fpart](const Eigen::VectorXd& U) -> Eigen::MatrixXd {
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(6, 2);
    const Eigen::VectorXd S = W.grad(Fpart(U)); // row-major 2x2 stress
    for (int i = 0; i < 2; ++i)
      for (int al = 0; al < 2; ++al) f(i, al) = -S(2 * i + al);
    // d_t F_{i beta} - d_beta v_i = 0
    for (int i = 0; i < 2; ++i)
      for (int be = 0; be < 2; ++be) f(2 + 2 * i + be, be) = -U(i);
    return f;
  };
  s.flux_jacobian = [W, Fpart](const Eigen::VectorXd& U) {
    std::vector<Eigen::MatrixXd> J(2, Eigen::MatrixXd::Zero(6, 6));
    const Eigen::MatrixXd H = W.hess(Fpart(U));
    for (int al = 0; al < 2; ++al) {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 4; ++j) J[static_cast<std::size_t>(al)](i, 2 + j) = -H(2 * i + al, j);
      for (int i = 0; i < 2; ++i) J[static_cast<std::size_t>(al)](2 + 2 * i + al, i) = -1.0;
    }
    return J;
  };
  EnergyDensity eta;
  eta.fiber = 6;
  eta.p = s.p;
  eta.name = "elasticity_entropy";
  eta.c_upper = W.c_upper + 1.0;
  eta.c_lower = W.p == 2.0 ? std::min(0.5, W.c_lower) : 0.0;
  eta.eval = [W, Fpart](const Eigen::VectorXd& U) {
    return 0.5 * U.head(2).squaredNorm() + W.eval(Fpart(U));
  };
  eta.grad = [W, Fpart](const Eigen::VectorXd& U) -> Eigen::VectorXd {
    Eigen::VectorXd g(6);
    g.head(2) = U.head(2);
    g.tail(4) = W.grad(Fpart(U));
    return g;
  };
  eta.hess = [W, Fpart](const Eigen::VectorXd& U) -> Eigen::MatrixXd {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(6, 6);
    H.topLeftCorner(2, 2).setIdentity();
    H.bottomRightCorner(4, 4) = W.hess(Fpart(U));
    return H;
  };
  s.entropy = eta;
  s.entropy_flux = [W, Fpart](const Eigen::VectorXd& U) -> Eigen::VectorXd {
    const Eigen::VectorXd S = W.grad(Fpart(U));
    Eigen::VectorXd q(2);
    for (int al = 0; al < 2; ++al) q(al) = -(U(0) * S(al) + U(1) * S(2 + al));
    return q;
  };
  s.involution = make_operator("curl", {{"m", 2}, {"d", 2}});
  s.constraint_components = {2, 3, 4, 5};
  return s;
}

ConservationSystem make_linelast2d(double lambda, double mu) {
  if (!(mu > 0.0) || !(lambda + mu > 0.0))
    throw std::invalid_argument("linelast2d: need mu > 0 and lambda + mu > 0");
  ConservationSystem s;
  s.state_dim = 5; // (u1, u2, E11, E22, sqrt2 E12)
  s.dim = 2;
  s.p = 2.0;
  s.name = "linelast2d";
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(3, 3);
  C << lambda + 2.0 * mu, lambda, 0.0,
       lambda, lambda + 2.0 * mu, 0.0,
       0.0, 0.0, 2.0 * mu; // Mandel form of the isotropic stiffness
  const double sq2 = std::sqrt(2.0);
  // Stress as a 2x2 matrix from Mandel strain: S11=(CE)_1, S22=(CE)_2,
  // S12 = (CE)_3 / sqrt2.
  auto stress = [C, sq2](const Eigen::VectorXd& E) -> Eigen::Matrix2d {
    const Eigen::VectorXd SE = C * E;
    Eigen::Matrix2d S;
    S << SE(0), SE(2) / sq2, SE(2) / sq2, SE(1);
    return S;
  };
  s.flux = [stress, sq2](const Eigen::VectorXd& U) -> Eigen::MatrixXd {
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(5, 2);
    const Eigen::Matrix2d S = stress(U.tail(3));
    for (int i = 0; i < 2; ++i)
      for (int al = 0; al < 2; ++al) f(i, al) = -S(i, al);
    f(2, 0) = -U(0);
    f(3, 1) = -U(1);
    f(4, 0) = -U(1) / sq2;
    f(4, 1) = -U(0) / sq2;
    return f;
  };
  s.flux_jacobian = [C, sq2](const Eigen::VectorXd&) {
    std::vector<Eigen::MatrixXd> J(2, Eigen::MatrixXd::Zero(5, 5));
    // dS/dE rows in Mandel coordinates
    for (int al = 0; al < 2; ++al)
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 3; ++k) {
          double dS = 0.0;
          if (i == 0 && al == 0) dS = C(0, k);
          if (i == 1 && al == 1) dS = C(1, k);
          if (i != al) dS = C(2, k) / sq2;
          J[static_cast<std::size_t>(al)](i, 2 + k) = -dS;
        }
    J[0](2, 0) = -1.0;
    J[1](3, 1) = -1.0;
    J[0](4, 1) = -1.0 / sq2;
    J[1](4, 0) = -1.0 / sq2;
    return J;
  };
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(5, 5);
  M.topLeftCorner(2, 2).setIdentity();
  M.bottomRightCorner(3, 3) = C;
  EnergyDensity eta = density_quadratic(M, "linelast_entropy");
  s.entropy = eta;
  s.entropy_flux = [stress](const Eigen::VectorXd& U) -> Eigen::VectorXd {
    const Eigen::Matrix2d S = stress(U.tail(3));
    Eigen::VectorXd q(2);
    for (int al = 0; al < 2; ++al) q(al) = -(U(0) * S(0, al) + U(1) * S(1, al));
    return q;
  };
  s.involution = make_operator("curlcurl", {{"d", 2}});
  s.constraint_components = {2, 3, 4};
  return s;
}

ConservationSystem system_from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  const std::string tag = j.at("tag").get<std::string>();
  if (tag == "psystem1d") return make_psystem1d(j.value("a", 1.0), j.value("b", 0.0));
  if (tag == "elasticity2d") {
    if (j.contains("density")) return make_elasticity2d(density_from_json(j["density"].dump()));
    return make_elasticity2d(density_quadratic(Eigen::MatrixXd::Identity(4, 4), "quadratic"));
  }
  if (tag == "linelast2d") return make_linelast2d(j.value("lambda", 1.0), j.value("mu", 1.0));
  throw std::invalid_argument("system: unknown tag " + tag);
}

EntropyCompatReport entropy_compat_check(const ConservationSystem& system, int n_samples,
                                         double radius, unsigned long long seed) {
  EntropyCompatReport rep;
  Rng rng(seed);
  const int N = system.state_dim;
  const int d = system.dim;
  for (int s = 0; s < n_samples; ++s) {
    Eigen::VectorXd U(N);
    for (int c = 0; c < N; ++c) U(c) = radius * (2.0 * rng.uniform() - 1.0);
    const Eigen::VectorXd g = system.entropy.grad(U);
    const Eigen::MatrixXd H = system.entropy.hess(U);
    const auto J = system.flux_jacobian(U);
    const double h = 1e-5 * std::max(1.0, U.norm());
    for (int i = 0; i < N; ++i) {
      Eigen::VectorXd Up = U, Um = U;
      Up(i) += h;
      Um(i) -= h;
      const Eigen::VectorXd dq = (system.entropy_flux(Up) - system.entropy_flux(Um)) / (2.0 * h);
      for (int al = 0; al < d; ++al) {
        double rhs = 0.0;
        for (int jj = 0; jj < N; ++jj) rhs += g(jj) * J[static_cast<std::size_t>(al)](jj, i);
        rep.max_residual_q = std::max(rep.max_residual_q, std::abs(dq(al) - rhs));
      }
    }
    for (int al = 0; al < d; ++al) {
      const Eigen::MatrixXd HJ = H * J[static_cast<std::size_t>(al)];
      rep.max_residual_symmetry =
          std::max(rep.max_residual_symmetry, (HJ - HJ.transpose()).cwiseAbs().maxCoeff());
    }
  }
  return rep;
}

namespace {

// Spectral RHS: -div f(U) - nu Laplacian U with 2/3 dealiasing of the flux.
struct SpectralStepper {
  const ConservationSystem& sys;
  Grid grid;
  double nu;
  std::vector<double> mode_sq;     // |xi|^2 per mode
  std::vector<unsigned char> keep; // 2/3-rule mask
  std::vector<std::array<double, 8>> mode_freq; // xi components per mode

  SpectralStepper(const ConservationSystem& s, const Grid& g, double nu_)
      : sys(s), grid(g), nu(nu_) {
    const long long pts = g.points();
    mode_sq.resize(static_cast<std::size_t>(pts));
    keep.resize(static_cast<std::size_t>(pts));
    mode_freq.resize(static_cast<std::size_t>(pts));
    const int cutoff = g.n / 3;
    for_each_mode(g, [&](long long flat, const int* freq) {
      double s2 = 0.0;
      bool ok = true;
      for (int a = 0; a < g.dim; ++a) {
        s2 += static_cast<double>(freq[a]) * freq[a];
        ok = ok && std::abs(freq[a]) <= cutoff;
        mode_freq[static_cast<std::size_t>(flat)][static_cast<std::size_t>(a)] = freq[a];
      }
      mode_sq[static_cast<std::size_t>(flat)] = s2;
      keep[static_cast<std::size_t>(flat)] = ok ? 1 : 0;
    });
  }

  PeriodicField rhs(const PeriodicField& U) const {
    const int N = sys.state_dim;
    const int d = sys.dim;
    const long long pts = grid.points();
    PeriodicField fluxf(grid, N * d);
    kernels::parallel_for(static_cast<std::size_t>(pts), [&](std::size_t q) {
      const Eigen::MatrixXd f = sys.flux(U.value(static_cast<long long>(q)));
      double* dst = fluxf.at(static_cast<long long>(q));
      for (int i = 0; i < N; ++i)
        for (int al = 0; al < d; ++al) dst[i * d + al] = f(i, al);
    });
    SpectralField fhat = transform(fluxf);
    SpectralField uhat = nu > 0.0 ? transform(U) : SpectralField();
    SpectralField rhat(grid, N);
    const double two_pi = 2.0 * std::numbers::pi;
    kernels::parallel_for(static_cast<std::size_t>(pts), [&](std::size_t m) {
      const long long flat = static_cast<long long>(m);
      std::complex<double>* dst = rhat.at(flat);
      const std::complex<double>* fsrc = fhat.at(flat);
      const bool msk = keep[m] != 0;
      for (int i = 0; i < N; ++i) {
        std::complex<double> div{0.0, 0.0};
        if (msk) {
          for (int al = 0; al < d; ++al) {
            const double xal = mode_freq[m][static_cast<std::size_t>(al)];
            div += std::complex<double>(0.0, two_pi * xal) * fsrc[i * d + al];
          }
        }
        std::complex<double> v = -div;
        if (nu > 0.0)
          v -= nu * (two_pi * two_pi * mode_sq[m]) * uhat.at(flat)[i];
        dst[i] = v;
      }
    });
    // Pin the mean mode: div has none analytically, keep it exact.
    for (int i = 0; i < N; ++i) rhat.coeffs[static_cast<std::size_t>(i)] = 0.0;
    return inverse_transform(rhat);
  }
};

double spectral_radius_estimate(const ConservationSystem& sys, const PeriodicField& U0) {
  double rho = 0.0;
  const long long pts = U0.grid.points();
  const long long stride = std::max<long long>(1, pts / 128);
  for (long long q = 0; q < pts; q += stride) {
    const auto J = sys.flux_jacobian(U0.value(q));
    for (const auto& Ja : J) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ja);
      rho = std::max(rho, svd.singularValues()(0));
    }
  }
  return rho;
}

} // namespace

Trajectory evolve(const ConservationSystem& system, const PeriodicField& U0, double dt,
                  double T, double viscosity, int record_stride) {
  if (U0.fiber != system.state_dim) throw std::invalid_argument("evolve: state fiber mismatch");
  if (!(dt > 0.0) || !(T > 0.0)) throw std::invalid_argument("evolve: dt and T must be positive");
  const Eigen::VectorXd m0 = field_mean(U0);
  if (m0.cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, l2_norm(U0)))
    throw std::invalid_argument("evolve: initial data must have zero mean");
  if (system.involution) {
    // Constraint applies to the involution block of the state.
    PeriodicField block(U0.grid, static_cast<int>(system.constraint_components.size()));
    kernels::parallel_for(static_cast<std::size_t>(U0.grid.points()), [&](std::size_t q) {
      for (std::size_t c = 0; c < system.constraint_components.size(); ++c)
        block.at(static_cast<long long>(q))[c] =
            U0.at(static_cast<long long>(q))[system.constraint_components[c]];
    });
    const double drift = l2_norm(apply_operator(*system.involution, block));
    if (drift > 1e-6 * std::max(1.0, l2_norm(block)))
      throw std::invalid_argument("evolve: initial data violates the involution");
  }

  Trajectory traj;
  traj.system = &system;
  traj.grid = U0.grid;
  traj.dt = dt;
  traj.viscosity = viscosity;

  // Advective CFL heuristic: RK4 covers |z| <= 2.8 on the imaginary axis and
  // the largest first-derivative multiplier is 2 pi h.
  const double rho = spectral_radius_estimate(system, U0);
  const double zmax = dt * rho * 2.0 * std::numbers::pi * U0.grid.half_band();
  traj.cfl_ratio = zmax / 2.8;
  if (traj.cfl_ratio > 1.0)
    throw std::invalid_argument("evolve: dt violates the advective CFL bound (ratio " +
                                std::to_string(traj.cfl_ratio) + ")");

  const SpectralStepper stepper(system, U0.grid, viscosity);
  const long long n_steps = std::llround(T / dt);
  double amax0 = 0.0;
  for (double v : U0.samples) amax0 = std::max(amax0, std::abs(v));
  const double blow_cap = 1e6 * (1.0 + amax0);
  PeriodicField U = U0;

  auto record_drift = [&](const PeriodicField& state, double t) {
    traj.step_times.push_back(t);
    if (!system.involution) {
      traj.involution_drift.push_back(0.0);
      return;
    }
    PeriodicField block(state.grid, static_cast<int>(system.constraint_components.size()));
    kernels::parallel_for(static_cast<std::size_t>(state.grid.points()), [&](std::size_t q) {
      for (std::size_t c = 0; c < system.constraint_components.size(); ++c)
        block.at(static_cast<long long>(q))[c] =
            state.at(static_cast<long long>(q))[system.constraint_components[c]];
    });
    traj.involution_drift.push_back(l2_norm(apply_operator(*system.involution, block)));
  };

  traj.times.push_back(0.0);
  traj.states.push_back(U);
  record_drift(U, 0.0);

  for (long long step = 1; step <= n_steps; ++step) {
    const PeriodicField k1 = stepper.rhs(U);
    PeriodicField tmp = U;
    for (std::size_t i = 0; i < tmp.samples.size(); ++i)
      tmp.samples[i] = U.samples[i] + 0.5 * dt * k1.samples[i];
    const PeriodicField k2 = stepper.rhs(tmp);
    for (std::size_t i = 0; i < tmp.samples.size(); ++i)
      tmp.samples[i] = U.samples[i] + 0.5 * dt * k2.samples[i];
    const PeriodicField k3 = stepper.rhs(tmp);
    for (std::size_t i = 0; i < tmp.samples.size(); ++i)
      tmp.samples[i] = U.samples[i] + dt * k3.samples[i];
    const PeriodicField k4 = stepper.rhs(tmp);
    for (std::size_t i = 0; i < U.samples.size(); ++i)
      U.samples[i] += dt / 6.0 *
                      (k1.samples[i] + 2.0 * k2.samples[i] + 2.0 * k3.samples[i] + k4.samples[i]);

    const double t = static_cast<double>(step) * dt;
    double amax = 0.0;
    for (double v : U.samples) amax = std::max(amax, std::abs(v));
    if (!std::isfinite(amax) || amax > blow_cap) {
      traj.blown_up = true;
      break;
    }
    traj.max_mean_drift = std::max(traj.max_mean_drift, field_mean(U).cwiseAbs().maxCoeff());
    record_drift(U, t);
    if (step % record_stride == 0 || step == n_steps) {
      traj.times.push_back(t);
      traj.states.push_back(U);
    }
  }
  return traj;
}

double entropy_mean(const ConservationSystem& system, const PeriodicField& U) {
  const long long pts = U.grid.points();
  return kernels::reduce_sum(static_cast<std::size_t>(pts), [&](std::size_t q) {
    return system.entropy.eval(U.value(static_cast<long long>(q)));
  }) / static_cast<double>(pts);
}

double relative_entropy(const ConservationSystem& system, const PeriodicField& U,
                        const PeriodicField& Ubar) {
  if (U.grid != Ubar.grid || U.fiber != Ubar.fiber)
    throw std::invalid_argument("relative_entropy: grid mismatch");
  const long long pts = U.grid.points();
  return kernels::reduce_sum(static_cast<std::size_t>(pts), [&](std::size_t q) {
    const Eigen::VectorXd a = Ubar.value(static_cast<long long>(q));
    const Eigen::VectorXd z = U.value(static_cast<long long>(q)) - a;
    return excess(system.entropy, a, z);
  }) / static_cast<double>(pts);
}

PeriodicField relative_flux(const ConservationSystem& system, const PeriodicField& U,
                            const PeriodicField& Ubar) {
  if (U.grid != Ubar.grid || U.fiber != Ubar.fiber)
    throw std::invalid_argument("relative_flux: grid mismatch");
  const int N = system.state_dim;
  const int d = system.dim;
  PeriodicField out(U.grid, N * d);
  kernels::parallel_for(static_cast<std::size_t>(U.grid.points()), [&](std::size_t q) {
    const Eigen::VectorXd a = Ubar.value(static_cast<long long>(q));
    const Eigen::VectorXd u = U.value(static_cast<long long>(q));
    const Eigen::MatrixXd rel = system.flux(u) - system.flux(a);
    const auto J = system.flux_jacobian(a);
    double* dst = out.at(static_cast<long long>(q));
    const Eigen::VectorXd dU = u - a;
    for (int i = 0; i < N; ++i)
      for (int al = 0; al < d; ++al)
        dst[i * d + al] = rel(i, al) - J[static_cast<std::size_t>(al)].row(i).dot(dU);
  });
  return out;
}

DissipationReport dissipation_check(const Trajectory& traj, double t, double eps) {
  if (traj.states.empty()) throw std::invalid_argument("dissipation_check: empty trajectory");
  const double t_end = traj.times.back();
  if (!(t > 0.0) || !(eps > 0.0) || t + eps > t_end + 1e-12)
    throw std::invalid_argument("dissipation_check: window outside the trajectory span");
  const ConservationSystem& sys = *traj.system;
  // Entropy integral as a piecewise-linear function of the recorded times.
  std::vector<double> eta(traj.times.size());
  for (std::size_t i = 0; i < traj.times.size(); ++i) eta[i] = entropy_mean(sys, traj.states[i]);
  auto eval_pl = [&](double tau) {
    if (tau <= traj.times.front()) return eta.front();
    if (tau >= traj.times.back()) return eta.back();
    const auto it = std::upper_bound(traj.times.begin(), traj.times.end(), tau);
    const std::size_t hi = static_cast<std::size_t>(it - traj.times.begin());
    const std::size_t lo = hi - 1;
    const double w = (tau - traj.times[lo]) / (traj.times[hi] - traj.times[lo]);
    return (1.0 - w) * eta[lo] + w * eta[hi];
  };
  // Exact trapezoid of the interpolant over [t, t+eps].
  std::vector<double> knots{t, t + eps};
  for (double tk : traj.times)
    if (tk > t && tk < t + eps) knots.push_back(tk);
  std::sort(knots.begin(), knots.end());
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    integral += 0.5 * (eval_pl(knots[i]) + eval_pl(knots[i + 1])) * (knots[i + 1] - knots[i]);
  DissipationReport rep;
  rep.margin = eta.front() - integral / eps;
  return rep;
}

std::pair<double, double> fit_exp_majorant(const std::vector<double>& times,
                                           const std::vector<double>& values, double v0) {
  // Feasibility: a + b t_i >= y_i with y_i = log(v_i / v0); minimize SSE.
  const std::size_t m = times.size();
  std::vector<double> y(m);
  for (std::size_t i = 0; i < m; ++i)
    y[i] = std::log(std::max(values[i], 1e-300) / v0);
  auto feasible = [&](double a, double b) {
    for (std::size_t i = 0; i < m; ++i)
      if (a + b * times[i] < y[i] - 1e-12 * std::max(1.0, std::abs(y[i]))) return false;
    return true;
  };
  auto sse = [&](double a, double b) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = a + b * times[i] - y[i];
      s += r * r;
    }
    return s;
  };
  double best_a = 0.0, best_b = 0.0, best = std::numeric_limits<double>::infinity();
  // Unconstrained least squares.
  {
    double st = 0.0, st2 = 0.0, sy = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      st += times[i];
      st2 += times[i] * times[i];
      sy += y[i];
      sty += times[i] * y[i];
    }
    const double det = static_cast<double>(m) * st2 - st * st;
    if (std::abs(det) > 1e-14) {
      const double b = (static_cast<double>(m) * sty - st * sy) / det;
      const double a = (sy - b * st) / static_cast<double>(m);
      if (feasible(a, b)) return {std::exp(a), b};
    }
  }
  // One active constraint i with optimal slope.
  for (std::size_t i = 0; i < m; ++i) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double dt = times[k] - times[i];
      num += dt * (y[k] - y[i]);
      den += dt * dt;
    }
    const double b = den > 0.0 ? num / den : 0.0;
    const double a = y[i] - b * times[i];
    if (feasible(a, b) && sse(a, b) < best) {
      best = sse(a, b);
      best_a = a;
      best_b = b;
    }
  }
  // Two active constraints (i, j).
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      if (std::abs(times[j] - times[i]) < 1e-14) continue;
      const double b = (y[j] - y[i]) / (times[j] - times[i]);
      const double a = y[i] - b * times[i];
      if (feasible(a, b) && sse(a, b) < best) {
        best = sse(a, b);
        best_a = a;
        best_b = b;
      }
    }
  if (!std::isfinite(best)) {
    // Fallback: flat majorant at the maximum.
    double ymax = y.empty() ? 0.0 : *std::max_element(y.begin(), y.end());
    return {std::exp(ymax), 0.0};
  }
  return {std::exp(best_a), best_b};
}

StabilityReport weak_strong_monitor(const ConservationSystem& system, const PeriodicField& U0,
                                    const PeriodicField& Ubar0, double dt, double T,
                                    double viscosity_weak, int record_stride) {
  const Trajectory strong = evolve(system, Ubar0, dt, T, 0.0, record_stride);
  const Trajectory weak = evolve(system, U0, dt, T, viscosity_weak, record_stride);
  StabilityReport rep;
  rep.blown_up = strong.blown_up || weak.blown_up;
  const std::size_t m = std::min(strong.states.size(), weak.states.size());
  for (std::size_t i = 0; i < m; ++i) {
    rep.times.push_back(weak.times[i]);
    rep.relative_entropy.push_back(relative_entropy(system, weak.states[i], strong.states[i]));
    PeriodicField diff = weak.states[i];
    for (std::size_t k = 0; k < diff.samples.size(); ++k)
      diff.samples[k] -= strong.states[i].samples[k];
    rep.v_distance.push_back(v_energy(diff, system.p));
    // Drift of the weak run at this recorded time.
    const auto it = std::lower_bound(weak.step_times.begin(), weak.step_times.end(),
                                     weak.times[i] - 1e-12);
    const std::size_t si = static_cast<std::size_t>(it - weak.step_times.begin());
    rep.involution_drift.push_back(si < weak.involution_drift.size() ? weak.involution_drift[si]
                                                                     : 0.0);
  }
  // Dissipation margins on the recorded grid (last row has no window).
  for (std::size_t i = 0; i < m; ++i) {
    if (i == 0 || rep.times[i] >= weak.times.back()) {
      rep.dissipation_margin.push_back(0.0);
      continue;
    }
    const double eps = std::min(rep.times[1] - rep.times[0], weak.times.back() - rep.times[i]);
    rep.dissipation_margin.push_back(eps > 0.0 ? dissipation_check(weak, rep.times[i], eps).margin
                                               : 0.0);
  }
  const double v0 = rep.v_distance.empty() ? 0.0 : rep.v_distance.front();
  if (v0 <= 1e-14) {
    rep.degenerate = true;
    rep.C1 = 1.0;
    rep.C2 = 0.0;
  } else {
    const auto [c1, c2] = fit_exp_majorant(rep.times, rep.v_distance, v0);
    rep.C1 = c1;
    rep.C2 = c2;
  }
  for (std::size_t i = 0; i < rep.times.size(); ++i)
    rep.bound_value.push_back(rep.C1 * v0 * std::exp(rep.C2 * rep.times[i]));
  return rep;
}

} // namespace afree
