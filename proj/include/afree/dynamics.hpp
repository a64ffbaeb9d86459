#pragma once

#include <optional>

#include "afree/density.hpp"
#include "afree/diffop.hpp"
#include "afree/field.hpp"

namespace afree {

/// First-order system  d_t U + div_x f(U) = 0  on the torus, with an entropy
/// pair (eta, q) and an optional involution operator acting on a block of
/// state components.
struct ConservationSystem {
  int state_dim = 0; // N
  int dim = 0;       // d
  double p = 2.0;    // growth exponent used for the V-distance
  // flux f(U): N x d matrix, entry (i, alpha) = f_{i alpha}(U)
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> flux;
  // flux_jacobian(U)[alpha](i, j) = d f_{i alpha} / d U_j
  std::function<std::vector<Eigen::MatrixXd>(const Eigen::VectorXd&)> flux_jacobian;
  EnergyDensity entropy;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> entropy_flux; // q: R^N -> R^d
  std::optional<DiffOp> involution;
  std::vector<int> constraint_components; // state indices the involution acts on
  std::string name;
};

/// Registry: "psystem1d" (sigma(u) = a u + b u^3), "elasticity2d" (stored
/// energy W on 2x2 gradients), "linelast2d" (isotropic stiffness lambda, mu;
/// Mandel strain components).
ConservationSystem make_psystem1d(double a = 1.0, double b = 0.0);
ConservationSystem make_elasticity2d(const EnergyDensity& W);
ConservationSystem make_linelast2d(double lambda, double mu);
ConservationSystem system_from_json(const std::string& json_text);

struct EntropyCompatReport {
  double max_residual_q = 0.0;        // compatibility d q = D eta . D f
  double max_residual_symmetry = 0.0; // symmetry of D^2 eta . D f
};

/// Finite-difference residuals of the entropy pair identities at seeded
/// random states in a ball.
EntropyCompatReport entropy_compat_check(const ConservationSystem& system, int n_samples,
                                         double radius = 1.0, unsigned long long seed = 5);

struct Trajectory {
  const ConservationSystem* system = nullptr;
  Grid grid;
  double dt = 0.0;
  double viscosity = 0.0;
  std::string scheme = "rk4";
  double cfl_ratio = 0.0;
  bool blown_up = false;
  std::vector<double> times;          // recorded times (stride multiples)
  std::vector<PeriodicField> states;  // recorded states
  std::vector<double> involution_drift; // ||A U||_L2 per step (1 + n_steps)
  std::vector<double> step_times;       // times of the per-step records
  double max_mean_drift = 0.0;          // max |mean component| seen
};

/// Pseudo-spectral RK4 with 2/3-rule dealiasing of the flux and optional
/// Laplacian viscosity on all components. The mean mode is pinned to zero
/// each stage. Throws when the advective CFL heuristic rejects dt; flags and
/// truncates on blow-up.
Trajectory evolve(const ConservationSystem& system, const PeriodicField& U0, double dt,
                  double T, double viscosity, int record_stride = 1);

/// Grid mean of eta(U).
double entropy_mean(const ConservationSystem& system, const PeriodicField& U);

/// Grid mean of eta(U) - eta(Ubar) - D eta(Ubar).(U - Ubar).
double relative_entropy(const ConservationSystem& system, const PeriodicField& U,
                        const PeriodicField& Ubar);

/// Pointwise relative flux f(U|Ubar); fiber N*d with (i, alpha) interleaved.
PeriodicField relative_flux(const ConservationSystem& system, const PeriodicField& U,
                            const PeriodicField& Ubar);

struct DissipationReport {
  double margin = 0.0; // int eta(U0) - time-average of int eta over [t, t+eps]
};

DissipationReport dissipation_check(const Trajectory& traj, double t, double eps);

struct StabilityReport {
  std::vector<double> times;
  std::vector<double> relative_entropy;
  std::vector<double> v_distance;
  std::vector<double> involution_drift;
  std::vector<double> dissipation_margin;
  double C1 = 0.0; // Gronwall majorant v(t) <= C1 v(0) exp(C2 t)
  double C2 = 0.0;
  bool degenerate = false; // v_distance(0) ~ 0; no fit attempted
  bool blown_up = false;
  std::vector<double> bound_value; // C1 v(0) exp(C2 t) per row
};

/// Runs the strong solution (viscosity 0) from Ubar0 and the weak candidate
/// (given viscosity) from U0 with a shared clock, then fits the smallest
/// least-squares exponential majorant over the v-distance rows.
StabilityReport weak_strong_monitor(const ConservationSystem& system, const PeriodicField& U0,
                                    const PeriodicField& Ubar0, double dt, double T,
                                    double viscosity_weak, int record_stride = 10);

/// Least-squares line a + b t majorizing log(v(t)/v0); returns {C1, C2}.
std::pair<double, double> fit_exp_majorant(const std::vector<double>& times,
                                           const std::vector<double>& values, double v0);

} // namespace afree
