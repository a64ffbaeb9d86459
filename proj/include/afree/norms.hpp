#pragma once

#include "afree/field.hpp"
#include "afree/transform.hpp"

namespace afree {

/// Discrete L^p norm: (grid mean of |psi(x)|^p)^(1/p); |Q| = 1 convention.
double lp_norm(const PeriodicField& field, double p);

/// Homogeneous Sobolev norm of integer order s (possibly negative): the L^p
/// norm of F^{-1}[|xi|^s psi_hat(xi)] with |xi| the Euclidean norm of the
/// integer frequency (the xi=0 coefficient is dropped; for s<0 the field
/// must have zero mean). For p=2 the Plancherel form is used.
double sobolev_norm(const PeriodicField& field, int s, double p);

/// Inhomogeneous W^{l,p}-style norm assembled from the multiplier orders
/// 0..l: (sum_j sobolev_norm(field, j, p)^2)^(1/2). l >= 0.
double wlp_norm(const PeriodicField& field, int l, double p);

/// int_Q |V(psi)|^2 = grid mean of (|psi|^2 + |psi|^p); requires p >= 2.
double v_energy(const PeriodicField& field, double p);

/// (||u||_{W^{-1,2}}^2 + ||u||_{W^{-1,p}}^p)^(1/2); zero-mean u, p >= 2.
double mixed_negative_norm(const PeriodicField& field, double p);

} // namespace afree
