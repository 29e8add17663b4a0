#pragma once

// Rebuilding the spin map from the evolved fields: pointwise frame time
// ODEs driven by (psi_0, A_0), constraint restoration, the spatial
// identity diagnostics, and the independent oracle that evolves the
// original spin equation directly.

#include <vector>

#include "spinfield/modified_system.hpp"

namespace spinfield {

struct GeometricState {
    SpinField s;
    Frame frame;
    double t = 0.0;
};

/// Max over the grid of the six orthonormality constraints
/// (v._mu s, w._mu s, v._mu w, mu s._mu s - 1, v._mu v - 1, w._mu w - 1).
double geometric_constraint_residual(const GeometricState& g);

/// One RK4 step of the pointwise linear ODE
///   d0 s = v Re(psi0) + w Im(psi0)
///   d0 v = -s mu Re(psi0) + w A0
///   d0 w = -s mu Im(psi0) - v A0
/// with (psi0, A0) supplied at the step start, midpoint and end, followed
/// by constraint restoration (s to the target, v to the tangent plane,
/// w = s x_mu v).
GeometricState frame_time_step(const GeometricState& g, const ScalarField& psi0_begin,
                               const ScalarField& psi0_mid, const ScalarField& psi0_end,
                               const ScalarField& A0_begin, const ScalarField& A0_mid,
                               const ScalarField& A0_end, double dt);

/// March the frame through a psi trajectory. Stage-time psi values are
/// interpolated from the snapshots with 4-point polynomial interpolation
/// in t; psi0 and A0 are recomputed from the interpolated fields.
std::vector<GeometricState> reconstruct(const SpectralWorkspace& ws, const Trajectory& traj,
                                        const GeometricState& initial);

/// One RK4 step of the original spin equation (the ORACLE):
///   dt s = s x_mu (s11 + eps s22) + s1 zeta2 - eps s2 zeta1,
///   zeta_m = -R_m inv_grad[ 2 mu s ._mu (s1 x_mu s2) ],
/// followed by projection to the target.
SpinField direct_spin_step(const SpectralWorkspace& ws, const SpinField& s, double dt);

/// zeta from the connection: (zeta1, zeta2) = (-2 A2, 2 A1).
std::pair<ScalarField, ScalarField> zeta_from_connection(const Connection& conn);

/// The equivalent multiplier form zeta_m = 2 R_m inv_grad(q12).
std::pair<ScalarField, ScalarField> zeta_from_q12(const SpectralWorkspace& ws,
                                                  const ScalarField& q12);

/// L^2 residual of d_m s - v Re(psi_m) - w Im(psi_m), summed over m = 1,2.
double spatial_identity_residual(const SpectralWorkspace& ws, const GeometricState& g,
                                 const PsiPair& psi);

/// Max over the grid of | |Ds| - |psi| |.
double gradient_identity_residual(const SpectralWorkspace& ws, const GeometricState& g,
                                  const PsiPair& psi);

/// Max pointwise difference of two spin fields (L^inf over components).
double spin_distance_linf(const SpinField& a, const SpinField& b);

}  // namespace spinfield
