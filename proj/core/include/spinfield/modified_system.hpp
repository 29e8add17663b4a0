#pragma once

// The modified spin system: connection coefficients A_0, A_1, A_2 and the
// semilinear nonlinearity N_m built from (psi_1, psi_2), advanced in time
// with an integrating-factor RK4 that applies the linear propagator
// exactly.

#include <array>
#include <vector>

#include "spinfield/gauge.hpp"
#include "spinfield/spectral.hpp"

namespace spinfield {

struct PsiState {
    PsiPair psi;
    double t = 0.0;
};

struct Connection {
    ScalarField A0;
    ScalarField A1;
    ScalarField A2;
    ScalarField q12;
};

struct SolverConfig {
    double dt = 1e-3;
    double T = 0.25;
    bool dealias = true;
    double blowup_threshold = 1e6;  // on the running L^4_{x,t} accumulator
    int snapshot_stride = 1;
};

struct BlowupReport {
    bool blowup = false;      // accumulator crossed the threshold
    bool nonfinite = false;   // a non-finite value appeared
    double t_stop = 0.0;
    double accumulator = 0.0;  // ||psi||^4_{L^4_{x,t}} up to t_stop
};

struct Trajectory {
    std::vector<PsiState> snapshots;
    std::vector<double> accumulator_series;  // running L^4 accumulator per snapshot
    double snapshot_dt = 0.0;
    BlowupReport report;
};

/// q12, A1, A2, A0 from the current fields (products dealiased).
Connection connection_from_psi(const SpectralWorkspace& ws, const PsiState& state,
                               bool dealias = true);

/// N_m = -i A0 psi_m + sum_l eps^{l+1} [ psi_l (d_l A_m + d_m A_l)
///        + psi_m (-d_l A_l + i A_l^2) ].
std::array<ScalarField, 2> nonlinearity(const SpectralWorkspace& ws, const PsiState& state,
                                        const Connection& conn, bool dealias = true);

/// psi_0 = i d1 psi1 + i eps d2 psi2 + A1 psi1 + eps A2 psi2.
ScalarField psi0_from_psi(const SpectralWorkspace& ws, const PsiState& state,
                          const Connection& conn);

/// One integrating-factor RK4 step. Throws NonFinite on numerical blow-up.
PsiState step(const SpectralWorkspace& ws, const PsiState& state, const SolverConfig& cfg);

/// Integrate to cfg.T or until blow-up is detected; snapshots every
/// snapshot_stride steps (the initial state is always included).
Trajectory solve(const SpectralWorkspace& ws, const PsiState& state0, const SolverConfig& cfg);

/// Residual of the mass-evolution identity per snapshot: discrete d/dt of
/// int |psi_m|^2 minus the quadrature of its quadratic right-hand side.
/// Returns one (residual_1, residual_2) pair per interior snapshot.
/// dealias must match the setting the trajectory was produced with.
std::vector<std::array<double, 2>> mass_identity_residual(const SpectralWorkspace& ws,
                                                          const Trajectory& traj,
                                                          bool dealias = true);

/// Residual of the compatibility condition F = D1 psi2 - D2 psi1 (L^2).
double compatibility_residual(const SpectralWorkspace& ws, const PsiState& state,
                              const Connection& conn);

/// Residual of the (1,2) curvature identity d1 A2 - d2 A1 - q12 (L^2).
double curvature_residual(const SpectralWorkspace& ws, const Connection& conn);

}  // namespace spinfield
