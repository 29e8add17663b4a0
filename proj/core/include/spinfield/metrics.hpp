#pragma once

// Gauge-invariant semidistances between maps: the closed-form phase
// minimization behind d^1, the space-time semidistance rho^1 via
// golden-section search on the unit circle, the symmetry-invariance
// report (dilation, translation, target isometries), and the
// perturbation stability sweep.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "spinfield/modified_system.hpp"

namespace spinfield {

struct FieldPairNorms {
    double d1 = 0.0;
    double rho1 = 0.0;
    Complex optimal_z{1.0, 0.0};
};

/// d^1 closed form: with c = <phiA_1, phiB_1> + <phiA_2, phiB_2>,
///   d1^2 = sum_m (||phiA_m||^2 + ||phiB_m||^2) - 2|c|,
/// attained at z = conj(c)/|c| (z = 1 when c = 0). rho1 is left 0.
FieldPairNorms semidistance_d1(const PsiPair& a, const PsiPair& b);

/// rho^1 on aligned snapshot histories: the L^inf_t L^2_x piece and the
/// L^4_{x,t} piece are minimized over |z| = 1 separately (coarse circle
/// scan seeded at the d^1 optimum, then golden-section refinement) and
/// summed. d1 is filled with sup_t of the per-snapshot d^1; optimal_z is
/// the L^inf_t L^2_x optimizer.
FieldPairNorms semidistance_rho1(const Trajectory& a, const Trajectory& b);

// ---- target isometries -------------------------------------------------

using MetricMatrix = std::array<std::array<double, 3>, 3>;

/// Rotation by theta in the (y1, y2) plane (in G_mu for both signatures).
MetricMatrix rotation_12(double theta);
/// Rotation (mu = +1) or boost (mu = -1) by theta mixing (y0, y1).
MetricMatrix mixer_01(int mu, double theta);
MetricMatrix matmul(const MetricMatrix& a, const MetricMatrix& b);
/// Membership check O^t eta_mu O = eta_mu, det O = 1, O e0 on the target.
bool is_isometry(int mu, const MetricMatrix& O, double tol = 1e-10);

/// Pointwise O . s. Throws IncompatibleSymmetry if O is not in G_mu.
SpinField apply_isometry(const SpinField& f, const MetricMatrix& O);
/// (delta_r f)(y) = f(ry); the result keeps the samples and rescales the box
/// to period L/r, which is the lattice realization that preserves the
/// critical seminorm exactly. r must be a positive integer.
SpinField dilate(const SpinField& f, int r);
/// (tau_p f)(x) = f(x + p) for a whole number of cells p = (p1, p2).
SpinField translate(const SpinField& f, int p1, int p2);

struct InvarianceReport {
    double dilation_gap = 0.0;     // |d1(delta_r f, delta_r f') - d1(f, f')|
    double translation_gap = 0.0;  // same for tau_p
    double isometry_gap = 0.0;     // same for R_O applied to both maps
    double orbit_distance = 0.0;   // d1(f, R_O f) itself
};

/// Evaluate d^1 through the full Coulomb-gauge pipeline for f, f' and
/// their transformed copies.
InvarianceReport invariance_suite(const SpectralWorkspace& ws, const SpinField& f,
                                  const SpinField& fprime, int r, int p1, int p2,
                                  const MetricMatrix& O);

// ---- stability sweep ---------------------------------------------------

struct SweepRow {
    double delta = 0.0;
    double delta_in = 0.0;   // d1(f, f'_delta) at t = 0
    double delta_out = 0.0;  // rho1 of the evolved field trajectories
    double ratio = 0.0;      // delta_out / delta_in (0 when delta_in = 0)
    std::string status;      // "ok" or the failure reason
};

/// Run the gauge + evolution pipeline for the base map and each perturbed
/// map and tabulate the input/output semidistances. Failures of perturbed
/// runs are recorded per row, not thrown.
std::vector<SweepRow> stability_sweep(const SpectralWorkspace& ws, const SpinField& base,
                                      const std::function<SpinField(double)>& family,
                                      const std::vector<double>& deltas,
                                      const SolverConfig& cfg);

}  // namespace spinfield
