#pragma once

// Coulomb-gauge construction: arbitrary tangent frames, gauge-invariant
// products, the connection coefficients A_1, A_2, the global Coulomb frame
// built by axis-then-column ODE integration, and the differentiated fields
// phi_m = v ._mu d_m f + i w ._mu d_m f. Also the shipped initial-data
// families (constant map, on-target bumps).

#include <array>
#include <string>
#include <vector>

#include "spinfield/spectral.hpp"
#include "spinfield/tensor_algebra.hpp"

namespace spinfield {

/// Grid-sampled map into S_mu.
struct SpinField {
    Grid grid;
    Signature sig;
    std::vector<MetricVector> s;

    SpinField() = default;
    SpinField(const Grid& g, const Signature& sg)
        : grid(g), sig(sg), s(g.size(), MetricVector{1.0, 0.0, 0.0}) {}

    MetricVector& at(int i1, int i2) { return s[static_cast<std::size_t>(i1) * grid.n2 + i2]; }
    const MetricVector& at(int i1, int i2) const {
        return s[static_cast<std::size_t>(i1) * grid.n2 + i2];
    }

    /// Max residual of mu*(s._mu s) - 1 (and sheet check for mu = -1).
    double constraint_residual() const;
};

/// Orthonormal tangent frame (v, w) over a SpinField.
struct Frame {
    std::vector<MetricVector> v;
    std::vector<MetricVector> w;
};

/// The differentiated fields (psi_1, psi_2).
struct PsiPair {
    ScalarField psi1;
    ScalarField psi2;
    Signature sig;
};

/// Extract one ambient component of a spin field as a (real) ScalarField.
ScalarField component_field(const SpinField& f, int c);

/// Spectral partial derivatives of all three components.
std::array<ScalarField, 3> spin_derivative(const SpectralWorkspace& ws, const SpinField& f, int m);

/// Any smooth orthonormal frame per (v._mu f = 0, v._mu v = 1, w = f x_mu v):
/// a fixed reference vector projected to the tangent plane, with a fallback
/// reference where the first is degenerate.
Frame arbitrary_frame(const SpinField& f);

/// phi_m = v ._mu d_m f + i w ._mu d_m f for the given frame.
PsiPair differentiated_fields(const SpectralWorkspace& ws, const SpinField& f, const Frame& fr);

/// The four frame-independent products phi_l conj(phi_m), l,m in {1,2},
/// indexed [ (l-1)*2 + (m-1) ].
std::array<ScalarField, 4> gauge_invariant_products(const SpectralWorkspace& ws,
                                                    const SpinField& f, const Frame& fr);

/// q12 = mu Im(phi_1 conj(phi_2)) from any frame's differentiated fields.
ScalarField curvature_q12(const SpectralWorkspace& ws, const PsiPair& phi);

/// A2 = -inv_grad R1 q12,  A1 = inv_grad R2 q12. Coulomb condition
/// d1 A1 + d2 A2 = 0 is exact in the spectral representation.
std::pair<ScalarField, ScalarField> coulomb_coefficients(const SpectralWorkspace& ws,
                                                         const ScalarField& q12);

/// Global Coulomb frame: integrate the linear frame ODE along the x1-axis
/// row through the origin, then along every x2-column, with RK4 on a
/// spectrally refined sampling and per-node tangent reprojection.
/// Requires Q ._mu f(0,0) = 0, Q ._mu Q = 1.
Frame coulomb_frame(const SpectralWorkspace& ws, const SpinField& f, const ScalarField& A1,
                    const ScalarField& A2, const MetricVector& Q);

/// Orthonormality residual of a frame over its base field (max over grid of
/// |v._mu v - 1|, |v._mu f|, |w - f x_mu v|).
double frame_residual(const SpinField& f, const Frame& fr);

/// Full initial gauge pipeline output.
struct GaugeData {
    Frame frame;
    PsiPair phi;
    ScalarField q12;
    ScalarField A1;
    ScalarField A2;
};

/// arbitrary frame -> products -> q12 -> (A1,A2) -> Coulomb frame -> phi.
/// If Q is nullptr a default admissible base vector at the origin is used.
GaugeData coulomb_gauge(const SpectralWorkspace& ws, const SpinField& f,
                        const MetricVector* Q = nullptr);

/// A default unit tangent vector at f(0,0) (the arbitrary-frame choice).
MetricVector default_base_vector(const SpinField& f);

// ---- initial data families --------------------------------------------

struct BumpParams {
    double amplitude = 0.1;
    double radius = 0.0;   // 0 -> L/3
    double center1 = 0.5;  // fractions of L
    double center2 = 0.5;
    double phase = 0.0;    // constant phase offset of the complex bump
    int wave1 = 0;         // integer wavenumbers of a plane-wave phase
    int wave2 = 0;         //   factor e^{2 pi i (k1 x1/L1 + k2 x2/L2)}
};

SpinField constant_map(const Grid& g, const Signature& sig);

/// Smooth compactly supported on-target bump around (1,0,0): inverse
/// stereographic chart for mu=+1, graph chart y0 = sqrt(1+y1^2+y2^2)
/// for mu=-1. Constant outside the bump's support.
SpinField bump_map(const Grid& g, const Signature& sig, const BumpParams& p);

/// Dispatch by family name ("constant" | "bump").
SpinField initial_data(const std::string& kind, const Grid& g, const Signature& sig,
                       const BumpParams& p);

}  // namespace spinfield
