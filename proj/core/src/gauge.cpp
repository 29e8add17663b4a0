#include "spinfield/gauge.hpp"

#include <cmath>

namespace spinfield {

double SpinField::constraint_residual() const {
    double worst = 0.0;
    for (const auto& p : s) {
        worst = std::max(worst, std::abs(sig.mu * dot_mu(sig.mu, p, p) - 1.0));
        if (sig.mu == -1) worst = std::max(worst, std::max(0.0, 1.0 - p[0]));
    }
    return worst;
}

ScalarField component_field(const SpinField& f, int c) {
    ScalarField out(f.grid);
    for (std::size_t i = 0; i < f.s.size(); ++i) out.v[i] = Complex{f.s[i][c], 0.0};
    return out;
}

std::array<ScalarField, 3> spin_derivative(const SpectralWorkspace& ws, const SpinField& f,
                                           int m) {
    return {ws.derivative(m, component_field(f, 0)), ws.derivative(m, component_field(f, 1)),
            ws.derivative(m, component_field(f, 2))};
}

namespace {

MetricVector tangent_of_reference(int mu, const MetricVector& s, bool& ok, double& quality) {
    // Tried in order: (0,1,0), then (0,0,1); keep whichever has the larger
    // tangent norm.
    const MetricVector r1{0.0, 1.0, 0.0}, r2{0.0, 0.0, 1.0};
    const MetricVector t1 = tangent_project(mu, s, r1);
    const MetricVector t2 = tangent_project(mu, s, r2);
    const double q1 = dot_mu(mu, t1, t1);
    const double q2 = dot_mu(mu, t2, t2);
    if (q1 >= q2) {
        ok = q1 > 1e-12;
        quality = q1;
        return t1;
    }
    ok = q2 > 1e-12;
    quality = q2;
    return t2;
}

}  // namespace

Frame arbitrary_frame(const SpinField& f) {
    const int mu = f.sig.mu;
    Frame fr;
    fr.v.resize(f.s.size());
    fr.w.resize(f.s.size());
    for (std::size_t i = 0; i < f.s.size(); ++i) {
        bool ok = false;
        double q = 0.0;
        MetricVector t = tangent_of_reference(mu, f.s[i], ok, q);
        if (!ok) throw DegenerateFrame("arbitrary_frame: both reference vectors degenerate");
        fr.v[i] = tangent_normalize(mu, t);
        fr.w[i] = cross_mu(mu, f.s[i], fr.v[i]);
    }
    return fr;
}

PsiPair differentiated_fields(const SpectralWorkspace& ws, const SpinField& f, const Frame& fr) {
    const int mu = f.sig.mu;
    const auto d1 = spin_derivative(ws, f, 1);
    const auto d2 = spin_derivative(ws, f, 2);
    PsiPair out{ScalarField(f.grid), ScalarField(f.grid), f.sig};
    for (std::size_t i = 0; i < f.s.size(); ++i) {
        const MetricVector g1{d1[0].v[i].real(), d1[1].v[i].real(), d1[2].v[i].real()};
        const MetricVector g2{d2[0].v[i].real(), d2[1].v[i].real(), d2[2].v[i].real()};
        out.psi1.v[i] = Complex{dot_mu(mu, fr.v[i], g1), dot_mu(mu, fr.w[i], g1)};
        out.psi2.v[i] = Complex{dot_mu(mu, fr.v[i], g2), dot_mu(mu, fr.w[i], g2)};
    }
    return out;
}

std::array<ScalarField, 4> gauge_invariant_products(const SpectralWorkspace& ws,
                                                    const SpinField& f, const Frame& fr) {
    const PsiPair phi = differentiated_fields(ws, f, fr);
    const ScalarField* p[2] = {&phi.psi1, &phi.psi2};
    std::array<ScalarField, 4> out;
    for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m) out[l * 2 + m] = hadamard(*p[l], conj(*p[m]));
    return out;
}

ScalarField curvature_q12(const SpectralWorkspace& ws, const PsiPair& phi) {
    ScalarField q = imag_part(hadamard(phi.psi1, conj(phi.psi2)));
    q = ws.dealias(q);
    if (phi.sig.mu == -1)
        for (auto& z : q.v) z = -z;
    return q;
}

std::pair<ScalarField, ScalarField> coulomb_coefficients(const SpectralWorkspace& ws,
                                                         const ScalarField& q12) {
    ScalarField ig = ws.inv_grad(q12);
    ScalarField A1 = ws.riesz(2, ig);
    ScalarField A2 = -1.0 * ws.riesz(1, ig);
    return {real_part(A1), real_part(A2)};
}

namespace {

// Spectral refinement factor for the frame transport ODE. Each coarse cell
// is integrated with kFrameRefine/2 RK4 substeps whose stage values come
// from the refined samples, so the transport error scales like
// (dx/kFrameRefine)^4 per cell.
constexpr int kFrameRefine = 8;

// Zero-padded spectral interpolation onto a refined grid. The coarse
// Nyquist coefficient is split between +-n/2 to keep real fields real.
ScalarField upsample(const SpectralWorkspace& ws, const SpectralWorkspace& fine,
                     const ScalarField& f) {
    const Grid& gc = ws.grid();
    const Grid& gf = fine.grid();
    ScalarField fh = ws.forward(f);
    ScalarField gh(gf);
    auto fine_index = [&](int k, int n_fine) { return k >= 0 ? k : k + n_fine; };
    for (int i = 0; i < gc.n1; ++i) {
        const int k1 = (i < gc.n1 / 2) ? i : i - gc.n1;
        for (int j = 0; j < gc.n2; ++j) {
            const int k2 = (j < gc.n2 / 2) ? j : j - gc.n2;
            Complex c = fh.at(i, j);
            const bool ny1 = (i == gc.n1 / 2);
            const bool ny2 = (j == gc.n2 / 2);
            const double w = (ny1 ? 0.5 : 1.0) * (ny2 ? 0.5 : 1.0);
            c *= w;
            const int t1[2] = {k1, -k1};
            const int t2[2] = {k2, -k2};
            for (int a = 0; a < (ny1 ? 2 : 1); ++a)
                for (int b = 0; b < (ny2 ? 2 : 1); ++b)
                    gh.at(fine_index(t1[a], gf.n1), fine_index(t2[b], gf.n2)) += c;
        }
    }
    const double scale = static_cast<double>(gf.size()) / static_cast<double>(gc.size());
    for (auto& z : gh.v) z *= scale;
    return fine.inverse(gh);
}

struct FineData {
    // All sampled on the refined grid, row-major.
    Grid grid;
    std::vector<MetricVector> s;
    std::vector<MetricVector> ds[2];  // d1 s, d2 s
    std::vector<double> A[2];
};

FineData refine_for_frame_ode(const SpectralWorkspace& ws, const SpinField& f,
                              const ScalarField& A1, const ScalarField& A2) {
    const Grid& gc = ws.grid();
    Grid gf{kFrameRefine * gc.n1, kFrameRefine * gc.n2, gc.L1, gc.L2};
    SpectralWorkspace fine(gf);
    FineData out;
    out.grid = gf;
    out.s.resize(gf.size());
    ScalarField comp[3];
    for (int c = 0; c < 3; ++c) comp[c] = upsample(ws, fine, component_field(f, c));
    for (std::size_t i = 0; i < gf.size(); ++i) {
        MetricVector p{comp[0].v[i].real(), comp[1].v[i].real(), comp[2].v[i].real()};
        out.s[i] = project_to_target(f.sig.mu, p);
        for (int c = 0; c < 3; ++c) comp[c].v[i] = Complex{out.s[i][c], 0.0};
    }
    // Differentiate the projected fine samples on the fine grid, so the ODE
    // coefficients (s, ds) are exactly consistent with each other; this keeps
    // the transported frame orthonormal to truncation order.
    for (int m = 0; m < 2; ++m) {
        out.ds[m].resize(gf.size());
        ScalarField dc[3];
        for (int c = 0; c < 3; ++c) dc[c] = fine.derivative(m + 1, comp[c]);
        for (std::size_t i = 0; i < gf.size(); ++i)
            out.ds[m][i] = {dc[0].v[i].real(), dc[1].v[i].real(), dc[2].v[i].real()};
    }
    ScalarField a1 = upsample(ws, fine, A1);
    ScalarField a2 = upsample(ws, fine, A2);
    out.A[0].resize(gf.size());
    out.A[1].resize(gf.size());
    for (std::size_t i = 0; i < gf.size(); ++i) {
        out.A[0][i] = a1.v[i].real();
        out.A[1][i] = a2.v[i].real();
    }
    return out;
}

// d_m v = -mu (d_m s ._mu v) s + A_m (s x_mu v)
MetricVector frame_rhs(int mu, const MetricVector& s, const MetricVector& ds, double a,
                       const MetricVector& v) {
    const double c = -mu * dot_mu(mu, ds, v);
    MetricVector out = cross_mu(mu, s, v);
    for (int i = 0; i < 3; ++i) out[i] = c * s[i] + a * out[i];
    return out;
}

}  // namespace

Frame coulomb_frame(const SpectralWorkspace& ws, const SpinField& f, const ScalarField& A1,
                    const ScalarField& A2, const MetricVector& Q) {
    const Grid& g = ws.grid();
    const int mu = f.sig.mu;
    if (std::abs(dot_mu(mu, Q, f.at(0, 0))) > 1e-8 || std::abs(dot_mu(mu, Q, Q) - 1.0) > 1e-8)
        throw DegenerateFrame("coulomb_frame: base vector not an admissible unit tangent");

    const FineData fd = refine_for_frame_ode(ws, f, A1, A2);
    const int nf2 = fd.grid.n2;
    auto fine_at = [&](int i1f, int i2f) -> std::size_t {
        return static_cast<std::size_t>(i1f % fd.grid.n1) * nf2 + (i2f % nf2);
    };

    Frame fr;
    fr.v.assign(g.size(), MetricVector{0, 0, 0});
    fr.w.assign(g.size(), MetricVector{0, 0, 0});

    // One RK4 substep of the linear frame ODE between adjacent even fine
    // nodes, using the refined midpoint sample, then tangent reprojection at
    // the landing node.
    auto rk4_step = [&](int m, double h, std::size_t if0, std::size_t ifm, std::size_t if1,
                        const MetricVector& v0, const MetricVector& s_land) {
        const auto& ds = fd.ds[m];
        const auto& a = fd.A[m];
        MetricVector k1 = frame_rhs(mu, fd.s[if0], ds[if0], a[if0], v0);
        MetricVector k2 = frame_rhs(mu, fd.s[ifm], ds[ifm], a[ifm], v0 + (h / 2) * k1);
        MetricVector k3 = frame_rhs(mu, fd.s[ifm], ds[ifm], a[ifm], v0 + (h / 2) * k2);
        MetricVector k4 = frame_rhs(mu, fd.s[if1], ds[if1], a[if1], v0 + h * k3);
        MetricVector v = v0 + (h / 6) * (k1 + 2.0 * (k2 + k3) + k4);
        const double raw =
            std::abs(dot_mu(mu, v, s_land)) + std::abs(dot_mu(mu, v, v) - 1.0);
        if (raw > 1e-2)
            throw FrameDrift("coulomb_frame: raw step drift " + std::to_string(raw) +
                             " (grid too coarse for the data)");
        const MetricVector vp = tangent_normalize(mu, tangent_project(mu, s_land, v));
        const double drift =
            std::abs(dot_mu(mu, vp, s_land)) + std::abs(dot_mu(mu, vp, vp) - 1.0);
        if (drift > 1e-6)
            throw FrameDrift("coulomb_frame: constraint residual " + std::to_string(drift) +
                             " after re-orthonormalization");
        return vp;
    };

    // March from one coarse node to the adjacent one along axis (a1, a2)
    // with kFrameRefine/2 substeps; intermediate landings reproject onto the
    // refined samples, the final landing onto the coarse node value.
    const int S = kFrameRefine / 2;
    auto transport = [&](int m, double h, int i1f, int i2f, int a1, int a2, MetricVector v,
                         const MetricVector& s_land_coarse) {
        const double hs = h / S;
        for (int sub = 0; sub < S; ++sub) {
            const std::size_t if0 = fine_at(i1f + a1 * 2 * sub, i2f + a2 * 2 * sub);
            const std::size_t ifm =
                fine_at(i1f + a1 * (2 * sub + 1), i2f + a2 * (2 * sub + 1));
            const std::size_t if1 =
                fine_at(i1f + a1 * (2 * sub + 2), i2f + a2 * (2 * sub + 2));
            const MetricVector& s_land = (sub + 1 == S) ? s_land_coarse : fd.s[if1];
            v = rk4_step(m, hs, if0, ifm, if1, v, s_land);
        }
        return v;
    };

    // Axis row i2 = 0.
    fr.v[0] = Q;
    const double h1 = g.dx1();
    for (int i1 = 0; i1 + 1 < g.n1; ++i1) {
        fr.v[static_cast<std::size_t>(i1 + 1) * g.n2] =
            transport(0, h1, kFrameRefine * i1, 0, 1, 0,
                      fr.v[static_cast<std::size_t>(i1) * g.n2], f.at(i1 + 1, 0));
    }
    // Columns.
    const double h2 = g.dx2();
    for (int i1 = 0; i1 < g.n1; ++i1) {
        for (int i2 = 0; i2 + 1 < g.n2; ++i2) {
            fr.v[static_cast<std::size_t>(i1) * g.n2 + i2 + 1] = transport(
                1, h2, kFrameRefine * i1, kFrameRefine * i2, 0, 1,
                fr.v[static_cast<std::size_t>(i1) * g.n2 + i2], f.at(i1, i2 + 1));
        }
    }
    for (std::size_t i = 0; i < g.size(); ++i) fr.w[i] = cross_mu(mu, f.s[i], fr.v[i]);
    return fr;
}

double frame_residual(const SpinField& f, const Frame& fr) {
    const int mu = f.sig.mu;
    double worst = 0.0;
    for (std::size_t i = 0; i < f.s.size(); ++i) {
        worst = std::max(worst, std::abs(dot_mu(mu, fr.v[i], fr.v[i]) - 1.0));
        worst = std::max(worst, std::abs(dot_mu(mu, fr.v[i], f.s[i])));
        const MetricVector wref = cross_mu(mu, f.s[i], fr.v[i]);
        for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(fr.w[i][c] - wref[c]));
    }
    return worst;
}

MetricVector default_base_vector(const SpinField& f) {
    bool ok = false;
    double q = 0.0;
    MetricVector t = tangent_of_reference(f.sig.mu, f.at(0, 0), ok, q);
    if (!ok) throw DegenerateFrame("default_base_vector: degenerate at the origin");
    return tangent_normalize(f.sig.mu, t);
}

GaugeData coulomb_gauge(const SpectralWorkspace& ws, const SpinField& f, const MetricVector* Q) {
    GaugeData out;
    const Frame any = arbitrary_frame(f);
    const PsiPair phi_any = differentiated_fields(ws, f, any);
    out.q12 = curvature_q12(ws, phi_any);
    auto [A1, A2] = coulomb_coefficients(ws, out.q12);
    out.A1 = A1;
    out.A2 = A2;
    const MetricVector base = Q ? *Q : default_base_vector(f);
    out.frame = coulomb_frame(ws, f, out.A1, out.A2, base);
    out.phi = differentiated_fields(ws, f, out.frame);
    return out;
}

SpinField constant_map(const Grid& g, const Signature& sig) { return SpinField(g, sig); }

SpinField bump_map(const Grid& g, const Signature& sig, const BumpParams& p) {
    if (!sig.valid()) throw InvalidParams("bump_map: invalid signature");
    const double R = (p.radius > 0.0) ? p.radius : std::min(g.L1, g.L2) / 3.0;
    if (R >= std::min(g.L1, g.L2) / 2.0)
        throw InvalidParams("bump_map: radius must be below half the period");
    SpinField f(g, sig);
    const double cx = p.center1 * g.L1;
    const double cy = p.center2 * g.L2;
    for (int i1 = 0; i1 < g.n1; ++i1) {
        for (int i2 = 0; i2 < g.n2; ++i2) {
            double dx = i1 * g.dx1() - cx;
            double dy = i2 * g.dx2() - cy;
            dx -= g.L1 * std::round(dx / g.L1);
            dy -= g.L2 * std::round(dy / g.L2);
            const double r2 = (dx * dx + dy * dy) / (R * R);
            if (r2 >= 1.0) continue;
            const double profile = std::exp(1.0 - 1.0 / (1.0 - r2));
            const double two_pi = 2.0 * std::acos(-1.0);
            const double phase =
                p.phase + two_pi * (p.wave1 * (i1 * g.dx1()) / g.L1 +
                                    p.wave2 * (i2 * g.dx2()) / g.L2);
            const Complex u = p.amplitude * profile * std::polar(1.0, phase);
            MetricVector& s = f.at(i1, i2);
            if (sig.mu == 1) {
                const double n2 = std::norm(u);
                s = {(1.0 - n2) / (1.0 + n2), 2.0 * u.real() / (1.0 + n2),
                     2.0 * u.imag() / (1.0 + n2)};
            } else {
                s = {std::sqrt(1.0 + std::norm(u)), u.real(), u.imag()};
            }
        }
    }
    return f;
}

SpinField initial_data(const std::string& kind, const Grid& g, const Signature& sig,
                       const BumpParams& p) {
    if (kind == "constant") return constant_map(g, sig);
    if (kind == "bump") return bump_map(g, sig, p);
    throw InvalidParams("initial_data: unknown family '" + kind + "'");
}

}  // namespace spinfield
