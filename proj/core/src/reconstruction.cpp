#include "spinfield/reconstruction.hpp"

#include <cmath>

namespace spinfield {

double geometric_constraint_residual(const GeometricState& g) {
    const int mu = g.s.sig.mu;
    double worst = 0.0;
    for (std::size_t i = 0; i < g.s.s.size(); ++i) {
        const MetricVector& s = g.s.s[i];
        const MetricVector& v = g.frame.v[i];
        const MetricVector& w = g.frame.w[i];
        worst = std::max(worst, std::abs(dot_mu(mu, v, s)));
        worst = std::max(worst, std::abs(dot_mu(mu, w, s)));
        worst = std::max(worst, std::abs(dot_mu(mu, v, w)));
        worst = std::max(worst, std::abs(mu * dot_mu(mu, s, s) - 1.0));
        worst = std::max(worst, std::abs(dot_mu(mu, v, v) - 1.0));
        worst = std::max(worst, std::abs(dot_mu(mu, w, w) - 1.0));
    }
    return worst;
}

namespace {

struct Triple {
    MetricVector s, v, w;
};

Triple generator(int mu, const Triple& x, Complex psi0, double a0) {
    const double re = psi0.real(), im = psi0.imag();
    Triple d;
    for (int c = 0; c < 3; ++c) {
        d.s[c] = x.v[c] * re + x.w[c] * im;
        d.v[c] = -mu * x.s[c] * re + x.w[c] * a0;
        d.w[c] = -mu * x.s[c] * im - x.v[c] * a0;
    }
    return d;
}

Triple axpy(const Triple& x, double a, const Triple& k) {
    Triple out;
    for (int c = 0; c < 3; ++c) {
        out.s[c] = x.s[c] + a * k.s[c];
        out.v[c] = x.v[c] + a * k.v[c];
        out.w[c] = x.w[c] + a * k.w[c];
    }
    return out;
}

}  // namespace

GeometricState frame_time_step(const GeometricState& g, const ScalarField& psi0_begin,
                               const ScalarField& psi0_mid, const ScalarField& psi0_end,
                               const ScalarField& A0_begin, const ScalarField& A0_mid,
                               const ScalarField& A0_end, double dt) {
    const int mu = g.s.sig.mu;
    GeometricState out = g;
    out.t = g.t + dt;
    for (std::size_t i = 0; i < g.s.s.size(); ++i) {
        Triple x{g.s.s[i], g.frame.v[i], g.frame.w[i]};
        const Triple k1 = generator(mu, x, psi0_begin.v[i], A0_begin.v[i].real());
        const Triple k2 =
            generator(mu, axpy(x, dt / 2, k1), psi0_mid.v[i], A0_mid.v[i].real());
        const Triple k3 =
            generator(mu, axpy(x, dt / 2, k2), psi0_mid.v[i], A0_mid.v[i].real());
        const Triple k4 = generator(mu, axpy(x, dt, k3), psi0_end.v[i], A0_end.v[i].real());
        Triple y;
        for (int c = 0; c < 3; ++c) {
            y.s[c] = x.s[c] + (dt / 6) * (k1.s[c] + 2 * (k2.s[c] + k3.s[c]) + k4.s[c]);
            y.v[c] = x.v[c] + (dt / 6) * (k1.v[c] + 2 * (k2.v[c] + k3.v[c]) + k4.v[c]);
            y.w[c] = x.w[c] + (dt / 6) * (k1.w[c] + 2 * (k2.w[c] + k3.w[c]) + k4.w[c]);
        }
        // Constraint restoration.
        y.s = project_to_target(mu, y.s);
        y.v = tangent_normalize(mu, tangent_project(mu, y.s, y.v));
        y.w = cross_mu(mu, y.s, y.v);
        out.s.s[i] = y.s;
        out.frame.v[i] = y.v;
        out.frame.w[i] = y.w;
    }
    return out;
}

namespace {

// 4-point Lagrange weights at the midpoint of the interval [i, i+1] for
// sample indices (j0..j0+3) on a uniform grid.
PsiPair interp_mid(const Trajectory& traj, std::size_t n) {
    const std::size_t count = traj.snapshots.size();
    std::size_t j0;
    std::array<double, 4> w;
    if (count < 4) {
        // Quadratic or linear fallback on short histories.
        const PsiPair& a = traj.snapshots[n].psi;
        const PsiPair& b = traj.snapshots[n + 1].psi;
        PsiPair out = a;
        for (std::size_t i = 0; i < out.psi1.v.size(); ++i) {
            out.psi1.v[i] = 0.5 * (a.psi1.v[i] + b.psi1.v[i]);
            out.psi2.v[i] = 0.5 * (a.psi2.v[i] + b.psi2.v[i]);
        }
        return out;
    }
    if (n == 0) {
        j0 = 0;
        w = {0.3125, 0.9375, -0.3125, 0.0625};
    } else if (n + 2 >= count) {
        j0 = count - 4;
        w = {0.0625, -0.3125, 0.9375, 0.3125};
    } else {
        j0 = n - 1;
        w = {-0.0625, 0.5625, 0.5625, -0.0625};
    }
    PsiPair out = traj.snapshots[n].psi;
    for (std::size_t i = 0; i < out.psi1.v.size(); ++i) {
        Complex a1{0, 0}, a2{0, 0};
        for (int j = 0; j < 4; ++j) {
            a1 += w[j] * traj.snapshots[j0 + j].psi.psi1.v[i];
            a2 += w[j] * traj.snapshots[j0 + j].psi.psi2.v[i];
        }
        out.psi1.v[i] = a1;
        out.psi2.v[i] = a2;
    }
    return out;
}

struct Psi0A0 {
    ScalarField psi0;
    ScalarField A0;
};

Psi0A0 derived_fields(const SpectralWorkspace& ws, const PsiPair& psi, double t) {
    PsiState st{psi, t};
    Connection conn = connection_from_psi(ws, st);
    return {psi0_from_psi(ws, st, conn), conn.A0};
}

}  // namespace

std::vector<GeometricState> reconstruct(const SpectralWorkspace& ws, const Trajectory& traj,
                                        const GeometricState& initial) {
    std::vector<GeometricState> out;
    out.push_back(initial);
    if (traj.snapshots.size() < 2) return out;
    const double dt = traj.snapshot_dt;

    Psi0A0 begin = derived_fields(ws, traj.snapshots[0].psi, traj.snapshots[0].t);
    for (std::size_t n = 0; n + 1 < traj.snapshots.size(); ++n) {
        const PsiPair mid_psi = interp_mid(traj, n);
        Psi0A0 mid = derived_fields(ws, mid_psi, traj.snapshots[n].t + dt / 2);
        Psi0A0 end = derived_fields(ws, traj.snapshots[n + 1].psi, traj.snapshots[n + 1].t);
        out.push_back(frame_time_step(out.back(), begin.psi0, mid.psi0, end.psi0, begin.A0,
                                      mid.A0, end.A0, dt));
        begin = std::move(end);
    }
    return out;
}

namespace {

std::vector<MetricVector> spin_rhs(const SpectralWorkspace& ws, const SpinField& f) {
    const int mu = f.sig.mu;
    const int eps = f.sig.epsilon;
    const auto s1 = spin_derivative(ws, f, 1);
    const auto s2 = spin_derivative(ws, f, 2);
    std::array<ScalarField, 3> lap;
    for (int c = 0; c < 3; ++c) {
        ScalarField s11 = ws.derivative(1, s1[c]);
        ScalarField s22 = ws.derivative(2, s2[c]);
        lap[c] = ScalarField(ws.grid());
        for (std::size_t i = 0; i < lap[c].v.size(); ++i)
            lap[c].v[i] = s11.v[i] + static_cast<double>(eps) * s22.v[i];
    }
    ScalarField charge(ws.grid());  // 2 mu s ._mu (s1 x_mu s2)
    for (std::size_t i = 0; i < charge.v.size(); ++i) {
        const MetricVector g1{s1[0].v[i].real(), s1[1].v[i].real(), s1[2].v[i].real()};
        const MetricVector g2{s2[0].v[i].real(), s2[1].v[i].real(), s2[2].v[i].real()};
        charge.v[i] = 2.0 * mu * dot_mu(mu, f.s[i], cross_mu(mu, g1, g2));
    }
    charge = ws.dealias(charge);
    ScalarField zeta1 = -1.0 * ws.riesz(1, ws.inv_grad(charge));
    ScalarField zeta2 = -1.0 * ws.riesz(2, ws.inv_grad(charge));

    std::vector<MetricVector> rhs(f.s.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        const MetricVector l{lap[0].v[i].real(), lap[1].v[i].real(), lap[2].v[i].real()};
        const MetricVector g1{s1[0].v[i].real(), s1[1].v[i].real(), s1[2].v[i].real()};
        const MetricVector g2{s2[0].v[i].real(), s2[1].v[i].real(), s2[2].v[i].real()};
        MetricVector r = cross_mu(mu, f.s[i], l);
        const double z1 = zeta1.v[i].real(), z2 = zeta2.v[i].real();
        for (int c = 0; c < 3; ++c) r[c] += g1[c] * z2 - eps * g2[c] * z1;
        rhs[i] = r;
    }
    return rhs;
}

SpinField field_axpy(const SpinField& f, double a, const std::vector<MetricVector>& k) {
    SpinField out = f;
    for (std::size_t i = 0; i < out.s.size(); ++i)
        for (int c = 0; c < 3; ++c) out.s[i][c] += a * k[i][c];
    return out;
}

}  // namespace

SpinField direct_spin_step(const SpectralWorkspace& ws, const SpinField& s, double dt) {
    const auto k1 = spin_rhs(ws, s);
    const auto k2 = spin_rhs(ws, field_axpy(s, dt / 2, k1));
    const auto k3 = spin_rhs(ws, field_axpy(s, dt / 2, k2));
    const auto k4 = spin_rhs(ws, field_axpy(s, dt, k3));
    SpinField out = s;
    for (std::size_t i = 0; i < out.s.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            const double y = s.s[i][c] + (dt / 6) * (k1[i][c] + 2 * (k2[i][c] + k3[i][c]) +
                                                     k4[i][c]);
            if (!std::isfinite(y)) throw NonFinite("direct_spin_step: non-finite value");
            out.s[i][c] = y;
        }
        out.s[i] = project_to_target(s.sig.mu, out.s[i]);
    }
    return out;
}

std::pair<ScalarField, ScalarField> zeta_from_connection(const Connection& conn) {
    return {-2.0 * conn.A2, 2.0 * conn.A1};
}

std::pair<ScalarField, ScalarField> zeta_from_q12(const SpectralWorkspace& ws,
                                                  const ScalarField& q12) {
    ScalarField ig = ws.inv_grad(q12);
    return {2.0 * ws.riesz(1, ig), 2.0 * ws.riesz(2, ig)};
}

double spatial_identity_residual(const SpectralWorkspace& ws, const GeometricState& g,
                                 const PsiPair& psi) {
    double total = 0.0;
    const ScalarField* p[2] = {&psi.psi1, &psi.psi2};
    for (int m = 1; m <= 2; ++m) {
        const auto dm = spin_derivative(ws, g.s, m);
        ScalarField res(ws.grid());
        for (std::size_t i = 0; i < res.v.size(); ++i) {
            const double re = p[m - 1]->v[i].real(), im = p[m - 1]->v[i].imag();
            double acc = 0.0;
            for (int c = 0; c < 3; ++c) {
                const double r =
                    dm[c].v[i].real() - g.frame.v[i][c] * re - g.frame.w[i][c] * im;
                acc += r * r;
            }
            res.v[i] = std::sqrt(acc);
        }
        total += l2_norm(res);
    }
    return total;
}

double gradient_identity_residual(const SpectralWorkspace& ws, const GeometricState& g,
                                  const PsiPair& psi) {
    const int mu = g.s.sig.mu;
    const auto d1 = spin_derivative(ws, g.s, 1);
    const auto d2 = spin_derivative(ws, g.s, 2);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.s.s.size(); ++i) {
        const MetricVector g1{d1[0].v[i].real(), d1[1].v[i].real(), d1[2].v[i].real()};
        const MetricVector g2{d2[0].v[i].real(), d2[1].v[i].real(), d2[2].v[i].real()};
        const double ds = std::sqrt(std::max(0.0, dot_mu(mu, g1, g1) + dot_mu(mu, g2, g2)));
        const double ap = std::sqrt(std::norm(psi.psi1.v[i]) + std::norm(psi.psi2.v[i]));
        worst = std::max(worst, std::abs(ds - ap));
    }
    return worst;
}

double spin_distance_linf(const SpinField& a, const SpinField& b) {
    if (!(a.grid == b.grid)) throw GridMismatch("spin_distance_linf: grids differ");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.s.size(); ++i)
        for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(a.s[i][c] - b.s[i][c]));
    return worst;
}

}  // namespace spinfield
