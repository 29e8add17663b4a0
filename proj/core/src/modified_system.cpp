#include "spinfield/modified_system.hpp"

#include <cmath>

namespace spinfield {

namespace {

ScalarField maybe_dealias(const SpectralWorkspace& ws, ScalarField f, bool dealias) {
    return dealias ? ws.dealias(f) : f;
}

bool all_finite(const ScalarField& f) {
    for (const auto& z : f.v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

}  // namespace

Connection connection_from_psi(const SpectralWorkspace& ws, const PsiState& state,
                               bool dealias) {
    const int mu = state.psi.sig.mu;
    const int eps = state.psi.sig.epsilon;
    const ScalarField* psi[2] = {&state.psi.psi1, &state.psi.psi2};

    Connection conn;
    conn.q12 = maybe_dealias(ws, imag_part(hadamard(*psi[0], conj(*psi[1]))), dealias);
    if (mu == -1)
        for (auto& z : conn.q12.v) z = -z;
    auto [A1, A2] = coulomb_coefficients(ws, conn.q12);
    conn.A1 = A1;
    conn.A2 = A2;

    // eps^{m+1} with eps in {+-1}: exponent parity only.
    auto eps_pow = [eps](int m) { return (m % 2 == 0) ? eps : 1; };  // m=1 -> 1, m=2 -> eps

    const ScalarField* A[2] = {&conn.A1, &conn.A2};
    ScalarField A0(ws.grid());
    for (int m = 1; m <= 2; ++m) {
        for (int l = 1; l <= 2; ++l) {
            ScalarField re_lm = maybe_dealias(
                ws, real_part(hadamard(conj(*psi[l - 1]), *psi[m - 1])), dealias);
            ScalarField quad = ws.riesz_pair(l, m, re_lm);
            ScalarField im_aml = maybe_dealias(
                ws,
                imag_part(hadamard(hadamard(*A[m - 1], *psi[m - 1]), conj(*psi[l - 1]))),
                dealias);
            ScalarField cubic = ws.inv_grad(ws.riesz(l, im_aml));
            const double c = mu * eps_pow(m);
            for (std::size_t i = 0; i < A0.v.size(); ++i)
                A0.v[i] += c * (quad.v[i] + 2.0 * cubic.v[i]);
        }
        ScalarField abs2 = maybe_dealias(ws, real_part(hadamard(*psi[m - 1], conj(*psi[m - 1]))),
                                         dealias);
        const double c = 0.5 * mu * eps_pow(m);
        for (std::size_t i = 0; i < A0.v.size(); ++i) A0.v[i] += c * abs2.v[i];
    }
    // Zero-mode convention: the continuum cubic term carries the quartic
    // content A_1^2 + eps A_2^2 up to gradients; |nabla|^{-1} R_l kills its
    // mean on the torus, so the lost constant is restored here. This fixes
    // the (gauge) additive freedom of A_0 so that the eps = -1 reduction to
    // the decoupled equations holds without a residual constant phase.
    Complex quartic_mean{0.0, 0.0};
    for (std::size_t i = 0; i < A0.v.size(); ++i)
        quartic_mean += conn.A1.v[i] * conn.A1.v[i] +
                        static_cast<double>(eps) * conn.A2.v[i] * conn.A2.v[i];
    quartic_mean /= static_cast<double>(A0.v.size());
    for (std::size_t i = 0; i < A0.v.size(); ++i) A0.v[i] += quartic_mean;
    conn.A0 = real_part(A0);
    return conn;
}

std::array<ScalarField, 2> nonlinearity(const SpectralWorkspace& ws, const PsiState& state,
                                        const Connection& conn, bool dealias) {
    const int eps = state.psi.sig.epsilon;
    const ScalarField* psi[2] = {&state.psi.psi1, &state.psi.psi2};
    const ScalarField* A[2] = {&conn.A1, &conn.A2};

    ScalarField dA[2][2];  // dA[l][m] = d_{l+1} A_{m+1}
    for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m) dA[l][m] = ws.derivative(l + 1, *A[m]);

    const Complex I{0.0, 1.0};
    std::array<ScalarField, 2> N{ScalarField(ws.grid()), ScalarField(ws.grid())};
    for (int m = 0; m < 2; ++m) {
        ScalarField acc = maybe_dealias(ws, hadamard(conn.A0, *psi[m]), dealias);
        for (auto& z : acc.v) z *= -I;
        for (int l = 0; l < 2; ++l) {
            const double el = (l == 0) ? 1.0 : eps;  // eps^{l+1}
            ScalarField coef = dA[l][m] + dA[m][l];
            ScalarField t1 = maybe_dealias(ws, hadamard(*psi[l], coef), dealias);
            ScalarField a2 = hadamard(*A[l], *A[l]);
            ScalarField c2(ws.grid());
            for (std::size_t i = 0; i < c2.v.size(); ++i)
                c2.v[i] = -dA[l][l].v[i] + I * a2.v[i];
            ScalarField t2 = maybe_dealias(ws, hadamard(*psi[m], c2), dealias);
            for (std::size_t i = 0; i < acc.v.size(); ++i)
                acc.v[i] += el * (t1.v[i] + t2.v[i]);
        }
        N[m] = std::move(acc);
    }
    return N;
}

ScalarField psi0_from_psi(const SpectralWorkspace& ws, const PsiState& state,
                          const Connection& conn) {
    const int eps = state.psi.sig.epsilon;
    const Complex I{0.0, 1.0};
    ScalarField d1 = ws.derivative(1, state.psi.psi1);
    ScalarField d2 = ws.derivative(2, state.psi.psi2);
    ScalarField a1p = hadamard(conn.A1, state.psi.psi1);
    ScalarField a2p = hadamard(conn.A2, state.psi.psi2);
    ScalarField out(ws.grid());
    for (std::size_t i = 0; i < out.v.size(); ++i)
        out.v[i] = I * d1.v[i] + I * static_cast<double>(eps) * d2.v[i] + a1p.v[i] +
                   static_cast<double>(eps) * a2p.v[i];
    return out;
}

namespace {

std::array<ScalarField, 2> eval_nonlinearity(const SpectralWorkspace& ws, const PsiPair& psi,
                                             double t, bool dealias) {
    PsiState st{psi, t};
    Connection conn = connection_from_psi(ws, st, dealias);
    return nonlinearity(ws, st, conn, dealias);
}

PsiPair propagate(const SpectralWorkspace& ws, const PsiPair& p, double dt) {
    return {ws.propagator(p.sig.epsilon, dt, p.psi1), ws.propagator(p.sig.epsilon, dt, p.psi2),
            p.sig};
}

PsiPair axpy(const PsiPair& p, double a, const std::array<ScalarField, 2>& k) {
    PsiPair out = p;
    for (std::size_t i = 0; i < out.psi1.v.size(); ++i) {
        out.psi1.v[i] += a * k[0].v[i];
        out.psi2.v[i] += a * k[1].v[i];
    }
    return out;
}

}  // namespace

PsiState step(const SpectralWorkspace& ws, const PsiState& state, const SolverConfig& cfg) {
    const double h = cfg.dt;
    const bool dl = cfg.dealias;
    const PsiPair& p = state.psi;

    // psi' = i L psi + N(psi); the linear flow is applied exactly.
    auto k1 = eval_nonlinearity(ws, p, state.t, dl);
    PsiPair ehalf_p = propagate(ws, p, h / 2);
    auto k2 = eval_nonlinearity(ws, propagate(ws, axpy(p, h / 2, k1), h / 2), state.t + h / 2, dl);
    auto k3 = eval_nonlinearity(ws, axpy(ehalf_p, h / 2, k2), state.t + h / 2, dl);
    PsiPair efull_p = propagate(ws, p, h);
    std::array<ScalarField, 2> k3h{ws.propagator(p.sig.epsilon, h / 2, k3[0]),
                                   ws.propagator(p.sig.epsilon, h / 2, k3[1])};
    auto k4 = eval_nonlinearity(ws, axpy(efull_p, h, k3h), state.t + h, dl);

    std::array<ScalarField, 2> k1f{ws.propagator(p.sig.epsilon, h, k1[0]),
                                   ws.propagator(p.sig.epsilon, h, k1[1])};
    std::array<ScalarField, 2> k2h{ws.propagator(p.sig.epsilon, h / 2, k2[0]),
                                   ws.propagator(p.sig.epsilon, h / 2, k2[1])};
    PsiPair out = efull_p;
    for (std::size_t i = 0; i < out.psi1.v.size(); ++i) {
        out.psi1.v[i] += (h / 6) * (k1f[0].v[i] + 2.0 * (k2h[0].v[i] + k3h[0].v[i]) + k4[0].v[i]);
        out.psi2.v[i] += (h / 6) * (k1f[1].v[i] + 2.0 * (k2h[1].v[i] + k3h[1].v[i]) + k4[1].v[i]);
    }
    if (!all_finite(out.psi1) || !all_finite(out.psi2))
        throw NonFinite("step: non-finite field values (numerical blow-up)");
    return {out, state.t + h};
}

Trajectory solve(const SpectralWorkspace& ws, const PsiState& state0, const SolverConfig& cfg) {
    Trajectory traj;
    traj.snapshot_dt = cfg.dt * cfg.snapshot_stride;
    traj.snapshots.push_back(state0);
    traj.accumulator_series.push_back(0.0);

    const double dx = ws.grid().cell_area();
    double acc = 0.0;
    PsiState cur = state0;
    const int nsteps = static_cast<int>(std::llround(cfg.T / cfg.dt));
    for (int n = 0; n < nsteps; ++n) {
        double cell = 0.0;
        for (std::size_t i = 0; i < cur.psi.psi1.v.size(); ++i) {
            const double a = std::norm(cur.psi.psi1.v[i]) + std::norm(cur.psi.psi2.v[i]);
            cell += a * a;
        }
        acc += cell * dx * cfg.dt;
        if (acc > cfg.blowup_threshold) {
            traj.report = {true, false, cur.t, acc};
            return traj;
        }
        try {
            cur = step(ws, cur, cfg);
        } catch (const NonFinite&) {
            traj.report = {true, true, cur.t, acc};
            return traj;
        }
        if ((n + 1) % cfg.snapshot_stride == 0) {
            traj.snapshots.push_back(cur);
            traj.accumulator_series.push_back(acc);
        }
    }
    traj.report = {false, false, cur.t, acc};
    return traj;
}

std::vector<std::array<double, 2>> mass_identity_residual(const SpectralWorkspace& ws,
                                                          const Trajectory& traj,
                                                          bool dealias) {
    const std::size_t n = traj.snapshots.size();
    if (n < 3) throw TooFewSnapshots("mass_identity_residual: need >= 3 snapshots");
    const double h = traj.snapshot_dt;
    const double dx = ws.grid().cell_area();

    std::vector<std::array<double, 2>> mass(n);
    std::vector<std::array<double, 2>> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const PsiState& st = traj.snapshots[i];
        const int eps = st.psi.sig.epsilon;
        Connection conn = connection_from_psi(ws, st, dealias);
        const ScalarField* psi[2] = {&st.psi.psi1, &st.psi.psi2};
        ScalarField dA[2][2];
        const ScalarField* A[2] = {&conn.A1, &conn.A2};
        for (int l = 0; l < 2; ++l)
            for (int m = 0; m < 2; ++m) dA[l][m] = ws.derivative(l + 1, *A[m]);
        ScalarField div_eps(ws.grid());  // d1 A1 + eps d2 A2
        for (std::size_t j = 0; j < div_eps.v.size(); ++j)
            div_eps.v[j] = dA[0][0].v[j] + static_cast<double>(eps) * dA[1][1].v[j];
        for (int m = 0; m < 2; ++m) {
            double msum = 0.0, rsum = 0.0;
            for (std::size_t j = 0; j < psi[m]->v.size(); ++j) {
                const double a2 = std::norm(psi[m]->v[j]);
                msum += a2;
                double r = -2.0 * a2 * div_eps.v[j].real();
                for (int l = 0; l < 2; ++l) {
                    const double el = (l == 0) ? 1.0 : eps;
                    const double coef = (dA[l][m].v[j] + dA[m][l].v[j]).real();
                    const double re = (psi[m]->v[j] * std::conj(psi[l]->v[j])).real();
                    r += 2.0 * el * coef * re;
                }
                rsum += r;
            }
            mass[i][m] = msum * dx;
            rhs[i][m] = rsum * dx;
        }
    }

    std::vector<std::array<double, 2>> out;
    if (n >= 5) {
        for (std::size_t i = 2; i + 2 < n; ++i) {
            std::array<double, 2> row;
            for (int m = 0; m < 2; ++m) {
                const double d = (mass[i - 2][m] - 8.0 * mass[i - 1][m] + 8.0 * mass[i + 1][m] -
                                  mass[i + 2][m]) /
                                 (12.0 * h);
                row[m] = d - rhs[i][m];
            }
            out.push_back(row);
        }
    } else {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            std::array<double, 2> row;
            for (int m = 0; m < 2; ++m)
                row[m] = (mass[i + 1][m] - mass[i - 1][m]) / (2.0 * h) - rhs[i][m];
            out.push_back(row);
        }
    }
    return out;
}

double compatibility_residual(const SpectralWorkspace& ws, const PsiState& state,
                              const Connection& conn) {
    const Complex I{0.0, 1.0};
    ScalarField d1p2 = ws.derivative(1, state.psi.psi2);
    ScalarField d2p1 = ws.derivative(2, state.psi.psi1);
    ScalarField F(ws.grid());
    for (std::size_t i = 0; i < F.v.size(); ++i)
        F.v[i] = d1p2.v[i] + I * conn.A1.v[i] * state.psi.psi2.v[i] - d2p1.v[i] -
                 I * conn.A2.v[i] * state.psi.psi1.v[i];
    return l2_norm(F);
}

double curvature_residual(const SpectralWorkspace& ws, const Connection& conn) {
    ScalarField curl = ws.derivative(1, conn.A2) - ws.derivative(2, conn.A1);
    return l2_norm(curl - conn.q12);
}

}  // namespace spinfield
