#include "spinfield/dsii.hpp"

#include <cmath>

namespace spinfield {

DsiiState to_phi(const PsiState& state, int sign) {
    if (state.psi.sig.epsilon != -1)
        throw WrongSignature("to_phi: the decoupling requires eps = -1");
    if (sign != 1 && sign != -1) throw InvalidParams("to_phi: sign must be +-1");
    DsiiState out;
    out.mu = state.psi.sig.mu;
    out.t = state.t;
    out.phi = state.psi.psi1;
    const Complex is{0.0, static_cast<double>(sign)};
    for (std::size_t i = 0; i < out.phi.v.size(); ++i)
        out.phi.v[i] += is * state.psi.psi2.v[i];
    return out;
}

namespace {

// (R1^2 - R2^2) f, multiplier (xi2^2 - xi1^2)/|xi|^2 with the zero mode
// annihilated.
ScalarField riesz_difference(const SpectralWorkspace& ws, const ScalarField& f) {
    return ws.riesz(1, ws.riesz(1, f)) - ws.riesz(2, ws.riesz(2, f));
}

}  // namespace

ScalarField dsii_rhs(const SpectralWorkspace& ws, const DsiiState& state, bool dealias) {
    ScalarField density(state.phi.grid);
    for (std::size_t i = 0; i < density.v.size(); ++i)
        density.v[i] = std::norm(state.phi.v[i]);
    if (dealias) density = ws.dealias(density);
    ScalarField pot = riesz_difference(ws, density);
    ScalarField out(state.phi.grid);
    const Complex mihalf{0.0, -0.5 * state.mu};
    for (std::size_t i = 0; i < out.v.size(); ++i)
        out.v[i] = mihalf * pot.v[i] * state.phi.v[i];
    if (dealias) out = ws.dealias(out);
    return out;
}

namespace {

DsiiState ds_step(const SpectralWorkspace& ws, const DsiiState& state, const SolverConfig& cfg) {
    const double h = cfg.dt;
    auto rhs = [&](const ScalarField& phi) {
        DsiiState tmp{phi, state.mu, 0.0};
        return dsii_rhs(ws, tmp, cfg.dealias);
    };
    auto prop = [&](double dt, const ScalarField& f) { return ws.propagator(-1, dt, f); };

    const ScalarField k1 = rhs(state.phi);
    const ScalarField k2 = rhs(prop(h / 2, state.phi + (h / 2) * k1));
    const ScalarField e_half = prop(h / 2, state.phi);
    const ScalarField k3 = rhs(e_half + (h / 2) * k2);
    const ScalarField e_full = prop(h, state.phi);
    const ScalarField k4 = rhs(e_full + h * prop(h / 2, k3));

    DsiiState out;
    out.mu = state.mu;
    out.t = state.t + h;
    out.phi = e_full + (h / 6.0) * (prop(h, k1) + 2.0 * prop(h / 2, k2 + k3) + k4);
    for (const Complex& c : out.phi.v)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw NonFinite("ds_step: non-finite field value");
    return out;
}

}  // namespace

DsiiTrajectory solve_dsii(const SpectralWorkspace& ws, const DsiiState& state0,
                          const SolverConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.T > 0.0) || cfg.snapshot_stride < 1)
        throw InvalidParams("solve_dsii: need dt > 0, T > 0, stride >= 1");
    DsiiTrajectory traj;
    traj.snapshot_dt = cfg.dt * cfg.snapshot_stride;
    traj.snapshots.push_back(state0);

    const long nsteps = std::lround(cfg.T / cfg.dt);
    DsiiState cur = state0;
    double acc = 0.0;
    for (long n = 0; n < nsteps; ++n) {
        try {
            cur = ds_step(ws, cur, cfg);
        } catch (const NonFinite&) {
            traj.report.nonfinite = true;
            traj.report.t_stop = cur.t;
            traj.report.accumulator = acc;
            return traj;
        }
        acc += l4_norm_pow4(cur.phi) * cfg.dt;
        if ((n + 1) % cfg.snapshot_stride == 0) traj.snapshots.push_back(cur);
        if (acc > cfg.blowup_threshold) {
            traj.report.blowup = true;
            traj.report.t_stop = cur.t;
            traj.report.accumulator = acc;
            return traj;
        }
    }
    traj.report.t_stop = cur.t;
    traj.report.accumulator = acc;
    return traj;
}

std::vector<std::array<double, 2>> cross_validate(const Trajectory& psi_traj,
                                                  const DsiiTrajectory& plus,
                                                  const DsiiTrajectory& minus) {
    const std::size_t n = std::min(
        {psi_traj.snapshots.size(), plus.snapshots.size(), minus.snapshots.size()});
    if (n == 0) throw EmptyHistory("cross_validate: empty trajectory");
    std::vector<std::array<double, 2>> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const PsiPair& psi = psi_traj.snapshots[k].psi;
        const DsiiState& p = plus.snapshots[k];
        const DsiiState& m = minus.snapshots[k];
        if (!(psi.psi1.grid == p.phi.grid) || !(psi.psi1.grid == m.phi.grid))
            throw GridMismatch("cross_validate: grids differ");
        if (std::abs(psi_traj.snapshots[k].t - p.t) > 1e-12 ||
            std::abs(psi_traj.snapshots[k].t - m.t) > 1e-12)
            throw MisalignedTime("cross_validate: snapshot times differ");
        ScalarField rp(psi.psi1.grid), rm(psi.psi1.grid);
        const Complex im{0.0, 1.0};
        for (std::size_t i = 0; i < rp.v.size(); ++i) {
            rp.v[i] = p.phi.v[i] - (psi.psi1.v[i] + im * psi.psi2.v[i]);
            rm.v[i] = m.phi.v[i] - (psi.psi1.v[i] - im * psi.psi2.v[i]);
        }
        out.push_back({l2_norm(rp), l2_norm(rm)});
    }
    return out;
}

std::pair<ScalarField, ScalarField> fg_coefficients(const SpectralWorkspace& ws,
                                                    const PsiState& state) {
    const int mu = state.psi.sig.mu;
    ScalarField mass(state.psi.psi1.grid);
    ScalarField twoq(state.psi.psi1.grid);
    for (std::size_t i = 0; i < mass.v.size(); ++i) {
        mass.v[i] = std::norm(state.psi.psi1.v[i]) + std::norm(state.psi.psi2.v[i]);
        // 2 mu q12 = 2 mu * mu Im(psi1 conj(psi2)) = 2 Im(psi1 conj(psi2)).
        twoq.v[i] = 2.0 * std::imag(state.psi.psi1.v[i] * std::conj(state.psi.psi2.v[i]));
    }
    ScalarField f = (0.5 * mu) * riesz_difference(ws, mass);
    ScalarField g = (0.5 * mu) * riesz_difference(ws, twoq);
    return {f, g};
}

}  // namespace spinfield
