#include "spinfield/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spinfield {

FieldPairNorms semidistance_d1(const PsiPair& a, const PsiPair& b) {
    if (!(a.psi1.grid == b.psi1.grid)) throw GridMismatch("semidistance_d1: grids differ");
    const double na = l2_norm(a.psi1) * l2_norm(a.psi1) + l2_norm(a.psi2) * l2_norm(a.psi2);
    const double nb = l2_norm(b.psi1) * l2_norm(b.psi1) + l2_norm(b.psi2) * l2_norm(b.psi2);
    const Complex c = l2_inner(a.psi1, b.psi1) + l2_inner(a.psi2, b.psi2);
    FieldPairNorms out;
    out.optimal_z = (std::abs(c) > 0.0) ? std::conj(c) / std::abs(c) : Complex{1.0, 0.0};
    out.d1 = std::sqrt(std::max(0.0, na + nb - 2.0 * std::abs(c)));
    return out;
}

namespace {

// Minimize a smooth function of the circle angle: coarse scan seeded at
// theta0, then golden-section on the bracketing interval.
double minimize_on_circle(const std::function<double(double)>& fn, double theta0,
                          double* best_theta) {
    constexpr int kScan = 128;
    const double two_pi = 2.0 * std::numbers::pi;
    double tb = theta0;
    double fb = fn(theta0);
    for (int i = 0; i < kScan; ++i) {
        const double t = theta0 + two_pi * i / kScan;
        const double f = fn(t);
        if (f < fb) {
            fb = f;
            tb = t;
        }
    }
    double lo = tb - two_pi / kScan;
    double hi = tb + two_pi / kScan;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = fn(x1), f2 = fn(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = fn(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = fn(x2);
        }
    }
    const double tm = (lo + hi) / 2.0;
    const double fm = fn(tm);
    if (best_theta) *best_theta = (fm < fb) ? tm : tb;
    return std::min(fm, fb);
}

double l2_sq_of_combo(const PsiPair& a, const PsiPair& b, Complex z) {
    double acc = 0.0;
    const ScalarField* pa[2] = {&a.psi1, &a.psi2};
    const ScalarField* pb[2] = {&b.psi1, &b.psi2};
    const double da = a.psi1.grid.cell_area();
    for (int m = 0; m < 2; ++m)
        for (std::size_t i = 0; i < pa[m]->v.size(); ++i)
            acc += std::norm(z * pa[m]->v[i] - pb[m]->v[i]) * da;
    return acc;
}

}  // namespace

FieldPairNorms semidistance_rho1(const Trajectory& a, const Trajectory& b) {
    const std::size_t n = a.snapshots.size();
    if (n == 0 || b.snapshots.size() == 0) throw EmptyHistory("semidistance_rho1: empty history");
    if (n != b.snapshots.size() || std::abs(a.snapshot_dt - b.snapshot_dt) > 1e-12)
        throw MisalignedTime("semidistance_rho1: snapshot histories not aligned");
    for (std::size_t k = 0; k < n; ++k) {
        if (!(a.snapshots[k].psi.psi1.grid == b.snapshots[k].psi.psi1.grid))
            throw GridMismatch("semidistance_rho1: grids differ");
        if (std::abs(a.snapshots[k].t - b.snapshots[k].t) > 1e-10)
            throw MisalignedTime("semidistance_rho1: snapshot times differ");
    }

    FieldPairNorms out;
    double sup_d1 = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        sup_d1 = std::max(sup_d1, semidistance_d1(a.snapshots[k].psi, b.snapshots[k].psi).d1);
    out.d1 = sup_d1;

    const Complex z_seed = semidistance_d1(a.snapshots[0].psi, b.snapshots[0].psi).optimal_z;
    const double theta_seed = std::arg(z_seed);

    // L^inf_t L^2_x piece: sup over snapshots of the summed squared L^2 norms.
    auto sup_piece = [&](double theta) {
        const Complex z = std::polar(1.0, theta);
        double worst = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            worst = std::max(worst, l2_sq_of_combo(a.snapshots[k].psi, b.snapshots[k].psi, z));
        return std::sqrt(worst);
    };

    // L^4_{x,t} piece: per-component space-time L^4 norms, squared, summed.
    const double dt = a.snapshot_dt;
    auto l4_piece = [&](double theta) {
        const Complex z = std::polar(1.0, theta);
        double acc[2] = {0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) {
            // Trapezoid weights in time on the uniform snapshot grid.
            const double wt = (k == 0 || k + 1 == n) ? 0.5 * dt : dt;
            const ScalarField* pa[2] = {&a.snapshots[k].psi.psi1, &a.snapshots[k].psi.psi2};
            const ScalarField* pb[2] = {&b.snapshots[k].psi.psi1, &b.snapshots[k].psi.psi2};
            const double da = pa[0]->grid.cell_area();
            for (int m = 0; m < 2; ++m) {
                double cell = 0.0;
                for (std::size_t i = 0; i < pa[m]->v.size(); ++i) {
                    const double r = std::abs(z * pa[m]->v[i] - pb[m]->v[i]);
                    cell += r * r * r * r;
                }
                acc[m] += cell * da * wt;
            }
        }
        return std::sqrt(std::sqrt(acc[0]) + std::sqrt(acc[1]));
    };

    double theta_best = theta_seed;
    const double piece_inf = minimize_on_circle(sup_piece, theta_seed, &theta_best);
    out.optimal_z = std::polar(1.0, theta_best);
    const double piece_l4 = minimize_on_circle(l4_piece, theta_seed, nullptr);
    out.rho1 = piece_inf + piece_l4;
    return out;
}

MetricMatrix rotation_12(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {{{1.0, 0.0, 0.0}, {0.0, c, -s}, {0.0, s, c}}};
}

MetricMatrix mixer_01(int mu, double theta) {
    if (mu == 1) {
        const double c = std::cos(theta), s = std::sin(theta);
        return {{{c, -s, 0.0}, {s, c, 0.0}, {0.0, 0.0, 1.0}}};
    }
    const double c = std::cosh(theta), s = std::sinh(theta);
    return {{{c, s, 0.0}, {s, c, 0.0}, {0.0, 0.0, 1.0}}};
}

MetricMatrix matmul(const MetricMatrix& a, const MetricMatrix& b) {
    MetricMatrix out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += a[i][k] * b[k][j];
            out[i][j] = acc;
        }
    return out;
}

namespace {

double det3(const MetricMatrix& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

MetricVector apply(const MetricMatrix& O, const MetricVector& x) {
    MetricVector out{};
    for (int i = 0; i < 3; ++i) out[i] = O[i][0] * x[0] + O[i][1] * x[1] + O[i][2] * x[2];
    return out;
}

}  // namespace

bool is_isometry(int mu, const MetricMatrix& O, double tol) {
    const double eta[3] = {static_cast<double>(mu), 1.0, 1.0};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += O[k][i] * eta[k] * O[k][j];
            const double want = (i == j) ? eta[i] : 0.0;
            if (std::abs(acc - want) > tol) return false;
        }
    if (std::abs(det3(O) - 1.0) > tol) return false;
    const MetricVector e0 = apply(O, {1.0, 0.0, 0.0});
    if (std::abs(mu * dot_mu(mu, e0, e0) - 1.0) > tol) return false;
    if (mu == -1 && !(e0[0] > 0.0)) return false;
    return true;
}

SpinField apply_isometry(const SpinField& f, const MetricMatrix& O) {
    if (!is_isometry(f.sig.mu, O))
        throw IncompatibleSymmetry("apply_isometry: matrix is not in G_mu");
    SpinField out = f;
    for (std::size_t i = 0; i < out.s.size(); ++i) out.s[i] = apply(O, f.s[i]);
    return out;
}

SpinField dilate(const SpinField& f, int r) {
    if (r < 1) throw IncompatibleSymmetry("dilate: factor must be a positive integer");
    // s_r(y) = s(r y) on the rescaled torus of period L/r: node i of the
    // output sits at y = i (L/r)/n = x_i / r, so it carries the original
    // sample at the same index. The whole transformation lives in the box
    // metadata; shrinking the box with the map is what keeps the critical
    // seminorm invariant.
    SpinField out = f;
    out.grid.L1 = f.grid.L1 / r;
    out.grid.L2 = f.grid.L2 / r;
    return out;
}

SpinField translate(const SpinField& f, int p1, int p2) {
    SpinField out = f;
    auto wrap = [](int i, int n) { return ((i % n) + n) % n; };
    for (int i1 = 0; i1 < f.grid.n1; ++i1)
        for (int i2 = 0; i2 < f.grid.n2; ++i2)
            out.at(i1, i2) = f.at(wrap(i1 + p1, f.grid.n1), wrap(i2 + p2, f.grid.n2));
    return out;
}

namespace {

double pipeline_d1(const SpectralWorkspace& ws, const SpinField& f, const SpinField& g) {
    // Dilated inputs live on a rescaled box; build a matching workspace then.
    if (!(f.grid == ws.grid())) {
        SpectralWorkspace local(f.grid);
        const GaugeData gf = coulomb_gauge(local, f);
        const GaugeData gg = coulomb_gauge(local, g);
        return semidistance_d1(gf.phi, gg.phi).d1;
    }
    const GaugeData gf = coulomb_gauge(ws, f);
    const GaugeData gg = coulomb_gauge(ws, g);
    return semidistance_d1(gf.phi, gg.phi).d1;
}

}  // namespace

InvarianceReport invariance_suite(const SpectralWorkspace& ws, const SpinField& f,
                                  const SpinField& fprime, int r, int p1, int p2,
                                  const MetricMatrix& O) {
    InvarianceReport rep;
    const double base = pipeline_d1(ws, f, fprime);
    rep.dilation_gap = std::abs(pipeline_d1(ws, dilate(f, r), dilate(fprime, r)) - base);
    rep.translation_gap =
        std::abs(pipeline_d1(ws, translate(f, p1, p2), translate(fprime, p1, p2)) - base);
    rep.isometry_gap =
        std::abs(pipeline_d1(ws, apply_isometry(f, O), apply_isometry(fprime, O)) - base);
    rep.orbit_distance = pipeline_d1(ws, f, apply_isometry(f, O));
    return rep;
}

std::vector<SweepRow> stability_sweep(const SpectralWorkspace& ws, const SpinField& base,
                                      const std::function<SpinField(double)>& family,
                                      const std::vector<double>& deltas,
                                      const SolverConfig& cfg) {
    const GaugeData gauge0 = coulomb_gauge(ws, base);
    const Trajectory traj0 = solve(ws, PsiState{gauge0.phi, 0.0}, cfg);
    if (traj0.report.blowup || traj0.report.nonfinite)
        throw NonFinite("stability_sweep: base run did not complete the horizon");

    std::vector<SweepRow> rows;
    for (double delta : deltas) {
        SweepRow row;
        row.delta = delta;
        try {
            const SpinField pert = family(delta);
            const GaugeData gauge1 = coulomb_gauge(ws, pert);
            row.delta_in = semidistance_d1(gauge0.phi, gauge1.phi).d1;
            const Trajectory traj1 = solve(ws, PsiState{gauge1.phi, 0.0}, cfg);
            if (traj1.report.blowup || traj1.report.nonfinite) {
                row.status = traj1.report.blowup ? "blowup" : "nonfinite";
            } else {
                row.delta_out = semidistance_rho1(traj0, traj1).rho1;
                row.ratio = (row.delta_in > 0.0) ? row.delta_out / row.delta_in : 0.0;
                row.status = "ok";
            }
        } catch (const std::exception& e) {
            row.status = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace spinfield
