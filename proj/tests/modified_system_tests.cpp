#include <doctest.h>

#include <cmath>
#include <random>

#include "spinfield/modified_system.hpp"
#include "test_util.hpp"

using namespace spinfield;
namespace tu = spinfield::testutil;

namespace {

double field_dist(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

PsiState random_state(const SpectralWorkspace& ws, std::mt19937_64& rng, int mu, int eps,
                      double amp = 0.3) {
    PsiState st;
    st.psi.psi1 = tu::random_band_limited(ws, rng, 3, amp);
    st.psi.psi2 = tu::random_band_limited(ws, rng, 3, amp);
    st.psi.sig = Signature{mu, eps};
    return st;
}

}  // namespace

TEST_CASE("zero fields give a zero connection and zero nonlinearity") {
    const Grid g = tu::small_grid();
    SpectralWorkspace ws(g);
    PsiState st;
    st.psi.psi1 = ScalarField(g);
    st.psi.psi2 = ScalarField(g);
    st.psi.sig = Signature{1, 1};
    const Connection conn = connection_from_psi(ws, st);
    CHECK(l2_norm(conn.A0) < 1e-15);
    CHECK(l2_norm(conn.A1) < 1e-15);
    CHECK(l2_norm(conn.A2) < 1e-15);
    const auto N = nonlinearity(ws, st, conn);
    CHECK(l2_norm(N[0]) < 1e-15);
    CHECK(l2_norm(N[1]) < 1e-15);
    CHECK(l2_norm(psi0_from_psi(ws, st, conn)) < 1e-15);
}

TEST_CASE("constant fields have vanishing A0 under the zero-mode convention") {
    // The composite Riesz operators carry their angular average at xi = 0, so
    // the quadratic and |psi|^2 contributions of a spatially constant state
    // cancel exactly: the connection is a pure phase there.
    const Grid g = tu::small_grid();
    SpectralWorkspace ws(g);
    for (int mu : {1, -1}) {
        for (int eps : {1, -1}) {
            PsiState st;
            st.psi.psi1 = ScalarField(g);
            st.psi.psi2 = ScalarField(g);
            for (auto& v : st.psi.psi1.v) v = Complex{0.7, 0.0};
            for (auto& v : st.psi.psi2.v) v = Complex{0.7, 0.0};
            st.psi.sig = Signature{mu, eps};
            const Connection conn = connection_from_psi(ws, st);
            CHECK(l2_norm(conn.A1) < 1e-13);
            CHECK(l2_norm(conn.A2) < 1e-13);
            CHECK(l2_norm(conn.A0) < 1e-12);
        }
    }
}

TEST_CASE("q12 and the Coulomb condition") {
    const Grid g = tu::small_grid(32);
    SpectralWorkspace ws(g);
    std::mt19937_64 rng(301);
    for (int mu : {1, -1}) {
        const PsiState st = random_state(ws, rng, mu, 1);
        const Connection conn = connection_from_psi(ws, st, /*dealias=*/false);
        // q12 = mu Im(psi1 conj(psi2)) pointwise.
        for (std::size_t i = 0; i < conn.q12.v.size(); ++i) {
            const double q = mu * std::imag(st.psi.psi1.v[i] * std::conj(st.psi.psi2.v[i]));
            CHECK(std::abs(conn.q12.v[i].real() - q) < 1e-12);
            CHECK(std::abs(conn.q12.v[i].imag()) < 1e-14);
        }
        CHECK(l2_norm(ws.derivative(1, conn.A1) + ws.derivative(2, conn.A2)) < 1e-12);
        // d1 A2 - d2 A1 reproduces q12 up to its annihilated zero mode, so
        // the residual is exactly |mean(q12)| times the square root of the
        // cell area sum. Random states carry a nonzero total charge.
        const Complex mq = mean(conn.q12);
        const double expected = std::abs(mq) * std::sqrt(g.L1 * g.L2);
        CHECK(std::abs(curvature_residual(ws, conn) - expected) < 1e-10);
    }
}

TEST_CASE("psi0 dual forms agree: direct vs covariant-derivative grouping") {
    const Grid g = tu::small_grid(32);
    SpectralWorkspace ws(g);
    std::mt19937_64 rng(302);
    for (int mu : {1, -1}) {
        for (int eps : {1, -1}) {
            const PsiState st = random_state(ws, rng, mu, eps);
            const Connection conn = connection_from_psi(ws, st, false);
            const ScalarField direct = psi0_from_psi(ws, st, conn);
            // i(D1 psi1 + eps D2 psi2) + 2 A1 psi1 + 2 eps A2 psi2 with
            // D_m = d_m + i A_m.
            const Complex I{0.0, 1.0};
            const ScalarField D1 =
                ws.derivative(1, st.psi.psi1) + I * hadamard(conn.A1, st.psi.psi1);
            const ScalarField D2 =
                ws.derivative(2, st.psi.psi2) + I * hadamard(conn.A2, st.psi.psi2);
            const ScalarField alt = I * (D1 + double(eps) * D2) +
                                    2.0 * hadamard(conn.A1, st.psi.psi1) +
                                    (2.0 * eps) * hadamard(conn.A2, st.psi.psi2);
            CHECK(field_dist(direct, alt) < 1e-12);
        }
    }
}

TEST_CASE("nonlinearity: symmetric-derivative and curl-substituted forms agree") {
    const Grid g = tu::small_grid(32);
    SpectralWorkspace ws(g);
    std::mt19937_64 rng(303);
    for (int mu : {1, -1}) {
        for (int eps : {1, -1}) {
            const PsiState st = random_state(ws, rng, mu, eps);
            const Connection conn = connection_from_psi(ws, st, false);
            const auto N = nonlinearity(ws, st, conn, /*dealias=*/false);

            // Alternate grouping: psi_l (-q_ml + 2 d_m A_l) with
            // q_ml = d_m A_l - d_l A_m.
            const ScalarField A[3] = {conn.A0, conn.A1, conn.A2};
            const ScalarField* psi[3] = {nullptr, &st.psi.psi1, &st.psi.psi2};
            const Complex I{0.0, 1.0};
            for (int m = 1; m <= 2; ++m) {
                ScalarField Nm = (-I) * hadamard(conn.A0, *psi[m]);
                for (int l = 1; l <= 2; ++l) {
                    const double epow = (l == 1) ? 1.0 : double(eps);
                    const ScalarField q_ml =
                        ws.derivative(m, A[l]) - ws.derivative(l, A[m]);
                    const ScalarField coeff =
                        (-1.0) * q_ml + 2.0 * ws.derivative(m, A[l]);
                    Nm = Nm + epow * (hadamard(*psi[l], coeff) +
                                      hadamard(*psi[m], (-1.0) * ws.derivative(l, A[l]) +
                                                            I * hadamard(A[l], A[l])));
                }
                CHECK(field_dist(N[m - 1], Nm) < 1e-10);
            }
        }
    }
}

TEST_CASE("solver: zero data is a fixed point; snapshots follow the stride") {
    const Grid g = tu::small_grid();
    SpectralWorkspace ws(g);
    PsiState st;
    st.psi.psi1 = ScalarField(g);
    st.psi.psi2 = ScalarField(g);
    st.psi.sig = Signature{1, 1};
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.T = 0.1;
    cfg.snapshot_stride = 2;
    const Trajectory traj = solve(ws, st, cfg);
    CHECK_FALSE(traj.report.blowup);
    CHECK(traj.snapshots.size() == 6);  // initial + 5 strided snapshots
    CHECK(traj.snapshot_dt == doctest::Approx(0.02));
    CHECK(l2_norm(traj.snapshots.back().psi.psi1) < 1e-15);
    CHECK(traj.report.accumulator == doctest::Approx(0.0));
}

TEST_CASE("integrating-factor RK4 converges at fourth order in dt") {
    // A small box raises the mode frequencies (and with them the truncation
    // error) well above the rounding floor at every step size tested.
    const Grid g{32, 32, 2.0 * M_PI, 2.0 * M_PI};
    SpectralWorkspace ws(g);
    std::mt19937_64 rng(304);
    const PsiState st = random_state(ws, rng, 1, 1, 30.0);
    SolverConfig cfg;
    cfg.T = 0.1;

    auto endpoint = [&](double dt) {
        cfg.dt = dt;
        cfg.snapshot_stride = int(std::lround(cfg.T / dt));
        return solve(ws, st, cfg).snapshots.back().psi;
    };
    const PsiPair ref = endpoint(0.1 / 64);
    auto err = [&](const PsiPair& a) {
        return l2_norm(a.psi1 - ref.psi1) + l2_norm(a.psi2 - ref.psi2);
    };
    const double e1 = err(endpoint(0.1 / 4));
    const double e2 = err(endpoint(0.1 / 8));
    const double e3 = err(endpoint(0.1 / 16));
    CHECK(e1 / e2 > 12.0);  // ~16 for a fourth-order scheme
    CHECK(e2 / e3 > 12.0);
}

TEST_CASE("blow-up threshold stops the run and sets the flag") {
    const Grid g = tu::small_grid();
    SpectralWorkspace ws(g);
    std::mt19937_64 rng(305);
    const PsiState st = random_state(ws, rng, 1, 1, 0.5);
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.T = 1.0;
    cfg.blowup_threshold = 1e-9;
    const Trajectory traj = solve(ws, st, cfg);
    CHECK(traj.report.blowup);
    CHECK_FALSE(traj.report.nonfinite);
    CHECK(traj.report.t_stop < 1.0);
}

TEST_CASE("non-finite input is reported as a numerical failure") {
    const Grid g = tu::small_grid();
    SpectralWorkspace ws(g);
    PsiState st;
    st.psi.psi1 = ScalarField(g);
    st.psi.psi2 = ScalarField(g);
    st.psi.sig = Signature{1, 1};
    st.psi.psi1.v[0] = Complex{std::nan(""), 0.0};
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.T = 0.05;
    const Trajectory traj = solve(ws, st, cfg);
    CHECK(traj.report.nonfinite);
}

TEST_CASE("mass identity residual is small on a smooth short run") {
    const Grid g = tu::small_grid(32);
    SpectralWorkspace ws(g);
    std::mt19937_64 rng(306);
    const PsiState st = random_state(ws, rng, 1, 1, 0.2);
    SolverConfig cfg;
    cfg.dt = 0.005;
    cfg.T = 0.1;
    cfg.dealias = false;
    const Trajectory traj = solve(ws, st, cfg);
    const auto res = mass_identity_residual(ws, traj, /*dealias=*/false);
    REQUIRE(!res.empty());
    for (const auto& r : res) {
        CHECK(std::abs(r[0]) < 1e-8);
        CHECK(std::abs(r[1]) < 1e-8);
    }
}
