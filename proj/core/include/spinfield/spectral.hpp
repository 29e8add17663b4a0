#pragma once

// Torus discretization and the Fourier-multiplier calculus: Riesz
// transforms, inverse gradient, spectral derivatives, the linear
// propagator of i u_t + (d1^2 + eps d2^2) u = 0, Littlewood-Paley
// projections and the X^sigma diagnostic norm.

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "spinfield/errors.hpp"

namespace spinfield {

using Complex = std::complex<double>;

struct Grid {
    int n1 = 0;
    int n2 = 0;
    double L1 = 0.0;
    double L2 = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(n1) * n2; }
    double dx1() const { return L1 / n1; }
    double dx2() const { return L2 / n2; }
    double cell_area() const { return dx1() * dx2(); }

    bool operator==(const Grid& o) const = default;

    bool valid() const {
        return n1 >= 8 && n2 >= 8 && n1 % 2 == 0 && n2 % 2 == 0 && L1 > 0.0 && L2 > 0.0;
    }
};

/// Complex scalar field sampled on a Grid, row-major (index i1*n2 + i2).
struct ScalarField {
    Grid grid;
    std::vector<Complex> v;

    ScalarField() = default;
    explicit ScalarField(const Grid& g) : grid(g), v(g.size(), Complex{0.0, 0.0}) {}

    Complex& at(int i1, int i2) { return v[static_cast<std::size_t>(i1) * grid.n2 + i2]; }
    const Complex& at(int i1, int i2) const {
        return v[static_cast<std::size_t>(i1) * grid.n2 + i2];
    }
};

// Pointwise arithmetic (shapes must match; checked).
ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(Complex c, const ScalarField& a);
ScalarField operator*(double c, const ScalarField& a);
/// Pointwise product a*b (no dealiasing; see SpectralWorkspace::dealias).
ScalarField hadamard(const ScalarField& a, const ScalarField& b);
ScalarField conj(const ScalarField& a);
ScalarField real_part(const ScalarField& a);
ScalarField imag_part(const ScalarField& a);

// Grid norms (cell-area weighted).
double l2_norm(const ScalarField& f);
double l4_norm_pow4(const ScalarField& f);
double linf_norm(const ScalarField& f);
Complex mean(const ScalarField& f);
/// Complex L^2 pairing  sum f conj(g) dx.
Complex l2_inner(const ScalarField& f, const ScalarField& g);

/// Immutable multiplier tables + FFT plans for one Grid. Shareable across
/// threads; each operation works on its own buffers.
class SpectralWorkspace {
  public:
    explicit SpectralWorkspace(const Grid& g);
    ~SpectralWorkspace();
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    const Grid& grid() const { return grid_; }

    /// Frequency xi_m at flat index (2*pi*k/L, k in [-n/2, n/2)).
    double xi1(int i1) const { return xi1_[i1]; }
    double xi2(int i2) const { return xi2_[i2]; }

    ScalarField forward(const ScalarField& f) const;   // unnormalized DFT
    ScalarField inverse(const ScalarField& fh) const;  // divides by n1*n2

    /// Multiplier i xi_m / |xi|; zero mode annihilated.
    ScalarField riesz(int m, const ScalarField& f) const;
    /// Multiplier |xi|^-1; zero mode annihilated.
    ScalarField inv_grad(const ScalarField& f) const;
    /// Composite R_l R_m, multiplier -xi_l xi_m / |xi|^2. The zero mode is
    /// assigned the angular average -delta_{lm}/2 of the symbol, so that
    /// R_1 R_1 + R_2 R_2 = -Id holds exactly on every field.
    ScalarField riesz_pair(int l, int m, const ScalarField& f) const;
    /// Multiplier i xi_m.
    ScalarField derivative(int m, const ScalarField& f) const;
    /// Multiplier exp(-i dt (xi1^2 + eps xi2^2)); exactly unitary on l^2.
    ScalarField propagator(int epsilon, double dt, const ScalarField& f) const;
    /// Littlewood-Paley projection P_k, multiplier chi_k(|xi|).
    ScalarField lp_projection(int k, const ScalarField& f) const;
    /// 2/3-rule mask (applied after nonlinear products).
    ScalarField dealias(const ScalarField& f) const;
    /// Dealiased pointwise product.
    ScalarField product(const ScalarField& a, const ScalarField& b) const;

    /// Dyadic range [kmin, kmax] whose chi_k telescope to 1 on every
    /// nonzero grid frequency.
    std::pair<int, int> lp_band_range() const;

    /// Discrete X^sigma norm of a snapshot history on a uniform time grid
    /// with spacing dt: (sum_k (1+2^{2 sigma k}) ||P_k phi||^2)^{1/2} where
    /// the time norm is max(L^inf_t L^2_x, L^4_{x,t}).
    double xsigma_norm(const std::vector<ScalarField>& history, double dt, double sigma) const;

  private:
    void check(const ScalarField& f) const;
    ScalarField apply_real_multiplier(const std::vector<double>& mult, const ScalarField& f) const;

    Grid grid_;
    std::vector<double> xi1_, xi2_;
    std::vector<double> abs_xi_;       // |xi| per flat spectral index
    std::vector<double> inv_abs_xi_;   // 1/|xi|, 0 at the zero mode
    std::vector<double> riesz1_, riesz2_;  // xi_m/|xi| (the i factor applied separately)
    std::vector<double> dealias_mask_;

    struct FftPlans;
    std::unique_ptr<FftPlans> plans_;
};

/// The paper-style smooth even bump: 1 on [-5/4,5/4], supported in
/// [-8/5,8/5]. Exposed for tests.
double lp_bump(double x);

}  // namespace spinfield
