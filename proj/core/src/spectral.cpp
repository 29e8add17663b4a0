#include "spinfield/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace spinfield {

namespace {

void check_same(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid == b.grid)) throw ShapeMismatch("field grids differ");
}

}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    check_same(a, b);
    ScalarField out(a.grid);
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] + b.v[i];
    return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    check_same(a, b);
    ScalarField out(a.grid);
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] - b.v[i];
    return out;
}

ScalarField operator*(Complex c, const ScalarField& a) {
    ScalarField out(a.grid);
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = c * a.v[i];
    return out;
}

ScalarField operator*(double c, const ScalarField& a) { return Complex{c, 0.0} * a; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
    check_same(a, b);
    ScalarField out(a.grid);
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
    return out;
}

ScalarField conj(const ScalarField& a) {
    ScalarField out(a.grid);
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = std::conj(a.v[i]);
    return out;
}

ScalarField real_part(const ScalarField& a) {
    ScalarField out(a.grid);
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = Complex{a.v[i].real(), 0.0};
    return out;
}

ScalarField imag_part(const ScalarField& a) {
    ScalarField out(a.grid);
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = Complex{a.v[i].imag(), 0.0};
    return out;
}

double l2_norm(const ScalarField& f) {
    double s = 0.0;
    for (const auto& z : f.v) s += std::norm(z);
    return std::sqrt(s * f.grid.cell_area());
}

double l4_norm_pow4(const ScalarField& f) {
    double s = 0.0;
    for (const auto& z : f.v) {
        const double a = std::norm(z);
        s += a * a;
    }
    return s * f.grid.cell_area();
}

double linf_norm(const ScalarField& f) {
    double m = 0.0;
    for (const auto& z : f.v) m = std::max(m, std::abs(z));
    return m;
}

Complex mean(const ScalarField& f) {
    Complex s{0.0, 0.0};
    for (const auto& z : f.v) s += z;
    return s / static_cast<double>(f.v.size());
}

Complex l2_inner(const ScalarField& f, const ScalarField& g) {
    check_same(f, g);
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < f.v.size(); ++i) s += f.v[i] * std::conj(g.v[i]);
    return s * f.grid.cell_area();
}

double lp_bump(double x) {
    x = std::abs(x);
    if (x <= 1.25) return 1.0;
    if (x >= 1.6) return 0.0;
    const double t = (x - 1.25) / 0.35;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return b / (a + b);
}

struct SpectralWorkspace::FftPlans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    ~FftPlans() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
    }
};

namespace {
// FFTW planning is not thread-safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

SpectralWorkspace::SpectralWorkspace(const Grid& g) : grid_(g) {
    if (!g.valid()) throw ShapeMismatch("invalid grid (need even n1,n2 >= 8 and L > 0)");
    const int n1 = g.n1, n2 = g.n2;
    xi1_.resize(n1);
    xi2_.resize(n2);
    const double two_pi = 2.0 * M_PI;
    for (int i = 0; i < n1; ++i) {
        const int k = (i < n1 / 2) ? i : i - n1;
        xi1_[i] = two_pi * k / g.L1;
    }
    for (int j = 0; j < n2; ++j) {
        const int k = (j < n2 / 2) ? j : j - n2;
        xi2_[j] = two_pi * k / g.L2;
    }
    abs_xi_.resize(g.size());
    inv_abs_xi_.resize(g.size());
    riesz1_.resize(g.size());
    riesz2_.resize(g.size());
    dealias_mask_.resize(g.size());
    for (int i = 0; i < n1; ++i) {
        const int k1 = (i < n1 / 2) ? i : i - n1;
        for (int j = 0; j < n2; ++j) {
            const int k2 = (j < n2 / 2) ? j : j - n2;
            const std::size_t idx = static_cast<std::size_t>(i) * n2 + j;
            const double r = std::hypot(xi1_[i], xi2_[j]);
            abs_xi_[idx] = r;
            if (r > 0.0) {
                inv_abs_xi_[idx] = 1.0 / r;
                riesz1_[idx] = xi1_[i] / r;
                riesz2_[idx] = xi2_[j] / r;
            } else {
                inv_abs_xi_[idx] = 0.0;
                riesz1_[idx] = 0.0;
                riesz2_[idx] = 0.0;
            }
            const bool keep = std::abs(k1) < n1 / 3 && std::abs(k2) < n2 / 3;
            dealias_mask_[idx] = keep ? 1.0 : 0.0;
        }
    }

    plans_ = std::make_unique<FftPlans>();
    std::vector<Complex> scratch(g.size());
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard<std::mutex> lock(planner_mutex());
    plans_->fwd = fftw_plan_dft_2d(n1, n2, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->bwd = fftw_plan_dft_2d(n1, n2, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

SpectralWorkspace::~SpectralWorkspace() = default;

void SpectralWorkspace::check(const ScalarField& f) const {
    if (!(f.grid == grid_)) throw GridMismatch("field does not match workspace grid");
}

ScalarField SpectralWorkspace::forward(const ScalarField& f) const {
    check(f);
    ScalarField out = f;
    auto* p = reinterpret_cast<fftw_complex*>(out.v.data());
    fftw_execute_dft(plans_->fwd, p, p);
    return out;
}

ScalarField SpectralWorkspace::inverse(const ScalarField& fh) const {
    check(fh);
    ScalarField out = fh;
    auto* p = reinterpret_cast<fftw_complex*>(out.v.data());
    fftw_execute_dft(plans_->bwd, p, p);
    const double scale = 1.0 / static_cast<double>(grid_.size());
    for (auto& z : out.v) z *= scale;
    return out;
}

ScalarField SpectralWorkspace::apply_real_multiplier(const std::vector<double>& mult,
                                                     const ScalarField& f) const {
    ScalarField fh = forward(f);
    for (std::size_t i = 0; i < fh.v.size(); ++i) fh.v[i] *= mult[i];
    return inverse(fh);
}

ScalarField SpectralWorkspace::riesz(int m, const ScalarField& f) const {
    check(f);
    const std::vector<double>& r = (m == 1) ? riesz1_ : riesz2_;
    if (m != 1 && m != 2) throw ShapeMismatch("riesz: axis must be 1 or 2");
    ScalarField fh = forward(f);
    const Complex I{0.0, 1.0};
    for (std::size_t i = 0; i < fh.v.size(); ++i) fh.v[i] *= I * r[i];
    return inverse(fh);
}

ScalarField SpectralWorkspace::inv_grad(const ScalarField& f) const {
    return apply_real_multiplier(inv_abs_xi_, f);
}

ScalarField SpectralWorkspace::riesz_pair(int l, int m, const ScalarField& f) const {
    check(f);
    if (l < 1 || l > 2 || m < 1 || m > 2)
        throw ShapeMismatch("riesz_pair: axes must be 1 or 2");
    const std::vector<double>& rl = (l == 1) ? riesz1_ : riesz2_;
    const std::vector<double>& rm = (m == 1) ? riesz1_ : riesz2_;
    ScalarField fh = forward(f);
    const Complex zero_mode = fh.v[0];
    for (std::size_t i = 0; i < fh.v.size(); ++i) fh.v[i] *= -rl[i] * rm[i];
    // Angular average of the symbol at xi = 0.
    if (l == m) fh.v[0] = -0.5 * zero_mode;
    return inverse(fh);
}

ScalarField SpectralWorkspace::derivative(int m, const ScalarField& f) const {
    check(f);
    if (m != 1 && m != 2) throw ShapeMismatch("derivative: axis must be 1 or 2");
    ScalarField fh = forward(f);
    const Complex I{0.0, 1.0};
    const int n1 = grid_.n1, n2 = grid_.n2;
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            const double xi = (m == 1) ? xi1_[i] : xi2_[j];
            fh.v[static_cast<std::size_t>(i) * n2 + j] *= I * xi;
        }
    return inverse(fh);
}

ScalarField SpectralWorkspace::propagator(int epsilon, double dt, const ScalarField& f) const {
    check(f);
    ScalarField fh = forward(f);
    const int n1 = grid_.n1, n2 = grid_.n2;
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            const double omega = xi1_[i] * xi1_[i] + epsilon * xi2_[j] * xi2_[j];
            fh.v[static_cast<std::size_t>(i) * n2 + j] *= std::polar(1.0, -dt * omega);
        }
    return inverse(fh);
}

ScalarField SpectralWorkspace::lp_projection(int k, const ScalarField& f) const {
    check(f);
    const double s1 = std::ldexp(1.0, -k);       // 2^-k
    const double s0 = std::ldexp(1.0, -(k - 1));  // 2^-(k-1)
    ScalarField fh = forward(f);
    for (std::size_t i = 0; i < fh.v.size(); ++i) {
        const double r = abs_xi_[i];
        fh.v[i] *= lp_bump(r * s1) - lp_bump(r * s0);
    }
    return inverse(fh);
}

ScalarField SpectralWorkspace::dealias(const ScalarField& f) const {
    return apply_real_multiplier(dealias_mask_, f);
}

ScalarField SpectralWorkspace::product(const ScalarField& a, const ScalarField& b) const {
    return dealias(hadamard(a, b));
}

std::pair<int, int> SpectralWorkspace::lp_band_range() const {
    const double xi_min = 2.0 * M_PI / std::max(grid_.L1, grid_.L2);
    double xi_max = 0.0;
    for (double r : abs_xi_) xi_max = std::max(xi_max, r);
    const int kmin = static_cast<int>(std::floor(std::log2(xi_min))) - 2;
    const int kmax = static_cast<int>(std::ceil(std::log2(xi_max))) + 1;
    return {kmin, kmax};
}

double SpectralWorkspace::xsigma_norm(const std::vector<ScalarField>& history, double dt,
                                      double sigma) const {
    if (history.empty()) throw EmptyHistory("xsigma_norm: empty history");
    for (const auto& f : history) check(f);
    auto [kmin, kmax] = lp_band_range();
    double total = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        double linf_l2 = 0.0;
        double l4_acc = 0.0;
        for (const auto& f : history) {
            ScalarField pk = lp_projection(k, f);
            linf_l2 = std::max(linf_l2, l2_norm(pk));
            l4_acc += l4_norm_pow4(pk) * dt;
        }
        const double band = std::max(linf_l2, std::pow(l4_acc, 0.25));
        total += (1.0 + std::exp2(2.0 * sigma * k)) * band * band;
    }
    return std::sqrt(total);
}

}  // namespace spinfield
