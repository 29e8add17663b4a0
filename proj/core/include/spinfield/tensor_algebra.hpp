#pragma once

// Signature-dependent linear algebra on the ambient R^3 of the targets
// S_{+1} (unit sphere) and S_{-1} (upper hyperboloid sheet), with the
// metric eta_mu = diag(mu, 1, 1).

#include <array>
#include <cmath>

#include "spinfield/errors.hpp"

namespace spinfield {

/// Model signature: mu selects the target geometry (sphere/hyperboloid),
/// epsilon selects the linear dispersion (elliptic/hyperbolic).
struct Signature {
    int mu = 1;       // target: +1 sphere, -1 hyperbolic plane
    int epsilon = 1;  // dispersion: +1 elliptic, -1 hyperbolic

    bool valid() const {
        return (mu == 1 || mu == -1) && (epsilon == 1 || epsilon == -1);
    }
};

/// Ambient R^3 vector carrying the mu-dependent algebra.
using MetricVector = std::array<double, 3>;

inline double dot_mu(int mu, const MetricVector& a, const MetricVector& b) {
    return mu * a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

/// a x_mu b = eta_mu . (a x b)
inline MetricVector cross_mu(int mu, const MetricVector& a, const MetricVector& b) {
    return {mu * (a[1] * b[2] - a[2] * b[1]),
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}

inline MetricVector operator+(const MetricVector& a, const MetricVector& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline MetricVector operator-(const MetricVector& a, const MetricVector& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline MetricVector operator*(double c, const MetricVector& a) {
    return {c * a[0], c * a[1], c * a[2]};
}

/// Radial rescale onto the target: output satisfies mu*(p ._mu p) = 1,
/// and p0 > 0 on the hyperboloid (upper sheet). Used to restore the
/// pointwise constraint after numerical drift.
inline MetricVector project_to_target(int mu, const MetricVector& p) {
    const double q = mu * dot_mu(mu, p, p);
    if (!(q > 0.0)) {
        throw DegenerateVector("project_to_target: mu*(p._mu p) <= 0");
    }
    if (mu == -1 && !(p[0] > 0.0)) {
        throw DegenerateVector("project_to_target: left the upper hyperboloid sheet");
    }
    const double inv = 1.0 / std::sqrt(q);
    return {inv * p[0], inv * p[1], inv * p[2]};
}

/// Component of p tangent to the target at s (assumes s on-target).
inline MetricVector tangent_project(int mu, const MetricVector& s, const MetricVector& p) {
    // s ._mu s = mu, so the normal component of p is mu*(p ._mu s) s.
    const double c = mu * dot_mu(mu, p, s);
    return {p[0] - c * s[0], p[1] - c * s[1], p[2] - c * s[2]};
}

/// Normalize a tangent vector (tangent vectors have v ._mu v > 0).
inline MetricVector tangent_normalize(int mu, const MetricVector& v) {
    const double q = dot_mu(mu, v, v);
    if (!(q > 0.0)) {
        throw DegenerateVector("tangent_normalize: nonpositive tangent norm");
    }
    const double inv = 1.0 / std::sqrt(q);
    return {inv * v[0], inv * v[1], inv * v[2]};
}

}  // namespace spinfield
