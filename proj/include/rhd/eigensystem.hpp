#pragma once

#include <cmath>

#include "rhd/physics.hpp"

namespace rhd {

/// Rotation aligning the unit face normal with the first velocity axis.
/// Acts on packed states: block diag(1, Q, 1) with Q the spatial rotation.
/// For an axis-aligned normal it reduces to a permutation (up to signs).
template <std::size_t Dim>
inline Mat<Dim + 2> rotation_matrix(const Vec<Dim>& n)
{
    Mat<Dim + 2> T;
    T(0, 0) = 1.0;
    T(Dim + 1, Dim + 1) = 1.0;
    if constexpr (Dim == 2) {
        const double theta = std::atan2(n[1], n[0]);
        const double c = std::cos(theta), s = std::sin(theta);
        T(1, 1) = c;
        T(1, 2) = s;
        T(2, 1) = -s;
        T(2, 2) = c;
    } else {
        const double theta = std::atan2(n[1], n[0]);
        const double r = std::sqrt(n[0] * n[0] + n[1] * n[1]);
        const double phi = std::atan2(n[2], r);
        const double ct = std::cos(theta), st = std::sin(theta);
        const double cp = std::cos(phi), sp = std::sin(phi);
        T(1, 1) = cp * ct;
        T(1, 2) = cp * st;
        T(1, 3) = sp;
        T(2, 1) = -st;
        T(2, 2) = ct;
        T(3, 1) = -sp * ct;
        T(3, 2) = -sp * st;
        T(3, 3) = cp;
    }
    return T;
}

/// Rotate the velocity of a primitive state by the spatial block of T.
template <std::size_t Dim>
inline Prim<Dim> rotate_prim(const Mat<Dim + 2>& T, const Prim<Dim>& w)
{
    Prim<Dim> r = w;
    for (int i = 0; i < Dim; ++i) {
        double s = 0;
        for (int j = 0; j < Dim; ++j) s += T(1 + i, 1 + j) * w.v[j];
        r.v[i] = s;
    }
    return r;
}

namespace detail {

// Scaled right eigenvectors of the x1 flux Jacobian for the full
// three-velocity system: dU/dV = R R^T and dF1/dU = R Lambda R^{-1}.
inline Mat<5> scaled_eigenvectors_3v(double rho, double v1, double v2, double v3,
                                     double p, double gamma)
{
    const double vv = v1 * v1 + v2 * v2 + v3 * v3;
    const double W = 1.0 / std::sqrt(1.0 - vv);
    const double h = 1.0 + gamma / (gamma - 1.0) * p / rho;
    const double cs2 = gamma * p / (rho * h);
    const double cs = std::sqrt(cs2);

    const double rad = 1.0 - v1 * v1 - (vv - v1 * v1) * cs2;
    const double srad = std::sqrt(rad);
    const double den = 1.0 - vv * cs2;
    const double lm = (v1 * (1.0 - cs2) - cs / W * srad) / den;
    const double lp = (v1 * (1.0 - cs2) + cs / W * srad) / den;
    const double Am = (1.0 - v1 * v1) / (1.0 - v1 * lm);
    const double Ap = (1.0 - v1 * v1) / (1.0 - v1 * lp);

    const double one_m_v1sq = 1.0 - v1 * v1;
    const double B = rho * W * rad / (gamma * one_m_v1sq);
    const double C = rho * v1 * cs * srad / (gamma * one_m_v1sq);

    Mat<5> R0;
    R0(0, 0) = 1.0;
    R0(0, 1) = 1.0 / W;
    R0(0, 2) = W * v2;
    R0(0, 3) = W * v3;
    R0(0, 4) = 1.0;
    R0(1, 0) = h * W * Am * lm;
    R0(1, 1) = v1;
    R0(1, 2) = 2.0 * h * W * W * v1 * v2;
    R0(1, 3) = 2.0 * h * W * W * v1 * v3;
    R0(1, 4) = h * W * Ap * lp;
    R0(2, 0) = h * W * v2;
    R0(2, 1) = v2;
    R0(2, 2) = h * (1.0 + 2.0 * W * W * v2 * v2);
    R0(2, 3) = 2.0 * h * W * W * v2 * v3;
    R0(2, 4) = h * W * v2;
    R0(3, 0) = h * W * v3;
    R0(3, 1) = v3;
    R0(3, 2) = 2.0 * h * W * W * v2 * v3;
    R0(3, 3) = h * (1.0 + 2.0 * W * W * v3 * v3);
    R0(3, 4) = h * W * v3;
    R0(4, 0) = h * W * Am;
    R0(4, 1) = 1.0;
    R0(4, 2) = 2.0 * h * W * W * v2;
    R0(4, 3) = 2.0 * h * W * W * v3;
    R0(4, 4) = h * W * Ap;

    // the scaling factor is diagonal except for one entry, so scale the
    // columns directly instead of forming a full matrix product
    const double t12 = 1.0 - v1 * v1 - v2 * v2;
    const double s00 = std::sqrt(0.5 * (B - C));
    const double s11 = std::sqrt((gamma - 1.0) * rho * W * W * W / gamma);
    const double s22 = std::sqrt(p * W * t12 / (h * one_m_v1sq));
    const double s32 = -v2 * v3 * std::sqrt(p * W / (h * one_m_v1sq * t12));
    const double s33 = std::sqrt(p / (h * W * t12));
    const double s44 = std::sqrt(0.5 * (B + C));
    Mat<5> R;
    for (int i = 0; i < 5; ++i) {
        R(i, 0) = R0(i, 0) * s00;
        R(i, 1) = R0(i, 1) * s11;
        R(i, 2) = R0(i, 2) * s22 + R0(i, 3) * s32;
        R(i, 3) = R0(i, 3) * s33;
        R(i, 4) = R0(i, 4) * s44;
    }
    return R;
}

} // namespace detail

/// Scaled eigenvectors R with R R^T = dU/dV and dF1/dU = R Lambda R^{-1},
/// for the packed state layout. The 2D system is the v3 = 0 restriction.
template <std::size_t Dim>
inline Mat<Dim + 2> scaled_eigenvectors(const Prim<Dim>& w, const GasModel& gas)
{
    if constexpr (Dim == 3) {
        return detail::scaled_eigenvectors_3v(w.rho, w.v[0], w.v[1], w.v[2], w.p,
                                              gas.gamma);
    } else {
        const Mat<5> R5 =
            detail::scaled_eigenvectors_3v(w.rho, w.v[0], w.v[1], 0.0, w.p, gas.gamma);
        // At v3 = 0 the fourth row/column decouple from the rest.
        Mat<4> R;
        constexpr int keep[4] = {0, 1, 2, 4};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) R(i, j) = R5(keep[i], keep[j]);
        return R;
    }
}

} // namespace rhd
