#pragma once

#include <algorithm>
#include <cmath>

#include "rhd/field.hpp"
#include "rhd/fluxes.hpp"
#include "rhd/mesh.hpp"

namespace rhd {

/// Face-centered metric coefficients for every mesh direction.
template <std::size_t Dim>
struct Metrics {
    std::array<Field<InterfaceMetrics<Dim>, Dim>, Dim> face;

    Metrics() = default;
    explicit Metrics(const Index<Dim>& ncells)
    {
        for (int k = 0; k < Dim; ++k)
            face[k] = Field<InterfaceMetrics<Dim>, Dim>(face_dims(ncells, k));
    }
};

namespace detail {

// Corner node of face f in direction k: offsets (sa, sb) along the
// transverse directions a, b.
inline Index<3> face_node(const Index<3>& f, int a, int b, int sa, int sb)
{
    Index<3> n = f;
    n[a] += sa;
    n[b] += sb;
    return n;
}

} // namespace detail

/// Spatial metric coefficients nx[l] = J dxi_k/dx_l on every face, in the
/// conservative (divergence) form built from face-node differences, so the
/// discrete surface conservation laws hold to roundoff on any mesh.
template <std::size_t Dim>
inline void compute_spatial_metrics(const Field<Vec<Dim>, Dim>& x, const Vec<Dim>& dxi,
                                    Metrics<Dim>& m, Exec ex = Exec::serial)
{
    if constexpr (Dim == 2) {
        for (int k = 0; k < 2; ++k) {
            const int a = 1 - k;
            auto& fk = m.face[k];
            for_box_par<2>(ex, fk.dims(), [&](const Index<2>& f) {
                const Vec<2> n0 = x(f);
                const Vec<2> n1 = x(shifted(f, a, 1));
                InterfaceMetrics<2>& g = fk(f);
                for (int l = 0; l < 2; ++l) {
                    const int o = 1 - l;
                    const double d = (n1[o] - n0[o]) / dxi[a];
                    g.nx[l] = (k == l) ? d : -d;
                }
                g.nt = 0.0;
            });
        }
    } else {
        for (int k = 0; k < 3; ++k) {
            const int a = (k + 1) % 3;
            const int b = (k + 2) % 3;
            auto& fk = m.face[k];
            for_box_par<3>(ex, fk.dims(), [&](const Index<3>& f) {
                Vec<3> c[2][2];
                for (int sa = 0; sa < 2; ++sa)
                    for (int sb = 0; sb < 2; ++sb)
                        c[sa][sb] = x(detail::face_node(f, a, b, sa, sb));
                InterfaceMetrics<3>& g = fk(f);
                for (int l = 0; l < 3; ++l) {
                    const int p = (l + 1) % 3;
                    const int q = (l + 2) % 3;
                    // d_b[ d_a[x_p] av_a{x_q} ] - d_a[ d_b[x_p] av_b{x_q} ]
                    double t1 = 0.0, t2 = 0.0;
                    for (int s = 0; s < 2; ++s) {
                        const double sgn = s ? 1.0 : -1.0;
                        t1 += sgn * (c[1][s][p] - c[0][s][p]) * 0.5 *
                              (c[1][s][q] + c[0][s][q]);
                        t2 += sgn * (c[s][1][p] - c[s][0][p]) * 0.5 *
                              (c[s][1][q] + c[s][0][q]);
                    }
                    g.nx[l] = (t1 - t2) / (dxi[a] * dxi[b]);
                }
                g.nt = 0.0;
            });
        }
    }
}

/// Temporal metric from the face-averaged node velocity:
/// nt = -sum_l xdot_l nx_l. Requires nx to be filled already.
template <std::size_t Dim>
inline void set_face_velocity_temporal(const Field<Vec<Dim>, Dim>& x,
                                       const Field<Vec<Dim>, Dim>& xdot,
                                       Metrics<Dim>& m, Exec ex = Exec::serial)
{
    (void)x;
    for (int k = 0; k < Dim; ++k) {
        auto& fk = m.face[k];
        for_box_par<Dim>(ex, fk.dims(), [&](const Index<Dim>& f) {
            Vec<Dim> vbar{};
            if constexpr (Dim == 2) {
                const int a = 1 - k;
                vbar = 0.5 * (xdot(f) + xdot(shifted(f, a, 1)));
            } else {
                const int a = (k + 1) % 3;
                const int b = (k + 2) % 3;
                for (int sa = 0; sa < 2; ++sa)
                    for (int sb = 0; sb < 2; ++sb)
                        vbar += 0.25 * xdot(detail::face_node(f, a, b, sa, sb));
            }
            InterfaceMetrics<Dim>& g = fk(f);
            g.nt = -dot(vbar, g.nx);
        });
    }
}

/// Max cellwise defect of the discrete surface conservation laws,
/// normalized by the largest metric magnitude per unit cell width.
template <std::size_t Dim>
inline double max_scl_residual(const Metrics<Dim>& m, const Vec<Dim>& dxi)
{
    Index<Dim> nc = m.face[0].dims();
    nc[0] -= 1;
    double worst = 0.0, scale = 0.0;
    for_box<Dim>(nc, [&](const Index<Dim>& i) {
        for (int l = 0; l < Dim; ++l) {
            double r = 0.0;
            for (int k = 0; k < Dim; ++k) {
                const double hi = m.face[k](shifted(i, k, 1)).nx[l];
                const double lo = m.face[k](i).nx[l];
                r += (hi - lo) / dxi[k];
                scale = std::max(scale, std::max(std::abs(hi), std::abs(lo)) / dxi[k]);
            }
            worst = std::max(worst, std::abs(r));
        }
    });
    return scale > 0.0 ? worst / scale : worst;
}

/// Cell Jacobian from the divergence form of the volume, consistent with the
/// face metric discretization. Positive for valid (untangled) meshes.
template <std::size_t Dim>
inline Field<double, Dim> jacobian_direct(const Field<Vec<Dim>, Dim>& x,
                                          const Index<Dim>& ncells, const Vec<Dim>& dxi,
                                          Exec ex = Exec::serial);

namespace detail {

// Face array A_k entering the divergence form of the cell volume:
// J = -sum_k d_k[A_k]/dxi_k. On linear-in-time node paths each entry is a
// cubic polynomial of t.
inline std::array<Field<double, 3>, 3> face_volume_terms(const Field<Vec<3>, 3>& x,
                                                         const Index<3>& ncells,
                                                         const Vec<3>& dxi,
                                                         Exec ex = Exec::serial)
{
    std::array<Field<double, 3>, 3> A;
    for (int k = 0; k < 3; ++k) {
        const int a = (k + 1) % 3;
        const int b = (k + 2) % 3;
        A[k] = Field<double, 3>(face_dims(ncells, k));
        auto& Ak = A[k];
        for_box_par<3>(ex, Ak.dims(), [&](const Index<3>& f) {
            Vec<3> c[2][2];
            for (int sa = 0; sa < 2; ++sa)
                for (int sb = 0; sb < 2; ++sb)
                    c[sa][sb] = x(face_node(f, a, b, sa, sb));
            // averaged over the three cyclic component roles (p differentiated,
            // q averaged in the curl pair, r face-averaged) so the result is
            // covariant under coordinate permutations:
            // d_a[ d_b[xp] av_b{xq} ] - d_b[ d_a[xp] av_a{xq} ], times av{xr}
            double acc = 0.0;
            for (int p = 0; p < 3; ++p) {
                const int q = (p + 1) % 3;
                const int r = (p + 2) % 3;
                double t1 = 0.0, t2 = 0.0, rbar = 0.0;
                for (int s = 0; s < 2; ++s) {
                    const double sgn = s ? 1.0 : -1.0;
                    t1 += sgn * (c[s][1][p] - c[s][0][p]) * 0.5 * (c[s][1][q] + c[s][0][q]);
                    t2 += sgn * (c[1][s][p] - c[0][s][p]) * 0.5 * (c[1][s][q] + c[0][s][q]);
                }
                for (int sa = 0; sa < 2; ++sa)
                    for (int sb = 0; sb < 2; ++sb) rbar += 0.25 * c[sa][sb][r];
                acc += (t1 - t2) * rbar;
            }
            Ak(f) = acc / (3.0 * dxi[a] * dxi[b]);
        });
    }
    return A;
}

} // namespace detail

template <>
inline Field<double, 2> jacobian_direct<2>(const Field<Vec<2>, 2>& x,
                                           const Index<2>& ncells, const Vec<2>& dxi,
                                           Exec ex)
{
    Field<double, 2> J(ncells);
    for_box_par<2>(ex, ncells, [&](const Index<2>& i) {
        Vec<2> c[2][2];
        for (int s0 = 0; s0 < 2; ++s0)
            for (int s1 = 0; s1 < 2; ++s1) c[s0][s1] = x({i[0] + s0, i[1] + s1});
        // d2[ d1[x0] av1{x1} ] - d1[ d2[x0] av2{x1} ]
        double t1 = 0.0, t2 = 0.0;
        for (int s = 0; s < 2; ++s) {
            const double sgn = s ? 1.0 : -1.0;
            t1 += sgn * (c[1][s][0] - c[0][s][0]) * 0.5 * (c[1][s][1] + c[0][s][1]);
            t2 += sgn * (c[s][1][0] - c[s][0][0]) * 0.5 * (c[s][1][1] + c[s][0][1]);
        }
        J(i) = (t1 - t2) / (dxi[0] * dxi[1]);
    });
    return J;
}

template <>
inline Field<double, 3> jacobian_direct<3>(const Field<Vec<3>, 3>& x,
                                           const Index<3>& ncells, const Vec<3>& dxi,
                                           Exec ex)
{
    const auto A = detail::face_volume_terms(x, ncells, dxi, ex);
    Field<double, 3> J(ncells);
    for_box_par<3>(ex, ncells, [&](const Index<3>& i) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k)
            s -= (A[k](shifted(i, k, 1)) - A[k](i)) / dxi[k];
        J(i) = s;
    });
    return J;
}

/// Space-time conservative temporal metrics for one time step (3D). The face
/// terms A_k are sampled at four points of the step on the linear node
/// trajectories, giving the exact time derivative of the cubic A_k(t); the
/// tangential corrections live on cell edges so that their contributions to
/// the Jacobian update cancel identically in the divergence sum.
struct SpaceTimeMetrics {
    // dA_k/dt (s) = c0 + c1 s + c2 s^2, s = t - t_begin
    std::array<Field<double, 3>, 3> c0, c1, c2;
    Index<3> ncells{};
    Vec<3> dxi{};
    double dt = 0.0;

    SpaceTimeMetrics() = default;

    // x0: node positions at the beginning of the step, xdot: node velocities
    // held fixed over the step.
    SpaceTimeMetrics(const Field<Vec<3>, 3>& x0, const Field<Vec<3>, 3>& xdot,
                     const Index<3>& nc, const Vec<3>& dxi_, double dt_,
                     Exec ex = Exec::serial)
        : ncells(nc), dxi(dxi_), dt(dt_)
    {
        Field<Vec<3>, 3> xs(x0.dims());
        std::array<std::array<Field<double, 3>, 3>, 4> snap;
        for (int s = 0; s < 4; ++s) {
            const double tau = dt * s / 3.0;
            for_box_par<3>(ex, xs.dims(), [&](const Index<3>& n) {
                xs(n) = x0(n) + tau * xdot(n);
            });
            snap[s] = detail::face_volume_terms(xs, nc, dxi, ex);
        }
        for (int k = 0; k < 3; ++k) {
            c0[k] = Field<double, 3>(face_dims(nc, k));
            c1[k] = Field<double, 3>(face_dims(nc, k));
            c2[k] = Field<double, 3>(face_dims(nc, k));
            auto& A0 = snap[0][k];
            auto& A1 = snap[1][k];
            auto& A2 = snap[2][k];
            auto& A3 = snap[3][k];
            for_box_par<3>(ex, c0[k].dims(), [&](const Index<3>& f) {
                const double a0 = A0(f), a1 = A1(f), a2 = A2(f), a3 = A3(f);
                c0[k](f) = (-11.0 * a0 + 18.0 * a1 - 9.0 * a2 + 2.0 * a3) / (2.0 * dt);
                c1[k](f) = 9.0 * (2.0 * a0 - 5.0 * a1 + 4.0 * a2 - a3) / (dt * dt);
                c2[k](f) = -13.5 * (a0 - 3.0 * a1 + 3.0 * a2 - a3) / (dt * dt * dt);
            });
        }
    }

    /// Fill the temporal metric nt on every face at step offset s = t - t_begin,
    /// using node positions x at that time and the fixed node velocities.
    void set_temporal(const Field<Vec<3>, 3>& x, const Field<Vec<3>, 3>& xdot, double s,
                      Metrics<3>& m, Exec ex = Exec::serial) const
    {
        // Edge-centered tangential terms; the edge in direction e at index i
        // joins node i and node i + e_hat.
        std::array<Field<double, 3>, 3> C;
        for (int e = 0; e < 3; ++e) {
            Index<3> ed;
            for (int d = 0; d < 3; ++d) ed[d] = ncells[d] + (d == e ? 0 : 1);
            C[e] = Field<double, 3>(ed);
            auto& Ce = C[e];
            for_box_par<3>(ex, ed, [&](const Index<3>& i) {
                const Index<3> j = shifted(i, e, 1);
                const Vec<3> xa = x(i), xb = x(j);
                const Vec<3> va = xdot(i), vb = xdot(j);
                // same cyclic component-role average as the face terms A_k
                double acc = 0.0;
                for (int p = 0; p < 3; ++p) {
                    const int q = (p + 1) % 3;
                    const int r = (p + 2) % 3;
                    acc += (0.5 * (va[p] + vb[p]) * (xb[q] - xa[q]) -
                            (xb[p] - xa[p]) * 0.5 * (va[q] + vb[q])) *
                           0.5 * (xa[r] + xb[r]);
                }
                Ce(i) = acc / (3.0 * dxi[e]);
            });
        }
        // nt_k = dA_k/dt + tangential edge differences; the same arrays with
        // opposite signs appear in two directions, so sum_k d_k[nt_k] equals
        // sum_k d_k[dA_k/dt] identically.
        for (int k = 0; k < 3; ++k) {
            auto& fk = m.face[k];
            for_box_par<3>(ex, fk.dims(), [&](const Index<3>& f) {
                double nt = c0[k](f) + s * (c1[k](f) + s * c2[k](f));
                if (k == 0) {
                    nt += (C[2](shifted(f, 1, 1)) - C[2](f)) / dxi[1];
                    nt -= (C[1](shifted(f, 2, 1)) - C[1](f)) / dxi[2];
                } else if (k == 1) {
                    nt += (C[0](shifted(f, 2, 1)) - C[0](f)) / dxi[2];
                    nt -= (C[2](shifted(f, 0, 1)) - C[2](f)) / dxi[0];
                } else {
                    nt += (C[1](shifted(f, 0, 1)) - C[1](f)) / dxi[0];
                    nt -= (C[0](shifted(f, 1, 1)) - C[0](f)) / dxi[1];
                }
                fk(f) = InterfaceMetrics<3>{fk(f).nx, nt};
            });
        }
    }
};

} // namespace rhd
