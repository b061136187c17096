#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rhd/metrics.hpp"

using namespace rhd;

namespace {

// uniform mesh with every interior node displaced randomly, boundary kept
template <std::size_t Dim>
Mesh<Dim> jittered_mesh(std::mt19937& rng, int n, double amp)
{
    Index<Dim> nc;
    Vec<Dim> lo{}, hi;
    for (int d = 0; d < Dim; ++d) {
        nc[d] = n;
        hi[d] = 1.0;
    }
    Mesh<Dim> m = uniform_mesh<Dim>(nc, lo, hi);
    std::uniform_real_distribution<double> u(-amp / n, amp / n);
    for_box<Dim>(m.nnodes(), [&](const Index<Dim>& i) {
        for (int d = 0; d < Dim; ++d)
            if (i[d] > 0 && i[d] < nc[d]) m.x(i)[d] += u(rng);
    });
    return m;
}

double quad_area_shoelace(const Vec<2>& a, const Vec<2>& b, const Vec<2>& c,
                          const Vec<2>& d)
{
    auto cross = [](const Vec<2>& p, const Vec<2>& q) {
        return p[0] * q[1] - p[1] * q[0];
    };
    return 0.5 * (cross(a, b) + cross(b, c) + cross(c, d) + cross(d, a));
}

// volume of the cell under the trilinear corner interpolant; its Jacobian
// determinant is quadratic per variable, so 2-point Gauss is exact
double hex_volume_trilinear(const Vec<3> c[2][2][2])
{
    const double gp[2] = {0.5 - 0.5 / std::numbers::sqrt3, 0.5 + 0.5 / std::numbers::sqrt3};
    double vol = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                const double xi[3] = {gp[i], gp[j], gp[k]};
                Mat<3> Jm;
                for (int s0 = 0; s0 < 2; ++s0)
                    for (int s1 = 0; s1 < 2; ++s1)
                        for (int s2 = 0; s2 < 2; ++s2) {
                            const int s[3] = {s0, s1, s2};
                            double w[3], dw[3];
                            for (int d = 0; d < 3; ++d) {
                                w[d] = s[d] ? xi[d] : 1.0 - xi[d];
                                dw[d] = s[d] ? 1.0 : -1.0;
                            }
                            for (int r = 0; r < 3; ++r)
                                for (int d = 0; d < 3; ++d) {
                                    double f = dw[d];
                                    for (int o = 0; o < 3; ++o)
                                        if (o != d) f *= w[o];
                                    Jm(r, d) += f * c[s0][s1][s2][r];
                                }
                        }
                const double det =
                    Jm(0, 0) * (Jm(1, 1) * Jm(2, 2) - Jm(1, 2) * Jm(2, 1)) -
                    Jm(0, 1) * (Jm(1, 0) * Jm(2, 2) - Jm(1, 2) * Jm(2, 0)) +
                    Jm(0, 2) * (Jm(1, 0) * Jm(2, 1) - Jm(1, 1) * Jm(2, 0));
                vol += det / 8.0;
            }
    return vol;
}

} // namespace

TEST_CASE("surface conservation laws hold to roundoff on distorted meshes")
{
    std::mt19937 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        {
            const Mesh<2> m = jittered_mesh<2>(rng, 12, 0.3);
            Metrics<2> g(m.ncells);
            compute_spatial_metrics(m.x, m.dxi, g, Exec::serial);
            CHECK(max_scl_residual(g, m.dxi) <= 1e-13);
        }
        {
            const Mesh<3> m = jittered_mesh<3>(rng, 8, 0.3);
            Metrics<3> g(m.ncells);
            compute_spatial_metrics(m.x, m.dxi, g, Exec::serial);
            CHECK(max_scl_residual(g, m.dxi) <= 1e-13);
        }
    }
}

TEST_CASE("2D cell Jacobians equal the quad area")
{
    std::mt19937 rng(2);
    const Mesh<2> m = jittered_mesh<2>(rng, 10, 0.3);
    const Field<double, 2> J = jacobian_direct<2>(m.x, m.ncells, m.dxi);
    for_box<2>(m.ncells, [&](const Index<2>& i) {
        const double area =
            quad_area_shoelace(m.x({i[0], i[1]}), m.x({i[0] + 1, i[1]}),
                               m.x({i[0] + 1, i[1] + 1}), m.x({i[0], i[1] + 1}));
        CHECK(J(i) * m.dxi[0] * m.dxi[1] == doctest::Approx(area).epsilon(1e-12));
        CHECK(J(i) > 0.0);
    });
}

TEST_CASE("3D cell Jacobians are exact for affine maps")
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (int trial = 0; trial < 10; ++trial) {
        Mat<3> M = Mat<3>::identity();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) M(i, j) += u(rng);
        const double det = M(0, 0) * (M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1)) -
                           M(0, 1) * (M(1, 0) * M(2, 2) - M(1, 2) * M(2, 0)) +
                           M(0, 2) * (M(1, 0) * M(2, 1) - M(1, 1) * M(2, 0));
        Mesh<3> m = uniform_mesh<3>({5, 5, 5}, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
        for_box<3>(m.nnodes(), [&](const Index<3>& i) { m.x(i) = M * m.x(i); });
        const Field<double, 3> J = jacobian_direct<3>(m.x, m.ncells, m.dxi);
        for_box<3>(m.ncells, [&](const Index<3>& i) {
            CHECK(J(i) == doctest::Approx(det).epsilon(1e-13));
        });
    }
}

TEST_CASE("3D cell Jacobians track the cell volume and sum to the domain")
{
    // the divergence-form cell volume and the trilinear one are different
    // but consistent discretizations; they agree per cell up to O(h^2) and
    // the former telescopes to the exact domain volume on planar boundaries
    std::mt19937 rng(33);
    const Mesh<3> m = jittered_mesh<3>(rng, 6, 0.3);
    const Field<double, 3> J = jacobian_direct<3>(m.x, m.ncells, m.dxi);
    const double dv = m.dxi[0] * m.dxi[1] * m.dxi[2];
    double total = 0.0;
    for_box<3>(m.ncells, [&](const Index<3>& i) {
        Vec<3> c[2][2][2];
        for (int s0 = 0; s0 < 2; ++s0)
            for (int s1 = 0; s1 < 2; ++s1)
                for (int s2 = 0; s2 < 2; ++s2)
                    c[s0][s1][s2] = m.x({i[0] + s0, i[1] + s1, i[2] + s2});
        const double vol = hex_volume_trilinear(c);
        CHECK(J(i) > 0.0);
        CHECK(std::abs(J(i) * dv - vol) <= 0.1 * vol);
        total += J(i) * dv;
    });
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("face metrics converge to the analytic cofactors of a smooth map")
{
    // x = xi + 0.05 sin(2 pi xi_next), a smooth periodic distortion
    constexpr double amp = 0.05;
    const double tau = 2.0 * std::numbers::pi;
    auto map = [&](const Vec<3>& xi) {
        Vec<3> x;
        for (int d = 0; d < 3; ++d) x[d] = xi[d] + amp * std::sin(tau * xi[(d + 1) % 3]);
        return x;
    };
    auto cofactor = [&](const Vec<3>& xi, int k, int l) {
        Mat<3> dxdxi;
        for (int d = 0; d < 3; ++d) {
            dxdxi(d, d) = 1.0;
            dxdxi(d, (d + 1) % 3) = amp * tau * std::cos(tau * xi[(d + 1) % 3]);
        }
        // J dxi_k/dx_l is the (l,k) cofactor of dx/dxi
        const int p = (l + 1) % 3, q = (l + 2) % 3;
        const int r = (k + 1) % 3, s = (k + 2) % 3;
        return dxdxi(p, r) * dxdxi(q, s) - dxdxi(p, s) * dxdxi(q, r);
    };

    double err_prev = 0.0, jerr_prev = 0.0;
    for (int n : {8, 16, 32}) {
        Index<3> nc{n, n, n};
        Mesh<3> m = uniform_mesh<3>(nc, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
        for_box<3>(m.nnodes(), [&](const Index<3>& i) { m.x(i) = map(m.x(i)); });
        Metrics<3> g(nc);
        compute_spatial_metrics(m.x, m.dxi, g, Exec::serial);
        double err = 0.0;
        for (int k = 0; k < 3; ++k) {
            for_box<3>(g.face[k].dims(), [&](const Index<3>& f) {
                Vec<3> xi;
                for (int d = 0; d < 3; ++d)
                    xi[d] = (f[d] + (d == k ? 0.0 : 0.5)) * m.dxi[d];
                for (int l = 0; l < 3; ++l)
                    err = std::max(err, std::abs(g.face[k](f).nx[l] - cofactor(xi, k, l)));
            });
        }
        // the cell Jacobian converges to the analytic determinant as well
        const Field<double, 3> J = jacobian_direct<3>(m.x, m.ncells, m.dxi);
        double jerr = 0.0;
        for_box<3>(m.ncells, [&](const Index<3>& i) {
            Vec<3> xi;
            for (int d = 0; d < 3; ++d) xi[d] = (i[d] + 0.5) * m.dxi[d];
            // expand det(dx/dxi) on the xi_0 column; only dx_0/dxi_0 = 1 and
            // dx_2/dxi_0 = a tau cos(tau xi_0) are nonzero there
            const double det = cofactor(xi, 0, 0) +
                               amp * tau * std::cos(tau * xi[0]) * cofactor(xi, 0, 2);
            jerr = std::max(jerr, std::abs(J(i) - det));
        });
        if (err_prev > 0.0) {
            CHECK(err_prev / err >= 3.0); // second order
            CHECK(jerr_prev / jerr >= 3.0);
        }
        err_prev = err;
        jerr_prev = jerr;
    }
}

TEST_CASE("face velocity form of the temporal metric matches rigid motion")
{
    std::mt19937 rng(4);
    Mesh<3> m = jittered_mesh<3>(rng, 6, 0.3);
    const Vec<3> v{0.3, -0.2, 0.1};
    for_box<3>(m.nnodes(), [&](const Index<3>& i) { m.xdot(i) = v; });
    Metrics<3> g(m.ncells);
    compute_spatial_metrics(m.x, m.dxi, g, Exec::serial);
    set_face_velocity_temporal(m.x, m.xdot, g, Exec::serial);
    for (int k = 0; k < 3; ++k)
        for_box<3>(g.face[k].dims(), [&](const Index<3>& f) {
            const auto& gm = g.face[k](f);
            CHECK(gm.nt == doctest::Approx(-dot(v, gm.nx)).epsilon(1e-13));
        });
}

TEST_CASE("space-time temporal metrics integrate the volume change exactly")
{
    std::mt19937 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        Mesh<3> m = jittered_mesh<3>(rng, 6, 0.25);
        std::uniform_real_distribution<double> u(-0.4, 0.4);
        for_box<3>(m.nnodes(), [&](const Index<3>& i) {
            for (int d = 0; d < 3; ++d)
                if (i[d] > 0 && i[d] < m.ncells[d]) m.xdot(i)[d] = u(rng) / 6.0;
        });
        const double dt = 0.05;
        const SpaceTimeMetrics stm(m.x, m.xdot, m.ncells, m.dxi, dt, Exec::serial);

        // divergence of nt per cell at a step offset s
        auto div_nt = [&](double s) {
            Field<Vec<3>, 3> xs(m.x.dims());
            for_box<3>(m.nnodes(),
                       [&](const Index<3>& i) { xs(i) = m.x(i) + s * m.xdot(i); });
            Metrics<3> g(m.ncells);
            compute_spatial_metrics(xs, m.dxi, g, Exec::serial);
            stm.set_temporal(xs, m.xdot, s, g, Exec::serial);
            Field<double, 3> d(m.ncells);
            for_box<3>(m.ncells, [&](const Index<3>& i) {
                double r = 0.0;
                for (int k = 0; k < 3; ++k)
                    r += (g.face[k](shifted(i, k, 1)).nt - g.face[k](i).nt) / m.dxi[k];
                d(i) = r;
            });
            return d;
        };

        // nt is quadratic in s, so Simpson integrates it exactly; the change
        // of every cell volume over the step must match the flux of nt
        const auto d0 = div_nt(0.0), dh = div_nt(0.5 * dt), d1 = div_nt(dt);
        const Field<double, 3> J0 = jacobian_direct<3>(m.x, m.ncells, m.dxi);
        Field<Vec<3>, 3> x1(m.x.dims());
        for_box<3>(m.nnodes(), [&](const Index<3>& i) { x1(i) = m.x(i) + dt * m.xdot(i); });
        const Field<double, 3> J1 = jacobian_direct<3>(x1, m.ncells, m.dxi);
        for_box<3>(m.ncells, [&](const Index<3>& i) {
            const double flux = dt / 6.0 * (d0(i) + 4.0 * dh(i) + d1(i));
            CHECK(J1(i) - J0(i) + flux == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
        });
    }
}
