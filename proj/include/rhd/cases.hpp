#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "rhd/solver.hpp"

namespace rhd {

/// One benchmark problem: domain, data, boundaries and monitor defaults.
template <std::size_t Dim>
struct Case {
    std::string name;
    Vec<Dim> lo{}, hi{};
    Index<Dim> default_cells{};
    double t_end = 1.0;
    GasModel gas{};
    BcTable<Dim> bc{};
    AdaptOptions<Dim> adapt{};
    std::function<Prim<Dim>(const Vec<Dim>&)> init;
    std::function<Prim<Dim>(const Vec<Dim>&, double)> exact; // null if none
};

namespace cases {

inline Case<2> vortex2d()
{
    Case<2> c;
    c.name = "vortex2d";
    c.lo = {-5.0, -5.0};
    c.hi = {5.0, 5.0};
    c.default_cells = {40, 40};
    c.t_end = 4.0;
    for (int d = 0; d < 2; ++d)
        for (int s = 0; s < 2; ++s) c.bc[d][s].kind = BcKind::periodic;
    c.adapt.alpha = 20.0;
    c.adapt.sigma = MonitorVar::rho;
    c.adapt.jacobi_iters = 3;
    c.adapt.periodic = {true, true};
    c.adapt.period = {10.0, 10.0};

    const double G = c.gas.gamma;
    const double w = 0.5 * std::numbers::sqrt2;
    const double gamw = 1.0 / std::sqrt(1.0 - w * w);
    const double eps = 5.0;
    const double C1 = (G - 1.0) / G * eps * eps / (8.0 * std::numbers::pi * std::numbers::pi);

    auto init = [=](const Vec<2>& x) {
        const double shift = 0.5 * (gamw - 1.0) * (x[0] + x[1]) - 1.0;
        const double xt1 = x[0] + shift;
        const double xt2 = x[1] + shift;
        const double r2 = xt1 * xt1 + xt2 * xt2;
        const double e1 = C1 * std::exp(1.0 - r2);
        Prim<2> p;
        p.rho = std::pow(1.0 - e1, 1.0 / (G - 1.0));
        p.p = std::pow(p.rho, G);
        const double C2 = 2.0 * G * e1 / (2.0 * G - 1.0 - G * e1);
        const double f = std::sqrt(C2 / (1.0 + C2 * r2));
        const double vt1 = -xt2 * f;
        const double vt2 = xt1 * f;
        const double den = 1.0 - w * (vt1 + vt2) / std::numbers::sqrt2;
        const double boost =
            -w / std::numbers::sqrt2 +
            gamw * w * w / (2.0 * (gamw + 1.0)) * (vt1 + vt2);
        p.v[0] = (vt1 / gamw + boost) / den;
        p.v[1] = (vt2 / gamw + boost) / den;
        return p;
    };
    c.init = init;
    // the whole profile advects with velocity (-w/sqrt2, -w/sqrt2) = (-1/2,-1/2)
    c.exact = [init](const Vec<2>& x, double t) {
        Vec<2> y;
        for (int d = 0; d < 2; ++d) {
            y[d] = x[d] + 0.5 * t;
            y[d] -= 10.0 * std::floor((y[d] + 5.0) / 10.0);
        }
        return init(y);
    };
    return c;
}

inline Case<2> riemann2d(int which)
{
    Case<2> c;
    c.name = "rp" + std::to_string(which);
    c.lo = {0.0, 0.0};
    c.hi = {1.0, 1.0};
    c.default_cells = {200, 200};
    c.t_end = 0.4;
    for (int d = 0; d < 2; ++d)
        for (int s = 0; s < 2; ++s) c.bc[d][s].kind = BcKind::outflow;
    c.adapt.alpha = 1200.0;
    c.adapt.sigma = MonitorVar::lnrho;

    // quadrant states, counterclockwise from (+,+)
    std::array<Prim<2>, 4> q;
    switch (which) {
        case 1:
            q[0] = {0.5, {0.5, -0.5}, 5.0};
            q[1] = {1.0, {0.5, 0.5}, 5.0};
            q[2] = {3.0, {-0.5, 0.5}, 5.0};
            q[3] = {1.5, {-0.5, -0.5}, 5.0};
            break;
        case 2:
            q[0] = {1.0, {0.0, 0.0}, 1.0};
            q[1] = {0.5771, {-0.3529, 0.0}, 0.4};
            q[2] = {1.0, {-0.3529, -0.3529}, 1.0};
            q[3] = {0.5771, {0.0, -0.3529}, 0.4};
            break;
        case 3:
            q[0] = {0.035145216124503, {0.0, 0.0}, 0.162931056509027};
            q[1] = {0.1, {0.7, 0.0}, 1.0};
            q[2] = {0.5, {0.0, 0.0}, 1.0};
            q[3] = {0.1, {0.0, 0.7}, 1.0};
            break;
        default:
            throw std::invalid_argument("riemann2d: which must be 1, 2 or 3");
    }
    c.init = [q](const Vec<2>& x) {
        if (x[0] > 0.5) return x[1] > 0.5 ? q[0] : q[3];
        return x[1] > 0.5 ? q[1] : q[2];
    };
    return c;
}

inline Case<3> sine3d()
{
    Case<3> c;
    c.name = "sine3d";
    c.lo = {0.0, 0.0, 0.0};
    c.hi = {1.0, 1.0, 1.0};
    c.default_cells = {20, 20, 20};
    c.t_end = 0.1;
    for (int d = 0; d < 3; ++d)
        for (int s = 0; s < 2; ++s) c.bc[d][s].kind = BcKind::periodic;
    c.adapt.alpha = 20.0;
    c.adapt.sigma = MonitorVar::rho;
    c.adapt.jacobi_iters = 3;
    c.adapt.periodic = {true, true, true};
    c.adapt.period = {1.0, 1.0, 1.0};

    auto ex = [](const Vec<3>& x, double t) {
        Prim<3> p;
        p.v = {0.2, 0.4, 0.6};
        p.rho = 1.0 + 0.2 * std::sin(2.0 * std::numbers::pi *
                                     (x[0] + x[1] + x[2] - 1.2 * t));
        p.p = 1.0;
        return p;
    };
    c.exact = ex;
    c.init = [ex](const Vec<3>& x) { return ex(x, 0.0); };
    return c;
}

inline Case<3> spherical_riemann()
{
    Case<3> c;
    c.name = "spherical";
    // one octant of the spherically symmetric problem; the coordinate planes
    // are symmetry (reflecting) boundaries
    c.lo = {0.0, 0.0, 0.0};
    c.hi = {1.0, 1.0, 1.0};
    c.default_cells = {50, 50, 50};
    c.t_end = 0.4;
    for (int d = 0; d < 3; ++d) {
        c.bc[d][0].kind = BcKind::reflect;
        c.bc[d][1].kind = BcKind::outflow;
    }
    c.adapt.alpha = 1000.0;
    c.adapt.sigma = MonitorVar::lnrho;
    c.init = [](const Vec<3>& x) {
        Prim<3> p;
        const double r = norm(x);
        if (r < 0.5) {
            p.rho = 10.0;
            p.p = 40.0 / 3.0;
        } else {
            p.rho = 1.0;
            p.p = 1e-6;
        }
        return p;
    };
    return c;
}

inline Case<3> shock_bubble()
{
    Case<3> c;
    c.name = "shockbubble";
    c.lo = {0.0, -45.0, -45.0};
    c.hi = {325.0, 45.0, 45.0};
    c.default_cells = {65, 18, 18}; // scaled-down default; full scale is 325x90x90
    c.t_end = 450.0;
    for (int d = 0; d < 3; ++d)
        for (int s = 0; s < 2; ++s) c.bc[d][s].kind = BcKind::outflow;
    const Prim<3> post{1.865225080631180, {-0.196781107378299, 0.0, 0.0}, 0.15};
    c.bc[0][1].kind = BcKind::inflow;
    c.bc[0][1].state = post;
    c.adapt.alpha = 1000.0;
    c.adapt.sigma = MonitorVar::lnrho;
    c.init = [post](const Vec<3>& x) {
        if (x[0] > 265.0) return post;
        Prim<3> p{1.0, {0.0, 0.0, 0.0}, 0.05};
        const double dx = x[0] - 215.0;
        if (std::sqrt(dx * dx + x[1] * x[1] + x[2] * x[2]) <= 25.0) p.rho = 0.1358;
        return p;
    };
    return c;
}

} // namespace cases

inline std::vector<std::string> case_names(int dim)
{
    if (dim == 2) return {"vortex2d", "rp1", "rp2", "rp3"};
    return {"sine3d", "spherical", "shockbubble"};
}

template <std::size_t Dim>
inline Case<Dim> make_case(const std::string& name)
{
    if constexpr (Dim == 2) {
        if (name == "vortex2d") return cases::vortex2d();
        if (name == "rp1") return cases::riemann2d(1);
        if (name == "rp2") return cases::riemann2d(2);
        if (name == "rp3") return cases::riemann2d(3);
    } else {
        if (name == "sine3d") return cases::sine3d();
        if (name == "spherical") return cases::spherical_riemann();
        if (name == "shockbubble") return cases::shock_bubble();
    }
    throw std::invalid_argument("unknown " + std::to_string(Dim) + "D case: " + name);
}

inline int case_dim(const std::string& name)
{
    for (const auto& n : case_names(2))
        if (n == name) return 2;
    for (const auto& n : case_names(3))
        if (n == name) return 3;
    throw std::invalid_argument("unknown case: " + name);
}

/// Project the case data onto the mesh (cell centroids) and assemble (J U, J).
template <std::size_t Dim>
inline void project_initial_data(const Case<Dim>& c, Solution<Dim>& sol)
{
    sol.jac = jacobian_direct<Dim>(sol.mesh.x, sol.mesh.ncells, sol.mesh.dxi);
    for_box<Dim>(sol.mesh.ncells, [&](const Index<Dim>& i) {
        const Prim<Dim> w = c.init(cell_centroid(sol.mesh.x, i));
        sol.prim(i) = w;
        sol.ju(i) = sol.jac(i) * pack(prim_to_cons(w, c.gas));
    });
}

/// Build the initial solution: uniform mesh, then a few rounds of
/// adapt-and-reproject so the starting mesh already tracks the initial data.
template <std::size_t Dim>
inline Solution<Dim> initialize(const Case<Dim>& c, const Index<Dim>& ncells,
                                const AdaptOptions<Dim>& adapt, int adapt_cycles = 5)
{
    Solution<Dim> sol(uniform_mesh(ncells, c.lo, c.hi));
    project_initial_data(c, sol);
    if (adapt.enabled) {
        for (int cycle = 0; cycle < adapt_cycles; ++cycle) {
            const auto sigma = monitor_variable(sol.prim, adapt.sigma);
            sol.mesh.x = adapt_mesh(sol.mesh, sigma, adapt);
            project_initial_data(c, sol);
        }
    }
    for_box<Dim>(sol.mesh.nnodes(),
                 [&](const Index<Dim>& n) { sol.mesh.xdot(n) = Vec<Dim>{}; });
    return sol;
}

/// Error norms of the cell density against the exact solution at the cell
/// centroids, taken in the computational measure (every cell weighted by
/// the uniform index volume, independent of how the mesh has moved).
template <std::size_t Dim>
struct ErrorNorms {
    double l1 = 0.0, l2 = 0.0, linf = 0.0;
};

template <std::size_t Dim>
inline ErrorNorms<Dim> density_error(const Case<Dim>& c, const Solution<Dim>& sol)
{
    if (!c.exact) throw std::logic_error("case has no exact solution: " + c.name);
    ErrorNorms<Dim> e;
    for_box<Dim>(sol.mesh.ncells, [&](const Index<Dim>& i) {
        const double ex = c.exact(cell_centroid(sol.mesh.x, i), sol.t).rho;
        const double err = std::abs(sol.prim(i).rho - ex);
        e.l1 += err;
        e.l2 += err * err;
        e.linf = std::max(e.linf, err);
    });
    const double w = cell_dxi_volume(sol.mesh.dxi);
    e.l1 *= w;
    e.l2 = std::sqrt(e.l2 * w);
    return e;
}

} // namespace rhd
