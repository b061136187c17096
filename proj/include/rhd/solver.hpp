#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "rhd/adaptation.hpp"
#include "rhd/boundary.hpp"
#include "rhd/fluxes.hpp"
#include "rhd/metrics.hpp"

namespace rhd {

enum class FluxScheme { ec, es1, es2 };
enum class TimeScheme { rk2, rk3 };
enum class VclScheme { v1, v2 };

template <std::size_t Dim>
struct SolverOptions {
    GasModel gas{};
    double cfl = Dim == 2 ? 0.4 : 0.3;
    FluxScheme flux = FluxScheme::es2;
    TimeScheme time = TimeScheme::rk2;
    VclScheme vcl = VclScheme::v1;
    Exec exec = Exec::parallel;
    BcTable<Dim> bc{};
    AdaptOptions<Dim> adapt{};
};

/// Discrete state: geometry plus cell values of (J U, J) and the recovered
/// primitives (ghost width 2 for the reconstruction stencils).
template <std::size_t Dim>
struct Solution {
    Mesh<Dim> mesh;
    Field<double, Dim> jac;
    Field<State<Dim>, Dim> ju;
    Field<Prim<Dim>, Dim> prim;
    double t = 0.0;

    Solution() = default;
    explicit Solution(Mesh<Dim> m)
        : mesh(std::move(m)), jac(mesh.ncells), ju(mesh.ncells), prim(mesh.ncells, 2)
    {
    }
};

/// Scratch arrays reused across right-hand-side evaluations.
template <std::size_t Dim>
struct Workspace {
    Metrics<Dim> metrics;
    std::array<Field<State<Dim>, Dim>, Dim> flux;
    std::array<Field<double, Dim>, Dim> qflux; // entropy flux, filled on request
    Field<State<Dim>, Dim> entv;               // entropy variables, ghost 2
    Field<Vec<Dim>, Dim> xs;                   // stage node positions
    Field<State<Dim>, Dim> ju1, dju;
    Field<double, Dim> jac1, djac;
    Field<Prim<Dim>, Dim> prim1; // stage primitives, ghost 2

    explicit Workspace(const Index<Dim>& nc)
        : metrics(nc),
          entv(nc, 2),
          ju1(nc),
          dju(nc),
          jac1(nc),
          djac(nc),
          prim1(nc, 2)
    {
        for (int k = 0; k < Dim; ++k) {
            flux[k] = Field<State<Dim>, Dim>(face_dims(nc, k));
            qflux[k] = Field<double, Dim>(face_dims(nc, k));
        }
        Index<Dim> nn;
        for (int d = 0; d < Dim; ++d) nn[d] = nc[d] + 1;
        xs = Field<Vec<Dim>, Dim>(nn);
    }
};

namespace detail {

template <std::size_t Dim>
inline State<Dim> reconstructed_jump(const Field<State<Dim>, Dim>& V,
                                     const InterfaceFrame<Dim>& fr, const Index<Dim>& f,
                                     int k)
{
    const Index<Dim> cR = f;
    const Index<Dim> cL = shifted(f, k, -1);
    const State<Dim> wLL = scaled_vars(fr, V(shifted(cL, k, -1)));
    const State<Dim> wL = scaled_vars(fr, V(cL));
    const State<Dim> wR = scaled_vars(fr, V(cR));
    const State<Dim> wRR = scaled_vars(fr, V(shifted(cR, k, 1)));
    State<Dim> jw;
    for (int c = 0; c < Dim + 2; ++c) {
        const double sL = minmod(wL[c] - wLL[c], wR[c] - wL[c]);
        const double sR = minmod(wR[c] - wL[c], wRR[c] - wR[c]);
        jw[c] = (wR[c] - 0.5 * sR) - (wL[c] + 0.5 * sL);
    }
    return jw;
}

} // namespace detail

/// Interface fluxes and the semi-discrete update of (J U) and J. Primitives
/// must be ghost-filled and the metrics complete (spatial and temporal).
/// When want_entropy_flux is set, the matching numerical entropy flux of
/// every interface is stored in ws.qflux.
template <std::size_t Dim>
inline void compute_rhs(const Field<Prim<Dim>, Dim>& prim, const Vec<Dim>& dxi,
                        const SolverOptions<Dim>& opt, Workspace<Dim>& ws,
                        Field<State<Dim>, Dim>& dju, Field<double, Dim>& djac,
                        bool want_entropy_flux = false)
{
    const Index<Dim> nc = prim.dims();
    const GasModel& gas = opt.gas;

    if (opt.flux != FluxScheme::ec) {
        Index<Dim> lo, hi;
        for (int d = 0; d < Dim; ++d) {
            lo[d] = -2;
            hi[d] = nc[d] + 2;
        }
        for_box_par<Dim>(opt.exec, lo, hi, [&](const Index<Dim>& c) {
            ws.entv(c) = entropy_bundle(prim(c), gas).V;
        });
    }

    for (int k = 0; k < Dim; ++k) {
        auto& Fk = ws.flux[k];
        auto& Qk = ws.qflux[k];
        const auto& Mk = ws.metrics.face[k];
        for_box_par<Dim>(opt.exec, Fk.dims(), [&](const Index<Dim>& f) {
            const Prim<Dim>& wl = prim(shifted(f, k, -1));
            const Prim<Dim>& wr = prim(f);
            const InterfaceMetrics<Dim>& g = Mk(f);
            State<Dim> F = ec_flux(wl, wr, g, gas);
            // the entropy flux pairs with the conservative part; the
            // dissipation carries its own one-sided counterpart
            if (want_entropy_flux) Qk(f) = entropy_flux(wl, wr, F, g, gas);
            if (opt.flux != FluxScheme::ec) {
                const InterfaceFrame<Dim> fr = interface_frame(wl, wr, g, gas);
                const State<Dim> wL = scaled_vars(fr, ws.entv(shifted(f, k, -1)));
                const State<Dim> wR = scaled_vars(fr, ws.entv(f));
                State<Dim> jw;
                if (opt.flux == FluxScheme::es1)
                    jw = wR - wL;
                else
                    jw = detail::reconstructed_jump(ws.entv, fr, f, k);
                F = es_flux(F, fr, jw);
                if (want_entropy_flux) Qk(f) += es_entropy_dissipation(fr, wL, wR, jw);
            }
            Fk(f) = F;
        });
    }

    for_box_par<Dim>(opt.exec, nc, [&](const Index<Dim>& c) {
        State<Dim> du{};
        double dj = 0.0;
        for (int k = 0; k < Dim; ++k) {
            const Index<Dim> fp = shifted(c, k, 1);
            const double inv = 1.0 / dxi[k];
            du -= inv * (ws.flux[k](fp) - ws.flux[k](c));
            dj -= inv * (ws.metrics.face[k](fp).nt - ws.metrics.face[k](c).nt);
        }
        dju(c) = du;
        djac(c) = dj;
    });
}

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Interior primitive recovery from (J U, J); rejects non-positive Jacobians
/// and inadmissible states.
template <std::size_t Dim>
inline void recover_prims(const Field<State<Dim>, Dim>& ju, const Field<double, Dim>& jac,
                          const GasModel& gas, Field<Prim<Dim>, Dim>& prim, Exec ex,
                          double t_context = -1.0)
{
    const Index<Dim>& nc = ju.dims();
    std::string err;
    for_box_par<Dim>(ex, nc, [&](const Index<Dim>& c) {
        const double J = jac(c);
        if (!(J > 0.0)) {
#pragma omp critical(rhd_recover_err)
            err = "non-positive cell Jacobian " + std::to_string(J);
            return;
        }
        try {
            prim(c) = cons_to_prim<Dim>(unpack<Dim>((1.0 / J) * ju(c)), gas,
                                        prim(c).p);
        } catch (const std::exception& e) {
#pragma omp critical(rhd_recover_err)
            err = e.what();
        }
    });
    if (!err.empty())
        throw SolverError("state recovery failed" +
                          (t_context >= 0.0 ? " at t=" + std::to_string(t_context) : "") +
                          ": " + err);
}

/// Sum over directions of the largest spectral radius per unit index width.
/// The update is written for J U, so the characteristic speeds in index
/// space are (nt + nx . lambda) / J; the time step is cfl divided by this.
template <std::size_t Dim>
inline double wave_speed_sum(const Field<Prim<Dim>, Dim>& prim,
                             const Field<double, Dim>& jac, const Metrics<Dim>& m,
                             const Vec<Dim>& dxi, const GasModel& gas)
{
    double total = 0.0;
    for (int k = 0; k < Dim; ++k) {
        double mx = 0.0;
        const auto& Mk = m.face[k];
        for_box<Dim>(prim.dims(), [&](const Index<Dim>& c) {
            const double s = std::max(signal_bound(prim(c), Mk(c), gas),
                                      signal_bound(prim(c), Mk(shifted(c, k, 1)), gas));
            mx = std::max(mx, s / jac(c));
        });
        total += mx / dxi[k];
    }
    return total;
}

/// Cell monitor variable for the adaptation.
template <std::size_t Dim>
inline Field<double, Dim> monitor_variable(const Field<Prim<Dim>, Dim>& prim,
                                           MonitorVar sv)
{
    Field<double, Dim> s(prim.dims());
    for_box<Dim>(prim.dims(), [&](const Index<Dim>& c) {
        s(c) = sv == MonitorVar::rho ? prim(c).rho : std::log(prim(c).rho);
    });
    return s;
}

namespace detail {

template <std::size_t Dim, class Eval>
inline void rk_advance(TimeScheme ts, double dt, Field<State<Dim>, Dim>& ju,
                       Field<double, Dim>& jac, Workspace<Dim>& ws, Exec ex, Eval&& eval)
{
    const Index<Dim>& nc = ju.dims();
    auto axpy = [&](double a, const Field<State<Dim>, Dim>& y0,
                    const Field<double, Dim>& j0, double b,
                    const Field<State<Dim>, Dim>& y1, const Field<double, Dim>& j1,
                    double c, Field<State<Dim>, Dim>& yo, Field<double, Dim>& jo) {
        // yo = a*y0 + b*(y1 + c*dydt)
        for_box_par<Dim>(ex, nc, [&](const Index<Dim>& i) {
            yo(i) = a * y0(i) + b * (y1(i) + c * ws.dju(i));
            jo(i) = a * j0(i) + b * (j1(i) + c * ws.djac(i));
        });
    };

    eval(0.0, ju, jac);
    if (ts == TimeScheme::rk2) {
        axpy(0.0, ju, jac, 1.0, ju, jac, dt, ws.ju1, ws.jac1);
        eval(dt, ws.ju1, ws.jac1);
        axpy(0.5, ju, jac, 0.5, ws.ju1, ws.jac1, dt, ju, jac);
    } else {
        axpy(0.0, ju, jac, 1.0, ju, jac, dt, ws.ju1, ws.jac1);
        eval(dt, ws.ju1, ws.jac1);
        axpy(0.75, ju, jac, 0.25, ws.ju1, ws.jac1, dt, ws.ju1, ws.jac1);
        eval(0.5 * dt, ws.ju1, ws.jac1);
        axpy(1.0 / 3.0, ju, jac, 2.0 / 3.0, ws.ju1, ws.jac1, dt, ju, jac);
    }
}

} // namespace detail

/// Advance the solution by one time step (mesh adaptation, CFL step size,
/// SSP Runge-Kutta update of (J U, J) with per-stage metrics). Returns the
/// step size taken; never steps past t_end.
template <std::size_t Dim>
inline double advance(Solution<Dim>& sol, const SolverOptions<Dim>& opt,
                      Workspace<Dim>& ws, double t_end)
{
    Mesh<Dim>& mesh = sol.mesh;
    const Vec<Dim>& dxi = mesh.dxi;
    const Index<Dim> nc = mesh.ncells;
    const Index<Dim> nn = mesh.nnodes();

    fill_ghost_prims(sol.prim, opt.bc);

    // mesh redistribution proposal at frozen time
    Field<Vec<Dim>, Dim> dx(nn);
    bool moving = false;
    if (opt.adapt.enabled) {
        const auto sigma = monitor_variable(sol.prim, opt.adapt.sigma);
        const auto xtgt = adapt_mesh(mesh, sigma, opt.adapt);
        for_box<Dim>(nn, [&](const Index<Dim>& n) {
            dx(n) = xtgt(n) - mesh.x(n);
            if (norm(dx(n)) > 0.0) moving = true;
        });
    }

    // step size: the temporal metric depends on the node velocity, which is
    // dx/dt, so iterate the CFL condition to a fixed point
    compute_spatial_metrics(mesh.x, dxi, ws.metrics, opt.exec);
    for_box<Dim>(nn, [&](const Index<Dim>& n) { mesh.xdot(n) = Vec<Dim>{}; });
    double dt = opt.cfl / wave_speed_sum(sol.prim, sol.jac, ws.metrics, dxi, opt.gas);
    if (moving) {
        // the displacement is fixed per step, so its share of the CFL sum,
        // dt * |nt| / (J dxi) = |dx_face . nx| / (J dxi), does not shrink
        // with dt; cap it at half the CFL number or the fixed point below
        // has no solution and the mesh move must be spread over more steps
        for_box<Dim>(nn, [&](const Index<Dim>& n) { mesh.xdot(n) = dx(n); });
        set_face_velocity_temporal(mesh.x, mesh.xdot, ws.metrics, opt.exec);
        double mesh_sum = 0.0;
        for (int k = 0; k < Dim; ++k) {
            double mx = 0.0;
            const auto& Mk = ws.metrics.face[k];
            for_box<Dim>(nc, [&](const Index<Dim>& c) {
                const double s = std::max(std::abs(Mk(c).nt),
                                          std::abs(Mk(shifted(c, k, 1)).nt));
                mx = std::max(mx, s / sol.jac(c));
            });
            mesh_sum += mx / dxi[k];
        }
        const double budget = 0.5 * opt.cfl;
        if (mesh_sum > budget) {
            const double scale = budget / mesh_sum;
            for_box<Dim>(nn, [&](const Index<Dim>& n) { dx(n) = scale * dx(n); });
            for_box<Dim>(nn, [&](const Index<Dim>& n) { mesh.xdot(n) = dx(n); });
            set_face_velocity_temporal(mesh.x, mesh.xdot, ws.metrics, opt.exec);
        }
    }
    if (moving) {
        // with xdot = dx the stored face nt is the unit-time displacement
        // share, so nt at a candidate dt is that value over dt; the spatial
        // eigenvalue ranges do not change across the iteration, cache them
        std::array<Field<Vec<2>, Dim>, Dim> sl, sr;
        for (int k = 0; k < Dim; ++k) {
            sl[k] = Field<Vec<2>, Dim>(nc);
            sr[k] = Field<Vec<2>, Dim>(nc);
            const auto& Mk = ws.metrics.face[k];
            for_box_par<Dim>(opt.exec, nc, [&](const Index<Dim>& c) {
                sl[k](c) = signal_range(sol.prim(c), Mk(c).nx, opt.gas);
                sr[k](c) = signal_range(sol.prim(c), Mk(shifted(c, k, 1)).nx, opt.gas);
            });
        }
        for (int it = 0; it < 5; ++it) {
            double total = 0.0;
            for (int k = 0; k < Dim; ++k) {
                const auto& Mk = ws.metrics.face[k];
                double mx = 0.0;
                for_box<Dim>(nc, [&](const Index<Dim>& c) {
                    const double m0 = Mk(c).nt / dt;
                    const double m1 = Mk(shifted(c, k, 1)).nt / dt;
                    const Vec<2>& a = sl[k](c);
                    const Vec<2>& b = sr[k](c);
                    double s = std::max(std::abs(m0 + a[0]), std::abs(m0 + a[1]));
                    s = std::max(s, std::abs(m1 + b[0]));
                    s = std::max(s, std::abs(m1 + b[1]));
                    mx = std::max(mx, s / sol.jac(c));
                });
                total += mx / dxi[k];
            }
            dt = opt.cfl / total;
        }
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) throw SolverError("invalid time step");
    dt = std::min(dt, t_end - sol.t);
    for_box<Dim>(nn, [&](const Index<Dim>& n) {
        mesh.xdot(n) = moving ? (1.0 / dt) * dx(n) : Vec<Dim>{};
    });

    std::optional<SpaceTimeMetrics> stm;
    if constexpr (Dim == 3) {
        if (opt.vcl == VclScheme::v2)
            stm.emplace(mesh.x, mesh.xdot, nc, dxi, dt, opt.exec);
    }

    auto eval = [&](double s, const Field<State<Dim>, Dim>& ju_s,
                    const Field<double, Dim>& jac_s) {
        for_box_par<Dim>(opt.exec, nn, [&](const Index<Dim>& n) {
            ws.xs(n) = mesh.x(n) + s * mesh.xdot(n);
        });
        compute_spatial_metrics(ws.xs, dxi, ws.metrics, opt.exec);
        if constexpr (Dim == 3) {
            if (stm) {
                stm->set_temporal(ws.xs, mesh.xdot, s, ws.metrics, opt.exec);
            } else {
                set_face_velocity_temporal(ws.xs, mesh.xdot, ws.metrics, opt.exec);
            }
        } else {
            set_face_velocity_temporal(ws.xs, mesh.xdot, ws.metrics, opt.exec);
        }
        recover_prims(ju_s, jac_s, opt.gas, ws.prim1, opt.exec, sol.t);
        fill_ghost_prims(ws.prim1, opt.bc);
        compute_rhs(ws.prim1, dxi, opt, ws, ws.dju, ws.djac);
    };

    detail::rk_advance<Dim>(opt.time, dt, sol.ju, sol.jac, ws, opt.exec, eval);

    for_box<Dim>(nn, [&](const Index<Dim>& n) {
        mesh.x(n) = mesh.x(n) + dt * mesh.xdot(n);
    });
    sol.t += dt;
    recover_prims(sol.ju, sol.jac, opt.gas, sol.prim, opt.exec, sol.t);
    return dt;
}

/// Volume element of the cell index weights.
template <std::size_t Dim>
inline double cell_dxi_volume(const Vec<Dim>& dxi)
{
    double v = 1.0;
    for (int d = 0; d < Dim; ++d) v *= dxi[d];
    return v;
}

/// Total discrete entropy sum_i J_i eta(U_i) dxi^Dim (serial, deterministic).
template <std::size_t Dim>
inline double total_entropy(const Solution<Dim>& sol, const GasModel& gas)
{
    double s = 0.0;
    for_box<Dim>(sol.jac.dims(), [&](const Index<Dim>& c) {
        s += sol.jac(c) * entropy_bundle(sol.prim(c), gas).eta;
    });
    return s * cell_dxi_volume(sol.mesh.dxi);
}

/// Total conserved quantities sum_i (J U)_i dxi^Dim (serial, deterministic).
template <std::size_t Dim>
inline State<Dim> total_conserved(const Solution<Dim>& sol)
{
    State<Dim> s{};
    for_box<Dim>(sol.ju.dims(), [&](const Index<Dim>& c) { s += sol.ju(c); });
    return cell_dxi_volume(sol.mesh.dxi) * s;
}

/// Centroid (corner average) of a cell.
template <std::size_t Dim>
inline Vec<Dim> cell_centroid(const Field<Vec<Dim>, Dim>& x, const Index<Dim>& c)
{
    Vec<Dim> p{};
    Index<Dim> lo = c, hi;
    for (int d = 0; d < Dim; ++d) hi[d] = c[d] + 2;
    int cnt = 0;
    for_box<Dim>(lo, hi, [&](const Index<Dim>& n) {
        p += x(n);
        ++cnt;
    });
    return (1.0 / cnt) * p;
}

} // namespace rhd
