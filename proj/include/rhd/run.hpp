#pragma once

#include <chrono>
#include <cstdlib>
#include <string>

#include "rhd/config.hpp"
#include "rhd/io.hpp"

namespace rhd {

inline FluxScheme flux_from_string(const std::string& s)
{
    if (s == "ec") return FluxScheme::ec;
    if (s == "es1") return FluxScheme::es1;
    if (s == "es2") return FluxScheme::es2;
    throw ConfigError("unknown flux scheme '" + s + "' (ec, es1, es2)");
}

inline TimeScheme time_from_string(const std::string& s)
{
    if (s == "rk2") return TimeScheme::rk2;
    if (s == "rk3") return TimeScheme::rk3;
    throw ConfigError("unknown time scheme '" + s + "' (rk2, rk3)");
}

inline VclScheme vcl_from_string(const std::string& s)
{
    if (s == "vcl1") return VclScheme::v1;
    if (s == "vcl2") return VclScheme::v2;
    throw ConfigError("unknown volume law variant '" + s + "' (vcl1, vcl2)");
}

inline MonitorVar monitor_from_string(const std::string& s)
{
    if (s == "rho") return MonitorVar::rho;
    if (s == "lnrho") return MonitorVar::lnrho;
    throw ConfigError("unknown monitor variable '" + s + "' (rho, lnrho)");
}

inline std::string to_string(FluxScheme f)
{
    return f == FluxScheme::ec ? "ec" : f == FluxScheme::es1 ? "es1" : "es2";
}
inline std::string to_string(TimeScheme t) { return t == TimeScheme::rk2 ? "rk2" : "rk3"; }
inline std::string to_string(VclScheme v) { return v == VclScheme::v1 ? "vcl1" : "vcl2"; }

/// Everything needed to run one problem, assembled from the configuration.
template <std::size_t Dim>
struct RunSetup {
    Case<Dim> cas;
    Index<Dim> ncells{};
    SolverOptions<Dim> opt;
    double t_end = 0.0;
    int init_cycles = 5;
    int snapshots = 2; // frame count including t=0 and t_end
    bool vtk = false;
};

/// Read solver and case settings from the flat configuration. Unknown keys
/// are rejected so typos fail loudly.
template <std::size_t Dim>
inline RunSetup<Dim> make_setup(const Config& cfg)
{
    static const char* known[] = {"case",   "cells",        "cfl",
                                  "flux",   "time",         "vcl",
                                  "serial", "t_end",        "adapt",
                                  "adapt.mu", "adapt.init_cycles", "monitor.alpha",
                                  "monitor.sigma", "monitor.filter_passes",
                                  "snapshots", "vtk",       "gamma"};
    for (const auto& [k, v] : cfg.items()) {
        bool ok = false;
        for (const char* kk : known) ok = ok || k == kk;
        if (!ok) throw ConfigError("unknown config key '" + k + "'");
    }

    RunSetup<Dim> rs;
    const std::string cname = cfg.get_string("case", "");
    if (cname.empty()) throw ConfigError("missing required key 'case'");
    rs.cas = make_case<Dim>(cname);

    rs.ncells = rs.cas.default_cells;
    if (cfg.has("cells")) {
        std::istringstream ss(cfg.get_string("cells", ""));
        std::array<int, Dim> n{};
        std::size_t got = 0;
        int v;
        while (ss >> v) {
            if (got < Dim) n[got] = v;
            ++got;
        }
        if (got == 1) {
            for (int d = 0; d < Dim; ++d) rs.ncells[d] = n[0];
        } else if (got == Dim) {
            rs.ncells = n;
        } else {
            throw ConfigError("'cells' needs 1 or " + std::to_string(Dim) +
                              " integers");
        }
    }
    for (int d = 0; d < Dim; ++d)
        if (rs.ncells[d] < 4)
            throw ConfigError("need at least 4 cells per direction");

    rs.opt.gas.gamma = cfg.get_double("gamma", rs.cas.gas.gamma);
    rs.cas.gas = rs.opt.gas;
    rs.opt.cfl = cfg.get_double("cfl", rs.opt.cfl);
    if (!(rs.opt.cfl > 0.0) || rs.opt.cfl >= 1.0)
        throw ConfigError("'cfl' must be in (0, 1)");
    rs.opt.flux = flux_from_string(cfg.get_string("flux", "es2"));
    rs.opt.time = time_from_string(cfg.get_string("time", "rk2"));
    rs.opt.vcl = vcl_from_string(cfg.get_string("vcl", "vcl1"));
    if constexpr (Dim == 2) {
        // the two volume law discretizations coincide in 2D
        rs.opt.vcl = VclScheme::v1;
    }
    rs.opt.exec = cfg.get_bool("serial", false) ? Exec::serial : Exec::parallel;
    rs.opt.bc = rs.cas.bc;
    rs.opt.adapt = rs.cas.adapt;
    rs.opt.adapt.enabled = cfg.get_bool("adapt", true);
    rs.opt.adapt.alpha = cfg.get_double("monitor.alpha", rs.opt.adapt.alpha);
    if (cfg.has("monitor.sigma"))
        rs.opt.adapt.sigma = monitor_from_string(cfg.get_string("monitor.sigma", ""));
    rs.opt.adapt.filter_passes =
        cfg.get_int("monitor.filter_passes", rs.opt.adapt.filter_passes);
    rs.opt.adapt.jacobi_iters = cfg.get_int("adapt.mu", rs.opt.adapt.jacobi_iters);
    if (rs.opt.adapt.jacobi_iters < 0 || rs.opt.adapt.filter_passes < 0)
        throw ConfigError("iteration counts must be nonnegative");
    rs.init_cycles = cfg.get_int("adapt.init_cycles", rs.init_cycles);

    rs.t_end = cfg.get_double("t_end", rs.cas.t_end);
    if (!(rs.t_end >= 0.0)) throw ConfigError("'t_end' must be nonnegative");
    rs.snapshots = cfg.get_int("snapshots", rs.snapshots);
    if (rs.snapshots < 2) throw ConfigError("'snapshots' must be at least 2");
    rs.vtk = cfg.get_bool("vtk", false);
    return rs;
}

struct RunSummary {
    int steps = 0;
    double final_dt = 0.0;
    double wall_seconds = 0.0;
};

/// Time loop with a per-step callback cb(sol, step, dt); the callback fires
/// after every accepted step.
template <std::size_t Dim, class Callback>
inline RunSummary drive(Solution<Dim>& sol, const SolverOptions<Dim>& opt, double t_end,
                        Callback&& cb)
{
    Workspace<Dim> ws(sol.mesh.ncells);
    RunSummary sum;
    const auto start = std::chrono::steady_clock::now();
    const long max_steps = 5'000'000;
    while (sol.t < t_end * (1.0 - 1e-14)) {
        if (sum.steps >= max_steps) throw SolverError("step limit exceeded");
        sum.final_dt = advance(sol, opt, ws, t_end);
        ++sum.steps;
        cb(sol, sum.steps, sum.final_dt);
    }
    sum.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return sum;
}

template <std::size_t Dim>
inline RunSummary drive(Solution<Dim>& sol, const SolverOptions<Dim>& opt, double t_end)
{
    return drive(sol, opt, t_end, [](const Solution<Dim>&, int, double) {});
}

/// Output root: RHD_OUTPUT_ROOT if set, else the current directory.
inline std::string output_root()
{
    const char* env = std::getenv("RHD_OUTPUT_ROOT");
    return env && *env ? env : ".";
}

} // namespace rhd
