// Command-line harness: run cases, convergence studies, line cuts through
// snapshots, and a comparison of the two volume-law discretizations.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "rhd/run.hpp"

namespace fs = std::filesystem;
using namespace rhd;

namespace {

Config load_config(const std::string& path, const std::vector<std::string>& overrides)
{
    Config cfg = path.empty() ? Config{} : Config::from_file(path);
    int n = 0;
    for (const auto& ov : overrides)
        cfg.parse_line(ov, "override " + std::to_string(++n));
    return cfg;
}

std::string frame_name(int i)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snap_%04d.txt", i);
    return buf;
}

template <std::size_t Dim>
int do_run(const Config& cfg, const std::string& outdir)
{
    const RunSetup<Dim> rs = make_setup<Dim>(cfg);
    fs::create_directories(outdir);

    Solution<Dim> sol = initialize(rs.cas, rs.ncells, rs.opt.adapt, rs.init_cycles);

    std::ofstream ent(outdir + "/entropy.txt");
    ent << "# t total_entropy\n";
    auto log_entropy = [&](const Solution<Dim>& s) {
        ent << detail::fmt17(s.t) << " " << detail::fmt17(total_entropy(s, rs.opt.gas))
            << "\n";
    };
    log_entropy(sol);

    int frame = 0;
    auto emit_frame = [&](const Solution<Dim>& s) {
        const Snapshot<Dim> snap = make_snapshot(rs.cas.name, s, cfg.hash());
        write_snapshot(outdir + "/" + frame_name(frame), snap);
        if (rs.vtk) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "snap_%04d.vtk", frame);
            write_vtk(outdir + "/" + buf, snap);
        }
        ++frame;
    };
    emit_frame(sol);
    double next_frame_t = rs.t_end / (rs.snapshots - 1);

    const RunSummary sum =
        drive(sol, rs.opt, rs.t_end, [&](const Solution<Dim>& s, int, double) {
            log_entropy(s);
            if (s.t >= next_frame_t * (1.0 - 1e-12)) {
                emit_frame(s);
                next_frame_t += rs.t_end / (rs.snapshots - 1);
            }
        });
    if (frame < rs.snapshots) emit_frame(sol);

    std::ofstream summary(outdir + "/summary.txt");
    summary << "case " << rs.cas.name << "\n";
    summary << "cells";
    for (int d = 0; d < Dim; ++d) summary << " " << rs.ncells[d];
    summary << "\n";
    summary << "flux " << to_string(rs.opt.flux) << "\n";
    summary << "time " << to_string(rs.opt.time) << "\n";
    summary << "vcl " << to_string(rs.opt.vcl) << "\n";
    summary << "t_final " << detail::fmt17(sol.t) << "\n";
    summary << "steps " << sum.steps << "\n";
    summary << "final_dt " << detail::fmt17(sum.final_dt) << "\n";
    summary << "wall_seconds " << detail::fmt17(sum.wall_seconds) << "\n";

    std::cout << rs.cas.name << ": " << sum.steps << " steps to t=" << sol.t << " in "
              << sum.wall_seconds << " s, output in " << outdir << "\n";
    return 0;
}

template <std::size_t Dim>
int do_converge(const Config& cfg, const std::vector<int>& grids,
                const std::string& outdir)
{
    const RunSetup<Dim> base = make_setup<Dim>(cfg);
    if (!base.cas.exact)
        throw ConfigError("case '" + base.cas.name + "' has no exact solution");
    fs::create_directories(outdir);
    std::ofstream tab(outdir + "/convergence.txt");
    tab << "# N l1 order1 l2 order2 linf orderinf\n";

    std::printf("%6s %12s %7s %12s %7s %12s %7s\n", "N", "l1", "order", "l2", "order",
                "linf", "order");
    ErrorNorms<Dim> prev;
    bool have_prev = false;
    for (const int N : grids) {
        RunSetup<Dim> rs = base;
        for (int d = 0; d < Dim; ++d) rs.ncells[d] = N;
        Solution<Dim> sol = initialize(rs.cas, rs.ncells, rs.opt.adapt, rs.init_cycles);
        drive(sol, rs.opt, rs.t_end);
        const ErrorNorms<Dim> e = density_error(rs.cas, sol);
        const auto order = [&](double cur, double prv) {
            return have_prev ? std::log2(prv / cur) : 0.0;
        };
        const double o1 = order(e.l1, prev.l1);
        const double o2 = order(e.l2, prev.l2);
        const double oi = order(e.linf, prev.linf);
        std::printf("%6d %12.4e %7.2f %12.4e %7.2f %12.4e %7.2f\n", N, e.l1, o1, e.l2,
                    o2, e.linf, oi);
        tab << N << " " << detail::fmt17(e.l1) << " " << detail::fmt17(o1) << " "
            << detail::fmt17(e.l2) << " " << detail::fmt17(o2) << " "
            << detail::fmt17(e.linf) << " " << detail::fmt17(oi) << "\n";
        prev = e;
        have_prev = true;
    }
    return 0;
}

template <std::size_t Dim>
int do_cutline(const std::string& snap_path, const std::vector<double>& from,
               const std::vector<double>& to, int nsamples, const std::string& outpath)
{
    const Snapshot<Dim> snap = read_snapshot<Dim>(snap_path);
    Vec<Dim> a, b;
    for (int d = 0; d < Dim; ++d) {
        a[d] = from[d];
        b[d] = to[d];
    }
    const auto samples = sample_cutline(snap, a, b, nsamples);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!outpath.empty()) {
        file.open(outpath);
        if (!file) throw IoError("cannot open for writing: " + outpath);
        out = &file;
    }
    *out << "# s";
    for (int d = 0; d < Dim; ++d) *out << " x" << d + 1;
    *out << " rho";
    for (int d = 0; d < Dim; ++d) *out << " v" << d + 1;
    *out << " p J\n";
    int missed = 0;
    for (const auto& cs : samples) {
        if (!cs.found) {
            ++missed;
            continue;
        }
        *out << detail::fmt17(cs.s);
        for (int d = 0; d < Dim; ++d) *out << " " << detail::fmt17(cs.x[d]);
        *out << " " << detail::fmt17(cs.w.rho);
        for (int d = 0; d < Dim; ++d) *out << " " << detail::fmt17(cs.w.v[d]);
        *out << " " << detail::fmt17(cs.w.p) << " " << detail::fmt17(cs.jac) << "\n";
    }
    if (missed)
        std::cerr << "cutline: " << missed << " of " << samples.size()
                  << " sample points outside the mesh\n";
    return 0;
}

int do_vcl_compare(const Config& cfg, int max_steps, const std::string& outdir)
{
    fs::create_directories(outdir);
    struct Combo {
        VclScheme vcl;
        TimeScheme time;
    };
    const Combo combos[] = {{VclScheme::v1, TimeScheme::rk2},
                            {VclScheme::v1, TimeScheme::rk3},
                            {VclScheme::v2, TimeScheme::rk2},
                            {VclScheme::v2, TimeScheme::rk3}};
    for (const Combo& cb : combos) {
        RunSetup<3> rs = make_setup<3>(cfg);
        rs.opt.vcl = cb.vcl;
        rs.opt.time = cb.time;
        const std::string tag = to_string(cb.vcl) + "_" + to_string(cb.time);
        std::ofstream out(outdir + "/vcl_" + tag + ".txt");
        out << "# step t jerr log10jerr\n";

        Solution<3> sol = initialize(rs.cas, rs.ncells, rs.opt.adapt, rs.init_cycles);
        double worst = 0.0;
        auto record = [&](const Solution<3>& s, int step) {
            const auto jd = jacobian_direct<3>(s.mesh.x, s.mesh.ncells, s.mesh.dxi);
            double num = 0.0, den = 0.0;
            for_box<3>(s.mesh.ncells, [&](const Index<3>& c) {
                num += std::abs(s.jac(c) - jd(c));
                den += std::abs(jd(c));
            });
            const double err = num / den;
            worst = std::max(worst, err);
            out << step << " " << detail::fmt17(s.t) << " " << detail::fmt17(err)
                << " " << detail::fmt17(err > 0.0 ? std::log10(err) : -INFINITY)
                << "\n";
        };
        record(sol, 0);
        Workspace<3> ws(sol.mesh.ncells);
        int step = 0;
        while (sol.t < rs.t_end * (1.0 - 1e-14) && step < max_steps) {
            advance(sol, rs.opt, ws, rs.t_end);
            record(sol, ++step);
        }
        std::printf("%-9s max rel. volume discrepancy %.3e over %d steps\n",
                    tag.c_str(), worst, step);
    }
    std::cout << "series written to " << outdir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"finite-volume relativistic hydrodynamics on adaptive moving meshes"};
    app.require_subcommand(1);

    std::string config_path, outdir, snap_path, cut_out;
    std::vector<std::string> overrides;
    std::vector<int> grids{20, 40, 80};
    std::vector<double> cut_from, cut_to;
    int nsamples = 200;
    int vcl_steps = 1 << 30;

    const auto add_cfg = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "configuration file");
        sub->add_option("-s,--set", overrides,
                        "override a config entry, e.g. --set 'cells = 40'");
    };

    CLI::App* run = app.add_subcommand("run", "run one case and write snapshots");
    add_cfg(run);
    run->add_option("-o,--out", outdir, "output directory");

    CLI::App* conv =
        app.add_subcommand("converge", "grid refinement study against the exact solution");
    add_cfg(conv);
    conv->add_option("-o,--out", outdir, "output directory");
    conv->add_option("-g,--grids", grids, "cell counts, e.g. --grids 20 40 80");

    CLI::App* cut = app.add_subcommand("cutline", "sample a snapshot along a segment");
    cut->add_option("--snapshot", snap_path, "snapshot file")->required();
    cut->add_option("--from", cut_from, "segment start coordinates")->required();
    cut->add_option("--to", cut_to, "segment end coordinates")->required();
    cut->add_option("-n,--samples", nsamples, "number of sample points");
    cut->add_option("-o,--out", cut_out, "output file (default stdout)");

    CLI::App* vcl = app.add_subcommand(
        "vcl-compare", "track the volume-law discrepancy for all scheme combinations");
    add_cfg(vcl);
    vcl->add_option("-o,--out", outdir, "output directory");
    vcl->add_option("--steps", vcl_steps, "maximum number of steps");

    app.add_subcommand("list-cases", "list the available cases");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand("list-cases")) {
            for (const int d : {2, 3})
                for (const auto& n : case_names(d))
                    std::cout << n << " (" << d << "D)\n";
            return 0;
        }

        if (app.got_subcommand("cutline")) {
            const int dim = snapshot_dim(snap_path);
            if ((int)cut_from.size() != dim || (int)cut_to.size() != dim)
                throw ConfigError("--from/--to need " + std::to_string(dim) +
                                  " coordinates for this snapshot");
            if (nsamples < 1) throw ConfigError("--samples must be positive");
            return dim == 2 ? do_cutline<2>(snap_path, cut_from, cut_to, nsamples, cut_out)
                            : do_cutline<3>(snap_path, cut_from, cut_to, nsamples, cut_out);
        }

        const Config cfg = load_config(config_path, overrides);
        const std::string cname = cfg.get_string("case", "");
        if (cname.empty()) throw ConfigError("missing required key 'case'");
        const int dim = case_dim(cname);
        if (outdir.empty())
            outdir = output_root() + "/" + cname;

        if (app.got_subcommand("run"))
            return dim == 2 ? do_run<2>(cfg, outdir) : do_run<3>(cfg, outdir);
        if (app.got_subcommand("converge")) {
            if (grids.empty()) throw ConfigError("--grids must not be empty");
            return dim == 2 ? do_converge<2>(cfg, grids, outdir)
                            : do_converge<3>(cfg, grids, outdir);
        }
        if (app.got_subcommand("vcl-compare")) {
            if (dim != 3) throw ConfigError("vcl-compare needs a 3D case");
            return do_vcl_compare(cfg, vcl_steps, outdir);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
