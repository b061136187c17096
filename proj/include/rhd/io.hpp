#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rhd/cases.hpp"

namespace rhd {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Cell-centered state of one output frame, detached from solver scratch.
template <std::size_t Dim>
struct Snapshot {
    std::string case_name;
    double time = 0.0;
    std::uint64_t config_hash = 0;
    Index<Dim> ncells{};
    Field<Vec<Dim>, Dim> x;       // node positions
    Field<Prim<Dim>, Dim> prim;   // interior cells only
    Field<double, Dim> jac;
};

template <std::size_t Dim>
inline Snapshot<Dim> make_snapshot(const std::string& case_name, const Solution<Dim>& sol,
                                   std::uint64_t config_hash)
{
    Snapshot<Dim> s;
    s.case_name = case_name;
    s.time = sol.t;
    s.config_hash = config_hash;
    s.ncells = sol.mesh.ncells;
    s.x = sol.mesh.x;
    s.prim = Field<Prim<Dim>, Dim>(s.ncells);
    s.jac = sol.jac;
    for_box<Dim>(s.ncells, [&](const Index<Dim>& c) { s.prim(c) = sol.prim(c); });
    return s;
}

namespace detail {

inline std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(std::istringstream& ss, const std::string& what)
{
    double v;
    if (!(ss >> v)) throw IoError("snapshot parse error: expected number in " + what);
    return v;
}

} // namespace detail

/// Plain-text snapshot: a short self-describing header, one node position
/// per line, then one cell record (rho, velocity, p, J) per line. Values
/// are printed with 17 significant digits so a read-back is bit exact.
template <std::size_t Dim>
inline void write_snapshot(const std::string& path, const Snapshot<Dim>& s)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "# rhd snapshot\n";
    out << "version 1\n";
    out << "case " << s.case_name << "\n";
    out << "time " << detail::fmt17(s.time) << "\n";
    char hbuf[24];
    std::snprintf(hbuf, sizeof(hbuf), "%016llx",
                  static_cast<unsigned long long>(s.config_hash));
    out << "confighash " << hbuf << "\n";
    out << "dim " << Dim << "\n";
    out << "cells";
    for (int d = 0; d < Dim; ++d) out << " " << s.ncells[d];
    out << "\n";
    out << "nodes\n";
    Index<Dim> nn;
    for (int d = 0; d < Dim; ++d) nn[d] = s.ncells[d] + 1;
    for_box<Dim>(nn, [&](const Index<Dim>& n) {
        const Vec<Dim>& p = s.x(n);
        for (int d = 0; d < Dim; ++d) out << (d ? " " : "") << detail::fmt17(p[d]);
        out << "\n";
    });
    out << "celldata\n";
    for_box<Dim>(s.ncells, [&](const Index<Dim>& c) {
        const Prim<Dim>& w = s.prim(c);
        out << detail::fmt17(w.rho);
        for (int d = 0; d < Dim; ++d) out << " " << detail::fmt17(w.v[d]);
        out << " " << detail::fmt17(w.p) << " " << detail::fmt17(s.jac(c)) << "\n";
    });
    out << "end\n";
    if (!out) throw IoError("write failed: " + path);
}

/// Peek the dimensionality of a snapshot file.
inline int snapshot_dim(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "dim") {
            int d;
            if (ss >> d) return d;
        }
    }
    throw IoError("no 'dim' header in " + path);
}

template <std::size_t Dim>
inline Snapshot<Dim> read_snapshot(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    Snapshot<Dim> s;
    std::string line, section;
    bool have_cells = false;
    std::vector<std::string> body;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "version") {
            int v = 0;
            ss >> v;
            if (v != 1) throw IoError("unsupported snapshot version in " + path);
        } else if (key == "case") {
            ss >> s.case_name;
        } else if (key == "time") {
            s.time = detail::parse_double(ss, "time");
        } else if (key == "confighash") {
            std::string h;
            ss >> h;
            s.config_hash = std::stoull(h, nullptr, 16);
        } else if (key == "dim") {
            int d = 0;
            ss >> d;
            if (d != Dim) throw IoError("snapshot dim mismatch in " + path);
        } else if (key == "cells") {
            for (int d = 0; d < Dim; ++d)
                if (!(ss >> s.ncells[d]))
                    throw IoError("bad 'cells' header in " + path);
            have_cells = true;
        } else if (key == "nodes" || key == "celldata") {
            if (!have_cells) throw IoError("'cells' must precede data in " + path);
            section = key;
            Index<Dim> dims = s.ncells;
            if (section == "nodes") {
                for (int d = 0; d < Dim; ++d) dims[d] += 1;
                s.x = Field<Vec<Dim>, Dim>(dims);
            } else {
                s.prim = Field<Prim<Dim>, Dim>(dims);
                s.jac = Field<double, Dim>(dims);
            }
            long count = 1;
            for (int d = 0; d < Dim; ++d) count *= dims[d];
            // row-major order matches for_box
            std::vector<Index<Dim>> order;
            order.reserve(count);
            for_box<Dim>(dims, [&](const Index<Dim>& i) { order.push_back(i); });
            for (long r = 0; r < count; ++r) {
                if (!std::getline(in, line))
                    throw IoError("truncated '" + section + "' section in " + path);
                std::istringstream rs(line);
                if (section == "nodes") {
                    Vec<Dim> p;
                    for (int d = 0; d < Dim; ++d)
                        p[d] = detail::parse_double(rs, "nodes");
                    s.x(order[r]) = p;
                } else {
                    Prim<Dim> w;
                    w.rho = detail::parse_double(rs, "celldata");
                    for (int d = 0; d < Dim; ++d)
                        w.v[d] = detail::parse_double(rs, "celldata");
                    w.p = detail::parse_double(rs, "celldata");
                    s.prim(order[r]) = w;
                    s.jac(order[r]) = detail::parse_double(rs, "celldata");
                }
            }
        } else if (key == "end") {
            if (s.x.size() == 0 || s.prim.size() == 0)
                throw IoError("incomplete snapshot: " + path);
            return s;
        } else {
            throw IoError("unknown snapshot header '" + key + "' in " + path);
        }
    }
    throw IoError("missing 'end' marker in " + path);
}

/// Legacy-format VTK structured grid with cell data, for external viewers.
template <std::size_t Dim>
inline void write_vtk(const std::string& path, const Snapshot<Dim>& s)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    Index<Dim> nn;
    long npts = 1, ncl = 1;
    for (int d = 0; d < Dim; ++d) {
        nn[d] = s.ncells[d] + 1;
        npts *= nn[d];
        ncl *= s.ncells[d];
    }
    out << "# vtk DataFile Version 3.0\n";
    out << s.case_name << " t=" << detail::fmt17(s.time) << "\n";
    out << "ASCII\nDATASET STRUCTURED_GRID\n";
    out << "DIMENSIONS " << nn[0] << " " << nn[1] << " "
        << (Dim == 3 ? nn[Dim == 3 ? 2 : 0] : 1) << "\n";
    out << "POINTS " << npts << " double\n";
    // VTK expects x fastest; our fields are row-major (last index fastest),
    // so emit with the first logical index innermost
    Index<Dim> i{};
    const auto emit_points = [&](auto&& self, int d) -> void {
        if (d < 0) {
            const Vec<Dim>& p = s.x(i);
            out << detail::fmt17(p[0]) << " " << detail::fmt17(p[1]) << " "
                << (Dim == 3 ? detail::fmt17(p[Dim - 1]) : std::string("0"))
                << "\n";
            return;
        }
        for (i[d] = 0; i[d] < nn[d]; ++i[d]) self(self, d - 1);
    };
    emit_points(emit_points, Dim - 1);
    out << "CELL_DATA " << ncl << "\n";
    const auto emit_scalar = [&](const std::string& name, auto&& get) {
        out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        Index<Dim> c{};
        const auto rec = [&](auto&& self, int d) -> void {
            if (d < 0) {
                out << detail::fmt17(get(c)) << "\n";
                return;
            }
            for (c[d] = 0; c[d] < s.ncells[d]; ++c[d]) self(self, d - 1);
        };
        rec(rec, Dim - 1);
    };
    emit_scalar("rho", [&](const Index<Dim>& c) { return s.prim(c).rho; });
    for (int d = 0; d < Dim; ++d)
        emit_scalar("v" + std::to_string(d + 1),
                    [&](const Index<Dim>& c) { return s.prim(c).v[d]; });
    emit_scalar("p", [&](const Index<Dim>& c) { return s.prim(c).p; });
    emit_scalar("J", [&](const Index<Dim>& c) { return s.jac(c); });
    if (!out) throw IoError("write failed: " + path);
}

namespace detail {

// Multilinear map from the reference cube [0,1]^Dim to the cell with the
// given corner nodes; returns position and (optionally) its Jacobian.
template <std::size_t Dim>
inline Vec<Dim> cell_map(const Field<Vec<Dim>, Dim>& x, const Index<Dim>& c,
                         const Vec<Dim>& xi, Mat<Dim>* jac = nullptr)
{
    Vec<Dim> pos{};
    Mat<Dim> J{};
    Index<Dim> lo{}, hi;
    for (int d = 0; d < Dim; ++d) hi[d] = 2;
    for_box<Dim>(lo, hi, [&](const Index<Dim>& s) {
        double w = 1.0;
        for (int d = 0; d < Dim; ++d) w *= s[d] ? xi[d] : 1.0 - xi[d];
        Index<Dim> n;
        for (int d = 0; d < Dim; ++d) n[d] = c[d] + s[d];
        pos += w * x(n);
        if (jac) {
            for (int d = 0; d < Dim; ++d) {
                double dw = s[d] ? 1.0 : -1.0;
                for (int t = 0; t < Dim; ++t)
                    if (t != d) dw *= s[t] ? xi[t] : 1.0 - xi[t];
                for (int r = 0; r < Dim; ++r) J(r, d) += dw * x(n)[r];
            }
        }
    });
    if (jac) *jac = J;
    return pos;
}

// Invert the multilinear map by Newton iteration; true when the point lies
// inside the cell (reference coordinates in [0,1]^Dim up to tolerance).
template <std::size_t Dim>
inline bool cell_contains(const Field<Vec<Dim>, Dim>& x, const Index<Dim>& c,
                          const Vec<Dim>& p, Vec<Dim>& xi_out)
{
    Vec<Dim> xi;
    for (int d = 0; d < Dim; ++d) xi[d] = 0.5;
    for (int it = 0; it < 30; ++it) {
        Mat<Dim> J;
        const Vec<Dim> r = cell_map(x, c, xi, &J) - p;
        if (norm(r) < 1e-13 * (1.0 + norm(p))) break;
        Vec<Dim> dxi;
        try {
            dxi = solve(J, r);
        } catch (const std::runtime_error&) {
            return false;
        }
        xi -= dxi;
        for (int d = 0; d < Dim; ++d) xi[d] = std::clamp(xi[d], -0.5, 1.5);
    }
    const Vec<Dim> back = cell_map(x, c, xi);
    if (norm(back - p) > 1e-9 * (1.0 + norm(p))) return false;
    const double tol = 1e-10;
    for (int d = 0; d < Dim; ++d)
        if (xi[d] < -tol || xi[d] > 1.0 + tol) return false;
    xi_out = xi;
    return true;
}

} // namespace detail

template <std::size_t Dim>
struct CutSample {
    double s = 0.0;   // line parameter in [0,1]
    Vec<Dim> x{};     // sample position
    Prim<Dim> w{};    // cell value at the containing cell
    double jac = 0.0;
    bool found = false;
};

/// Sample cell data along the segment from a to b at nsamples evenly spaced
/// points, locating the containing cell of each point in the (generally
/// curvilinear) mesh by brute-force search with a bounding-box prefilter.
template <std::size_t Dim>
inline std::vector<CutSample<Dim>> sample_cutline(const Snapshot<Dim>& snap,
                                                  const Vec<Dim>& a, const Vec<Dim>& b,
                                                  int nsamples)
{
    std::vector<CutSample<Dim>> out(nsamples);
    for (int m = 0; m < nsamples; ++m) {
        const double s = nsamples == 1 ? 0.0 : double(m) / (nsamples - 1);
        CutSample<Dim>& cs = out[m];
        cs.s = s;
        cs.x = (1.0 - s) * a + s * b;
        for_box<Dim>(snap.ncells, [&](const Index<Dim>& c) {
            if (cs.found) return;
            Vec<Dim> lo = snap.x(c), hi = snap.x(c);
            Index<Dim> clo{}, chi;
            for (int d = 0; d < Dim; ++d) chi[d] = 2;
            for_box<Dim>(clo, chi, [&](const Index<Dim>& sb) {
                Index<Dim> n;
                for (int d = 0; d < Dim; ++d) n[d] = c[d] + sb[d];
                for (int d = 0; d < Dim; ++d) {
                    lo[d] = std::min(lo[d], snap.x(n)[d]);
                    hi[d] = std::max(hi[d], snap.x(n)[d]);
                }
            });
            for (int d = 0; d < Dim; ++d) {
                const double pad = 1e-12 * (1.0 + std::abs(hi[d]) + std::abs(lo[d]));
                if (cs.x[d] < lo[d] - pad || cs.x[d] > hi[d] + pad) return;
            }
            Vec<Dim> xi;
            if (detail::cell_contains(snap.x, c, cs.x, xi)) {
                cs.found = true;
                cs.w = snap.prim(c);
                cs.jac = snap.jac(c);
            }
        });
    }
    return out;
}

} // namespace rhd
