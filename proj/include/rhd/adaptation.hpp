#pragma once

#include <algorithm>
#include <cmath>

#include "rhd/field.hpp"
#include "rhd/mesh.hpp"

namespace rhd {

enum class MonitorVar { rho, lnrho };

template <std::size_t Dim>
struct AdaptOptions {
    bool enabled = true;
    double alpha = 10.0;
    MonitorVar sigma = MonitorVar::rho;
    int filter_passes = 3;
    int jacobi_iters = 10;
    std::array<bool, Dim> periodic{};
    Vec<Dim> period{}; // domain extent per periodic direction
};

namespace detail {

template <std::size_t Dim>
inline int clamp_cell(int c, int n) { return std::clamp(c, 0, n - 1); }

} // namespace detail

/// Arclength-type monitor on cells: w = sqrt(1 + alpha |grad sigma| / max),
/// with central differences (one-sided at the boundary). Identically one
/// when sigma is constant.
template <std::size_t Dim>
inline Field<double, Dim> monitor_function(const Field<double, Dim>& sigma,
                                           const Vec<Dim>& dxi, double alpha)
{
    const Index<Dim>& nc = sigma.dims();
    Field<double, Dim> grad(nc);
    double gmax = 0.0;
    for_box<Dim>(nc, [&](const Index<Dim>& c) {
        double g2 = 0.0;
        for (int d = 0; d < Dim; ++d) {
            const int hi = detail::clamp_cell<Dim>(c[d] + 1, nc[d]);
            const int lo = detail::clamp_cell<Dim>(c[d] - 1, nc[d]);
            if (hi == lo) continue;
            Index<Dim> ch = c, cl = c;
            ch[d] = hi;
            cl[d] = lo;
            const double g = (sigma(ch) - sigma(cl)) / ((hi - lo) * dxi[d]);
            g2 += g * g;
        }
        grad(c) = std::sqrt(g2);
        gmax = std::max(gmax, grad(c));
    });
    Field<double, Dim> w(nc, 0, 1.0);
    if (gmax > 0.0)
        for_box<Dim>(nc, [&](const Index<Dim>& c) {
            w(c) = std::sqrt(1.0 + alpha * grad(c) / gmax);
        });
    return w;
}

/// Low-pass filter w <- sum over the 3^Dim neighborhood with weights
/// (1/2)^(|j1|+...+|jd|+Dim), indices clamped at the boundary.
template <std::size_t Dim>
inline void filter_monitor(Field<double, Dim>& w, int passes)
{
    const Index<Dim>& nc = w.dims();
    Field<double, Dim> tmp(nc);
    for (int p = 0; p < passes; ++p) {
        for_box<Dim>(nc, [&](const Index<Dim>& c) {
            double acc = 0.0;
            Index<Dim> lo, hi;
            for (int d = 0; d < Dim; ++d) {
                lo[d] = -1;
                hi[d] = 2;
            }
            for_box<Dim>(lo, hi, [&](const Index<Dim>& j) {
                int order = Dim;
                Index<Dim> n;
                for (int d = 0; d < Dim; ++d) {
                    order += std::abs(j[d]);
                    n[d] = detail::clamp_cell<Dim>(c[d] + j[d], nc[d]);
                }
                acc += std::ldexp(w(n), -order);
            });
            tmp(c) = acc;
        });
        std::swap(w, tmp);
    }
}

namespace detail {

// Cell monitor averaged over the cells sharing the edge from node n in
// direction (d, side): side = +1 uses cell layer n[d], side = -1 layer n[d]-1.
template <std::size_t Dim>
inline double edge_weight(const Field<double, Dim>& w, const Index<Dim>& n, int d,
                          int side, const std::array<bool, Dim>& periodic)
{
    const Index<Dim>& nc = w.dims();
    int layer = (side > 0) ? n[d] : n[d] - 1;
    if (periodic[d])
        layer = (layer % nc[d] + nc[d]) % nc[d];
    else
        layer = clamp_cell<Dim>(layer, nc[d]);
    double acc = 0.0;
    int cnt = 0;
    Index<Dim> lo{}, hi{};
    for (int t = 0; t < Dim; ++t) {
        lo[t] = (t == d) ? 0 : -1;
        hi[t] = (t == d) ? 1 : 1;
    }
    for_box<Dim>(lo, hi, [&](const Index<Dim>& j) {
        Index<Dim> c;
        for (int t = 0; t < Dim; ++t) {
            if (t == d) {
                c[t] = layer;
            } else {
                int ct = n[t] + j[t];
                if (periodic[t])
                    ct = (ct % nc[t] + nc[t]) % nc[t];
                else
                    ct = clamp_cell<Dim>(ct, nc[t]);
                c[t] = ct;
            }
        }
        acc += w(c);
        ++cnt;
    });
    return acc / cnt;
}

// Neighbor position of node n in direction (d, side), honoring periodic
// identification of the first and last node layers with a coordinate shift.
template <std::size_t Dim>
inline bool neighbor_pos(const Mesh<Dim>& m, const Field<Vec<Dim>, Dim>& x,
                         const Index<Dim>& n, int d, int side,
                         const AdaptOptions<Dim>& opt, Vec<Dim>& out)
{
    const int N = m.ncells[d];
    int nd = n[d] + side;
    double shift = 0.0;
    if (opt.periodic[d]) {
        if (nd < 0) {
            nd += N;
            shift = -opt.period[d];
        } else if (nd > N) {
            nd -= N;
            shift = opt.period[d];
        }
        // layers 0 and N are identified; both exist in the array
    } else if (nd < 0 || nd > N) {
        return false;
    }
    Index<Dim> nn = n;
    nn[d] = nd;
    out = x(nn);
    out[d] += shift;
    return true;
}

} // namespace detail

/// One block of weighted-Laplacian smoothing sweeps over the node positions
/// (Jacobi iteration on the variational mesh equations). Nodes on a
/// non-periodic boundary keep their boundary-normal coordinate and slide
/// within the boundary plane; corner nodes therefore stay fixed.
template <std::size_t Dim>
inline Field<Vec<Dim>, Dim> redistribute_nodes(const Mesh<Dim>& m,
                                               const Field<double, Dim>& w,
                                               const AdaptOptions<Dim>& opt)
{
    Field<Vec<Dim>, Dim> cur = m.x;
    Field<Vec<Dim>, Dim> nxt(cur.dims());
    const Index<Dim> nn = m.nnodes();

    // the edge weights depend on the monitor only, so hoist them out of the
    // sweep loop; ew[d](n) is the weight of the edge from n toward +d, and
    // the -d weight of n is the +d weight of the node below
    std::array<Field<double, Dim>, Dim> ew;
    for (int d = 0; d < Dim; ++d) {
        ew[d] = Field<double, Dim>(nn);
        for_box<Dim>(nn, [&](const Index<Dim>& n) {
            ew[d](n) = detail::edge_weight(w, n, d, +1, opt.periodic);
        });
    }
    auto edge_w = [&](const Index<Dim>& n, int d, int side) {
        if (side > 0) return ew[d](n);
        Index<Dim> b = n;
        b[d] = (n[d] > 0) ? n[d] - 1 : m.ncells[d] - 1; // periodic wrap
        return ew[d](b);
    };

    for (int sweep = 0; sweep < opt.jacobi_iters; ++sweep) {
        for_box<Dim>(nn, [&](const Index<Dim>& n) {
            // periodic slave layer handled after the sweep
            for (int d = 0; d < Dim; ++d)
                if (opt.periodic[d] && n[d] == m.ncells[d]) {
                    nxt(n) = cur(n);
                    return;
                }
            Vec<Dim> acc{};
            double wsum = 0.0;
            for (int d = 0; d < Dim; ++d) {
                for (int side : {-1, +1}) {
                    Vec<Dim> xn;
                    if (!detail::neighbor_pos(m, cur, n, d, side, opt, xn)) continue;
                    const double ewv = edge_w(n, d, side);
                    acc += ewv * xn;
                    wsum += ewv;
                }
            }
            Vec<Dim> p = (wsum > 0.0) ? (1.0 / wsum) * acc : cur(n);
            for (int d = 0; d < Dim; ++d)
                if (!opt.periodic[d] && (n[d] == 0 || n[d] == m.ncells[d]))
                    p[d] = cur(n)[d];
            nxt(n) = p;
        });
        // re-synchronize identified periodic layers
        for (int d = 0; d < Dim; ++d) {
            if (!opt.periodic[d]) continue;
            Index<Dim> hi = nn;
            hi[d] = 1;
            for_box<Dim>(hi, [&](Index<Dim> i) {
                Index<Dim> j = i;
                j[d] = m.ncells[d];
                Vec<Dim> p = nxt(i);
                p[d] += opt.period[d];
                nxt(j) = p;
            });
        }
        std::swap(cur, nxt);
    }
    return cur;
}

/// Global displacement fraction keeping every node within half of the
/// current spacing to its neighbors, capped at a full move.
template <std::size_t Dim>
inline double displacement_limit(const Mesh<Dim>& m, const Field<Vec<Dim>, Dim>& xnew,
                                 const AdaptOptions<Dim>& opt)
{
    double tau = 1.0;
    for_box<Dim>(m.nnodes(), [&](const Index<Dim>& n) {
        const Vec<Dim> dx = xnew(n) - m.x(n);
        for (int d = 0; d < Dim; ++d) {
            if (dx[d] == 0.0) continue;
            const int side = dx[d] > 0.0 ? +1 : -1;
            Vec<Dim> xn;
            if (!detail::neighbor_pos(m, m.x, n, d, side, opt, xn)) continue;
            const double room = side * (xn[d] - m.x(n)[d]);
            tau = std::min(tau, 0.5 * room / std::abs(dx[d]));
        }
    });
    return std::max(tau, 0.0);
}

/// Full adaptation step at frozen time: propose new node positions from the
/// cell monitor variable, limit the displacement, and return the node
/// velocities for a step of size dt. Returns the limited target positions.
template <std::size_t Dim>
inline Field<Vec<Dim>, Dim> adapt_mesh(Mesh<Dim>& m, const Field<double, Dim>& sigma,
                                       const AdaptOptions<Dim>& opt)
{
    Field<double, Dim> w = monitor_function(sigma, m.dxi, opt.alpha);
    filter_monitor(w, opt.filter_passes);
    Field<Vec<Dim>, Dim> xnew = redistribute_nodes(m, w, opt);
    const double tau = displacement_limit(m, xnew, opt);
    for_box<Dim>(m.nnodes(), [&](const Index<Dim>& n) {
        xnew(n) = m.x(n) + tau * (xnew(n) - m.x(n));
    });
    return xnew;
}

} // namespace rhd
