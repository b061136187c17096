#pragma once

#include "rhd/field.hpp"
#include "rhd/linalg.hpp"

namespace rhd {

/// Structured mesh: node positions and velocities over the logical box
/// [0,1]^Dim with ncells[k] cells (ncells[k]+1 nodes) per direction.
template <std::size_t Dim>
struct Mesh {
    Index<Dim> ncells{};
    Vec<Dim> dxi{};
    Field<Vec<Dim>, Dim> x;    // node positions
    Field<Vec<Dim>, Dim> xdot; // node velocities

    Mesh() = default;

    explicit Mesh(Index<Dim> nc) : ncells(nc)
    {
        Index<Dim> nn;
        for (int d = 0; d < Dim; ++d) {
            nn[d] = nc[d] + 1;
            dxi[d] = 1.0 / nc[d];
        }
        x = Field<Vec<Dim>, Dim>(nn);
        xdot = Field<Vec<Dim>, Dim>(nn);
    }

    Index<Dim> nnodes() const
    {
        Index<Dim> nn;
        for (int d = 0; d < Dim; ++d) nn[d] = ncells[d] + 1;
        return nn;
    }
};

/// Uniform mesh of the box [lo, hi].
template <std::size_t Dim>
inline Mesh<Dim> uniform_mesh(Index<Dim> ncells, const Vec<Dim>& lo, const Vec<Dim>& hi)
{
    Mesh<Dim> m(ncells);
    for_box<Dim>(m.nnodes(), [&](const Index<Dim>& n) {
        Vec<Dim> p;
        for (int d = 0; d < Dim; ++d)
            p[d] = lo[d] + (hi[d] - lo[d]) * n[d] / ncells[d];
        m.x(n) = p;
    });
    return m;
}

/// Extent of the face-centered array in direction k (one extra layer along k).
template <std::size_t Dim>
inline Index<Dim> face_dims(const Index<Dim>& ncells, int k)
{
    Index<Dim> d = ncells;
    d[k] += 1;
    return d;
}

} // namespace rhd
