#pragma once

#include "rhd/field.hpp"
#include "rhd/physics.hpp"

namespace rhd {

enum class BcKind { periodic, outflow, reflect, inflow };

template <std::size_t Dim>
struct BcSide {
    BcKind kind = BcKind::periodic;
    Prim<Dim> state{}; // used by inflow
};

template <std::size_t Dim>
using BcTable = std::array<std::array<BcSide<Dim>, 2>, Dim>;

/// Fill the ghost frame of the cell primitive field. Directions are swept in
/// order over the full transverse ghosted extent, so corner ghosts end up
/// consistent with the last direction applied.
template <std::size_t Dim>
inline void fill_ghost_prims(Field<Prim<Dim>, Dim>& prim, const BcTable<Dim>& bc)
{
    const Index<Dim>& nc = prim.dims();
    const int G = prim.ghost();
    for (int d = 0; d < Dim; ++d) {
        // transverse range: already-filled directions include their ghosts,
        // later directions stay interior (their ghosts are filled afterwards)
        Index<Dim> lo, hi;
        for (int t = 0; t < Dim; ++t) {
            lo[t] = t < d ? -G : 0;
            hi[t] = t < d ? nc[t] + G : nc[t];
        }
        lo[d] = 0;
        hi[d] = 1; // iterate transverse slab once
        for_box<Dim>(lo, hi, [&](Index<Dim> i) {
            for (int g = 1; g <= G; ++g) {
                for (int side = 0; side < 2; ++side) {
                    Index<Dim> dst = i;
                    dst[d] = side == 0 ? -g : nc[d] - 1 + g;
                    Index<Dim> src = i;
                    const BcSide<Dim>& b = bc[d][side];
                    switch (b.kind) {
                        case BcKind::periodic:
                            src[d] = side == 0 ? nc[d] - g : g - 1;
                            prim(dst) = prim(src);
                            break;
                        case BcKind::outflow:
                            src[d] = side == 0 ? 0 : nc[d] - 1;
                            prim(dst) = prim(src);
                            break;
                        case BcKind::reflect: {
                            src[d] = side == 0 ? g - 1 : nc[d] - g;
                            Prim<Dim> w = prim(src);
                            w.v[d] = -w.v[d];
                            prim(dst) = w;
                            break;
                        }
                        case BcKind::inflow:
                            prim(dst) = b.state;
                            break;
                    }
                }
            }
        });
    }
}

} // namespace rhd
