#pragma once
#include <vector>

#include "dm/graph.hpp"
#include "dm/rng.hpp"

// Shared spanning-tree primitives for seed-plan generation and the
// recombination chain. Internal to the library.

namespace dm::detail {

struct RegionTree {
    std::vector<int> verts;                  // global unit ids, ascending
    std::vector<int> parent;                 // local index of parent, -1 at root
    std::vector<std::vector<int>> children;  // local indices
    std::vector<double> subtree_pop;
};

// Uniform random spanning tree of the subgraph induced by `region` (global
// ids, ascending), via Wilson's loop-erased random walk. Vertices are rooted
// at region[0] and walks start in ascending order, so the draw is fully
// determined by the rng stream.
RegionTree wilson_tree(const DualGraph& g, const std::vector<int>& region, Rng& rng);

// local indices u (non-root) such that deleting the tree edge (u, parent(u))
// leaves both sides with population in [lo, hi]
std::vector<int> balanced_edges(const RegionTree& t, double lo, double hi, double region_pop);

// global ids of the subtree rooted at local index `cut`
std::vector<int> subtree_vertices(const RegionTree& t, int cut);

}  // namespace dm::detail
