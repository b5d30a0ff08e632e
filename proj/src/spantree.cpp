#include "spantree.hpp"

#include <stdexcept>

namespace dm::detail {

RegionTree wilson_tree(const DualGraph& g, const std::vector<int>& region, Rng& rng) {
    const int m = static_cast<int>(region.size());
    if (m == 0) throw std::invalid_argument("wilson_tree: empty region");

    // global id -> local index, -1 outside the region
    std::vector<int> local(g.size(), -1);
    for (int i = 0; i < m; ++i) local[region[i]] = i;

    // region-internal neighbor lists (local indices, ascending since source
    // adjacency is ascending)
    std::vector<std::vector<int>> nbr(m);
    for (int i = 0; i < m; ++i)
        for (int v : g.neighbors(region[i]))
            if (local[v] >= 0) nbr[i].push_back(local[v]);

    RegionTree t;
    t.verts = region;
    t.parent.assign(m, -1);
    t.children.assign(m, {});
    t.subtree_pop.assign(m, 0.0);

    std::vector<char> in_tree(m, 0);
    std::vector<int> next(m, -1);
    in_tree[0] = 1;  // root

    for (int start = 1; start < m; ++start) {
        if (in_tree[start]) continue;
        int u = start;
        while (!in_tree[u]) {
            const auto& nb = nbr[u];
            if (nb.empty()) throw std::invalid_argument("wilson_tree: region is disconnected");
            next[u] = nb[rng.index(nb.size())];
            u = next[u];
        }
        // commit the loop-erased path
        u = start;
        while (!in_tree[u]) {
            in_tree[u] = 1;
            t.parent[u] = next[u];
            u = next[u];
        }
    }

    for (int i = 1; i < m; ++i) t.children[t.parent[i]].push_back(i);

    // subtree populations by iterative post-order
    std::vector<int> order;
    order.reserve(m);
    std::vector<int> stack{0};
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        order.push_back(u);
        for (int c : t.children[u]) stack.push_back(c);
    }
    for (int i = m - 1; i >= 0; --i) {
        int u = order[i];
        t.subtree_pop[u] += g.pop(t.verts[u]);
        if (t.parent[u] >= 0) t.subtree_pop[t.parent[u]] += t.subtree_pop[u];
    }
    return t;
}

std::vector<int> balanced_edges(const RegionTree& t, double lo, double hi, double region_pop) {
    std::vector<int> out;
    const int m = static_cast<int>(t.verts.size());
    for (int u = 1; u < m; ++u) {
        double side = t.subtree_pop[u];
        double rest = region_pop - side;
        if (side >= lo && side <= hi && rest >= lo && rest <= hi) out.push_back(u);
    }
    return out;
}

std::vector<int> subtree_vertices(const RegionTree& t, int cut) {
    std::vector<int> out;
    std::vector<int> stack{cut};
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        out.push_back(t.verts[u]);
        for (int c : t.children[u]) stack.push_back(c);
    }
    return out;
}

}  // namespace dm::detail
