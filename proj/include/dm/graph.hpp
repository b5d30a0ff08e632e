#pragma once
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dm {

struct Unit {
    std::string id;
    double pop = 0.0;
};

struct GridSpec {
    int rows = 0;
    int cols = 0;
    double uniform_pop = 1.0;
    std::vector<double> per_cell;  // row-major; overrides uniform_pop when nonempty
};

// Dual graph of a state: one vertex per voting unit, edges between
// geographically adjacent units. Immutable after construction and safe to
// share read-only across workers. The constructor validates everything
// downstream code assumes: positive populations, unique ids, sane edges,
// connectivity.
class DualGraph {
public:
    DualGraph(std::vector<Unit> units, std::vector<std::pair<int, int>> edges);

    int size() const { return n_; }
    const Unit& unit(int i) const { return units_[i]; }
    double pop(int i) const { return units_[i].pop; }
    double total_pop() const { return total_pop_; }
    const std::vector<int>& neighbors(int i) const { return adj_[i]; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    // index of a unit id; throws if unknown
    int index_of(const std::string& id) const;

    bool operator==(const DualGraph& o) const;

    void save(const std::string& path) const;

private:
    int n_ = 0;
    std::vector<Unit> units_;
    std::vector<std::pair<int, int>> edges_;  // normalized i<j, sorted ascending
    std::vector<std::vector<int>> adj_;       // neighbor lists, ascending
    std::unordered_map<std::string, int> id_index_;
    double total_pop_ = 0.0;
};

DualGraph load_graph(const std::string& path);
void save_graph(const DualGraph& g, const std::string& path);
DualGraph make_grid(const GridSpec& spec);

// all-pairs BFS hop counts; row i is the hop distance from unit i
std::vector<std::vector<int>> shortest_path_lengths(const DualGraph& g);

// packed upper-triangle index for a pair i<j of n units
inline std::size_t pair_index(int i, int j, int n) {
    return static_cast<std::size_t>(i) * (2 * n - i - 1) / 2 + (j - i - 1);
}

// order-free 64-bit key for a pair i<j
inline std::uint64_t pair_key(int i, int j) {
    return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j);
}

inline int pair_key_i(std::uint64_t key) { return static_cast<int>(key >> 32); }
inline int pair_key_j(std::uint64_t key) { return static_cast<int>(key & 0xffffffffu); }

}  // namespace dm
