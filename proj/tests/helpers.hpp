#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dm/centroid.hpp"
#include "dm/districting.hpp"
#include "dm/graph.hpp"
#include "dm/rng.hpp"
#include "dm/theta.hpp"

namespace testutil {

// Scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("dm_" + tag + "_" + std::to_string(counter()++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("test helper cannot write " + path);
    out << content;
}

// Path graph u0 - u1 - ... - u{n-1} with the given populations.
inline dm::DualGraph path_graph(const std::vector<double>& pops) {
    std::vector<dm::Unit> units;
    std::vector<std::pair<int, int>> edges;
    for (std::size_t i = 0; i < pops.size(); ++i) {
        units.push_back({"u" + std::to_string(i), pops[i]});
        if (i > 0) edges.emplace_back(static_cast<int>(i) - 1, static_cast<int>(i));
    }
    return dm::DualGraph(std::move(units), std::move(edges));
}

// Star graph: unit 0 in the middle, n-1 leaves, unit populations 1.
inline dm::DualGraph star_graph(int n) {
    std::vector<dm::Unit> units;
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        units.push_back({"u" + std::to_string(i), 1.0});
        if (i > 0) edges.emplace_back(0, i);
    }
    return dm::DualGraph(std::move(units), std::move(edges));
}

// Random connected graph: a random tree plus up to n extra edges.
inline dm::DualGraph random_connected_graph(dm::Rng& rng, int n) {
    std::vector<dm::Unit> units;
    for (int i = 0; i < n; ++i)
        units.push_back({"u" + std::to_string(i), 0.5 + 2.5 * rng.unit()});
    std::set<std::pair<int, int>> edge_set;
    for (int i = 1; i < n; ++i) {
        int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i)));
        edge_set.emplace(j, i);
    }
    std::uint64_t extras = rng.below(static_cast<std::uint64_t>(n) + 1);
    for (std::uint64_t e = 0; e < extras; ++e) {
        int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        edge_set.emplace(a, b);
    }
    std::vector<std::pair<int, int>> edges(edge_set.begin(), edge_set.end());
    return dm::DualGraph(std::move(units), std::move(edges));
}

// Random k-block partition with every block nonempty, canonical labels.
// Blocks need not be contiguous; distance and centroid math does not care.
inline dm::Plan random_partition(dm::Rng& rng, int n, int k) {
    dm::Plan plan;
    plan.k = k;
    plan.assignment.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        plan.assignment[static_cast<std::size_t>(i)] =
            static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (int d : plan.assignment) ++count[static_cast<std::size_t>(d)];
    for (int d = 0; d < k; ++d) {
        while (count[static_cast<std::size_t>(d)] == 0) {
            for (int i = 0; i < n; ++i) {
                int from = plan.assignment[static_cast<std::size_t>(i)];
                if (count[static_cast<std::size_t>(from)] > 1) {
                    plan.assignment[static_cast<std::size_t>(i)] = d;
                    --count[static_cast<std::size_t>(from)];
                    ++count[static_cast<std::size_t>(d)];
                    break;
                }
            }
        }
    }
    return dm::canonicalize(plan);
}

// Reference plan-to-centroid squared distance: a full loop over every pair,
// independent of the support-split layout used by the library.
inline double ref_plan_centroid_d2(const dm::Plan& plan, const dm::CentroidMatrix& acc,
                                   const dm::ThetaWeights& w) {
    int n = static_cast<int>(plan.assignment.size());
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double a = plan.assignment[static_cast<std::size_t>(i)] ==
                               plan.assignment[static_cast<std::size_t>(j)]
                           ? 1.0
                           : 0.0;
            double diff = a - acc.value(i, j);
            total += w.at(i, j) * diff * diff;
        }
    }
    return total;
}

// Reference centroid-to-centroid squared distance.
inline double ref_centroid_centroid_d2(const dm::CentroidMatrix& a, const dm::CentroidMatrix& b,
                                       const dm::ThetaWeights& w, int n) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double diff = a.value(i, j) - b.value(i, j);
            total += w.at(i, j) * diff * diff;
        }
    }
    return total;
}

}  // namespace testutil
