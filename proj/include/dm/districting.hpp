#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dm/graph.hpp"

namespace dm {

// A districting plan: every unit assigned to one of k districts. The binary
// co-membership matrix A(i,j) = [assignment[i] == assignment[j]] is a derived
// view, never materialized. Plans are immutable values.
struct Plan {
    std::vector<int> assignment;
    int k = 0;

    bool operator==(const Plan& o) const { return k == o.k && assignment == o.assignment; }
};

struct ValidityConfig {
    double pop_tolerance = 0.05;  // fraction of ideal district population
    std::optional<int> max_cut_edges;
};

struct PopulationBalance {
    std::vector<double> district_pop;
    double max_deviation = 0.0;  // max_d |pop_d - ideal| / ideal
};

struct Validity {
    bool ok = true;
    std::string rule;  // first violated rule when !ok: nonempty|contiguity|population|cut_edges
};

// relabel districts in first-occurrence order (unit 0's district becomes 0,
// the next unseen district becomes 1, ...); labels are nuisance, partitions
// are the real object
Plan canonicalize(const Plan& plan);

bool is_contiguous(const Plan& plan, const DualGraph& g);
PopulationBalance population_balance(const Plan& plan, const DualGraph& g);
int cut_edges(const Plan& plan, const DualGraph& g);
Validity is_valid(const Plan& plan, const DualGraph& g, const ValidityConfig& cfg);

// random valid plan via recursive spanning-tree bipartition; deterministic
// given rng_seed; throws after bounded retries if no valid plan is found
Plan seed_plan(const DualGraph& g, int k, const ValidityConfig& cfg, std::uint64_t rng_seed);

// exhaustive enumeration of valid plans, duplicate-free up to district
// relabeling (canonical labels). Exponential; guarded at n <= 16.
std::vector<Plan> enumerate_valid_plans(const DualGraph& g, int k, const ValidityConfig& cfg);

void save_plan(const Plan& plan, const DualGraph& g, const std::string& path);
Plan load_plan(const std::string& path, const DualGraph& g);

}  // namespace dm
