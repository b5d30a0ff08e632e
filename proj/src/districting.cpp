#include "dm/districting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "dm/rng.hpp"
#include "spantree.hpp"

namespace dm {

namespace {

void check_sized(const Plan& plan, const DualGraph& g) {
    if (static_cast<int>(plan.assignment.size()) != g.size())
        throw std::invalid_argument("plan size " + std::to_string(plan.assignment.size()) +
                                    " does not match graph size " + std::to_string(g.size()));
}

constexpr int kSeedAttempts = 200;
constexpr int kSeedTreeTries = 100;

}  // namespace

Plan canonicalize(const Plan& plan) {
    Plan out;
    out.k = plan.k;
    out.assignment.resize(plan.assignment.size());
    std::vector<int> relabel(plan.k, -1);
    int next = 0;
    for (std::size_t i = 0; i < plan.assignment.size(); ++i) {
        int d = plan.assignment[i];
        if (d < 0 || d >= plan.k)
            throw std::invalid_argument("plan: district label " + std::to_string(d) +
                                        " out of range [0," + std::to_string(plan.k) + ")");
        if (relabel[d] < 0) relabel[d] = next++;
        out.assignment[i] = relabel[d];
    }
    if (next != plan.k)
        throw std::invalid_argument("plan: only " + std::to_string(next) + " of " +
                                    std::to_string(plan.k) + " districts are nonempty");
    return out;
}

bool is_contiguous(const Plan& plan, const DualGraph& g) {
    check_sized(plan, g);
    const int n = g.size();
    std::vector<int> first(plan.k, -1);
    for (int i = 0; i < n; ++i) {
        int d = plan.assignment[i];
        if (d < 0 || d >= plan.k) return false;
        if (first[d] < 0) first[d] = i;
    }
    for (int d = 0; d < plan.k; ++d)
        if (first[d] < 0) return false;

    std::vector<char> seen(n, 0);
    std::vector<int> stack;
    int reached = 0;
    for (int d = 0; d < plan.k; ++d) {
        stack.push_back(first[d]);
        seen[first[d]] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            ++reached;
            for (int v : g.neighbors(u))
                if (!seen[v] && plan.assignment[v] == d) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
        }
    }
    return reached == n;
}

PopulationBalance population_balance(const Plan& plan, const DualGraph& g) {
    check_sized(plan, g);
    PopulationBalance b;
    b.district_pop.assign(plan.k, 0.0);
    for (int i = 0; i < g.size(); ++i) b.district_pop[plan.assignment[i]] += g.pop(i);
    const double ideal = g.total_pop() / plan.k;
    for (double p : b.district_pop)
        b.max_deviation = std::max(b.max_deviation, std::abs(p - ideal) / ideal);
    return b;
}

int cut_edges(const Plan& plan, const DualGraph& g) {
    check_sized(plan, g);
    int cut = 0;
    for (const auto& [a, b] : g.edges())
        if (plan.assignment[a] != plan.assignment[b]) ++cut;
    return cut;
}

Validity is_valid(const Plan& plan, const DualGraph& g, const ValidityConfig& cfg) {
    check_sized(plan, g);
    if (plan.k < 1) return {false, "nonempty"};
    std::vector<char> present(plan.k, 0);
    for (int d : plan.assignment) {
        if (d < 0 || d >= plan.k) return {false, "nonempty"};
        present[d] = 1;
    }
    for (int d = 0; d < plan.k; ++d)
        if (!present[d]) return {false, "nonempty"};
    if (!is_contiguous(plan, g)) return {false, "contiguity"};
    if (population_balance(plan, g).max_deviation > cfg.pop_tolerance) return {false, "population"};
    if (cfg.max_cut_edges && cut_edges(plan, g) > *cfg.max_cut_edges) return {false, "cut_edges"};
    return {true, ""};
}

namespace {

// split `region` into k districts by recursive tree bipartition; fills
// labels[unit] with values in [label_base, label_base + k). Returns false if
// no balanced cut was found within the tree budget.
bool split_region(const DualGraph& g, std::vector<int> region, int k, int label_base,
                  double lo1, double hi1, Rng& rng, std::vector<int>& labels) {
    if (k == 1) {
        double pop = 0.0;
        for (int u : region) pop += g.pop(u);
        if (pop < lo1 || pop > hi1) return false;
        for (int u : region) labels[u] = label_base;
        return true;
    }
    const int k1 = k / 2;
    const int k2 = k - k1;
    double region_pop = 0.0;
    for (int u : region) region_pop += g.pop(u);

    for (int attempt = 0; attempt < kSeedTreeTries; ++attempt) {
        detail::RegionTree t = detail::wilson_tree(g, region, rng);
        // candidate cuts: subtree side takes k1 districts or k2 districts
        std::vector<std::pair<int, bool>> cands;  // (cut vertex, subtree takes k1)
        const int m = static_cast<int>(region.size());
        for (int u = 1; u < m; ++u) {
            double side = t.subtree_pop[u];
            double rest = region_pop - side;
            if (side >= k1 * lo1 && side <= k1 * hi1 && rest >= k2 * lo1 && rest <= k2 * hi1)
                cands.emplace_back(u, true);
            if (k1 != k2 && side >= k2 * lo1 && side <= k2 * hi1 && rest >= k1 * lo1 &&
                rest <= k1 * hi1)
                cands.emplace_back(u, false);
        }
        if (cands.empty()) continue;
        auto [cut, side_k1] = cands[rng.index(cands.size())];

        std::vector<int> side = detail::subtree_vertices(t, cut);
        std::sort(side.begin(), side.end());
        std::vector<int> rest;
        rest.reserve(region.size() - side.size());
        std::size_t si = 0;
        for (int u : region) {
            if (si < side.size() && side[si] == u)
                ++si;
            else
                rest.push_back(u);
        }

        int ka = side_k1 ? k1 : k2;
        int kb = k - ka;
        if (split_region(g, side, ka, label_base, lo1, hi1, rng, labels) &&
            split_region(g, rest, kb, label_base + ka, lo1, hi1, rng, labels))
            return true;
    }
    return false;
}

}  // namespace

Plan seed_plan(const DualGraph& g, int k, const ValidityConfig& cfg, std::uint64_t rng_seed) {
    if (k < 1) throw std::invalid_argument("seed_plan: k must be positive");
    if (k > g.size())
        throw std::invalid_argument("seed_plan: k=" + std::to_string(k) + " exceeds unit count " +
                                    std::to_string(g.size()));
    const double ideal = g.total_pop() / k;
    const double lo = (1.0 - cfg.pop_tolerance) * ideal;
    const double hi = (1.0 + cfg.pop_tolerance) * ideal;

    std::vector<int> all(g.size());
    for (int i = 0; i < g.size(); ++i) all[i] = i;

    Rng rng(rng_seed);
    for (int attempt = 1; attempt <= kSeedAttempts; ++attempt) {
        std::vector<int> labels(g.size(), -1);
        if (!split_region(g, all, k, 0, lo, hi, rng, labels)) continue;
        Plan plan{std::move(labels), k};
        plan = canonicalize(plan);
        if (is_valid(plan, g, cfg).ok) return plan;
    }
    throw std::runtime_error("seed_plan: no valid plan after " + std::to_string(kSeedAttempts) +
                             " attempts (k=" + std::to_string(k) +
                             ", eps=" + std::to_string(cfg.pop_tolerance) + ")");
}

std::vector<Plan> enumerate_valid_plans(const DualGraph& g, int k, const ValidityConfig& cfg) {
    const int n = g.size();
    if (n > 16)
        throw std::invalid_argument("enumerate_valid_plans: n=" + std::to_string(n) +
                                    " exceeds the enumeration guard (16)");
    if (k < 1 || k > n) throw std::invalid_argument("enumerate_valid_plans: k out of range");

    const double ideal = g.total_pop() / k;
    const double lo = (1.0 - cfg.pop_tolerance) * ideal;
    const double hi = (1.0 + cfg.pop_tolerance) * ideal;

    std::vector<Plan> out;
    std::vector<int> a(n, -1);
    std::vector<double> dpop(k, 0.0);
    double remaining = g.total_pop();

    // restricted growth strings: label of unit i is at most (1 + max label so
    // far), so each partition appears exactly once, already canonical
    std::function<void(int, int)> rec = [&](int i, int used) {
        if (i == n) {
            if (used != k) return;
            for (int d = 0; d < k; ++d)
                if (dpop[d] < lo) return;
            Plan plan{a, k};
            if (!is_contiguous(plan, g)) return;
            if (cfg.max_cut_edges && cut_edges(plan, g) > *cfg.max_cut_edges) return;
            out.push_back(std::move(plan));
            return;
        }
        // units left must suffice to open the remaining districts
        if (n - i < k - used) return;
        // districts already below the floor must still be fillable
        double deficit = 0.0;
        for (int d = 0; d < used; ++d)
            if (dpop[d] < lo) deficit += lo - dpop[d];
        if (deficit > remaining + 1e-12) return;

        const double p = g.pop(i);
        const int top = std::min(used, k - 1);
        remaining -= p;
        for (int d = 0; d <= top; ++d) {
            if (dpop[d] + p > hi) continue;
            a[i] = d;
            dpop[d] += p;
            rec(i + 1, d == used ? used + 1 : used);
            dpop[d] -= p;
        }
        a[i] = -1;
        remaining += p;
    };
    rec(0, 0);
    return out;
}

void save_plan(const Plan& plan, const DualGraph& g, const std::string& path) {
    check_sized(plan, g);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write plan file: " + path);
    out << "unit_id,district\n";
    for (int i = 0; i < g.size(); ++i) out << g.unit(i).id << "," << plan.assignment[i] << "\n";
}

Plan load_plan(const std::string& path, const DualGraph& g) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read plan file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "unit_id,district")
        throw std::runtime_error(path + ": expected header \"unit_id,district\"");

    std::vector<int> assignment(g.size(), -1);
    int max_label = -1;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected unit_id,district");
        const std::string id = line.substr(0, comma);
        int d;
        try {
            d = std::stoi(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad district label");
        }
        int idx = g.index_of(id);
        if (assignment[idx] != -1)
            throw std::invalid_argument(path + ": duplicate row for unit \"" + id + "\"");
        if (d < 0) throw std::invalid_argument(path + ": negative district label for unit \"" + id + "\"");
        assignment[idx] = d;
        max_label = std::max(max_label, d);
    }
    for (int i = 0; i < g.size(); ++i)
        if (assignment[i] < 0)
            throw std::invalid_argument(path + ": missing row for unit \"" + g.unit(i).id + "\"");

    // foreign files may use sparse or unordered labels; canonical form is the
    // partition's identity
    Plan raw{std::move(assignment), max_label + 1};
    std::vector<char> present(raw.k, 0);
    for (int d : raw.assignment) present[d] = 1;
    std::vector<int> compact(raw.k, -1);
    int next = 0;
    for (int d = 0; d < raw.k; ++d)
        if (present[d]) compact[d] = next++;
    for (int& d : raw.assignment) d = compact[d];
    raw.k = next;
    return canonicalize(raw);
}

}  // namespace dm
