#include "dm/kcut.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dm/accum.hpp"
#include "dm/analysis.hpp"
#include "dm/metric.hpp"

namespace dm {

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

KCutInstance build_instance(const CentroidMatrix& centroid, const ThetaWeights& w,
                            const DualGraph& g, int k, const ValidityConfig& cfg) {
    int n = g.size();
    if (centroid.n() != n) throw std::invalid_argument("build_instance: centroid size != graph size");
    if (w.n() != n) throw std::invalid_argument("build_instance: weights size != graph size");
    if (centroid.samples() < 1)
        throw std::invalid_argument("build_instance: centroid holds no samples");
    if (k < 1) throw std::invalid_argument("build_instance: k must be >= 1");
    KCutInstance inst{g, k, cfg, {}};
    inst.s.resize(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) inst.s[pair_index(i, j, n)] = 0.5 * w.at(i, j);
    auto T = static_cast<double>(centroid.samples());
    centroid.for_each([&](int i, int j, long long count) {
        double c = static_cast<double>(count) / T;
        inst.s[pair_index(i, j, n)] = 0.5 * w.at(i, j) * (1.0 - 2.0 * c);
    });
    return inst;
}

double cut_objective(const KCutInstance& inst, const Plan& plan) {
    int n = inst.graph.size();
    if (plan.assignment.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("cut_objective: plan size does not match instance");
    const int* a = plan.assignment.data();
    PairwiseSum acc;
    for (int i = 0; i < n; ++i) {
        const double* row = inst.s.data() + pair_index(i, i + 1, n) - static_cast<std::size_t>(i) - 1;
        double rowsum = 0.0;
        int ai = a[i];
        for (int j = i + 1; j < n; ++j)
            if (a[j] != ai) rowsum += row[j];
        acc.add(rowsum);
    }
    return 2.0 * acc.total();
}

MedoidResult exact_population_medoid(const KCutInstance& inst) {
    std::vector<Plan> all = enumerate_valid_plans(inst.graph, inst.k, inst.cfg);
    if (all.empty())
        throw std::invalid_argument("exact_population_medoid: instance admits no valid plan");
    std::vector<double> obj(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) obj[i] = cut_objective(inst, all[i]);
    double best = *std::max_element(obj.begin(), obj.end());
    double band = 1e-12 * std::max(1.0, std::abs(best));
    MedoidResult res;
    res.objective = best;
    for (std::size_t i = 0; i < all.size(); ++i)
        if (best - obj[i] <= band) res.plans.push_back(all[i]);
    return res;
}

void save_instance(const KCutInstance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write instance: " + path);
    int n = inst.graph.size();
    out << "# " << n << ' ' << inst.k << '\n';
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            out << i << ',' << j << ',' << fmt17(inst.s[pair_index(i, j, n)]) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

KCutInstance load_instance(const std::string& path, const DualGraph& g, const ValidityConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("instance file is empty: " + path);
    int n = 0, k = 0;
    if (std::sscanf(line.c_str(), "# %d %d", &n, &k) != 2)
        throw std::runtime_error("instance " + path + ": expected header '# n k', got: " + line);
    if (n != g.size())
        throw std::invalid_argument("instance " + path + ": header n=" + std::to_string(n) +
                                    " does not match graph with " + std::to_string(g.size()) +
                                    " units");
    if (k < 1 || k > n)
        throw std::invalid_argument("instance " + path + ": k=" + std::to_string(k) +
                                    " out of range");
    KCutInstance inst{g, k, cfg, {}};
    std::size_t npairs = static_cast<std::size_t>(n) * (n - 1) / 2;
    inst.s.assign(npairs, 0.0);
    std::vector<char> seen(npairs, 0);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string i_str, j_str, s_str;
        if (!std::getline(ss, i_str, ',') || !std::getline(ss, j_str, ',') ||
            !std::getline(ss, s_str))
            throw std::runtime_error("instance " + path + ": malformed row: " + line);
        int i = 0, j = 0;
        double s = 0.0;
        try {
            i = std::stoi(i_str);
            j = std::stoi(j_str);
            s = std::stod(s_str);
        } catch (const std::exception&) {
            throw std::runtime_error("instance " + path + ": bad number in row: " + line);
        }
        if (i < 0 || j >= n || i >= j)
            throw std::invalid_argument("instance " + path + ": pair indices must satisfy 0 <= i < j < n, got " +
                                        line);
        std::size_t idx = pair_index(i, j, n);
        if (seen[idx])
            throw std::invalid_argument("instance " + path + ": duplicate pair (" + i_str + "," +
                                        j_str + ")");
        seen[idx] = 1;
        inst.s[idx] = s;
    }
    for (std::size_t idx = 0; idx < npairs; ++idx)
        if (!seen[idx])
            throw std::invalid_argument("instance " + path + ": missing pairs (expected " +
                                        std::to_string(npairs) + " rows)");
    return inst;
}

NegativeFixture negative_fixture() {
    const double eps = 1e-3;
    // units 0..3 are light satellites (population 1/2); 4..6 a heavy spine
    // hanging off the hub 4; 7..9 a heavy path carrying satellites 1..3
    std::vector<Unit> units;
    for (int i = 0; i < 4; ++i) units.push_back({"u" + std::to_string(i), 0.5});
    for (int i = 4; i < 10; ++i) units.push_back({"u" + std::to_string(i), 1.0});
    std::vector<std::pair<int, int>> edges = {{0, 4}, {4, 5}, {5, 6}, {1, 4}, {2, 4}, {3, 4},
                                              {1, 7}, {2, 8}, {3, 9}, {7, 8}, {8, 9}};
    DualGraph g(std::move(units), std::move(edges));

    std::vector<double> upper(45);
    for (int i = 0; i < 10; ++i)
        for (int j = i + 1; j < 10; ++j) {
            double t = 0.5;                // light-heavy
            if (j <= 3) t = eps;           // both light
            else if (i >= 4) t = 1.0;      // both heavy
            upper[pair_index(i, j, 10)] = t;
        }
    ThetaWeights theta = ThetaWeights::explicit_matrix(g, std::move(upper));

    // corners move one satellite each across the split; the central plan
    // keeps all three together
    std::vector<Plan> maps = {
        Plan{{0, 0, 1, 1, 0, 0, 0, 1, 1, 1}, 2},
        Plan{{0, 1, 0, 1, 0, 0, 0, 1, 1, 1}, 2},
        Plan{{0, 1, 1, 0, 0, 0, 0, 1, 1, 1}, 2},
        Plan{{0, 1, 1, 1, 0, 0, 0, 1, 1, 1}, 2},
    };
    return NegativeFixture{std::move(g), 2, ValidityConfig{0.2, std::nullopt}, eps,
                           std::move(theta), std::move(maps)};
}

NegativeDemoRow negative_demo_row(const NegativeFixture& fx, long long T, double delta, int trials,
                                  Rng& rng) {
    if (T < 1) throw std::invalid_argument("negative_demo_row: T must be >= 1");
    if (trials < 1) throw std::invalid_argument("negative_demo_row: trials must be >= 1");
    if (delta < 0.0 || delta > 1.0)
        throw std::invalid_argument("negative_demo_row: delta must lie in [0,1]");

    NegativeDemoRow row;
    row.T = T;
    row.delta = delta;
    row.expected_central_freq = 1.0 - std::pow(1.0 - delta, static_cast<double>(T));

    const std::size_t m = fx.maps.size();
    std::vector<double> probs(m, (1.0 - delta) / 3.0);
    probs.back() = delta;

    std::vector<std::vector<double>> dist(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            dist[i][j] = dist[j][i] = distance(fx.maps[i], fx.maps[j], fx.theta, fx.graph);

    // expected-distance handicap of every corner against the central plan
    double f_central = medoid_cost(fx.maps.back(), fx.maps, probs, fx.theta, fx.graph);
    row.margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < m; ++i)
        row.margin = std::min(row.margin,
                              medoid_cost(fx.maps[i], fx.maps, probs, fx.theta, fx.graph) - f_central);

    // exact population medoid over the full valid-plan enumeration
    std::vector<Plan> all = enumerate_valid_plans(fx.graph, fx.k, fx.cfg);
    std::vector<double> probs_all(all.size(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        auto it = std::find(all.begin(), all.end(), fx.maps[i]);
        if (it == all.end())
            throw std::runtime_error("negative_demo_row: fixture map missing from enumeration");
        probs_all[static_cast<std::size_t>(it - all.begin())] = probs[i];
    }
    CentroidMatrix pc = exact_population_centroid(fx.graph, fx.k, fx.cfg, probs_all);
    MedoidResult mr = exact_population_medoid(build_instance(pc, fx.theta, fx.graph, fx.k, fx.cfg));
    row.population_medoid_is_central = mr.plans.size() == 1 && mr.plans[0] == fx.maps.back();

    // cumulative thresholds: corners first, central plan last
    std::vector<double> cum(m);
    double run = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        run += probs[i];
        cum[i] = run;
    }
    cum.back() = 1.0;

    long long misses = 0, central_seen = 0;
    std::vector<long long> count(m);
    for (int trial = 0; trial < trials; ++trial) {
        std::fill(count.begin(), count.end(), 0);
        for (long long t = 0; t < T; ++t) {
            double u = rng.unit();
            std::size_t idx = 0;
            while (idx + 1 < m && u >= cum[idx]) ++idx;
            ++count[idx];
        }
        if (count.back() > 0) ++central_seen;
        std::size_t best = m;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            if (count[i] == 0) continue;
            double cost = 0.0;
            for (std::size_t j = 0; j < m; ++j) cost += static_cast<double>(count[j]) * dist[i][j];
            if (cost < best_cost) {
                best_cost = cost;
                best = i;
            }
        }
        if (best != m - 1) ++misses;
    }
    row.miss_freq = static_cast<double>(misses) / trials;
    row.central_sample_freq = static_cast<double>(central_seen) / trials;
    return row;
}

NegativeDemoReport negative_demo(std::uint64_t rng_seed, const std::vector<long long>& sizes,
                                 int trials) {
    NegativeFixture fx = negative_fixture();
    NegativeDemoReport report;
    report.trials = trials;
    Rng rng(rng_seed);
    for (long long T : sizes) {
        double delta = 1.0 - std::pow(2.0 / 3.0, 1.0 / static_cast<double>(T));
        report.rows.push_back(negative_demo_row(fx, T, delta, trials, rng));
    }
    return report;
}

}  // namespace dm
