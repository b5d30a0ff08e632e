#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "dm/centroid.hpp"
#include "dm/districting.hpp"
#include "dm/graph.hpp"
#include "dm/rng.hpp"
#include "dm/theta.hpp"

namespace dm {

// The population-medoid problem rewritten over pair weights. With
// s(i,j) = 1/2 theta(i,j) (1 - 2c(i,j)) and B(i,j) = 1 iff a plan separates
// i and j, maximizing the ordered-pair sum of s*B over valid plans is the
// same problem as minimizing d^2(plan, centroid): the two objectives add up
// to a plan-independent constant. s is sign-indefinite, in [-theta/2, theta/2].
struct KCutInstance {
    DualGraph graph;
    int k = 0;
    ValidityConfig cfg;
    std::vector<double> s;  // packed upper triangle, pair_index order
};

KCutInstance build_instance(const CentroidMatrix& centroid, const ThetaWeights& w,
                            const DualGraph& g, int k, const ValidityConfig& cfg);

// ordered-pair objective: sum over i != j of s(i,j) B(i,j), i.e. twice the
// unordered cut sum
double cut_objective(const KCutInstance& inst, const Plan& plan);

struct MedoidResult {
    std::vector<Plan> plans;  // every maximizer, enumeration order
    double objective = 0.0;
};

// exact solve by exhaustive enumeration (n <= 16 guard inside); ties kept to
// a 1e-12 relative band
MedoidResult exact_population_medoid(const KCutInstance& inst);

void save_instance(const KCutInstance& inst, const std::string& path);
KCutInstance load_instance(const std::string& path, const DualGraph& g, const ValidityConfig& cfg);

// Hand-built 10-unit instance where sampling is misleading by construction:
// three mutually far plans carry almost all probability mass around one
// central low-probability plan that is nevertheless the exact population
// medoid. maps[0..2] are the far "corners", maps[3] the central plan. Light
// units (0..3) have population 1/2 and near-zero pairwise weight eps; the
// rest weigh 1.
struct NegativeFixture {
    DualGraph graph;
    int k;
    ValidityConfig cfg;
    double eps;
    ThetaWeights theta;
    std::vector<Plan> maps;
};

NegativeFixture negative_fixture();

struct NegativeDemoRow {
    long long T = 0;
    double delta = 0.0;   // central-plan probability
    double margin = 0.0;  // min over corners of f(corner) - f(central), f = expected distance
    bool population_medoid_is_central = false;  // exact solver returns exactly the central plan
    double miss_freq = 0.0;             // fraction of trials whose sample medoid is not central
    double central_sample_freq = 0.0;   // fraction of trials that drew the central plan at all
    double expected_central_freq = 0.0; // 1 - (1-delta)^T
};

struct NegativeDemoReport {
    std::vector<NegativeDemoRow> rows;
    int trials = 0;
};

// one simulated row at an explicit delta; draws `trials` iid T-sample
// ensembles from (corner, corner, corner, central) with probabilities
// ((1-delta)/3 x3, delta) and takes each ensemble's medoid over the drawn
// multiset, earliest index on ties
NegativeDemoRow negative_demo_row(const NegativeFixture& fx, long long T, double delta, int trials,
                                  Rng& rng);

// the headline demonstration: delta = 1 - (2/3)^(1/T) makes the central plan
// absent from the whole sample with probability exactly 2/3, so the sample
// medoid misses the population medoid at least that often no matter how
// large T grows
NegativeDemoReport negative_demo(std::uint64_t rng_seed,
                                 const std::vector<long long>& sizes = {10, 100, 1000},
                                 int trials = 2000);

}  // namespace dm
