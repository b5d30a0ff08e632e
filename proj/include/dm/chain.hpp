#pragma once
#include <cstdint>
#include <functional>
#include <vector>

#include "dm/centroid.hpp"
#include "dm/districting.hpp"
#include "dm/graph.hpp"
#include "dm/rng.hpp"
#include "dm/theta.hpp"

namespace dm {

// a chain stalls after this many consecutive rejected proposals; run_chain
// treats it as an error, the hill-climb modes treat it as convergence
constexpr int kStallLimit = 10000;

enum class AcceptKind { Any, CloserToCentroid, FartherFromCentroid };

struct AcceptRule {
    AcceptKind kind = AcceptKind::Any;
    const CentroidMatrix* centroid = nullptr;  // required for the directed kinds
    const ThetaWeights* weights = nullptr;

    static AcceptRule any() { return {}; }
    static AcceptRule closer(const CentroidMatrix& c, const ThetaWeights& w) {
        return {AcceptKind::CloserToCentroid, &c, &w};
    }
    static AcceptRule farther(const CentroidMatrix& c, const ThetaWeights& w) {
        return {AcceptKind::FartherFromCentroid, &c, &w};
    }
};

// Recombination-chain cursor. `current` always satisfies is_valid; `step`
// counts proposals, `accepted` counts transitions.
struct ChainState {
    Plan current;
    int k = 0;
    long long step = 0;
    long long accepted = 0;
    int consecutive_rejections = 0;
    Rng rng;
    ValidityConfig cfg;
    AcceptRule accept;
    double current_d2 = 0.0;  // maintained only for directed accept rules

    ChainState(Plan start, int k_, ValidityConfig cfg_, std::uint64_t rng_seed,
               AcceptRule rule = AcceptRule::any());
};

// One recombination proposal: merge the two districts astride a uniformly
// random cut edge, redraw a uniform spanning tree of the merged region, and
// split at a uniformly chosen population-balanced tree edge. Returns whether
// the proposal was accepted (and applied). Exactly one proposal per call, so
// acceptance counting is unambiguous.
bool recom_step(ChainState& state, const DualGraph& g);

using PlanSink = std::function<void(const Plan& plan, long long kept_index, long long accepted_step)>;

// Runs the chain for `total_steps` accepted transitions, streaming every
// `thin`-th accepted plan after `burn_in` into the sink. Throws on stall.
void run_chain(const DualGraph& g, int k, const ValidityConfig& cfg, const Plan& start,
               std::uint64_t rng_seed, long long total_steps, long long burn_in, long long thin,
               const PlanSink& sink);

// in-memory convenience wrapper
std::vector<Plan> run_chain_collect(const DualGraph& g, int k, const ValidityConfig& cfg,
                                    const Plan& start, std::uint64_t rng_seed, long long total_steps,
                                    long long burn_in = 2000, long long thin = 1);

struct RefineResult {
    Plan plan;
    std::vector<double> trajectory;  // d^2 after each accepted move, starting value first
};

// Hill-climb toward the centroid: recom steps accepted only when they
// strictly decrease d^2. Stalling is convergence, not failure.
RefineResult refine_medoid(const Plan& start, const CentroidMatrix& centroid, const ThetaWeights& w,
                           const DualGraph& g, const ValidityConfig& cfg, std::uint64_t rng_seed,
                           long long steps);

// mirror image of refine_medoid: accepts only strictly d^2-increasing moves;
// synthesizes an atypical plan for outlier-detection experiments
Plan plant_outlier(const Plan& start, const CentroidMatrix& centroid, const ThetaWeights& w,
                   const DualGraph& g, const ValidityConfig& cfg, std::uint64_t rng_seed,
                   long long steps);

}  // namespace dm
