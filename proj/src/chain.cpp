#include "dm/chain.hpp"

#include <algorithm>
#include <stdexcept>

#include "spantree.hpp"

namespace dm {

ChainState::ChainState(Plan start, int k_, ValidityConfig cfg_, std::uint64_t rng_seed,
                       AcceptRule rule)
    : current(std::move(start)), k(k_), rng(rng_seed), cfg(cfg_), accept(rule) {
    if (accept.kind != AcceptKind::Any) {
        if (!accept.centroid || !accept.weights)
            throw std::invalid_argument("chain: directed accept rule needs centroid and weights");
        current_d2 = distance_sq(current, *accept.centroid, *accept.weights);
    }
}

namespace {

bool reject(ChainState& st) {
    ++st.consecutive_rejections;
    return false;
}

}  // namespace

bool recom_step(ChainState& st, const DualGraph& g) {
    ++st.step;
    const Plan& cur = st.current;

    std::vector<std::pair<int, int>> cuts;
    for (const auto& [a, b] : g.edges())
        if (cur.assignment[a] != cur.assignment[b]) cuts.push_back({a, b});
    if (cuts.empty()) return reject(st);  // k == 1: nothing to recombine

    const auto [ea, eb] = cuts[st.rng.index(cuts.size())];
    const int d1 = cur.assignment[ea];
    const int d2 = cur.assignment[eb];

    std::vector<int> region;
    for (int i = 0; i < g.size(); ++i)
        if (cur.assignment[i] == d1 || cur.assignment[i] == d2) region.push_back(i);

    detail::RegionTree tree = detail::wilson_tree(g, region, st.rng);
    double region_pop = 0.0;
    for (int u : region) region_pop += g.pop(u);

    const double ideal = g.total_pop() / st.k;
    const double lo = (1.0 - st.cfg.pop_tolerance) * ideal;
    const double hi = (1.0 + st.cfg.pop_tolerance) * ideal;
    std::vector<int> cands = detail::balanced_edges(tree, lo, hi, region_pop);
    if (cands.empty()) return reject(st);

    const int cut = cands[st.rng.index(cands.size())];
    std::vector<int> side = detail::subtree_vertices(tree, cut);

    Plan proposal = cur;
    for (int u : region) proposal.assignment[u] = d2;
    for (int u : side) proposal.assignment[u] = d1;
    proposal = canonicalize(proposal);

    if (st.cfg.max_cut_edges && cut_edges(proposal, g) > *st.cfg.max_cut_edges) return reject(st);

    double proposal_d2 = 0.0;
    switch (st.accept.kind) {
        case AcceptKind::Any: break;
        case AcceptKind::CloserToCentroid:
            proposal_d2 = distance_sq(proposal, *st.accept.centroid, *st.accept.weights);
            if (!(proposal_d2 < st.current_d2)) return reject(st);
            break;
        case AcceptKind::FartherFromCentroid:
            proposal_d2 = distance_sq(proposal, *st.accept.centroid, *st.accept.weights);
            if (!(proposal_d2 > st.current_d2)) return reject(st);
            break;
    }

    st.current = std::move(proposal);
    st.current_d2 = proposal_d2;
    ++st.accepted;
    st.consecutive_rejections = 0;
    return true;
}

void run_chain(const DualGraph& g, int k, const ValidityConfig& cfg, const Plan& start,
               std::uint64_t rng_seed, long long total_steps, long long burn_in, long long thin,
               const PlanSink& sink) {
    if (burn_in < 0 || thin < 1) throw std::invalid_argument("run_chain: bad burn_in/thin");
    if (burn_in >= total_steps)
        throw std::invalid_argument("run_chain: burn_in must be below total_steps");
    Validity v = is_valid(start, g, cfg);
    if (!v.ok) throw std::invalid_argument("run_chain: start plan is invalid (" + v.rule + ")");

    ChainState st(canonicalize(start), k, cfg, rng_seed);
    long long kept = 0;
    while (st.accepted < total_steps) {
        if (recom_step(st, g)) {
            if (st.accepted > burn_in && (st.accepted - burn_in - 1) % thin == 0)
                sink(st.current, kept++, st.accepted);
        } else if (st.consecutive_rejections >= kStallLimit) {
            throw std::runtime_error("chain stalled: " + std::to_string(kStallLimit) +
                                     " consecutive rejections after " +
                                     std::to_string(st.accepted) + " accepted steps");
        }
    }
}

std::vector<Plan> run_chain_collect(const DualGraph& g, int k, const ValidityConfig& cfg,
                                    const Plan& start, std::uint64_t rng_seed,
                                    long long total_steps, long long burn_in, long long thin) {
    std::vector<Plan> out;
    run_chain(g, k, cfg, start, rng_seed, total_steps, burn_in, thin,
              [&](const Plan& p, long long, long long) { out.push_back(p); });
    return out;
}

namespace {

// shared loop for the two directed modes; stall means no improving neighbor
// was found in kStallLimit proposals, which is as converged as the proposal
// kernel can certify
ChainState climb(const Plan& start, const DualGraph& g, const ValidityConfig& cfg,
                 std::uint64_t rng_seed, long long steps, AcceptRule rule,
                 std::vector<double>* trajectory) {
    Validity v = is_valid(start, g, cfg);
    if (!v.ok) throw std::invalid_argument("climb: start plan is invalid (" + v.rule + ")");
    ChainState st(canonicalize(start), start.k, cfg, rng_seed, rule);
    if (trajectory) trajectory->push_back(st.current_d2);
    while (st.accepted < steps && st.consecutive_rejections < kStallLimit) {
        if (recom_step(st, g) && trajectory) trajectory->push_back(st.current_d2);
    }
    return st;
}

}  // namespace

RefineResult refine_medoid(const Plan& start, const CentroidMatrix& centroid, const ThetaWeights& w,
                           const DualGraph& g, const ValidityConfig& cfg, std::uint64_t rng_seed,
                           long long steps) {
    RefineResult out;
    ChainState st =
        climb(start, g, cfg, rng_seed, steps, AcceptRule::closer(centroid, w), &out.trajectory);
    out.plan = std::move(st.current);
    return out;
}

Plan plant_outlier(const Plan& start, const CentroidMatrix& centroid, const ThetaWeights& w,
                   const DualGraph& g, const ValidityConfig& cfg, std::uint64_t rng_seed,
                   long long steps) {
    ChainState st = climb(start, g, cfg, rng_seed, steps, AcceptRule::farther(centroid, w), nullptr);
    return std::move(st.current);
}

}  // namespace dm
