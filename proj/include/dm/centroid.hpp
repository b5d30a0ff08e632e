#pragma once
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dm/districting.hpp"
#include "dm/graph.hpp"
#include "dm/metric.hpp"
#include "dm/theta.hpp"

namespace dm {

// Streaming mean co-membership matrix over an ensemble of plans. Entry (i,j)
// is count/T: the fraction of accumulated plans that put units i and j in the
// same district. Counts stay integers and are divided only at read time, so
// merging shards is exact and associative. Storage starts as a sparse map
// over pairs that ever co-districted and switches to a packed upper-triangle
// array once the support exceeds 40% of n(n-1)/2 (tiny graphs saturate;
// chain ensembles on large grids stay sparse much longer).
class CentroidMatrix {
public:
    explicit CentroidMatrix(int n);

    int n() const { return n_; }
    long long samples() const { return t_; }  // T
    bool dense() const { return dense_mode_; }
    std::size_t support_size() const;

    void add_plan(const Plan& plan, long long multiplicity = 1);
    void merge_from(const CentroidMatrix& other);

    long long count(int i, int j) const;
    double value(int i, int j) const;  // count/T

    // deterministic ascending-(i,j) pass over nonzero entries, f(i, j, count)
    template <typename F>
    void for_each(F&& f) const {
        if (dense_mode_) {
            for (int i = 0; i < n_; ++i) {
                std::size_t base = pair_index(i, i + 1, n_);
                for (int j = i + 1; j < n_; ++j) {
                    long long c = dense_[base + (j - i - 1)];
                    if (c > 0) f(i, j, c);
                }
            }
        } else {
            finalize();
            for (const auto& [key, c] : sorted_) f(pair_key_i(key), pair_key_j(key), c);
        }
    }

    // builds the sparse-mode sorted cache; call before concurrent reads
    // (lazy rebuilds are not thread-safe)
    void finalize() const;

    void save(const std::string& path) const;
    static CentroidMatrix load(const std::string& path);

    // raw views for the batch kernels; dense_counts() is null in sparse mode
    const std::vector<long long>* dense_counts() const { return dense_mode_ ? &dense_ : nullptr; }
    const std::vector<std::pair<std::uint64_t, long long>>& sorted_support() const;
    bool contains(int i, int j) const { return count(i, j) > 0; }

private:
    void maybe_densify();
    std::size_t npairs() const { return static_cast<std::size_t>(n_) * (n_ - 1) / 2; }

    int n_ = 0;
    long long t_ = 0;
    bool dense_mode_ = false;
    std::unordered_map<std::uint64_t, long long> sparse_;
    std::vector<long long> dense_;
    mutable std::vector<std::pair<std::uint64_t, long long>> sorted_;
    mutable bool sorted_valid_ = false;
};

CentroidMatrix& accumulate(CentroidMatrix& acc, const Plan& plan);
CentroidMatrix merge(const CentroidMatrix& a, const CentroidMatrix& b);

// exact mixture centroid: counts are integer-weighted sums of co-memberships,
// T is the weight total, so rational mixtures stay exact
CentroidMatrix mixture_centroid(const std::vector<Plan>& plans, const std::vector<long long>& weights,
                                int n);

// population centroid over the enumerated valid plans of (g, k, cfg), one
// probability (or integer weight) per plan in enumeration order
CentroidMatrix exact_population_centroid(const DualGraph& g, int k, const ValidityConfig& cfg,
                                         const std::vector<double>& probabilities);
CentroidMatrix exact_population_centroid(const DualGraph& g, int k, const ValidityConfig& cfg,
                                         const std::vector<long long>& weights);

// d^2 against a fractional centroid: theta-weighted squared differences over
// the centroid support plus the plan's same-district mass outside it. Exactly
// zero when the plan matches a point-mass centroid.
double distance_sq(const Plan& plan, const CentroidMatrix& acc, const ThetaWeights& w);
double distance_sq(const CentroidMatrix& a, const CentroidMatrix& b, const ThetaWeights& w);

// g-less plan variants (the operand sizes are pinned by the weights);
// metric.hpp declares the graph-checked forms
double distance(const Plan& p1, const Plan& p2, const ThetaWeights& w);
double distance_sq(const Plan& p1, const Plan& p2, const ThetaWeights& w);

struct SampleMedoid {
    Plan plan;
    std::size_t index = 0;
    double d2 = 0.0;
};

// Linear-time sample medoid: the ensemble plan closest to the centroid in
// d^2. One pass, ties broken by earliest index. By the decomposition
// identity this equals the argmin of summed pairwise distances.
SampleMedoid sample_medoid(const std::vector<Plan>& ensemble, const CentroidMatrix& acc,
                           const ThetaWeights& w);

struct DecompositionCheck {
    double lhs = 0.0;       // sum_t d(A_t, probe)
    double rhs = 0.0;       // sum_t d^2(A_t, acc) + T * d^2(acc, probe)
    double residual = 0.0;  // |lhs-rhs| / max(|lhs|, |rhs|, 1e-12)
};

DecompositionCheck decomposition_check(const std::vector<Plan>& ensemble, const CentroidMatrix& acc,
                                       const Plan& probe, const ThetaWeights& w);

// (1/T) sum_t d^2(A_t, acc): second pass over the ensemble
double mean_spread(const std::vector<Plan>& ensemble, const CentroidMatrix& acc,
                   const ThetaWeights& w);
// streamed variant: total_plan_mass = sum_t plan_theta_mass(A_t, w), tracked
// during accumulation; identical to the second pass up to rounding
double mean_spread_streamed(double total_plan_mass, const CentroidMatrix& acc,
                            const ThetaWeights& w);
// sum over the support of theta * c^2
double centroid_sq_mass(const CentroidMatrix& acc, const ThetaWeights& w);

// (1/T) sum_t d(probe, A_t) via the decomposition: d^2(probe, acc) + mean_spread
double avg_ensemble_distance(const Plan& probe, const CentroidMatrix& acc, double mean_spread,
                             const ThetaWeights& w);

// Hoeffding sample sizes: ceil((1/eps^2) ln(n/delta)) plans give every
// centroid entry error <= eps with probability >= 1-delta; the _dsq variant
// ceil((kappa n^2 / eps) ln(n/delta)) controls d^2 against the centroid
long long required_samples(double epsilon, double delta, int n);
long long required_samples_dsq(double epsilon, double delta, int n, double kappa);

}  // namespace dm
