#pragma once
#include <string>
#include <vector>

#include "dm/graph.hpp"

namespace dm {

enum class ThetaKind { Unweighted, PopulationProduct, PathDecay, Explicit };

// The pair-weight family parameterizing the distance: theta(i,j) > 0 for all
// i != j, symmetric. Self-pairs never contribute to any distance; theta(i,i)
// is fixed to 1 by convention and querying it is an error. Construction binds
// whatever the kind needs from the graph (populations, BFS hop counts), so
// lookups are pure and cheap afterwards.
class ThetaWeights {
public:
    static ThetaWeights unweighted(const DualGraph& g);
    static ThetaWeights population_product(const DualGraph& g);
    static ThetaWeights path_decay(const DualGraph& g, double rate);
    // packed upper triangle, pair_index order; all entries required positive
    static ThetaWeights explicit_matrix(const DualGraph& g, std::vector<double> upper);
    static ThetaWeights load_explicit(const DualGraph& g, const std::string& path);

    ThetaKind kind() const { return kind_; }
    double rate() const { return rate_; }
    int n() const { return n_; }
    double kappa() const { return kappa_; }  // max over i != j of sqrt(theta)

    // CLI spelling of this instance: unweighted | pop | pathdecay:<rate> | explicit
    std::string label() const;

    // factoring kinds (Unweighted, PopulationProduct) admit the per-vertex
    // shortcut theta(i,j) = factor(i) * factor(j)
    bool factoring() const {
        return kind_ == ThetaKind::Unweighted || kind_ == ThetaKind::PopulationProduct;
    }
    double factor(int i) const { return kind_ == ThetaKind::Unweighted ? 1.0 : pops_[i]; }

    // packed upper triangle (pair_index order) for PathDecay/Explicit, else null
    const double* packed() const { return upper_.empty() ? nullptr : upper_.data(); }

    double at(int i, int j) const;

    void save_explicit(const std::string& path) const;

private:
    ThetaWeights() = default;

    ThetaKind kind_ = ThetaKind::Unweighted;
    int n_ = 0;
    double rate_ = 0.0;
    double kappa_ = 1.0;
    std::vector<double> pops_;   // PopulationProduct
    std::vector<double> upper_;  // PathDecay (precomputed), Explicit
};

// [i != j] pair weight; g passed to pin the operand graph's size
double theta(const ThetaWeights& w, const DualGraph& g, int i, int j);

}  // namespace dm
