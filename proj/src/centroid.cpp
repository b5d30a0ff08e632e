#include "dm/centroid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "dm/accum.hpp"
#include "dm/parallel.hpp"

namespace dm {

CentroidMatrix::CentroidMatrix(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("centroid: n must be positive");
}

std::size_t CentroidMatrix::support_size() const {
    if (!dense_mode_) return sparse_.size();
    std::size_t c = 0;
    for (long long v : dense_)
        if (v > 0) ++c;
    return c;
}

void CentroidMatrix::maybe_densify() {
    if (dense_mode_) return;
    if (sparse_.size() <= npairs() * 2 / 5) return;
    dense_.assign(npairs(), 0);
    for (const auto& [key, c] : sparse_)
        dense_[pair_index(pair_key_i(key), pair_key_j(key), n_)] = c;
    sparse_.clear();
    dense_mode_ = true;
    sorted_valid_ = false;
}

void CentroidMatrix::add_plan(const Plan& plan, long long multiplicity) {
    if (static_cast<int>(plan.assignment.size()) != n_)
        throw std::invalid_argument("centroid: plan does not match n");
    if (multiplicity < 1) throw std::invalid_argument("centroid: multiplicity must be positive");

    std::vector<std::vector<int>> members(plan.k);
    for (int i = 0; i < n_; ++i) members[plan.assignment[i]].push_back(i);

    for (const auto& mem : members)
        for (std::size_t x = 0; x < mem.size(); ++x)
            for (std::size_t y = x + 1; y < mem.size(); ++y) {
                if (dense_mode_)
                    dense_[pair_index(mem[x], mem[y], n_)] += multiplicity;
                else
                    sparse_[pair_key(mem[x], mem[y])] += multiplicity;
            }
    t_ += multiplicity;
    sorted_valid_ = false;
    maybe_densify();
}

void CentroidMatrix::merge_from(const CentroidMatrix& other) {
    if (other.n_ != n_) throw std::invalid_argument("centroid merge: n mismatch");
    if (other.dense_mode_ && !dense_mode_) {
        dense_.assign(npairs(), 0);
        for (const auto& [key, c] : sparse_)
            dense_[pair_index(pair_key_i(key), pair_key_j(key), n_)] = c;
        sparse_.clear();
        dense_mode_ = true;
    }
    if (dense_mode_) {
        if (other.dense_mode_) {
            for (std::size_t idx = 0; idx < dense_.size(); ++idx) dense_[idx] += other.dense_[idx];
        } else {
            for (const auto& [key, c] : other.sparse_)
                dense_[pair_index(pair_key_i(key), pair_key_j(key), n_)] += c;
        }
    } else {
        for (const auto& [key, c] : other.sparse_) sparse_[key] += c;
    }
    t_ += other.t_;
    sorted_valid_ = false;
    maybe_densify();
}

long long CentroidMatrix::count(int i, int j) const {
    if (i == j) throw std::invalid_argument("centroid: i == j");
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= n_) throw std::invalid_argument("centroid: pair index out of range");
    if (dense_mode_) return dense_[pair_index(i, j, n_)];
    auto it = sparse_.find(pair_key(i, j));
    return it == sparse_.end() ? 0 : it->second;
}

double CentroidMatrix::value(int i, int j) const {
    if (t_ == 0) throw std::invalid_argument("centroid: no plans accumulated");
    return static_cast<double>(count(i, j)) / static_cast<double>(t_);
}

void CentroidMatrix::finalize() const {
    if (dense_mode_ || sorted_valid_) return;
    sorted_.assign(sparse_.begin(), sparse_.end());
    std::sort(sorted_.begin(), sorted_.end());
    sorted_valid_ = true;
}

const std::vector<std::pair<std::uint64_t, long long>>& CentroidMatrix::sorted_support() const {
    finalize();
    return sorted_;
}

void CentroidMatrix::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write centroid file: " + path);
    out << "# n=" << n_ << " T=" << t_ << "\n";
    for_each([&](int i, int j, long long c) { out << i << "," << j << "," << c << "\n"; });
}

CentroidMatrix CentroidMatrix::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read centroid file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    int n;
    long long t;
    if (std::sscanf(line.c_str(), "# n=%d T=%lld", &n, &t) != 2)
        throw std::runtime_error(path + ":1: expected header \"# n=<n> T=<T>\"");
    if (n < 1 || t < 0) throw std::invalid_argument(path + ": bad header values");

    CentroidMatrix acc(n);
    acc.t_ = t;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        int i, j;
        long long c;
        if (std::sscanf(line.c_str(), "%d,%d,%lld", &i, &j, &c) != 3)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected i,j,count");
        if (i < 0 || j <= i || j >= n)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": pair must satisfy 0<=i<j<n");
        if (c <= 0 || c > t)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": count must be in (0, T]");
        if (!acc.sparse_.emplace(pair_key(i, j), c).second)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": duplicate pair");
    }
    acc.maybe_densify();
    return acc;
}

CentroidMatrix& accumulate(CentroidMatrix& acc, const Plan& plan) {
    acc.add_plan(plan);
    return acc;
}

CentroidMatrix merge(const CentroidMatrix& a, const CentroidMatrix& b) {
    CentroidMatrix out = a;
    out.merge_from(b);
    return out;
}

CentroidMatrix mixture_centroid(const std::vector<Plan>& plans, const std::vector<long long>& weights,
                                int n) {
    if (plans.size() != weights.size())
        throw std::invalid_argument("mixture_centroid: one weight per plan required");
    CentroidMatrix acc(n);
    for (std::size_t t = 0; t < plans.size(); ++t) {
        if (weights[t] < 0) throw std::invalid_argument("mixture_centroid: negative weight");
        if (weights[t] > 0) acc.add_plan(plans[t], weights[t]);
    }
    if (acc.samples() == 0) throw std::invalid_argument("mixture_centroid: zero total weight");
    return acc;
}

CentroidMatrix exact_population_centroid(const DualGraph& g, int k, const ValidityConfig& cfg,
                                         const std::vector<long long>& weights) {
    std::vector<Plan> plans = enumerate_valid_plans(g, k, cfg);
    if (plans.size() != weights.size())
        throw std::invalid_argument("exact_population_centroid: expected one weight per enumerated plan (" +
                                    std::to_string(plans.size()) + " plans)");
    return mixture_centroid(plans, weights, g.size());
}

CentroidMatrix exact_population_centroid(const DualGraph& g, int k, const ValidityConfig& cfg,
                                         const std::vector<double>& probabilities) {
    double mass = 0.0;
    for (double p : probabilities) {
        if (p < 0.0) throw std::invalid_argument("exact_population_centroid: negative probability");
        mass += p;
    }
    if (std::abs(mass - 1.0) > 1e-12)
        throw std::invalid_argument("exact_population_centroid: probabilities sum to " +
                                    std::to_string(mass) + ", expected 1");
    // fixed-denominator rationalization keeps counts integral; resolution 1e-12
    const double denom = 1e12;
    std::vector<long long> weights(probabilities.size());
    for (std::size_t t = 0; t < probabilities.size(); ++t)
        weights[t] = std::llround(probabilities[t] * denom);
    return exact_population_centroid(g, k, cfg, weights);
}

namespace {

void check_centroid_operand(const Plan& plan, const CentroidMatrix& acc, const ThetaWeights& w) {
    if (static_cast<int>(plan.assignment.size()) != acc.n())
        throw std::invalid_argument("distance_sq: plan does not match centroid n");
    if (w.n() != acc.n()) throw std::invalid_argument("distance_sq: theta does not match centroid n");
    if (acc.samples() == 0) throw std::invalid_argument("distance_sq: centroid has no plans");
}

double dense_plan_centroid_sq(const Plan& plan, const CentroidMatrix& acc, const ThetaWeights& w) {
    const int n = acc.n();
    const double T = static_cast<double>(acc.samples());
    const long long* cnt = acc.dense_counts()->data();
    const int* a = plan.assignment.data();
    PairwiseSum sum;
    if (w.factoring()) {
        for (int i = 0; i < n; ++i) {
            const double fi = w.factor(i);
            const long long* row = cnt + pair_index(i, i + 1, n);
            double part = 0.0;
            for (int j = i + 1; j < n; ++j) {
                double diff = static_cast<double>(a[i] == a[j]) -
                              static_cast<double>(row[j - i - 1]) / T;
                part += fi * w.factor(j) * diff * diff;
            }
            sum.add(part);
        }
    } else {
        const double* th = w.packed();
        for (int i = 0; i < n; ++i) {
            const std::size_t base = pair_index(i, i + 1, n);
            const long long* row = cnt + base;
            const double* trow = th + base;
            double part = 0.0;
            for (int j = i + 1; j < n; ++j) {
                double diff = static_cast<double>(a[i] == a[j]) -
                              static_cast<double>(row[j - i - 1]) / T;
                part += trow[j - i - 1] * diff * diff;
            }
            sum.add(part);
        }
    }
    return sum.total();
}

}  // namespace

double distance_sq(const Plan& plan, const CentroidMatrix& acc, const ThetaWeights& w) {
    check_centroid_operand(plan, acc, w);
    if (acc.dense_counts()) return dense_plan_centroid_sq(plan, acc, w);

    const double T = static_cast<double>(acc.samples());
    const int* a = plan.assignment.data();
    PairwiseSum sum;
    // support part: theta * (A - c)^2 over stored pairs
    for (const auto& [key, c] : acc.sorted_support()) {
        const int i = pair_key_i(key);
        const int j = pair_key_j(key);
        double diff = static_cast<double>(a[i] == a[j]) - static_cast<double>(c) / T;
        sum.add(w.at(i, j) * diff * diff);
    }
    // remainder: same-district pairs of the plan the support never saw
    // (c = 0 there, contribution theta * 1); iterating them directly keeps
    // d^2 exactly zero when the plan matches a point-mass centroid
    std::vector<std::vector<int>> members(plan.k);
    for (int i = 0; i < acc.n(); ++i) members[a[i]].push_back(i);
    for (const auto& mem : members) {
        double part = 0.0;
        for (std::size_t x = 0; x < mem.size(); ++x)
            for (std::size_t y = x + 1; y < mem.size(); ++y)
                if (!acc.contains(mem[x], mem[y])) part += w.at(mem[x], mem[y]);
        sum.add(part);
    }
    return sum.total();
}

double distance_sq(const CentroidMatrix& a, const CentroidMatrix& b, const ThetaWeights& w) {
    if (a.n() != b.n()) throw std::invalid_argument("distance_sq: centroid n mismatch");
    if (w.n() != a.n()) throw std::invalid_argument("distance_sq: theta does not match centroid n");
    if (a.samples() == 0 || b.samples() == 0)
        throw std::invalid_argument("distance_sq: centroid has no plans");

    const double ta = static_cast<double>(a.samples());
    const double tb = static_cast<double>(b.samples());
    PairwiseSum sum;
    if (a.dense_counts() || b.dense_counts()) {
        const int n = a.n();
        for (int i = 0; i < n; ++i) {
            double part = 0.0;
            for (int j = i + 1; j < n; ++j) {
                double diff = static_cast<double>(a.count(i, j)) / ta -
                              static_cast<double>(b.count(i, j)) / tb;
                if (diff != 0.0) part += w.at(i, j) * diff * diff;
            }
            sum.add(part);
        }
        return sum.total();
    }
    // both sparse: merge-walk the sorted supports
    const auto& sa = a.sorted_support();
    const auto& sb = b.sorted_support();
    std::size_t x = 0, y = 0;
    while (x < sa.size() || y < sb.size()) {
        std::uint64_t key;
        double ca = 0.0, cb = 0.0;
        if (y == sb.size() || (x < sa.size() && sa[x].first <= sb[y].first)) {
            key = sa[x].first;
            ca = static_cast<double>(sa[x].second) / ta;
            ++x;
            if (y < sb.size() && sb[y].first == key) {
                cb = static_cast<double>(sb[y].second) / tb;
                ++y;
            }
        } else {
            key = sb[y].first;
            cb = static_cast<double>(sb[y].second) / tb;
            ++y;
        }
        const double diff = ca - cb;
        sum.add(w.at(pair_key_i(key), pair_key_j(key)) * diff * diff);
    }
    return sum.total();
}

double distance(const Plan& p1, const Plan& p2, const ThetaWeights& w) {
    if (p1.assignment.size() != p2.assignment.size() ||
        static_cast<int>(p1.assignment.size()) != w.n())
        throw std::invalid_argument("distance: operand sizes do not match theta");
    const int n = w.n();
    const int* a = p1.assignment.data();
    const int* b = p2.assignment.data();
    PairwiseSum sum;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = i + 1; j < n; ++j)
            if ((a[i] == a[j]) != (b[i] == b[j])) row += w.at(i, j);
        sum.add(row);
    }
    return sum.total();
}

double distance_sq(const Plan& p1, const Plan& p2, const ThetaWeights& w) {
    if (p1.assignment.size() != p2.assignment.size() ||
        static_cast<int>(p1.assignment.size()) != w.n())
        throw std::invalid_argument("distance_sq: operand sizes do not match theta");
    const int n = w.n();
    const int* a = p1.assignment.data();
    const int* b = p2.assignment.data();
    PairwiseSum sum;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = i + 1; j < n; ++j) {
            double diff = static_cast<double>(a[i] == a[j]) - static_cast<double>(b[i] == b[j]);
            row += w.at(i, j) * diff * diff;
        }
        sum.add(row);
    }
    return sum.total();
}

SampleMedoid sample_medoid(const std::vector<Plan>& ensemble, const CentroidMatrix& acc,
                           const ThetaWeights& w) {
    if (ensemble.empty()) throw std::invalid_argument("sample_medoid: empty ensemble");
    std::vector<double> d2 = batch_distance_sq(ensemble, acc, w);
    std::size_t best = 0;
    for (std::size_t t = 1; t < d2.size(); ++t)
        if (d2[t] < d2[best]) best = t;  // strict: ties keep the earliest index
    return {ensemble[best], best, d2[best]};
}

DecompositionCheck decomposition_check(const std::vector<Plan>& ensemble, const CentroidMatrix& acc,
                                       const Plan& probe, const ThetaWeights& w) {
    DecompositionCheck out;
    PairwiseSum lhs;
    for (const Plan& p : ensemble) lhs.add(distance(p, probe, w));
    PairwiseSum spread;
    for (const Plan& p : ensemble) spread.add(distance_sq(p, acc, w));
    out.lhs = lhs.total();
    out.rhs = spread.total() +
              static_cast<double>(ensemble.size()) * distance_sq(probe, acc, w);
    double denom = std::max({std::abs(out.lhs), std::abs(out.rhs), 1e-12});
    out.residual = std::abs(out.lhs - out.rhs) / denom;
    return out;
}

double mean_spread(const std::vector<Plan>& ensemble, const CentroidMatrix& acc,
                   const ThetaWeights& w) {
    if (ensemble.empty()) throw std::invalid_argument("mean_spread: empty ensemble");
    PairwiseSum sum;
    for (const Plan& p : ensemble) sum.add(distance_sq(p, acc, w));
    return sum.total() / static_cast<double>(ensemble.size());
}

double centroid_sq_mass(const CentroidMatrix& acc, const ThetaWeights& w) {
    if (w.n() != acc.n()) throw std::invalid_argument("centroid_sq_mass: theta n mismatch");
    const double T = static_cast<double>(acc.samples());
    PairwiseSum sum;
    acc.for_each([&](int i, int j, long long c) {
        const double v = static_cast<double>(c) / T;
        sum.add(w.at(i, j) * v * v);
    });
    return sum.total();
}

double mean_spread_streamed(double total_plan_mass, const CentroidMatrix& acc,
                            const ThetaWeights& w) {
    if (acc.samples() == 0) throw std::invalid_argument("mean_spread_streamed: empty centroid");
    const double T = static_cast<double>(acc.samples());
    return (total_plan_mass - T * centroid_sq_mass(acc, w)) / T;
}

double avg_ensemble_distance(const Plan& probe, const CentroidMatrix& acc, double mean_spread,
                             const ThetaWeights& w) {
    return distance_sq(probe, acc, w) + mean_spread;
}

long long required_samples(double epsilon, double delta, int n) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("required_samples: epsilon must be positive");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("required_samples: delta must be in (0,1)");
    if (n < 2) throw std::invalid_argument("required_samples: n must be at least 2");
    double t = std::ceil(std::log(n / delta) / (epsilon * epsilon));
    return std::max(1LL, static_cast<long long>(t));
}

long long required_samples_dsq(double epsilon, double delta, int n, double kappa) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("required_samples_dsq: epsilon must be positive");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("required_samples_dsq: delta must be in (0,1)");
    if (n < 2) throw std::invalid_argument("required_samples_dsq: n must be at least 2");
    if (!(kappa > 0.0)) throw std::invalid_argument("required_samples_dsq: kappa must be positive");
    double t = std::ceil(kappa * n * static_cast<double>(n) / epsilon * std::log(n / delta));
    return std::max(1LL, static_cast<long long>(t));
}

}  // namespace dm
