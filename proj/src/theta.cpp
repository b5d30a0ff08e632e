#include "dm/theta.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dm {

namespace {

double packed_max_sqrt(const std::vector<double>& upper) {
    double m = 0.0;
    for (double v : upper) m = std::max(m, v);
    return std::sqrt(m);
}

}  // namespace

ThetaWeights ThetaWeights::unweighted(const DualGraph& g) {
    ThetaWeights w;
    w.kind_ = ThetaKind::Unweighted;
    w.n_ = g.size();
    w.kappa_ = 1.0;
    return w;
}

ThetaWeights ThetaWeights::population_product(const DualGraph& g) {
    ThetaWeights w;
    w.kind_ = ThetaKind::PopulationProduct;
    w.n_ = g.size();
    w.pops_.resize(g.size());
    for (int i = 0; i < g.size(); ++i) w.pops_[i] = g.pop(i);
    // largest product comes from the two largest populations
    std::vector<double> sorted = w.pops_;
    std::sort(sorted.begin(), sorted.end());
    w.kappa_ = sorted.size() >= 2 ? std::sqrt(sorted[sorted.size() - 1] * sorted[sorted.size() - 2])
                                  : 1.0;
    return w;
}

ThetaWeights ThetaWeights::path_decay(const DualGraph& g, double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("path_decay: rate must be positive");
    ThetaWeights w;
    w.kind_ = ThetaKind::PathDecay;
    w.n_ = g.size();
    w.rate_ = rate;
    auto hops = shortest_path_lengths(g);
    const int n = g.size();
    w.upper_.resize(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            w.upper_[pair_index(i, j, n)] = std::exp(-rate * hops[i][j]);
    w.kappa_ = packed_max_sqrt(w.upper_);
    return w;
}

ThetaWeights ThetaWeights::explicit_matrix(const DualGraph& g, std::vector<double> upper) {
    const int n = g.size();
    if (upper.size() != static_cast<std::size_t>(n) * (n - 1) / 2)
        throw std::invalid_argument("explicit theta: expected n(n-1)/2 entries");
    for (double v : upper)
        if (!(v > 0.0)) throw std::invalid_argument("explicit theta: all weights must be positive");
    ThetaWeights w;
    w.kind_ = ThetaKind::Explicit;
    w.n_ = n;
    w.upper_ = std::move(upper);
    w.kappa_ = packed_max_sqrt(w.upper_);
    return w;
}

ThetaWeights ThetaWeights::load_explicit(const DualGraph& g, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read theta file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# n=", 0) != 0)
        throw std::runtime_error(path + ": expected header \"# n=<n>\"");
    int n;
    try {
        n = std::stoi(line.substr(4));
    } catch (const std::exception&) {
        throw std::runtime_error(path + ": bad n in header");
    }
    if (n != g.size())
        throw std::invalid_argument(path + ": n=" + std::to_string(n) + " does not match graph size " +
                                    std::to_string(g.size()));

    std::vector<double> upper(static_cast<std::size_t>(n) * (n - 1) / 2, -1.0);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        int i, j;
        double v;
        if (std::sscanf(line.c_str(), "%d,%d,%lf", &i, &j, &v) != 3)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected i,j,theta");
        if (i < 0 || j <= i || j >= n)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": pair must satisfy 0<=i<j<n");
        std::size_t idx = pair_index(i, j, n);
        if (upper[idx] >= 0.0)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": duplicate pair");
        if (!(v > 0.0))
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": theta must be positive");
        upper[idx] = v;
    }
    for (std::size_t idx = 0; idx < upper.size(); ++idx)
        if (upper[idx] < 0.0) throw std::invalid_argument(path + ": missing pairs (all i<j required)");
    return explicit_matrix(g, std::move(upper));
}

void ThetaWeights::save_explicit(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write theta file: " + path);
    out << "# n=" << n_ << "\n";
    char buf[64];
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", at(i, j));
            out << i << "," << j << "," << buf << "\n";
        }
}

std::string ThetaWeights::label() const {
    switch (kind_) {
        case ThetaKind::Unweighted: return "unweighted";
        case ThetaKind::PopulationProduct: return "pop";
        case ThetaKind::PathDecay: {
            std::ostringstream os;
            os << "pathdecay:" << rate_;
            return os.str();
        }
        case ThetaKind::Explicit: return "explicit";
    }
    return "unweighted";
}

double ThetaWeights::at(int i, int j) const {
    if (i == j) throw std::invalid_argument("theta: i == j (self-pairs never enter the distance)");
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= n_) throw std::invalid_argument("theta: pair index out of range");
    switch (kind_) {
        case ThetaKind::Unweighted: return 1.0;
        case ThetaKind::PopulationProduct: return pops_[i] * pops_[j];
        case ThetaKind::PathDecay:
        case ThetaKind::Explicit: return upper_[pair_index(i, j, n_)];
    }
    return 1.0;
}

double theta(const ThetaWeights& w, const DualGraph& g, int i, int j) {
    if (w.n() != g.size()) throw std::invalid_argument("theta: weights built for a different graph");
    return w.at(i, j);
}

}  // namespace dm
