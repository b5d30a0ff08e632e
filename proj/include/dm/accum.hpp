#pragma once
#include <cstdint>
#include <vector>

namespace dm {

// Pairwise (binary-counter) summation: one partial sum per bit of the item
// count, so rounding error grows like O(log T) instead of O(T). Distance
// totals sit three or more orders of magnitude above centroid residuals, so
// naive accumulation would eat the digits the residual checks need.
class PairwiseSum {
public:
    void add(double x) {
        std::size_t level = 0;
        std::uint64_t c = count_;
        while (c & 1u) {
            x += slots_[level];
            slots_[level] = 0.0;
            c >>= 1;
            ++level;
        }
        if (level == slots_.size())
            slots_.push_back(x);
        else
            slots_[level] = x;
        ++count_;
    }

    double total() const {
        double s = 0.0;
        for (double v : slots_) s += v;
        return s;
    }

    std::uint64_t count() const { return count_; }

private:
    std::vector<double> slots_;
    std::uint64_t count_ = 0;
};

}  // namespace dm
