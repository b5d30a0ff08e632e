#include "dm/parallel.hpp"

#include <atomic>
#include <stdexcept>

#include "dm/centroid.hpp"
#include "dm/metric.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dm {

namespace {
std::atomic<int> g_threads{1};
}

void set_max_threads(int threads) {
    if (threads < 1) throw std::invalid_argument("set_max_threads: need at least one thread");
    g_threads.store(threads);
}

int max_threads() { return g_threads.load(); }

std::vector<double> batch_distance_sq_serial(const std::vector<Plan>& plans,
                                             const CentroidMatrix& acc, const ThetaWeights& w) {
    std::vector<double> out(plans.size());
    for (std::size_t t = 0; t < plans.size(); ++t) out[t] = distance_sq(plans[t], acc, w);
    return out;
}

std::vector<double> batch_distance_sq(const std::vector<Plan>& plans, const CentroidMatrix& acc,
                                      const ThetaWeights& w) {
#ifdef _OPENMP
    const int threads = max_threads();
    if (threads > 1 && plans.size() > 1) {
        acc.finalize();  // sparse-mode sorted cache is lazy; build it before sharing
        std::vector<double> out(plans.size());
        const long long count = static_cast<long long>(plans.size());
#pragma omp parallel for schedule(static) num_threads(threads)
        for (long long t = 0; t < count; ++t)
            out[static_cast<std::size_t>(t)] = distance_sq(plans[static_cast<std::size_t>(t)], acc, w);
        return out;
    }
#endif
    return batch_distance_sq_serial(plans, acc, w);
}

std::vector<double> batch_plan_mass_serial(const std::vector<Plan>& plans, const ThetaWeights& w) {
    std::vector<double> out(plans.size());
    for (std::size_t t = 0; t < plans.size(); ++t) out[t] = plan_theta_mass(plans[t], w);
    return out;
}

std::vector<double> batch_plan_mass(const std::vector<Plan>& plans, const ThetaWeights& w) {
#ifdef _OPENMP
    const int threads = max_threads();
    if (threads > 1 && plans.size() > 1) {
        std::vector<double> out(plans.size());
        const long long count = static_cast<long long>(plans.size());
#pragma omp parallel for schedule(static) num_threads(threads)
        for (long long t = 0; t < count; ++t)
            out[static_cast<std::size_t>(t)] = plan_theta_mass(plans[static_cast<std::size_t>(t)], w);
        return out;
    }
#endif
    return batch_plan_mass_serial(plans, w);
}

}  // namespace dm
