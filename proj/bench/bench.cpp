// Timing comparison of the serial reference kernels against the OpenMP batch
// kernels, plus the sample-medoid scaling table. Not a test; numbers only.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <vector>

#include "dm/centroid.hpp"
#include "dm/chain.hpp"
#include "dm/districting.hpp"
#include "dm/graph.hpp"
#include "dm/metric.hpp"
#include "dm/parallel.hpp"
#include "dm/theta.hpp"

namespace {

double now_secs() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <typename F>
double best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        double t0 = now_secs();
        f();
        best = std::min(best, now_secs() - t0);
    }
    return best;
}

}  // namespace

int main() {
    dm::DualGraph g = dm::make_grid({20, 20, 1.0, {}});
    dm::ValidityConfig cfg{0.05, {}};
    dm::Plan start = dm::seed_plan(g, 4, cfg, 1);

    std::printf("sampling 2000 plans from a 20x20 grid chain...\n");
    auto plans = dm::run_chain_collect(g, 4, cfg, start, 42, 4000, 2000, 1);
    dm::CentroidMatrix acc(g.size());
    for (const auto& p : plans) acc.add_plan(p);
    acc.finalize();

    for (const auto& w :
         {dm::ThetaWeights::unweighted(g), dm::ThetaWeights::population_product(g)}) {
        std::printf("\nbatch_distance_sq, %zu plans, theta=%s\n", plans.size(),
                    w.label().c_str());
        double serial =
            best_of(3, [&] { dm::batch_distance_sq_serial(plans, acc, w); });
        std::printf("  %-10s %8.1f ms\n", "serial", serial * 1e3);
        for (int threads : {1, 2, 4}) {
            dm::set_max_threads(threads);
            double t = best_of(3, [&] { dm::batch_distance_sq(plans, acc, w); });
            std::printf("  threads=%-2d %8.1f ms  (%.2fx)\n", threads, t * 1e3, serial / t);
        }
        dm::set_max_threads(1);

        std::printf("batch_plan_mass, %zu plans, theta=%s\n", plans.size(), w.label().c_str());
        double mass_serial = best_of(3, [&] { dm::batch_plan_mass_serial(plans, w); });
        std::printf("  %-10s %8.1f ms\n", "serial", mass_serial * 1e3);
        for (int threads : {1, 2, 4}) {
            dm::set_max_threads(threads);
            double t = best_of(3, [&] { dm::batch_plan_mass(plans, w); });
            std::printf("  threads=%-2d %8.1f ms  (%.2fx)\n", threads, t * 1e3, mass_serial / t);
        }
        dm::set_max_threads(1);
    }

    std::printf("\nsample_medoid scaling (10x10 grid, unweighted theta)\n");
    dm::DualGraph g10 = dm::make_grid({10, 10, 1.0, {}});
    auto w10 = dm::ThetaWeights::unweighted(g10);
    auto big = dm::run_chain_collect(g10, 4, cfg, dm::seed_plan(g10, 4, cfg, 2), 7, 21000, 1000, 1);
    for (std::size_t t : {5000UL, 10000UL, 20000UL}) {
        std::vector<dm::Plan> ens(big.begin(), big.begin() + static_cast<long>(t));
        dm::CentroidMatrix a(g10.size());
        for (const auto& p : ens) a.add_plan(p);
        a.finalize();
        double best = best_of(3, [&] { dm::sample_medoid(ens, a, w10); });
        std::printf("  T=%-6zu %8.1f ms\n", t, best * 1e3);
    }
    return 0;
}
