#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "dm/centroid.hpp"
#include "dm/metric.hpp"
#include "dm/parallel.hpp"
#include "helpers.hpp"

namespace {

struct ThreadGuard {
    ~ThreadGuard() { dm::set_max_threads(1); }
};

}  // namespace

TEST_CASE("thread knob") {
    ThreadGuard guard;
    CHECK(dm::max_threads() == 1);
    dm::set_max_threads(4);
    CHECK(dm::max_threads() == 4);
    CHECK_THROWS_AS(dm::set_max_threads(0), std::invalid_argument);
}

TEST_CASE("batch kernels are bitwise equal to the serial reference") {
    ThreadGuard guard;
    dm::Rng rng(123);
    dm::DualGraph g = testutil::random_connected_graph(rng, 12);
    std::vector<dm::Plan> plans;
    for (int t = 0; t < 64; ++t) plans.push_back(testutil::random_partition(rng, 12, 3));
    dm::CentroidMatrix acc(12);
    for (const auto& p : plans) acc.add_plan(p);
    acc.finalize();

    for (const auto& w : {dm::ThetaWeights::unweighted(g), dm::ThetaWeights::population_product(g),
                          dm::ThetaWeights::path_decay(g, 0.9)}) {
        std::vector<double> ref_d2 = dm::batch_distance_sq_serial(plans, acc, w);
        std::vector<double> ref_mass = dm::batch_plan_mass_serial(plans, w);
        REQUIRE(ref_d2.size() == plans.size());

        // the serial entries are the scalar routines verbatim
        for (std::size_t i = 0; i < plans.size(); ++i) {
            CHECK(ref_d2[i] == dm::distance_sq(plans[i], acc, w));
            CHECK(ref_mass[i] == dm::plan_theta_mass(plans[i], w));
        }

        for (int threads : {1, 2, 4}) {
            dm::set_max_threads(threads);
            CHECK(dm::batch_distance_sq(plans, acc, w) == ref_d2);
            CHECK(dm::batch_plan_mass(plans, w) == ref_mass);
        }
    }
}

TEST_CASE("batch kernels accept empty input") {
    ThreadGuard guard;
    dm::DualGraph g = testutil::path_graph({1.0, 1.0, 1.0});
    auto w = dm::ThetaWeights::unweighted(g);
    dm::CentroidMatrix acc(3);
    acc.add_plan(dm::Plan{{0, 0, 1}, 2});
    std::vector<dm::Plan> none;
    CHECK(dm::batch_distance_sq(none, acc, w).empty());
    CHECK(dm::batch_plan_mass(none, w).empty());
}
