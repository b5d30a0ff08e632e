#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dm/districting.hpp"
#include "dm/graph.hpp"
#include "dm/metric.hpp"
#include "dm/rng.hpp"
#include "dm/theta.hpp"
#include "helpers.hpp"

using testutil::TempDir;

namespace {

std::vector<dm::ThetaWeights> all_kinds(const dm::DualGraph& g) {
    std::vector<dm::ThetaWeights> kinds;
    kinds.push_back(dm::ThetaWeights::unweighted(g));
    kinds.push_back(dm::ThetaWeights::population_product(g));
    kinds.push_back(dm::ThetaWeights::path_decay(g, 1.0));
    int n = g.size();
    std::vector<double> upper(static_cast<std::size_t>(n) * (n - 1) / 2);
    dm::Rng rng(99);
    for (double& v : upper) v = 0.25 + rng.unit();
    kinds.push_back(dm::ThetaWeights::explicit_matrix(g, upper));
    return kinds;
}

}  // namespace

TEST_CASE("pair weights by kind") {
    SUBCASE("unweighted is 1 everywhere") {
        dm::DualGraph g = testutil::path_graph({1.0, 1.0, 1.0});
        auto w = dm::ThetaWeights::unweighted(g);
        CHECK(w.at(0, 2) == 1.0);
        CHECK(w.kappa() == 1.0);
        CHECK(w.label() == "unweighted");
    }
    SUBCASE("population product multiplies endpoint populations") {
        dm::DualGraph g = testutil::path_graph({2.0, 3.0, 4.0});
        auto w = dm::ThetaWeights::population_product(g);
        CHECK(w.at(0, 1) == 6.0);
        CHECK(w.at(1, 0) == 6.0);
        CHECK(w.at(1, 2) == 12.0);
        CHECK(w.kappa() == doctest::Approx(std::sqrt(12.0)));
        CHECK(w.label() == "pop");
    }
    SUBCASE("path decay uses BFS hops") {
        dm::DualGraph g = testutil::path_graph({1.0, 1.0, 1.0});
        auto w = dm::ThetaWeights::path_decay(g, 1.0);
        CHECK(w.at(0, 1) == doctest::Approx(std::exp(-1.0)));
        CHECK(w.at(0, 2) == doctest::Approx(std::exp(-2.0)));
        CHECK(w.kappa() == doctest::Approx(std::exp(-0.5)));
        CHECK(w.label() == "pathdecay:1");
        CHECK_THROWS_AS(dm::ThetaWeights::path_decay(g, -1.0), std::invalid_argument);
    }
    SUBCASE("explicit matrix in packed order") {
        dm::DualGraph g = testutil::path_graph({1.0, 1.0, 1.0});
        auto w = dm::ThetaWeights::explicit_matrix(g, {0.5, 2.0, 4.0});
        CHECK(w.at(0, 1) == 0.5);
        CHECK(w.at(0, 2) == 2.0);
        CHECK(w.at(1, 2) == 4.0);
        CHECK(w.kappa() == doctest::Approx(2.0));
        CHECK(w.label() == "explicit");
        CHECK_THROWS_AS(dm::ThetaWeights::explicit_matrix(g, {0.5, 2.0}), std::invalid_argument);
        CHECK_THROWS_AS(dm::ThetaWeights::explicit_matrix(g, {0.5, 0.0, 4.0}),
                        std::invalid_argument);
    }
    SUBCASE("self pairs are an error") {
        dm::DualGraph g = testutil::path_graph({1.0, 1.0, 1.0});
        for (const auto& w : all_kinds(g)) {
            CHECK_THROWS_AS(w.at(1, 1), std::invalid_argument);
            CHECK_THROWS_AS(dm::theta(w, g, 2, 2), std::invalid_argument);
            CHECK(dm::theta(w, g, 0, 1) == w.at(0, 1));
        }
    }
}

TEST_CASE("explicit weights round trip through a file") {
    TempDir td("theta");
    dm::DualGraph g = testutil::path_graph({1.0, 2.0, 3.0, 4.0});
    std::vector<double> upper;
    dm::Rng rng(4);
    for (int i = 0; i < 6; ++i) upper.push_back(0.1 + rng.unit());
    auto w = dm::ThetaWeights::explicit_matrix(g, upper);
    w.save_explicit(td.file("w.csv"));
    auto r = dm::ThetaWeights::load_explicit(g, td.file("w.csv"));
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) CHECK(r.at(i, j) == w.at(i, j));
    CHECK_THROWS_AS(dm::ThetaWeights::load_explicit(g, td.file("absent.csv")),
                    std::runtime_error);
}

TEST_CASE("distances on the four-unit path") {
    dm::DualGraph uniform = testutil::path_graph({1.0, 1.0, 1.0, 1.0});
    dm::DualGraph weighted = testutil::path_graph({1.0, 2.0, 3.0, 4.0});
    dm::Plan m1{{0, 0, 1, 1}, 2};
    dm::Plan m2{{0, 1, 1, 1}, 2};

    SUBCASE("unweighted disagreement count") {
        auto w = dm::ThetaWeights::unweighted(uniform);
        CHECK(dm::distance(m1, m2, w, uniform) == 3.0);
        CHECK(dm::distance(m2, m1, w, uniform) == 3.0);
        CHECK(dm::distance(m1, m1, w, uniform) == 0.0);
    }
    SUBCASE("population product weighting") {
        auto w = dm::ThetaWeights::population_product(weighted);
        CHECK(dm::distance(m1, m2, w, weighted) == 16.0);
    }
    SUBCASE("relabeling either operand changes nothing") {
        auto w = dm::ThetaWeights::population_product(weighted);
        dm::Plan m2_relabeled{{1, 0, 0, 0}, 2};
        CHECK(dm::distance(m1, m2_relabeled, w, weighted) == 16.0);
    }
    SUBCASE("plan distance equals its squared form for every kind") {
        for (const auto& w : all_kinds(weighted)) {
            CHECK(dm::distance(m1, m2, w, weighted) ==
                  doctest::Approx(dm::distance_sq(m1, m2, w, weighted)).epsilon(1e-14));
        }
    }
    SUBCASE("operand size mismatch") {
        auto w = dm::ThetaWeights::unweighted(uniform);
        dm::Plan tiny{{0, 1}, 2};
        CHECK_THROWS_AS(dm::distance(m1, tiny, w, uniform), std::invalid_argument);
    }
}

TEST_CASE("metric axioms hold on an enumerated plan space") {
    dm::DualGraph g = dm::make_grid({2, 3, 1.0, {}});
    auto plans = dm::enumerate_valid_plans(g, 2, {0.34, {}});
    REQUIRE(plans.size() >= 3);
    std::size_t m = plans.size();
    for (const auto& w : all_kinds(g)) {
        std::vector<std::vector<double>> d(m, std::vector<double>(m, 0.0));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) d[i][j] = dm::distance(plans[i], plans[j], w, g);
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(d[i][i] == 0.0);
            for (std::size_t j = 0; j < m; ++j) {
                CHECK(d[i][j] == d[j][i]);
                if (i != j) CHECK(d[i][j] > 0.0);
                for (std::size_t l = 0; l < m; ++l)
                    CHECK(d[i][j] <= d[i][l] + d[l][j] + 1e-12);
            }
        }
    }
}

TEST_CASE("distance_fast matches the pair sum for factoring kinds") {
    SUBCASE("enumerated pairs on a 2x3 grid") {
        dm::DualGraph g = dm::make_grid({2, 3, 1.0, {1, 2, 1, 3, 1, 2}});
        auto plans = dm::enumerate_valid_plans(g, 2, {0.34, {}});
        for (const auto& w :
             {dm::ThetaWeights::unweighted(g), dm::ThetaWeights::population_product(g)}) {
            for (const auto& a : plans)
                for (const auto& b : plans)
                    CHECK(dm::distance_fast(a, b, w, g) ==
                          doctest::Approx(dm::distance(a, b, w, g)).epsilon(1e-12));
        }
    }
    SUBCASE("random partitions on a random graph") {
        dm::Rng rng(17);
        dm::DualGraph g = testutil::random_connected_graph(rng, 30);
        auto w = dm::ThetaWeights::population_product(g);
        for (int rep = 0; rep < 25; ++rep) {
            dm::Plan a = testutil::random_partition(rng, 30, 4);
            dm::Plan b = testutil::random_partition(rng, 30, 4);
            double slow = dm::distance(a, b, w, g);
            double fast = dm::distance_fast(a, b, w, g);
            CHECK(std::abs(slow - fast) <= 1e-12 * std::max(1.0, std::abs(slow)));
        }
    }
    SUBCASE("identical plans give exactly zero") {
        dm::DualGraph g = dm::make_grid({2, 2, 1.0, {}});
        dm::Plan p{{0, 0, 1, 1}, 2};
        CHECK(dm::distance_fast(p, p, dm::ThetaWeights::population_product(g), g) == 0.0);
    }
    SUBCASE("non-factoring kinds are rejected") {
        dm::DualGraph g = testutil::path_graph({1.0, 1.0, 1.0});
        dm::Plan a{{0, 0, 1}, 2};
        dm::Plan b{{0, 1, 1}, 2};
        CHECK_THROWS_AS(dm::distance_fast(a, b, dm::ThetaWeights::path_decay(g, 1.0), g),
                        std::invalid_argument);
        CHECK_THROWS_AS(
            dm::distance_fast(a, b, dm::ThetaWeights::explicit_matrix(g, {1.0, 1.0, 1.0}), g),
            std::invalid_argument);
    }
}

TEST_CASE("plan_theta_mass sums same-district pair weights") {
    dm::DualGraph g = testutil::path_graph({1.0, 2.0, 3.0});
    dm::Plan split{{0, 0, 1}, 2};
    dm::Plan whole{{0, 0, 0}, 1};
    CHECK(dm::plan_theta_mass(split, dm::ThetaWeights::unweighted(g)) == 1.0);
    CHECK(dm::plan_theta_mass(split, dm::ThetaWeights::population_product(g)) == 2.0);
    CHECK(dm::plan_theta_mass(whole, dm::ThetaWeights::population_product(g)) == 11.0);
    CHECK(dm::plan_theta_mass(whole, dm::ThetaWeights::unweighted(g)) == 3.0);
}
