#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "dm/districting.hpp"
#include "dm/graph.hpp"
#include "helpers.hpp"

using testutil::TempDir;
using testutil::write_file;

TEST_CASE("canonicalize relabels in first-occurrence order") {
    dm::Plan p{{2, 2, 0, 1, 0}, 3};
    dm::Plan c = dm::canonicalize(p);
    CHECK(c.assignment == std::vector<int>{0, 0, 1, 2, 1});
    CHECK(c.k == 3);
    CHECK(dm::canonicalize(c) == c);

    SUBCASE("label out of range") {
        CHECK_THROWS_AS(dm::canonicalize(dm::Plan{{0, 3}, 2}), std::invalid_argument);
        CHECK_THROWS_AS(dm::canonicalize(dm::Plan{{0, -1}, 2}), std::invalid_argument);
    }
    SUBCASE("empty district") {
        CHECK_THROWS_AS(dm::canonicalize(dm::Plan{{0, 0, 2}, 3}), std::invalid_argument);
    }
}

TEST_CASE("contiguity on a three-unit path") {
    dm::DualGraph g = testutil::path_graph({1.0, 1.0, 1.0});
    CHECK(dm::is_contiguous(dm::Plan{{0, 0, 1}, 2}, g));
    CHECK(dm::is_contiguous(dm::Plan{{0, 0, 0}, 1}, g));
    CHECK_FALSE(dm::is_contiguous(dm::Plan{{0, 1, 0}, 2}, g));
    CHECK_THROWS_AS(dm::is_contiguous(dm::Plan{{0, 1}, 2}, g), std::invalid_argument);
}

TEST_CASE("population balance") {
    dm::DualGraph g = testutil::path_graph({1.0, 1.0, 1.0, 1.0});
    SUBCASE("even split has zero deviation") {
        auto b = dm::population_balance(dm::Plan{{0, 0, 1, 1}, 2}, g);
        CHECK(b.district_pop == std::vector<double>{2.0, 2.0});
        CHECK(b.max_deviation == 0.0);
    }
    SUBCASE("three-one split deviates by half") {
        auto b = dm::population_balance(dm::Plan{{0, 0, 0, 1}, 2}, g);
        CHECK(b.district_pop == std::vector<double>{3.0, 1.0});
        CHECK(b.max_deviation == doctest::Approx(0.5));
    }
}

TEST_CASE("cut edge counts") {
    dm::DualGraph path = testutil::path_graph({1.0, 1.0, 1.0});
    CHECK(dm::cut_edges(dm::Plan{{0, 0, 0}, 1}, path) == 0);
    CHECK(dm::cut_edges(dm::Plan{{0, 1, 1}, 2}, path) == 1);

    dm::DualGraph grid = dm::make_grid({3, 3, 1.0, {}});
    dm::Plan cols{{0, 1, 2, 0, 1, 2, 0, 1, 2}, 3};
    CHECK(dm::cut_edges(cols, grid) == 6);
}

TEST_CASE("is_valid reports the first violated rule") {
    SUBCASE("empty district") {
        dm::DualGraph g = testutil::path_graph({1.0, 1.0, 1.0});
        auto v = dm::is_valid(dm::Plan{{0, 0, 0}, 2}, g, {0.5, {}});
        CHECK_FALSE(v.ok);
        CHECK(v.rule == "nonempty");
    }
    SUBCASE("contiguity precedes population") {
        dm::DualGraph g = testutil::path_graph({1.0, 1.0, 1.0});
        auto v = dm::is_valid(dm::Plan{{0, 1, 0}, 2}, g, {0.0, {}});
        CHECK_FALSE(v.ok);
        CHECK(v.rule == "contiguity");
    }
    SUBCASE("population tolerance is strict") {
        dm::DualGraph g = testutil::path_graph({1.0, 1.0, 1.0, 2.0});
        dm::Plan p{{0, 0, 1, 1}, 2};  // district pops 2 and 3, ideal 2.5
        auto tight = dm::is_valid(p, g, {0.0, {}});
        CHECK_FALSE(tight.ok);
        CHECK(tight.rule == "population");
        auto loose = dm::is_valid(p, g, {0.2, {}});
        CHECK(loose.ok);
        CHECK(loose.rule.empty());
    }
    SUBCASE("cut edge cap") {
        dm::DualGraph grid = dm::make_grid({3, 3, 1.0, {}});
        dm::Plan cols{{0, 1, 2, 0, 1, 2, 0, 1, 2}, 3};
        auto capped = dm::is_valid(cols, grid, {0.0, 5});
        CHECK_FALSE(capped.ok);
        CHECK(capped.rule == "cut_edges");
        CHECK(dm::is_valid(cols, grid, {0.0, 6}).ok);
    }
}

TEST_CASE("seed_plan produces valid plans deterministically") {
    SUBCASE("4x4 grid, k=2, exact balance required") {
        dm::DualGraph g = dm::make_grid({4, 4, 1.0, {}});
        dm::ValidityConfig cfg{0.0, {}};
        dm::Plan p = dm::seed_plan(g, 2, cfg, 7);
        CHECK(dm::is_valid(p, g, cfg).ok);
        auto b = dm::population_balance(p, g);
        CHECK(b.district_pop == std::vector<double>{8.0, 8.0});
        CHECK(p == dm::canonicalize(p));
        CHECK(p == dm::seed_plan(g, 2, cfg, 7));
    }
    SUBCASE("1x2 grid has a unique plan") {
        dm::DualGraph g = dm::make_grid({1, 2, 1.0, {}});
        dm::Plan p = dm::seed_plan(g, 2, {0.0, {}}, 3);
        CHECK(p.assignment == std::vector<int>{0, 1});
    }
    SUBCASE("domain errors") {
        dm::DualGraph g = testutil::path_graph({1.0, 1.0, 1.0});
        CHECK_THROWS_AS(dm::seed_plan(g, 0, {0.5, {}}, 1), std::invalid_argument);
        CHECK_THROWS_AS(dm::seed_plan(g, 4, {0.5, {}}, 1), std::invalid_argument);
    }
    SUBCASE("unsatisfiable constraints exhaust retries") {
        dm::DualGraph g = testutil::path_graph({1.0, 1.0, 1.0});
        CHECK_THROWS_WITH_AS(dm::seed_plan(g, 2, {0.0, {}}, 1),
                             doctest::Contains("no valid plan"), std::runtime_error);
    }
    SUBCASE("varied grids and k") {
        dm::DualGraph g = dm::make_grid({4, 5, 1.0, {}});
        for (int k : {2, 4, 5}) {
            dm::ValidityConfig cfg{0.05, {}};
            dm::Plan p = dm::seed_plan(g, k, cfg, static_cast<std::uint64_t>(10 + k));
            CHECK(p.k == k);
            CHECK(dm::is_valid(p, g, cfg).ok);
        }
    }
}

TEST_CASE("enumerate_valid_plans") {
    SUBCASE("three-unit path, k=2, loose tolerance") {
        dm::DualGraph g = testutil::path_graph({1.0, 1.0, 1.0});
        auto plans = dm::enumerate_valid_plans(g, 2, {0.5, {}});
        REQUIRE(plans.size() == 2);
        std::set<std::vector<int>> got{plans[0].assignment, plans[1].assignment};
        std::set<std::vector<int>> want{{0, 0, 1}, {0, 1, 1}};
        CHECK(got == want);
    }
    SUBCASE("1x2 grid has exactly one plan") {
        dm::DualGraph g = dm::make_grid({1, 2, 1.0, {}});
        auto plans = dm::enumerate_valid_plans(g, 2, {0.0, {}});
        REQUIRE(plans.size() == 1);
        CHECK(plans[0].assignment == std::vector<int>{0, 1});
    }
    SUBCASE("2x2 grid with exact balance has the two straight splits") {
        dm::DualGraph g = dm::make_grid({2, 2, 1.0, {}});
        auto plans = dm::enumerate_valid_plans(g, 2, {0.0, {}});
        REQUIRE(plans.size() == 2);
        std::set<std::vector<int>> got{plans[0].assignment, plans[1].assignment};
        std::set<std::vector<int>> want{{0, 0, 1, 1}, {0, 1, 0, 1}};
        CHECK(got == want);
    }
    SUBCASE("results are canonical, valid, and duplicate-free") {
        dm::DualGraph g = dm::make_grid({2, 3, 1.0, {}});
        dm::ValidityConfig cfg{0.34, {}};
        auto plans = dm::enumerate_valid_plans(g, 2, cfg);
        CHECK(plans.size() > 1);
        std::set<std::vector<int>> seen;
        for (const auto& p : plans) {
            CHECK(p == dm::canonicalize(p));
            CHECK(dm::is_valid(p, g, cfg).ok);
            CHECK(seen.insert(p.assignment).second);
        }
    }
    SUBCASE("size guard") {
        dm::DualGraph g = dm::make_grid({4, 5, 1.0, {}});
        CHECK_THROWS_AS(dm::enumerate_valid_plans(g, 2, {0.5, {}}), std::invalid_argument);
        dm::DualGraph small = testutil::path_graph({1.0, 1.0});
        CHECK_THROWS_AS(dm::enumerate_valid_plans(small, 3, {0.5, {}}), std::invalid_argument);
    }
}

TEST_CASE("plan files") {
    TempDir td("plan");
    dm::DualGraph g = testutil::path_graph({1.0, 1.0, 1.0, 1.0});

    SUBCASE("round trip") {
        dm::Plan p{{0, 0, 1, 1}, 2};
        dm::save_plan(p, g, td.file("p.csv"));
        CHECK(dm::load_plan(td.file("p.csv"), g) == p);
    }
    SUBCASE("sparse and unordered labels are compacted to canonical form") {
        write_file(td.file("p.csv"), "unit_id,district\nu0,5\nu1,5\nu2,0\nu3,5\n");
        dm::Plan p = dm::load_plan(td.file("p.csv"), g);
        CHECK(p.assignment == std::vector<int>{0, 0, 1, 0});
        CHECK(p.k == 2);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(dm::load_plan(td.file("absent.csv"), g), std::runtime_error);
    }
    SUBCASE("bad header") {
        write_file(td.file("p.csv"), "unit,district\nu0,0\n");
        CHECK_THROWS_WITH_AS(dm::load_plan(td.file("p.csv"), g),
                             doctest::Contains("unit_id,district"), std::runtime_error);
    }
    SUBCASE("unparseable district label") {
        write_file(td.file("p.csv"), "unit_id,district\nu0,zero\nu1,0\nu2,0\nu3,0\n");
        CHECK_THROWS_AS(dm::load_plan(td.file("p.csv"), g), std::runtime_error);
    }
    SUBCASE("duplicate unit row") {
        write_file(td.file("p.csv"), "unit_id,district\nu0,0\nu0,1\nu2,0\nu3,0\n");
        CHECK_THROWS_AS(dm::load_plan(td.file("p.csv"), g), std::invalid_argument);
    }
    SUBCASE("negative district label") {
        write_file(td.file("p.csv"), "unit_id,district\nu0,-1\nu1,0\nu2,0\nu3,0\n");
        CHECK_THROWS_AS(dm::load_plan(td.file("p.csv"), g), std::invalid_argument);
    }
    SUBCASE("missing unit row") {
        write_file(td.file("p.csv"), "unit_id,district\nu0,0\nu1,0\nu2,1\n");
        CHECK_THROWS_AS(dm::load_plan(td.file("p.csv"), g), std::invalid_argument);
    }
    SUBCASE("unknown unit id") {
        write_file(td.file("p.csv"), "unit_id,district\nu0,0\nu1,0\nu2,1\nu9,1\n");
        CHECK_THROWS_AS(dm::load_plan(td.file("p.csv"), g), std::invalid_argument);
    }
}

TEST_CASE("relabeling does not change partition statistics") {
    dm::DualGraph g = dm::make_grid({3, 3, 1.0, {}});
    dm::Plan p{{0, 1, 2, 0, 1, 2, 0, 1, 2}, 3};
    dm::Plan q{{2, 0, 1, 2, 0, 1, 2, 0, 1}, 3};  // same partition, shuffled labels
    CHECK(dm::cut_edges(p, g) == dm::cut_edges(q, g));
    CHECK(dm::population_balance(p, g).max_deviation ==
          dm::population_balance(q, g).max_deviation);
    CHECK(dm::canonicalize(q) == dm::canonicalize(p));
}
