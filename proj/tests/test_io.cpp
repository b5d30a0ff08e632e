#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dm/io.hpp"
#include "helpers.hpp"

using testutil::TempDir;
using testutil::write_file;

TEST_CASE("file hashing") {
    TempDir td("hash");
    SUBCASE("known FNV-1a values") {
        write_file(td.file("abc.txt"), "abc");
        CHECK(dm::file_hash(td.file("abc.txt")) == 0xe71fa2190541574bULL);
        write_file(td.file("empty.txt"), "");
        CHECK(dm::file_hash(td.file("empty.txt")) == 0xcbf29ce484222325ULL);
    }
    SUBCASE("hex rendering is zero-padded") {
        CHECK(dm::hash_hex(0xe71fa2190541574bULL) == "e71fa2190541574b");
        CHECK(dm::hash_hex(0x1ULL) == "0000000000000001");
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(dm::file_hash(td.file("absent.txt")), std::runtime_error);
    }
}

TEST_CASE("g17 formatting round trips doubles") {
    for (double v : {0.1, 1.0 / 3.0, 6.004, 1e-17, 123456.789, 0.0}) {
        CHECK(std::stod(dm::fmt_g17(v)) == v);
    }
    CHECK(dm::fmt_g17(0.0) == "0");
    CHECK(dm::fmt_g17(16.0) == "16");
}

TEST_CASE("manifest round trip") {
    TempDir td("manifest");
    dm::RunManifest m;
    m.graph_path = "grid.json";
    m.graph_hash = "00ff00ff00ff00ff";
    m.k = 4;
    m.pop_tolerance = 0.05;
    m.theta = "pathdecay:0.5";
    m.seed = 12345678901234567ULL;
    m.total_steps = 22000;
    m.burn_in = 2000;
    m.thin = 2;
    m.kept = 10000;

    SUBCASE("without a cut-edge cap") {
        dm::save_manifest(m, td.file("m.json"));
        dm::RunManifest r = dm::load_manifest(td.file("m.json"));
        CHECK(r.graph_path == m.graph_path);
        CHECK(r.graph_hash == m.graph_hash);
        CHECK(r.k == m.k);
        CHECK(r.pop_tolerance == m.pop_tolerance);
        CHECK(!r.max_cut_edges.has_value());
        CHECK(r.theta == m.theta);
        CHECK(r.seed == m.seed);
        CHECK(r.total_steps == m.total_steps);
        CHECK(r.burn_in == m.burn_in);
        CHECK(r.thin == m.thin);
        CHECK(r.kept == m.kept);
    }
    SUBCASE("with a cut-edge cap") {
        m.max_cut_edges = 60;
        dm::save_manifest(m, td.file("m.json"));
        dm::RunManifest r = dm::load_manifest(td.file("m.json"));
        REQUIRE(r.max_cut_edges.has_value());
        CHECK(*r.max_cut_edges == 60);
    }
    SUBCASE("errors name the manifest") {
        CHECK_THROWS_AS(dm::load_manifest(td.file("absent.json")), std::runtime_error);
        write_file(td.file("bad.json"), "{\"k\": 2}");
        CHECK_THROWS_WITH_AS(dm::load_manifest(td.file("bad.json")),
                             doctest::Contains("bad.json"), std::runtime_error);
        write_file(td.file("junk.json"), "not json at all");
        CHECK_THROWS_AS(dm::load_manifest(td.file("junk.json")), std::runtime_error);
    }
}

TEST_CASE("plan directories") {
    TempDir td("plandir");
    dm::DualGraph g = testutil::path_graph({1.0, 1.0, 1.0, 1.0});
    dm::Plan a{{0, 0, 1, 1}, 2};
    dm::Plan b{{0, 1, 1, 1}, 2};
    dm::Plan c{{0, 0, 0, 1}, 2};

    SUBCASE("writer emits plan_<step>.csv and the loader sorts numerically") {
        std::string dir = td.file("run");
        dm::PlanDirWriter writer(dir, g);
        // step numbers chosen so lexicographic order would be wrong
        writer(a, 0, 999);
        writer(b, 1, 1001);
        writer(c, 2, 10005);
        CHECK(writer.written() == 3);
        auto plans = dm::load_plan_dir(dir, g);
        REQUIRE(plans.size() == 3);
        CHECK(plans[0] == a);
        CHECK(plans[1] == b);
        CHECK(plans[2] == c);
    }
    SUBCASE("hash check passes with the right graph and fails with another") {
        std::string dir = td.file("run2");
        dm::save_graph(g, td.file("g.json"));
        dm::PlanDirWriter writer(dir, g);
        writer(a, 0, 1);
        dm::RunManifest m;
        m.graph_path = td.file("g.json");
        m.graph_hash = dm::hash_hex(dm::file_hash(td.file("g.json")));
        m.k = 2;
        m.kept = 1;
        dm::save_manifest(m, (td.path() / "run2" / "manifest.json").string());

        CHECK(dm::load_plan_dir(dir, g, td.file("g.json")).size() == 1);

        dm::DualGraph other = testutil::path_graph({1.0, 1.0, 2.0, 1.0});
        dm::save_graph(other, td.file("other.json"));
        CHECK_THROWS_WITH_AS(dm::load_plan_dir(dir, g, td.file("other.json")),
                             doctest::Contains("hash"), std::invalid_argument);
    }
    SUBCASE("empty or missing directories") {
        CHECK_THROWS_AS(dm::load_plan_dir(td.file("nowhere"), g), std::runtime_error);
        std::filesystem::create_directories(td.file("blank"));
        CHECK_THROWS_AS(dm::load_plan_dir(td.file("blank"), g), std::runtime_error);
    }
    SUBCASE("stray file names are an error") {
        std::string dir = td.file("stray");
        dm::PlanDirWriter writer(dir, g);
        writer(a, 0, 1);
        write_file(dir + "/plan_x.csv", "unit_id,district\n");
        CHECK_THROWS_AS(dm::load_plan_dir(dir, g), std::runtime_error);
    }
}
