#include "dm/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace fs = std::filesystem;

namespace dm {

std::uint64_t file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for hashing: " + path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void save_manifest(const RunManifest& m, const std::string& path) {
    nlohmann::json j;
    j["graph"] = m.graph_path;
    j["graph_hash"] = m.graph_hash;
    j["k"] = m.k;
    j["pop_tolerance"] = m.pop_tolerance;
    if (m.max_cut_edges)
        j["max_cut_edges"] = *m.max_cut_edges;
    else
        j["max_cut_edges"] = nullptr;
    j["theta"] = m.theta;
    j["seed"] = m.seed;
    j["total_steps"] = m.total_steps;
    j["burn_in"] = m.burn_in;
    j["thin"] = m.thin;
    j["kept"] = m.kept;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << j.dump(1) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

RunManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("manifest " + path + ": " + e.what());
    }
    RunManifest m;
    try {
        m.graph_path = j.at("graph").get<std::string>();
        m.graph_hash = j.at("graph_hash").get<std::string>();
        m.k = j.at("k").get<int>();
        m.pop_tolerance = j.at("pop_tolerance").get<double>();
        if (!j.at("max_cut_edges").is_null()) m.max_cut_edges = j.at("max_cut_edges").get<int>();
        m.theta = j.at("theta").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.total_steps = j.at("total_steps").get<long long>();
        m.burn_in = j.at("burn_in").get<long long>();
        m.thin = j.at("thin").get<long long>();
        m.kept = j.at("kept").get<long long>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("manifest " + path + ": " + e.what());
    }
    return m;
}

PlanDirWriter::PlanDirWriter(std::string dir, const DualGraph& g) : dir_(std::move(dir)), g_(&g) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw std::runtime_error("cannot create plan directory: " + dir_);
}

void PlanDirWriter::operator()(const Plan& plan, long long, long long accepted_step) {
    fs::path p = fs::path(dir_) / ("plan_" + std::to_string(accepted_step) + ".csv");
    save_plan(plan, *g_, p.string());
    ++written_;
}

std::vector<Plan> load_plan_dir(const std::string& dir, const DualGraph& g,
                                const std::string& graph_path_for_hash_check) {
    if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
    if (!graph_path_for_hash_check.empty()) {
        RunManifest m = load_manifest((fs::path(dir) / "manifest.json").string());
        std::string actual = hash_hex(file_hash(graph_path_for_hash_check));
        if (m.graph_hash != actual)
            throw std::invalid_argument("plan directory " + dir + " was produced from a graph with hash " +
                                        m.graph_hash + ", but " + graph_path_for_hash_check +
                                        " hashes to " + actual);
    }
    std::vector<std::pair<long long, fs::path>> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (name.rfind("plan_", 0) != 0 || name.size() < 10 ||
            name.compare(name.size() - 4, 4, ".csv") != 0)
            continue;
        std::string num = name.substr(5, name.size() - 9);
        long long step = 0;
        try {
            step = std::stoll(num);
        } catch (const std::exception&) {
            throw std::runtime_error("plan directory " + dir + ": unparseable file name " + name);
        }
        files.emplace_back(step, entry.path());
    }
    if (files.empty()) throw std::runtime_error("plan directory " + dir + " holds no plan_*.csv files");
    std::sort(files.begin(), files.end());
    std::vector<Plan> plans;
    plans.reserve(files.size());
    for (const auto& [step, p] : files) plans.push_back(load_plan(p.string(), g));
    return plans;
}

}  // namespace dm
