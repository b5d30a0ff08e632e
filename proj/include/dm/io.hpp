#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dm/chain.hpp"
#include "dm/districting.hpp"
#include "dm/graph.hpp"

namespace dm {

// FNV-1a over the raw bytes of a file; cheap content fingerprint for
// manifest cross-checks, not a cryptographic hash
std::uint64_t file_hash(const std::string& path);
std::string hash_hex(std::uint64_t h);

// full-precision decimal rendering (%.17g round-trips doubles exactly)
std::string fmt_g17(double v);

// Everything needed to audit or reproduce a chain run. graph_hash pins the
// exact input file so a plan directory cannot silently drift from its graph.
struct RunManifest {
    std::string graph_path;
    std::string graph_hash;
    int k = 0;
    double pop_tolerance = 0.0;
    std::optional<int> max_cut_edges;
    std::string theta;  // CLI spelling
    std::uint64_t seed = 0;
    long long total_steps = 0;
    long long burn_in = 0;
    long long thin = 0;
    long long kept = 0;
};

void save_manifest(const RunManifest& m, const std::string& path);
RunManifest load_manifest(const std::string& path);

// sink for run_chain that writes every kept plan as <dir>/plan_<step>.csv,
// <step> being the accepted-transition index; counts what it wrote
class PlanDirWriter {
public:
    PlanDirWriter(std::string dir, const DualGraph& g);

    void operator()(const Plan& plan, long long kept_index, long long accepted_step);
    long long written() const { return written_; }

private:
    std::string dir_;
    const DualGraph* g_;
    long long written_ = 0;
};

// kept plans of a chain run, ascending by step number; verifies the
// manifest's graph hash when graph_path_for_hash_check is given
std::vector<Plan> load_plan_dir(const std::string& dir, const DualGraph& g,
                                const std::string& graph_path_for_hash_check = "");

}  // namespace dm
