#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dm/analysis.hpp"
#include "dm/centroid.hpp"
#include "dm/chain.hpp"
#include "dm/districting.hpp"
#include "dm/graph.hpp"
#include "dm/io.hpp"
#include "dm/kcut.hpp"
#include "dm/metric.hpp"
#include "dm/parallel.hpp"
#include "dm/theta.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

dm::ThetaWeights parse_theta(const std::string& spec, const dm::DualGraph& g) {
    if (spec == "unweighted") return dm::ThetaWeights::unweighted(g);
    if (spec == "pop") return dm::ThetaWeights::population_product(g);
    if (spec.rfind("pathdecay:", 0) == 0) {
        double rate = 0.0;
        try {
            rate = std::stod(spec.substr(10));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad pathdecay rate in theta spec: " + spec);
        }
        return dm::ThetaWeights::path_decay(g, rate);
    }
    if (spec.rfind("explicit:", 0) == 0) return dm::ThetaWeights::load_explicit(g, spec.substr(9));
    throw std::invalid_argument("unknown theta spec '" + spec +
                                "' (expected unweighted|pop|pathdecay:<rate>|explicit:<file>)");
}

// drops stale kept plans so reruns into the same directory stay byte-identical
void clean_plan_files(const std::string& dir) {
    if (!fs::is_directory(dir)) return;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (name.rfind("plan_", 0) == 0 && name.size() > 9 &&
            name.compare(name.size() - 4, 4, ".csv") == 0)
            fs::remove(entry.path());
    }
}

std::vector<dm::Plan> load_plans_checked(const std::string& dir, const dm::DualGraph& g,
                                         const std::string& graph_path) {
    bool has_manifest = fs::exists(fs::path(dir) / "manifest.json");
    return dm::load_plan_dir(dir, g, has_manifest ? graph_path : std::string());
}

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(name + ": " + e.what());
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(name + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// pipeline

struct RunConfig {
    std::string graph_path;
    std::string out_dir;
    int k = 2;
    double eps = 0.05;
    std::optional<int> max_cut_edges;
    std::string theta = "unweighted";
    long long steps = 10000;
    long long burn_in = 2000;
    long long thin = 1;
    std::vector<std::uint64_t> seeds;
    long long refine_steps = 1000;
    int bins = 100;
};

int cmd_pipeline(const RunConfig& cfg) {
    if (cfg.graph_path.empty())
        throw std::runtime_error("pipeline: no graph path (positional argument or config key 'graph')");
    if (cfg.out_dir.empty())
        throw std::runtime_error("pipeline: no output directory (-o or config key 'out')");
    if (cfg.seeds.empty()) throw std::runtime_error("pipeline: no seeds (--seeds or config key 'seeds')");

    dm::DualGraph g = stage("load graph", [&] { return dm::load_graph(cfg.graph_path); });
    dm::ThetaWeights w = stage("theta", [&] { return parse_theta(cfg.theta, g); });
    dm::ValidityConfig vcfg{cfg.eps, cfg.max_cut_edges};
    std::string graph_hash = dm::hash_hex(dm::file_hash(cfg.graph_path));

    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw std::runtime_error("pipeline: cannot create output directory " + cfg.out_dir);

    struct SeedRun {
        std::uint64_t seed;
        std::string dir;
        std::vector<dm::Plan> plans;
        dm::CentroidMatrix acc{1};
        dm::SampleMedoid medoid;
        dm::RefineResult refined;
    };
    std::vector<SeedRun> runs;

    for (std::uint64_t seed : cfg.seeds) {
        std::string label = "seed " + std::to_string(seed);
        SeedRun run{seed, (fs::path(cfg.out_dir) / ("seed_" + std::to_string(seed))).string(),
                    {}, dm::CentroidMatrix(g.size()), {}, {}};
        stage(label, [&] {
            clean_plan_files(run.dir);
            dm::PlanDirWriter writer(run.dir, g);
            dm::Plan start = dm::seed_plan(g, cfg.k, vcfg, seed);
            dm::run_chain(g, cfg.k, vcfg, start, seed, cfg.steps, cfg.burn_in, cfg.thin,
                          [&](const dm::Plan& p, long long kept_index, long long accepted_step) {
                              writer(p, kept_index, accepted_step);
                              run.plans.push_back(p);
                              run.acc.add_plan(p);
                          });
            dm::RunManifest m;
            m.graph_path = cfg.graph_path;
            m.graph_hash = graph_hash;
            m.k = cfg.k;
            m.pop_tolerance = cfg.eps;
            m.max_cut_edges = cfg.max_cut_edges;
            m.theta = w.label();
            m.seed = seed;
            m.total_steps = cfg.steps;
            m.burn_in = cfg.burn_in;
            m.thin = cfg.thin;
            m.kept = writer.written();
            dm::save_manifest(m, (fs::path(run.dir) / "manifest.json").string());
            run.acc.save((fs::path(run.dir) / "centroid.csv").string());
            run.medoid = dm::sample_medoid(run.plans, run.acc, w);
            dm::save_plan(run.medoid.plan, g, (fs::path(run.dir) / "medoid.csv").string());
        });
        runs.push_back(std::move(run));
    }

    dm::CentroidMatrix merged = runs[0].acc;
    for (std::size_t i = 1; i < runs.size(); ++i) merged.merge_from(runs[i].acc);
    merged.finalize();
    stage("merged centroid", [&] { merged.save((fs::path(cfg.out_dir) / "centroid.csv").string()); });

    for (SeedRun& run : runs) {
        stage("refine seed " + std::to_string(run.seed), [&] {
            run.refined = dm::refine_medoid(run.medoid.plan, merged, w, g, vcfg, run.seed,
                                            cfg.refine_steps);
            dm::save_plan(run.refined.plan, g, (fs::path(run.dir) / "refined.csv").string());
        });
    }

    std::vector<dm::Plan> all_plans;
    for (const SeedRun& run : runs)
        all_plans.insert(all_plans.end(), run.plans.begin(), run.plans.end());
    dm::DistanceHistogram hist = stage("histogram", [&] {
        dm::DistanceHistogram h = dm::make_histogram(all_plans, merged, w, cfg.bins);
        dm::save_histogram(h, (fs::path(cfg.out_dir) / "hist.csv").string(), w.label(),
                           "centroid.csv");
        return h;
    });

    std::vector<std::pair<std::string, double>> probes;
    for (const SeedRun& run : runs)
        probes.emplace_back("seed " + std::to_string(run.seed) + " refined",
                            dm::distance_sq(run.refined.plan, merged, w));
    dm::render_histogram_svg(hist, probes, (fs::path(cfg.out_dir) / "hist.svg").string());

    double spread = dm::mean_spread(all_plans, merged, w);

    json summary;
    summary["graph"] = cfg.graph_path;
    summary["graph_hash"] = graph_hash;
    summary["n"] = g.size();
    summary["k"] = cfg.k;
    summary["eps"] = cfg.eps;
    if (cfg.max_cut_edges)
        summary["max_cut_edges"] = *cfg.max_cut_edges;
    else
        summary["max_cut_edges"] = nullptr;
    summary["theta"] = w.label();
    summary["steps"] = cfg.steps;
    summary["burn_in"] = cfg.burn_in;
    summary["thin"] = cfg.thin;
    summary["bins"] = cfg.bins;
    summary["refine_steps"] = cfg.refine_steps;
    summary["kept_total"] = merged.samples();
    summary["support"] = merged.support_size();
    summary["mean_spread"] = spread;
    summary["seeds"] = json::array();
    for (const SeedRun& run : runs) {
        double med_d2 = dm::distance_sq(run.medoid.plan, merged, w);
        double ref_d2 = dm::distance_sq(run.refined.plan, merged, w);
        json row;
        row["seed"] = run.seed;
        row["kept"] = static_cast<long long>(run.plans.size());
        row["medoid_index"] = run.medoid.index;
        row["medoid_d2"] = med_d2;
        row["medoid_pct"] = dm::percentile_of(hist, med_d2);
        row["refined_d2"] = ref_d2;
        row["refined_pct"] = dm::percentile_of(hist, ref_d2);
        row["improvements"] = static_cast<long long>(run.refined.trajectory.size()) - 1;
        summary["seeds"].push_back(row);
    }
    json re = json::array();
    double re_max = 0.0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        json re_row = json::array();
        for (std::size_t j = 0; j < runs.size(); ++j) {
            double v = i == j ? 0.0
                              : dm::relative_error(runs[i].refined.plan, runs[j].refined.plan,
                                                   merged, w);
            re_row.push_back(v);
            if (i != j) re_max = std::max(re_max, v);
        }
        re.push_back(re_row);
    }
    summary["re"] = re;
    summary["re_max"] = re_max;

    std::ofstream out(fs::path(cfg.out_dir) / "summary.json");
    if (!out) throw std::runtime_error("pipeline: cannot write summary.json");
    out << summary.dump(1) << '\n';
    if (!out) throw std::runtime_error("pipeline: write failed for summary.json");

    std::cout << "pipeline done: " << runs.size() << " seed(s), T=" << merged.samples()
              << ", artifacts in " << cfg.out_dir << "\n";
    return 0;
}

int cmd_report(const std::string& dir) {
    fs::path root(dir);
    std::ifstream in(root / "summary.json");
    if (!in) throw std::runtime_error("report: cannot open " + (root / "summary.json").string());
    json s;
    try {
        in >> s;
    } catch (const json::exception& e) {
        throw std::runtime_error("report: summary.json: " + std::string(e.what()));
    }
    dm::CentroidMatrix merged = stage("report: centroid.csv",
                                      [&] { return dm::CentroidMatrix::load((root / "centroid.csv").string()); });
    dm::DistanceHistogram hist = stage("report: hist.csv",
                                       [&] { return dm::load_histogram((root / "hist.csv").string()); });

    auto num = [](const json& v) -> std::string {
        if (v.is_null()) return "inf";
        return dm::fmt_g17(v.get<double>());
    };

    std::cout << "pipeline " << dir << "\n";
    std::cout << "graph " << s.at("graph").get<std::string>() << " (hash "
              << s.at("graph_hash").get<std::string>() << ")\n";
    std::cout << "n=" << s.at("n") << " k=" << s.at("k") << " eps=" << num(s.at("eps"))
              << " theta=" << s.at("theta").get<std::string>() << " steps=" << s.at("steps")
              << " burn_in=" << s.at("burn_in") << " thin=" << s.at("thin") << "\n";
    std::cout << "kept T=" << merged.samples() << " centroid support=" << merged.support_size()
              << " hist values=" << hist.values.size() << "\n";
    std::cout << "mean spread=" << num(s.at("mean_spread")) << "\n";
    for (const json& row : s.at("seeds")) {
        std::cout << "seed " << row.at("seed") << ": kept=" << row.at("kept")
                  << " medoid d2=" << num(row.at("medoid_d2")) << " pct="
                  << num(row.at("medoid_pct")) << " refined d2=" << num(row.at("refined_d2"))
                  << " pct=" << num(row.at("refined_pct")) << " improvements="
                  << row.at("improvements") << "\n";
    }
    std::cout << "max pairwise RE of refined medoids: " << num(s.at("re_max")) << "\n";
    const json& re = s.at("re");
    for (const json& row : re) {
        std::cout << "RE";
        for (const json& v : row) std::cout << ' ' << num(v);
        std::cout << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// subcommand wiring

using Action = std::function<void()>;

void setup_graph(CLI::App& app, Action& action) {
    auto* graph = app.add_subcommand("graph", "generate or validate dual graphs");
    graph->require_subcommand(1);

    struct GenOpts {
        int rows = 0, cols = 0;
        double pop = 1.0;
        std::string out;
    };
    auto gen_opts = std::make_shared<GenOpts>();
    auto* gen = graph->add_subcommand("gen", "write a rows x cols grid graph");
    gen->add_option("--rows", gen_opts->rows, "grid rows")->required();
    gen->add_option("--cols", gen_opts->cols, "grid columns")->required();
    gen->add_option("--pop", gen_opts->pop, "uniform unit population")->capture_default_str();
    gen->add_option("-o,--output", gen_opts->out, "output graph JSON")->required();
    gen->callback([gen_opts, &action] {
        action = [gen_opts] {
            dm::DualGraph g =
                dm::make_grid(dm::GridSpec{gen_opts->rows, gen_opts->cols, gen_opts->pop, {}});
            dm::save_graph(g, gen_opts->out);
            std::cout << "wrote " << gen_opts->out << " (n=" << g.size()
                      << " edges=" << g.edges().size() << ")\n";
        };
    });

    auto val_path = std::make_shared<std::string>();
    auto* val = graph->add_subcommand("validate", "load a graph and report its shape");
    val->add_option("graph", *val_path, "graph JSON")->required();
    val->callback([val_path, &action] {
        action = [val_path] {
            dm::DualGraph g = dm::load_graph(*val_path);
            std::cout << "ok n=" << g.size() << " edges=" << g.edges().size()
                      << " total_pop=" << dm::fmt_g17(g.total_pop()) << "\n";
        };
    });
}

void setup_plan(CLI::App& app, Action& action) {
    auto* plan = app.add_subcommand("plan", "seed or validate districting plans");
    plan->require_subcommand(1);

    struct SeedOpts {
        std::string graph;
        int k = 2;
        double eps = 0.05;
        std::optional<int> max_cut;
        std::uint64_t seed = 0;
        std::string out;
    };
    auto so = std::make_shared<SeedOpts>();
    auto* seed = plan->add_subcommand("seed", "draw a random valid plan");
    seed->add_option("graph", so->graph, "graph JSON")->required();
    seed->add_option("-k", so->k, "number of districts")->required();
    seed->add_option("--eps", so->eps, "population tolerance")->capture_default_str();
    seed->add_option("--max-cut-edges", [so](const std::vector<std::string>& v) {
        try {
            so->max_cut = std::stoi(v.at(0));
        } catch (const std::exception&) {
            return false;
        }
        return true;
    }, "optional cut-edge cap");
    seed->add_option("--seed", so->seed, "rng seed")->required();
    seed->add_option("-o,--output", so->out, "output plan CSV")->required();
    seed->callback([so, &action] {
        action = [so] {
            dm::DualGraph g = dm::load_graph(so->graph);
            dm::ValidityConfig cfg{so->eps, so->max_cut};
            dm::Plan p = dm::seed_plan(g, so->k, cfg, so->seed);
            dm::save_plan(p, g, so->out);
            dm::PopulationBalance bal = dm::population_balance(p, g);
            std::cout << "wrote " << so->out << " (max deviation "
                      << dm::fmt_g17(bal.max_deviation) << ", cut edges " << dm::cut_edges(p, g)
                      << ")\n";
        };
    });

    struct ValOpts {
        std::string graph, plan;
        double eps = 0.05;
        std::optional<int> max_cut;
    };
    auto vo = std::make_shared<ValOpts>();
    auto* val = plan->add_subcommand("validate", "check a plan against the validity rules");
    val->add_option("graph", vo->graph, "graph JSON")->required();
    val->add_option("plan", vo->plan, "plan CSV")->required();
    val->add_option("--eps", vo->eps, "population tolerance")->capture_default_str();
    val->add_option("--max-cut-edges", [vo](const std::vector<std::string>& v) {
        try {
            vo->max_cut = std::stoi(v.at(0));
        } catch (const std::exception&) {
            return false;
        }
        return true;
    }, "optional cut-edge cap");
    val->callback([vo, &action] {
        action = [vo] {
            dm::DualGraph g = dm::load_graph(vo->graph);
            dm::Plan p = dm::load_plan(vo->plan, g);
            dm::Validity v = dm::is_valid(p, g, dm::ValidityConfig{vo->eps, vo->max_cut});
            dm::PopulationBalance bal = dm::population_balance(p, g);
            if (!v.ok)
                throw std::invalid_argument("invalid plan (" + v.rule + "), max deviation " +
                                            dm::fmt_g17(bal.max_deviation));
            std::cout << "valid (k=" << p.k << ", max deviation " << dm::fmt_g17(bal.max_deviation)
                      << ", cut edges " << dm::cut_edges(p, g) << ")\n";
        };
    });
}

void setup_dist(CLI::App& app, Action& action) {
    struct Opts {
        std::string graph, plan_a, plan_b, theta = "unweighted";
    };
    auto o = std::make_shared<Opts>();
    auto* dist = app.add_subcommand("dist", "distance between two plans");
    dist->add_option("graph", o->graph, "graph JSON")->required();
    dist->add_option("planA", o->plan_a, "first plan CSV")->required();
    dist->add_option("planB", o->plan_b, "second plan CSV")->required();
    dist->add_option("--theta", o->theta, "pair weights")->capture_default_str();
    dist->callback([o, &action] {
        action = [o] {
            dm::DualGraph g = dm::load_graph(o->graph);
            dm::ThetaWeights w = parse_theta(o->theta, g);
            dm::Plan a = dm::load_plan(o->plan_a, g);
            dm::Plan b = dm::load_plan(o->plan_b, g);
            std::cout << "d " << dm::fmt_g17(dm::distance(a, b, w, g)) << "\n";
            std::cout << "d2 " << dm::fmt_g17(dm::distance_sq(a, b, w, g)) << "\n";
        };
    });
}

void setup_chain(CLI::App& app, Action& action) {
    auto* chain = app.add_subcommand("chain", "recombination chain runs and directed climbs");
    chain->require_subcommand(1);

    struct RunOpts {
        std::string graph, out, start;
        int k = 2;
        double eps = 0.05;
        std::optional<int> max_cut;
        long long steps = 10000, burn_in = 2000, thin = 1;
        std::uint64_t seed = 0;
    };
    auto ro = std::make_shared<RunOpts>();
    auto* run = chain->add_subcommand("run", "sample an ensemble of plans");
    run->add_option("graph", ro->graph, "graph JSON")->required();
    run->add_option("-k", ro->k, "number of districts")->required();
    run->add_option("--steps", ro->steps, "accepted transitions to run")->capture_default_str();
    run->add_option("--burn-in", ro->burn_in, "accepted transitions to discard")->capture_default_str();
    run->add_option("--thin", ro->thin, "keep every thin-th accepted plan")->capture_default_str();
    run->add_option("--seed", ro->seed, "rng seed")->required();
    run->add_option("--eps", ro->eps, "population tolerance")->capture_default_str();
    run->add_option("--max-cut-edges", [ro](const std::vector<std::string>& v) {
        try {
            ro->max_cut = std::stoi(v.at(0));
        } catch (const std::exception&) {
            return false;
        }
        return true;
    }, "optional cut-edge cap");
    run->add_option("--start", ro->start, "start plan CSV (default: seeded from --seed)");
    run->add_option("-o,--output", ro->out, "output plan directory")->required();
    run->callback([ro, &action] {
        action = [ro] {
            dm::DualGraph g = dm::load_graph(ro->graph);
            dm::ValidityConfig cfg{ro->eps, ro->max_cut};
            dm::Plan start = ro->start.empty() ? dm::seed_plan(g, ro->k, cfg, ro->seed)
                                               : dm::load_plan(ro->start, g);
            clean_plan_files(ro->out);
            dm::PlanDirWriter writer(ro->out, g);
            dm::run_chain(g, ro->k, cfg, start, ro->seed, ro->steps, ro->burn_in, ro->thin,
                          std::ref(writer));
            dm::RunManifest m;
            m.graph_path = ro->graph;
            m.graph_hash = dm::hash_hex(dm::file_hash(ro->graph));
            m.k = ro->k;
            m.pop_tolerance = ro->eps;
            m.max_cut_edges = ro->max_cut;
            m.theta = "";
            m.seed = ro->seed;
            m.total_steps = ro->steps;
            m.burn_in = ro->burn_in;
            m.thin = ro->thin;
            m.kept = writer.written();
            dm::save_manifest(m, (fs::path(ro->out) / "manifest.json").string());
            std::cout << "kept " << writer.written() << " plans in " << ro->out << "\n";
        };
    });

    struct ClimbOpts {
        std::string graph, centroid, start, out, trajectory, theta = "unweighted";
        double eps = 0.05;
        std::optional<int> max_cut;
        long long steps = 1000;
        std::uint64_t seed = 0;
    };
    auto add_climb = [&action](CLI::App* sub, std::shared_ptr<ClimbOpts> co, bool refine) {
        sub->add_option("graph", co->graph, "graph JSON")->required();
        sub->add_option("--centroid", co->centroid, "centroid CSV")->required();
        sub->add_option("--theta", co->theta, "pair weights")->capture_default_str();
        sub->add_option("--start", co->start, "start plan CSV")->required();
        sub->add_option("--steps", co->steps, "accepted-move budget")->capture_default_str();
        sub->add_option("--seed", co->seed, "rng seed")->required();
        sub->add_option("--eps", co->eps, "population tolerance")->capture_default_str();
        sub->add_option("--max-cut-edges", [co](const std::vector<std::string>& v) {
            try {
                co->max_cut = std::stoi(v.at(0));
            } catch (const std::exception&) {
                return false;
            }
            return true;
        }, "optional cut-edge cap");
        sub->add_option("-o,--output", co->out, "output plan CSV")->required();
        if (refine)
            sub->add_option("--trajectory", co->trajectory, "write the d^2 trajectory here");
        sub->callback([co, refine, &action] {
            action = [co, refine] {
                dm::DualGraph g = dm::load_graph(co->graph);
                dm::ThetaWeights w = parse_theta(co->theta, g);
                dm::CentroidMatrix acc = dm::CentroidMatrix::load(co->centroid);
                dm::Plan start = dm::load_plan(co->start, g);
                dm::ValidityConfig cfg{co->eps, co->max_cut};
                if (refine) {
                    dm::RefineResult r =
                        dm::refine_medoid(start, acc, w, g, cfg, co->seed, co->steps);
                    dm::save_plan(r.plan, g, co->out);
                    if (!co->trajectory.empty()) {
                        std::ofstream tout(co->trajectory);
                        if (!tout)
                            throw std::runtime_error("cannot write trajectory: " + co->trajectory);
                        for (double v : r.trajectory) tout << dm::fmt_g17(v) << '\n';
                    }
                    std::cout << "improvements " << r.trajectory.size() - 1 << "\n";
                    std::cout << "d2 " << dm::fmt_g17(r.trajectory.front()) << " -> "
                              << dm::fmt_g17(r.trajectory.back()) << "\n";
                } else {
                    dm::Plan p = dm::plant_outlier(start, acc, w, g, cfg, co->seed, co->steps);
                    dm::save_plan(p, g, co->out);
                    std::cout << "d2 " << dm::fmt_g17(dm::distance_sq(start, acc, w)) << " -> "
                              << dm::fmt_g17(dm::distance_sq(p, acc, w)) << "\n";
                }
            };
        });
    };
    add_climb(chain->add_subcommand("refine", "climb toward the centroid"),
              std::make_shared<ClimbOpts>(), true);
    add_climb(chain->add_subcommand("outlier", "climb away from the centroid"),
              std::make_shared<ClimbOpts>(), false);
}

void setup_centroid(CLI::App& app, Action& action) {
    struct Opts {
        std::string graph, plans, out;
    };
    auto o = std::make_shared<Opts>();
    auto* cent = app.add_subcommand("centroid", "accumulate a plan directory into a centroid");
    cent->add_option("graph", o->graph, "graph JSON")->required();
    cent->add_option("--plans", o->plans, "plan directory")->required();
    cent->add_option("-o,--output", o->out, "output centroid CSV")->required();
    cent->callback([o, &action] {
        action = [o] {
            dm::DualGraph g = dm::load_graph(o->graph);
            std::vector<dm::Plan> plans = load_plans_checked(o->plans, g, o->graph);
            dm::CentroidMatrix acc(g.size());
            for (const dm::Plan& p : plans) acc.add_plan(p);
            acc.save(o->out);
            std::cout << "T=" << acc.samples() << " support=" << acc.support_size()
                      << " wrote " << o->out << "\n";
        };
    });
}

void setup_medoid(CLI::App& app, Action& action) {
    struct Opts {
        std::string graph, plans, centroid, out, theta = "unweighted";
    };
    auto o = std::make_shared<Opts>();
    auto* med = app.add_subcommand("medoid", "sample medoid of a plan directory");
    med->add_option("graph", o->graph, "graph JSON")->required();
    med->add_option("--plans", o->plans, "plan directory")->required();
    med->add_option("--centroid", o->centroid, "centroid CSV (default: accumulate from --plans)");
    med->add_option("--theta", o->theta, "pair weights")->capture_default_str();
    med->add_option("-o,--output", o->out, "write the medoid plan here");
    med->callback([o, &action] {
        action = [o] {
            dm::DualGraph g = dm::load_graph(o->graph);
            dm::ThetaWeights w = parse_theta(o->theta, g);
            std::vector<dm::Plan> plans = load_plans_checked(o->plans, g, o->graph);
            dm::CentroidMatrix acc = [&] {
                if (!o->centroid.empty()) return dm::CentroidMatrix::load(o->centroid);
                dm::CentroidMatrix a(g.size());
                for (const dm::Plan& p : plans) a.add_plan(p);
                return a;
            }();
            dm::SampleMedoid m = dm::sample_medoid(plans, acc, w);
            if (!o->out.empty()) dm::save_plan(m.plan, g, o->out);
            std::cout << "index " << m.index << "\n";
            std::cout << "d2 " << dm::fmt_g17(m.d2) << "\n";
        };
    });
}

void setup_hist(CLI::App& app, Action& action) {
    struct Opts {
        std::string graph, plans, centroid, out, svg, theta = "unweighted";
        int bins = 100;
        std::vector<std::string> probes;
    };
    auto o = std::make_shared<Opts>();
    auto* hist = app.add_subcommand("hist", "distance histogram of an ensemble");
    hist->add_option("graph", o->graph, "graph JSON")->required();
    hist->add_option("--plans", o->plans, "plan directory")->required();
    hist->add_option("--centroid", o->centroid, "centroid CSV")->required();
    hist->add_option("--theta", o->theta, "pair weights")->capture_default_str();
    hist->add_option("--bins", o->bins, "bin count")->capture_default_str();
    hist->add_option("-o,--output", o->out, "output histogram CSV")->required();
    hist->add_option("--svg", o->svg, "also render an SVG here");
    hist->add_option("--probe", o->probes, "plan CSV to mark in the SVG (repeatable)");
    hist->callback([o, &action] {
        action = [o] {
            dm::DualGraph g = dm::load_graph(o->graph);
            dm::ThetaWeights w = parse_theta(o->theta, g);
            std::vector<dm::Plan> plans = load_plans_checked(o->plans, g, o->graph);
            dm::CentroidMatrix acc = dm::CentroidMatrix::load(o->centroid);
            dm::DistanceHistogram h = dm::make_histogram(plans, acc, w, o->bins);
            dm::save_histogram(h, o->out, w.label(), o->centroid);
            if (!o->svg.empty()) {
                std::vector<std::pair<std::string, double>> marks;
                for (const std::string& path : o->probes) {
                    dm::Plan p = dm::load_plan(path, g);
                    marks.emplace_back(fs::path(path).filename().string(),
                                       dm::distance_sq(p, acc, w));
                }
                dm::render_histogram_svg(h, marks, o->svg);
            }
            std::cout << "T=" << h.T << " min=" << dm::fmt_g17(h.values.front())
                      << " max=" << dm::fmt_g17(h.values.back()) << " wrote " << o->out << "\n";
        };
    });
}

void setup_percentile(CLI::App& app, Action& action) {
    struct Opts {
        std::string graph, hist, centroid, probe, theta = "unweighted";
    };
    auto o = std::make_shared<Opts>();
    auto* pct = app.add_subcommand("percentile", "rank a probe plan against a histogram");
    pct->add_option("graph", o->graph, "graph JSON")->required();
    pct->add_option("--hist", o->hist, "histogram CSV")->required();
    pct->add_option("--centroid", o->centroid, "centroid CSV")->required();
    pct->add_option("--theta", o->theta, "pair weights")->capture_default_str();
    pct->add_option("--probe", o->probe, "probe plan CSV")->required();
    pct->callback([o, &action] {
        action = [o] {
            dm::DualGraph g = dm::load_graph(o->graph);
            dm::ThetaWeights w = parse_theta(o->theta, g);
            dm::DistanceHistogram h = dm::load_histogram(o->hist);
            dm::CentroidMatrix acc = dm::CentroidMatrix::load(o->centroid);
            dm::Plan p = dm::load_plan(o->probe, g);
            double d2 = dm::distance_sq(p, acc, w);
            std::cout << "d2 " << dm::fmt_g17(d2) << "\n";
            std::cout << "percentile " << dm::fmt_g17(dm::percentile_of(h, d2)) << "\n";
        };
    });
}

void setup_seats(CLI::App& app, Action& action) {
    struct Opts {
        std::string graph, plan, votes;
    };
    auto o = std::make_shared<Opts>();
    auto* st = app.add_subcommand("seats", "district winners under a fixed vote table");
    st->add_option("graph", o->graph, "graph JSON")->required();
    st->add_option("plan", o->plan, "plan CSV")->required();
    st->add_option("votes", o->votes, "votes CSV")->required();
    st->callback([o, &action] {
        action = [o] {
            dm::DualGraph g = dm::load_graph(o->graph);
            dm::Plan p = dm::load_plan(o->plan, g);
            dm::VoteTable v = dm::load_votes(o->votes, g);
            dm::SeatCount s = dm::seats(p, v);
            std::cout << "seats_a " << s.seats_a << "\n";
            std::cout << "seats_b " << s.seats_b << "\n";
            for (std::size_t d = 0; d < s.share_a.size(); ++d)
                std::cout << "district " << d << " share_a " << dm::fmt_g17(s.share_a[d]) << "\n";
            for (int d : s.tied) std::cout << "district " << d << " tied\n";
        };
    });
}

void setup_kcut(CLI::App& app, Action& action) {
    auto* kc = app.add_subcommand("kcut", "population-medoid cut instances");
    kc->require_subcommand(1);

    struct ExportOpts {
        std::string graph, centroid, out, theta = "unweighted";
        int k = 2;
        double eps = 0.05;
    };
    auto eo = std::make_shared<ExportOpts>();
    auto* exp = kc->add_subcommand("export", "write the weight instance for a centroid");
    exp->add_option("graph", eo->graph, "graph JSON")->required();
    exp->add_option("--centroid", eo->centroid, "centroid CSV")->required();
    exp->add_option("--theta", eo->theta, "pair weights")->capture_default_str();
    exp->add_option("-k", eo->k, "number of districts")->required();
    exp->add_option("--eps", eo->eps, "population tolerance")->capture_default_str();
    exp->add_option("-o,--output", eo->out, "output instance file")->required();
    exp->callback([eo, &action] {
        action = [eo] {
            dm::DualGraph g = dm::load_graph(eo->graph);
            dm::ThetaWeights w = parse_theta(eo->theta, g);
            dm::CentroidMatrix acc = dm::CentroidMatrix::load(eo->centroid);
            dm::KCutInstance inst =
                dm::build_instance(acc, w, g, eo->k, dm::ValidityConfig{eo->eps, std::nullopt});
            dm::save_instance(inst, eo->out);
            std::cout << "wrote " << eo->out << " (n=" << g.size() << " k=" << eo->k << ")\n";
        };
    });

    struct SolveOpts {
        std::string inst, graph;
        double eps = 0.05;
        std::optional<int> max_cut;
        std::string out;
    };
    auto so = std::make_shared<SolveOpts>();
    auto* sol = kc->add_subcommand("solve", "exact solve of a tiny instance");
    sol->add_option("instance", so->inst, "instance file")->required();
    sol->add_option("graph", so->graph, "graph JSON")->required();
    sol->add_option("--eps", so->eps, "population tolerance")->capture_default_str();
    sol->add_option("--max-cut-edges", [so](const std::vector<std::string>& v) {
        try {
            so->max_cut = std::stoi(v.at(0));
        } catch (const std::exception&) {
            return false;
        }
        return true;
    }, "optional cut-edge cap");
    sol->add_option("-o,--output", so->out, "write the first maximizer here");
    sol->callback([so, &action] {
        action = [so] {
            dm::DualGraph g = dm::load_graph(so->graph);
            dm::KCutInstance inst =
                dm::load_instance(so->inst, g, dm::ValidityConfig{so->eps, so->max_cut});
            dm::MedoidResult r = dm::exact_population_medoid(inst);
            std::cout << "objective " << dm::fmt_g17(r.objective) << "\n";
            std::cout << "maximizers " << r.plans.size() << "\n";
            for (std::size_t i = 0; i < r.plans.size(); ++i) {
                std::cout << "plan " << i << ":";
                for (int a : r.plans[i].assignment) std::cout << ' ' << a;
                std::cout << "\n";
            }
            if (!so->out.empty()) dm::save_plan(r.plans.front(), g, so->out);
        };
    });

    struct DemoOpts {
        std::uint64_t seed = 1;
        std::vector<long long> sizes = {10, 100, 1000};
        int trials = 2000;
    };
    auto dopt = std::make_shared<DemoOpts>();
    auto* demo = kc->add_subcommand("demo", "sample-medoid failure demonstration");
    demo->add_option("--seed", dopt->seed, "rng seed")->capture_default_str();
    demo->add_option("--sizes", dopt->sizes, "sample sizes T")->capture_default_str()->delimiter(',');
    demo->add_option("--trials", dopt->trials, "trials per size")->capture_default_str();
    demo->callback([dopt, &action] {
        action = [dopt] {
            dm::NegativeDemoReport rep = dm::negative_demo(dopt->seed, dopt->sizes, dopt->trials);
            std::cout << "trials " << rep.trials << "\n";
            std::cout << "T delta margin central_is_medoid miss_freq central_sample_freq "
                         "expected_central_freq\n";
            for (const dm::NegativeDemoRow& r : rep.rows) {
                std::cout << r.T << ' ' << dm::fmt_g17(r.delta) << ' ' << dm::fmt_g17(r.margin)
                          << ' ' << (r.population_medoid_is_central ? "yes" : "NO") << ' '
                          << dm::fmt_g17(r.miss_freq) << ' ' << dm::fmt_g17(r.central_sample_freq)
                          << ' ' << dm::fmt_g17(r.expected_central_freq) << "\n";
            }
        };
    });
}

void setup_pipeline(CLI::App& app, Action& action) {
    auto cfg = std::make_shared<RunConfig>();
    auto config_path = std::make_shared<std::string>();
    auto* pipe = app.add_subcommand("pipeline", "seed, chain, centroid, medoid, refine, histogram");
    auto* g_opt = pipe->add_option("graph", cfg->graph_path, "graph JSON");
    auto* o_opt = pipe->add_option("-o,--output", cfg->out_dir, "output directory");
    auto* k_opt = pipe->add_option("-k", cfg->k, "number of districts");
    auto* eps_opt = pipe->add_option("--eps", cfg->eps, "population tolerance")->capture_default_str();
    auto* theta_opt = pipe->add_option("--theta", cfg->theta, "pair weights")->capture_default_str();
    auto* steps_opt = pipe->add_option("--steps", cfg->steps, "accepted transitions")->capture_default_str();
    auto* burn_opt = pipe->add_option("--burn-in", cfg->burn_in, "burn-in")->capture_default_str();
    auto* thin_opt = pipe->add_option("--thin", cfg->thin, "thinning stride")->capture_default_str();
    auto* seeds_opt = pipe->add_option("--seeds", cfg->seeds, "rng seeds, one chain each")
                          ->delimiter(',');
    auto* refine_opt = pipe->add_option("--refine-steps", cfg->refine_steps,
                                        "refinement improvement budget")->capture_default_str();
    auto* bins_opt = pipe->add_option("--bins", cfg->bins, "histogram bins")->capture_default_str();
    pipe->add_option("--config", *config_path, "JSON config; explicit flags override its keys");
    pipe->callback([cfg, config_path, g_opt, o_opt, k_opt, eps_opt, theta_opt, steps_opt, burn_opt,
                    thin_opt, seeds_opt, refine_opt, bins_opt, &action] {
        action = [=] {
            if (!config_path->empty()) {
                std::ifstream in(*config_path);
                if (!in) throw std::runtime_error("cannot open config: " + *config_path);
                json j;
                try {
                    in >> j;
                } catch (const json::exception& e) {
                    throw std::runtime_error("config " + *config_path + ": " + e.what());
                }
                auto take = [&](const CLI::Option* opt, const char* key, auto& slot) {
                    if (opt->count() == 0 && j.contains(key))
                        slot = j.at(key).get<std::decay_t<decltype(slot)>>();
                };
                take(g_opt, "graph", cfg->graph_path);
                take(o_opt, "out", cfg->out_dir);
                take(k_opt, "k", cfg->k);
                take(eps_opt, "eps", cfg->eps);
                take(theta_opt, "theta", cfg->theta);
                take(steps_opt, "steps", cfg->steps);
                take(burn_opt, "burn_in", cfg->burn_in);
                take(thin_opt, "thin", cfg->thin);
                take(refine_opt, "refine_steps", cfg->refine_steps);
                take(bins_opt, "bins", cfg->bins);
                if (seeds_opt->count() == 0) {
                    if (j.contains("seeds"))
                        cfg->seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
                    else if (j.contains("seed"))
                        cfg->seeds = {j.at("seed").get<std::uint64_t>()};
                }
                if (j.contains("max_cut_edges") && !j.at("max_cut_edges").is_null())
                    cfg->max_cut_edges = j.at("max_cut_edges").get<int>();
            }
            cmd_pipeline(*cfg);
        };
    });
}

void setup_report(CLI::App& app, Action& action) {
    auto dir = std::make_shared<std::string>();
    auto* rep = app.add_subcommand("report", "summarize a pipeline directory");
    rep->add_option("dir", *dir, "pipeline output directory")->required();
    rep->callback([dir, &action] {
        action = [dir] { cmd_report(*dir); };
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distance-based districting ensembles: metrics, centroids, medoids, chains"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads, "worker threads for batch kernels")
        ->envname("DM_THREADS");

    Action action;
    setup_graph(app, action);
    setup_plan(app, action);
    setup_dist(app, action);
    setup_chain(app, action);
    setup_centroid(app, action);
    setup_medoid(app, action);
    setup_hist(app, action);
    setup_percentile(app, action);
    setup_seats(app, action);
    setup_kcut(app, action);
    setup_pipeline(app, action);
    setup_report(app, action);

    try {
        app.parse(argc, argv);
        dm::set_max_threads(threads);
        if (action) action();
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
