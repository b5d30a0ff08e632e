#include "dm/graph.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace dm {

DualGraph::DualGraph(std::vector<Unit> units, std::vector<std::pair<int, int>> edges)
    : units_(std::move(units)), edges_(std::move(edges)) {
    n_ = static_cast<int>(units_.size());
    if (n_ < 1) throw std::invalid_argument("graph: at least one unit required");

    for (int i = 0; i < n_; ++i) {
        const Unit& u = units_[i];
        if (!(u.pop > 0.0))
            throw std::invalid_argument("graph: unit " + std::to_string(i) + " (\"" + u.id +
                                        "\"): nonpositive population");
        if (!id_index_.emplace(u.id, i).second)
            throw std::invalid_argument("graph: duplicate unit id \"" + u.id + "\"");
        total_pop_ += u.pop;
    }

    for (auto& e : edges_) {
        if (e.first > e.second) std::swap(e.first, e.second);
        if (e.first < 0 || e.second >= n_)
            throw std::invalid_argument("graph: edge [" + std::to_string(e.first) + "," +
                                        std::to_string(e.second) + "]: index out of range");
        if (e.first == e.second)
            throw std::invalid_argument("graph: edge [" + std::to_string(e.first) + "," +
                                        std::to_string(e.second) + "] is a self-loop");
    }
    std::sort(edges_.begin(), edges_.end());
    for (std::size_t i = 1; i < edges_.size(); ++i)
        if (edges_[i] == edges_[i - 1])
            throw std::invalid_argument("graph: duplicate edge [" + std::to_string(edges_[i].first) +
                                        "," + std::to_string(edges_[i].second) + "]");

    adj_.assign(n_, {});
    for (const auto& [a, b] : edges_) {
        adj_[a].push_back(b);
        adj_[b].push_back(a);
    }
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end());

    // connectivity: every downstream algorithm assumes it
    std::vector<char> seen(n_, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : adj_[u])
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                q.push(v);
            }
    }
    if (reached != n_) {
        int missing = 0;
        while (seen[missing]) ++missing;
        throw std::invalid_argument("graph: disconnected (unit " + std::to_string(missing) +
                                    " \"" + units_[missing].id + "\" unreachable from unit 0)");
    }
}

int DualGraph::index_of(const std::string& id) const {
    auto it = id_index_.find(id);
    if (it == id_index_.end()) throw std::invalid_argument("graph: unknown unit id \"" + id + "\"");
    return it->second;
}

bool DualGraph::operator==(const DualGraph& o) const {
    if (n_ != o.n_ || edges_ != o.edges_) return false;
    for (int i = 0; i < n_; ++i)
        if (units_[i].id != o.units_[i].id || units_[i].pop != o.units_[i].pop) return false;
    return true;
}

void DualGraph::save(const std::string& path) const { save_graph(*this, path); }

void save_graph(const DualGraph& g, const std::string& path) {
    nlohmann::json j;
    j["units"] = nlohmann::json::array();
    for (int i = 0; i < g.size(); ++i)
        j["units"].push_back({{"id", g.unit(i).id}, {"pop", g.unit(i).pop}});
    j["edges"] = nlohmann::json::array();
    for (const auto& [a, b] : g.edges()) j["edges"].push_back({a, b});
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write graph file: " + path);
    out << j.dump(1) << "\n";
}

DualGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read graph file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }

    std::vector<Unit> units;
    std::vector<std::pair<int, int>> edges;
    try {
        for (const auto& ju : j.at("units"))
            units.push_back({ju.at("id").get<std::string>(), ju.at("pop").get<double>()});
        for (const auto& je : j.at("edges")) {
            if (!je.is_array() || je.size() != 2)
                throw std::runtime_error(path + ": edge entries must be [i,j] pairs");
            int a = je[0].get<int>();
            int b = je[1].get<int>();
            if (a >= b)
                throw std::invalid_argument(path + ": edge [" + std::to_string(a) + "," +
                                            std::to_string(b) + "]: indices must satisfy i<j");
            edges.emplace_back(a, b);
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return DualGraph(std::move(units), std::move(edges));
}

DualGraph make_grid(const GridSpec& spec) {
    if (spec.rows < 1 || spec.cols < 1) throw std::invalid_argument("grid: rows and cols must be positive");
    const long long cells = static_cast<long long>(spec.rows) * spec.cols;
    if (cells < 2) throw std::invalid_argument("grid: at least 2 cells required");
    if (!spec.per_cell.empty() && static_cast<long long>(spec.per_cell.size()) != cells)
        throw std::invalid_argument("grid: per-cell population list must have rows*cols entries");

    std::vector<Unit> units;
    units.reserve(cells);
    for (int r = 0; r < spec.rows; ++r)
        for (int c = 0; c < spec.cols; ++c) {
            double pop = spec.per_cell.empty() ? spec.uniform_pop
                                               : spec.per_cell[static_cast<std::size_t>(r) * spec.cols + c];
            units.push_back({"r" + std::to_string(r) + "c" + std::to_string(c), pop});
        }

    std::vector<std::pair<int, int>> edges;
    for (int r = 0; r < spec.rows; ++r)
        for (int c = 0; c < spec.cols; ++c) {
            int idx = r * spec.cols + c;
            if (c + 1 < spec.cols) edges.emplace_back(idx, idx + 1);
            if (r + 1 < spec.rows) edges.emplace_back(idx, idx + spec.cols);
        }
    return DualGraph(std::move(units), std::move(edges));
}

std::vector<std::vector<int>> shortest_path_lengths(const DualGraph& g) {
    const int n = g.size();
    std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
    std::vector<int> queue(n);
    for (int s = 0; s < n; ++s) {
        auto& row = dist[s];
        row[s] = 0;
        int head = 0, tail = 0;
        queue[tail++] = s;
        while (head < tail) {
            int u = queue[head++];
            for (int v : g.neighbors(u))
                if (row[v] < 0) {
                    row[v] = row[u] + 1;
                    queue[tail++] = v;
                }
        }
    }
    return dist;
}

}  // namespace dm
