#include "dm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dm/accum.hpp"
#include "dm/metric.hpp"
#include "dm/parallel.hpp"

namespace dm {

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

DistanceHistogram histogram_from_values(std::vector<double> values, int bins) {
    if (values.empty()) throw std::invalid_argument("histogram: no values");
    if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
    std::sort(values.begin(), values.end());
    DistanceHistogram h;
    h.T = static_cast<long long>(values.size());
    h.values = std::move(values);
    double lo = h.values.front();
    double hi = h.values.back();
    if (hi <= lo) hi = lo + 1.0;  // degenerate span, one occupied bin
    h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b)
        h.bin_edges[static_cast<std::size_t>(b)] = lo + (hi - lo) * b / bins;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (double v : h.values) {
        int b = static_cast<int>((v - lo) / (hi - lo) * bins);
        if (b >= bins) b = bins - 1;
        if (b < 0) b = 0;
        ++h.counts[static_cast<std::size_t>(b)];
    }
    return h;
}

DistanceHistogram make_histogram(const std::vector<Plan>& ensemble, const CentroidMatrix& acc,
                                 const ThetaWeights& w, int bins) {
    return histogram_from_values(batch_distance_sq(ensemble, acc, w), bins);
}

double percentile_of(const DistanceHistogram& h, double probe_d2) {
    if (h.values.empty()) throw std::invalid_argument("percentile_of: empty histogram");
    auto it = std::lower_bound(h.values.begin(), h.values.end(), probe_d2);
    auto below = static_cast<double>(it - h.values.begin());
    return 100.0 * below / static_cast<double>(h.values.size());
}

double medoid_cost(const Plan& probe, const std::vector<Plan>& support,
                   const std::vector<double>& probabilities, const ThetaWeights& w,
                   const DualGraph& g) {
    if (support.size() != probabilities.size())
        throw std::invalid_argument("medoid_cost: support and probabilities differ in length");
    if (support.empty()) throw std::invalid_argument("medoid_cost: empty support");
    double total = 0.0;
    for (double p : probabilities) {
        if (p < 0.0) throw std::invalid_argument("medoid_cost: negative probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("medoid_cost: probabilities sum to " + fmt17(total) +
                                    ", expected 1");
    PairwiseSum acc;
    for (std::size_t j = 0; j < support.size(); ++j)
        acc.add(probabilities[j] * distance(probe, support[j], w, g));
    return acc.total();
}

std::size_t committee_medoid(const std::vector<Plan>& candidates,
                             const std::vector<long long>& votes, const ThetaWeights& w,
                             const DualGraph& g) {
    if (candidates.empty()) throw std::invalid_argument("committee_medoid: no candidates");
    if (candidates.size() != votes.size())
        throw std::invalid_argument("committee_medoid: candidates and votes differ in length");
    long long total = 0;
    for (long long v : votes) {
        if (v < 0) throw std::invalid_argument("committee_medoid: negative vote count");
        total += v;
    }
    if (total < 1) throw std::invalid_argument("committee_medoid: no votes cast");
    std::size_t best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        PairwiseSum acc;
        for (std::size_t j = 0; j < candidates.size(); ++j) {
            if (votes[j] == 0 || i == j) continue;
            acc.add(static_cast<double>(votes[j]) * distance(candidates[i], candidates[j], w, g));
        }
        double cost = acc.total();
        if (cost < best_cost) {
            best_cost = cost;
            best = i;
        }
    }
    return best;
}

double relative_error(double d2_a, double d2_b) {
    double lo = std::min(d2_a, d2_b);
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(d2_a - d2_b) / lo;
}

double relative_error(const Plan& m1, const Plan& m2, const CentroidMatrix& acc,
                      const ThetaWeights& w) {
    return relative_error(distance_sq(m1, acc, w), distance_sq(m2, acc, w));
}

VoteTable load_votes(const std::string& path, const DualGraph& g) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open vote file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("vote file is empty: " + path);
    if (line == "unit_id,votes_a,votes_b\r") line.pop_back();
    if (line != "unit_id,votes_a,votes_b")
        throw std::runtime_error("vote file " + path + ": expected header unit_id,votes_a,votes_b");
    VoteTable t;
    t.votes_a.assign(g.size(), -1.0);
    t.votes_b.assign(g.size(), -1.0);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string id, a_str, b_str;
        if (!std::getline(ss, id, ',') || !std::getline(ss, a_str, ',') || !std::getline(ss, b_str))
            throw std::runtime_error("vote file " + path + ": malformed row: " + line);
        auto idx = static_cast<std::size_t>(g.index_of(id));
        double a = 0.0, b = 0.0;
        try {
            a = std::stod(a_str);
            b = std::stod(b_str);
        } catch (const std::exception&) {
            throw std::runtime_error("vote file " + path + ": bad number in row: " + line);
        }
        if (a < 0.0 || b < 0.0)
            throw std::invalid_argument("vote file " + path + ": negative votes for unit " + id);
        if (t.votes_a[idx] >= 0.0)
            throw std::invalid_argument("vote file " + path + ": duplicate unit " + id);
        t.votes_a[idx] = a;
        t.votes_b[idx] = b;
        ++rows;
    }
    if (rows != static_cast<std::size_t>(g.size()))
        throw std::invalid_argument("vote file " + path + ": has " + std::to_string(rows) +
                                    " rows, graph has " + std::to_string(g.size()) + " units");
    double grand = 0.0;
    for (std::size_t i = 0; i < t.votes_a.size(); ++i) grand += t.votes_a[i] + t.votes_b[i];
    if (grand <= 0.0) throw std::invalid_argument("vote file " + path + ": all vote totals are zero");
    return t;
}

void save_votes(const VoteTable& votes, const DualGraph& g, const std::string& path) {
    auto n = static_cast<std::size_t>(g.size());
    if (votes.votes_a.size() != n || votes.votes_b.size() != n)
        throw std::invalid_argument("save_votes: table size does not match graph");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write vote file: " + path);
    out << "unit_id,votes_a,votes_b\n";
    for (int i = 0; i < g.size(); ++i)
        out << g.unit(i).id << ',' << fmt17(votes.votes_a[static_cast<std::size_t>(i)]) << ','
            << fmt17(votes.votes_b[static_cast<std::size_t>(i)]) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

SeatCount seats(const Plan& plan, const VoteTable& votes) {
    if (votes.votes_a.size() != plan.assignment.size())
        throw std::invalid_argument("seats: vote table size does not match plan");
    SeatCount s;
    std::vector<double> a(static_cast<std::size_t>(plan.k), 0.0);
    std::vector<double> b(static_cast<std::size_t>(plan.k), 0.0);
    for (std::size_t i = 0; i < plan.assignment.size(); ++i) {
        auto d = static_cast<std::size_t>(plan.assignment[i]);
        a[d] += votes.votes_a[i];
        b[d] += votes.votes_b[i];
    }
    s.share_a.resize(static_cast<std::size_t>(plan.k));
    for (int d = 0; d < plan.k; ++d) {
        auto di = static_cast<std::size_t>(d);
        double tot = a[di] + b[di];
        s.share_a[di] = tot > 0.0 ? a[di] / tot : 0.5;
        if (a[di] > b[di])
            ++s.seats_a;
        else if (b[di] > a[di])
            ++s.seats_b;
        else
            s.tied.push_back(d);
    }
    return s;
}

std::map<int, long long> seats_histogram(const std::vector<Plan>& ensemble, const VoteTable& votes) {
    std::map<int, long long> hist;
    for (const Plan& p : ensemble) ++hist[seats(p, votes).seats_a];
    return hist;
}

void save_histogram(const DistanceHistogram& h, const std::string& path, const std::string& theta_label,
                    const std::string& centroid_file) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write histogram: " + path);
    out << "# theta=" << theta_label << " centroid=" << centroid_file << " T=" << h.T << '\n';
    for (double v : h.values) out << fmt17(v) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

DistanceHistogram load_histogram(const std::string& path, int bins) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open histogram: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# theta=", 0) != 0)
        throw std::runtime_error("histogram " + path + ": missing '# theta=...' header");
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            values.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw std::runtime_error("histogram " + path + ": bad value: " + line);
        }
    }
    return histogram_from_values(std::move(values), bins);
}

void render_histogram_svg(const DistanceHistogram& h,
                          const std::vector<std::pair<std::string, double>>& probes,
                          const std::string& path) {
    const double width = 720.0, height = 360.0;
    const double ml = 50.0, mr = 20.0, mt = 20.0, mb = 40.0;
    const double pw = width - ml - mr, ph = height - mt - mb;
    double lo = h.bin_edges.front(), hi = h.bin_edges.back();
    for (const auto& pr : probes) {
        lo = std::min(lo, pr.second);
        hi = std::max(hi, pr.second);
    }
    if (hi <= lo) hi = lo + 1.0;
    long long cmax = 1;
    for (long long c : h.counts) cmax = std::max(cmax, c);
    auto sx = [&](double v) { return ml + (v - lo) / (hi - lo) * pw; };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write svg: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        if (h.counts[b] == 0) continue;
        double x0 = sx(h.bin_edges[b]);
        double x1 = sx(h.bin_edges[b + 1]);
        double hb = ph * static_cast<double>(h.counts[b]) / static_cast<double>(cmax);
        out << "<rect x=\"" << x0 << "\" y=\"" << (mt + ph - hb) << "\" width=\"" << (x1 - x0)
            << "\" height=\"" << hb << "\" fill=\"#4878a8\"/>\n";
    }
    out << "<line x1=\"" << ml << "\" y1=\"" << (mt + ph) << "\" x2=\"" << (ml + pw) << "\" y2=\""
        << (mt + ph) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml << "\" y=\"" << (height - 10) << "\" font-size=\"12\">" << fmt17(lo)
        << "</text>\n";
    out << "<text x=\"" << (ml + pw) << "\" y=\"" << (height - 10)
        << "\" font-size=\"12\" text-anchor=\"end\">" << fmt17(hi) << "</text>\n";
    double label_y = mt + 12.0;
    for (const auto& pr : probes) {
        double x = sx(pr.second);
        out << "<line x1=\"" << x << "\" y1=\"" << mt << "\" x2=\"" << x << "\" y2=\"" << (mt + ph)
            << "\" stroke=\"#c0392b\" stroke-dasharray=\"4 3\"/>\n";
        out << "<text x=\"" << (x + 4) << "\" y=\"" << label_y << "\" font-size=\"12\" fill=\"#c0392b\">"
            << pr.first << "</text>\n";
        label_y += 14.0;
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace dm
