#pragma once
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dm/centroid.hpp"
#include "dm/districting.hpp"
#include "dm/graph.hpp"
#include "dm/theta.hpp"

namespace dm {

// d^2 distances of an ensemble to a fixed centroid, sorted, with equal-width
// bins derived for rendering. Percentiles depend only on the raw values.
struct DistanceHistogram {
    std::vector<double> values;  // ascending
    std::vector<double> bin_edges;
    std::vector<long long> counts;
    long long T = 0;
};

DistanceHistogram histogram_from_values(std::vector<double> values, int bins = 100);
DistanceHistogram make_histogram(const std::vector<Plan>& ensemble, const CentroidMatrix& acc,
                                 const ThetaWeights& w, int bins = 100);

// strict-rank percentile: 100 * (#values strictly below probe) / T
double percentile_of(const DistanceHistogram& h, double probe_d2);

// expected distance of `probe` under a plan distribution: f(probe) =
// sum_j p_j * d(probe, M_j); the quantity the population medoid minimizes
double medoid_cost(const Plan& probe, const std::vector<Plan>& support,
                   const std::vector<double>& probabilities, const ThetaWeights& w,
                   const DualGraph& g);

// Kemeny-style consensus: the candidate minimizing the vote-weighted sum of
// distances to all candidates; ties go to the earliest index, and uniform
// vote scaling cannot change the winner
std::size_t committee_medoid(const std::vector<Plan>& candidates,
                             const std::vector<long long>& votes, const ThetaWeights& w,
                             const DualGraph& g);

// |d^2(m1,acc) - d^2(m2,acc)| / min(...); +inf when a probe sits exactly on
// the centroid (d^2 = 0), reported rather than thrown
double relative_error(const Plan& m1, const Plan& m2, const CentroidMatrix& acc,
                      const ThetaWeights& w);
double relative_error(double d2_a, double d2_b);

struct VoteTable {
    std::vector<double> votes_a;
    std::vector<double> votes_b;
};

VoteTable load_votes(const std::string& path, const DualGraph& g);
void save_votes(const VoteTable& votes, const DualGraph& g, const std::string& path);

struct SeatCount {
    int seats_a = 0;
    int seats_b = 0;
    std::vector<double> share_a;  // per-district A share of the two-party vote
    std::vector<int> tied;        // districts counted for neither
};

SeatCount seats(const Plan& plan, const VoteTable& votes);

// distribution of seats_a across the ensemble
std::map<int, long long> seats_histogram(const std::vector<Plan>& ensemble, const VoteTable& votes);

void save_histogram(const DistanceHistogram& h, const std::string& path, const std::string& theta_label,
                    const std::string& centroid_file);
DistanceHistogram load_histogram(const std::string& path, int bins = 100);

// self-contained SVG: bars plus one vertical marker per probe (label, d^2)
void render_histogram_svg(const DistanceHistogram& h,
                          const std::vector<std::pair<std::string, double>>& probes,
                          const std::string& path);

}  // namespace dm
