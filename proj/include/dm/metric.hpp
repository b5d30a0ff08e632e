#pragma once
#include "dm/districting.hpp"
#include "dm/graph.hpp"
#include "dm/theta.hpp"

namespace dm {

// Weighted plan distance: sum of theta(i,j) over unordered pairs i<j whose
// co-membership differs between the two plans. Equals the ordered-pair
// half-sum definition. A metric for theta > 0; invariant under district
// relabeling of either operand.
double distance(const Plan& p1, const Plan& p2, const ThetaWeights& w, const DualGraph& g);

// squared-difference companion; identical to `distance` on plans (the
// differences are binary), but it is the form that extends to fractional
// centroid operands (see centroid.hpp overloads)
double distance_sq(const Plan& p1, const Plan& p2, const ThetaWeights& w, const DualGraph& g);

// O(n + k^2) evaluation for factoring theta kinds (Unweighted,
// PopulationProduct) via district-intersection aggregates; exactly equals
// `distance`. Throws on non-factoring kinds so callers can fall back.
double distance_fast(const Plan& p1, const Plan& p2, const ThetaWeights& w, const DualGraph& g);

// sum of theta over the plan's same-district pairs
double plan_theta_mass(const Plan& plan, const ThetaWeights& w);

}  // namespace dm
