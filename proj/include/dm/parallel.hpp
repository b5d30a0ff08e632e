#pragma once
#include <vector>

#include "dm/districting.hpp"
#include "dm/theta.hpp"

namespace dm {

class CentroidMatrix;

// Worker-count knob honored by the batch kernels below; 1 (the default)
// means strictly serial. Results are identical at any setting: each item is
// computed independently and reductions happen in fixed index order.
void set_max_threads(int threads);
int max_threads();

// d^2 of every plan against the centroid; OpenMP across plans when
// max_threads() > 1, bitwise equal to the serial reference
std::vector<double> batch_distance_sq(const std::vector<Plan>& plans, const CentroidMatrix& acc,
                                      const ThetaWeights& w);
std::vector<double> batch_distance_sq_serial(const std::vector<Plan>& plans,
                                             const CentroidMatrix& acc, const ThetaWeights& w);

// plan_theta_mass of every plan
std::vector<double> batch_plan_mass(const std::vector<Plan>& plans, const ThetaWeights& w);
std::vector<double> batch_plan_mass_serial(const std::vector<Plan>& plans, const ThetaWeights& w);

}  // namespace dm
