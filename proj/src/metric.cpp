#include "dm/metric.hpp"

#include <stdexcept>
#include <vector>

#include "dm/accum.hpp"

namespace dm {

namespace {

void check_operands(const Plan& p1, const Plan& p2, const ThetaWeights& w, const DualGraph& g) {
    const auto n = static_cast<std::size_t>(g.size());
    if (p1.assignment.size() != n || p2.assignment.size() != n)
        throw std::invalid_argument("distance: plan does not match graph size");
    if (w.n() != g.size())
        throw std::invalid_argument("distance: theta weights built for a different graph");
}

std::vector<std::vector<int>> district_members(const Plan& p) {
    std::vector<std::vector<int>> m(p.k);
    for (std::size_t i = 0; i < p.assignment.size(); ++i)
        m[p.assignment[i]].push_back(static_cast<int>(i));
    return m;
}

}  // namespace

double distance(const Plan& p1, const Plan& p2, const ThetaWeights& w, const DualGraph& g) {
    check_operands(p1, p2, w, g);
    const int n = g.size();
    const int* a = p1.assignment.data();
    const int* b = p2.assignment.data();
    PairwiseSum sum;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = i + 1; j < n; ++j) {
            bool s1 = a[i] == a[j];
            bool s2 = b[i] == b[j];
            if (s1 != s2) row += w.at(i, j);
        }
        sum.add(row);
    }
    return sum.total();
}

double distance_sq(const Plan& p1, const Plan& p2, const ThetaWeights& w, const DualGraph& g) {
    check_operands(p1, p2, w, g);
    const int n = g.size();
    const int* a = p1.assignment.data();
    const int* b = p2.assignment.data();
    PairwiseSum sum;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = i + 1; j < n; ++j) {
            double diff = static_cast<double>(a[i] == a[j]) - static_cast<double>(b[i] == b[j]);
            row += w.at(i, j) * diff * diff;
        }
        sum.add(row);
    }
    return sum.total();
}

double distance_fast(const Plan& p1, const Plan& p2, const ThetaWeights& w, const DualGraph& g) {
    check_operands(p1, p2, w, g);
    if (!w.factoring())
        throw std::invalid_argument("distance_fast: theta kind does not factor per vertex");
    const int n = g.size();

    // same-pair mass of a vertex group with factor sum S and squared sum Q is
    // (S^2 - Q) / 2; the symmetric difference of co-memberships is then
    // mass(p1) + mass(p2) - 2 * mass(joint refinement)
    std::vector<double> s1(p1.k, 0.0), q1(p1.k, 0.0);
    std::vector<double> s2(p2.k, 0.0), q2(p2.k, 0.0);
    std::vector<double> sj(static_cast<std::size_t>(p1.k) * p2.k, 0.0);
    std::vector<double> qj(static_cast<std::size_t>(p1.k) * p2.k, 0.0);
    for (int i = 0; i < n; ++i) {
        const double f = w.factor(i);
        const double f2 = f * f;
        const int d1 = p1.assignment[i];
        const int d2 = p2.assignment[i];
        s1[d1] += f;
        q1[d1] += f2;
        s2[d2] += f;
        q2[d2] += f2;
        const std::size_t cell = static_cast<std::size_t>(d1) * p2.k + d2;
        sj[cell] += f;
        qj[cell] += f2;
    }
    auto mass = [](const std::vector<double>& s, const std::vector<double>& q) {
        double m = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) m += (s[i] * s[i] - q[i]) / 2.0;
        return m;
    };
    return mass(s1, q1) + mass(s2, q2) - 2.0 * mass(sj, qj);
}

double plan_theta_mass(const Plan& plan, const ThetaWeights& w) {
    if (static_cast<int>(plan.assignment.size()) != w.n())
        throw std::invalid_argument("plan_theta_mass: plan does not match theta size");
    if (w.factoring()) {
        std::vector<double> s(plan.k, 0.0), q(plan.k, 0.0);
        for (std::size_t i = 0; i < plan.assignment.size(); ++i) {
            const double f = w.factor(static_cast<int>(i));
            s[plan.assignment[i]] += f;
            q[plan.assignment[i]] += f * f;
        }
        double m = 0.0;
        for (int d = 0; d < plan.k; ++d) m += (s[d] * s[d] - q[d]) / 2.0;
        return m;
    }
    PairwiseSum sum;
    for (const auto& members : district_members(plan)) {
        double part = 0.0;
        for (std::size_t x = 0; x < members.size(); ++x)
            for (std::size_t y = x + 1; y < members.size(); ++y)
                part += w.at(members[x], members[y]);
        sum.add(part);
    }
    return sum.total();
}

}  // namespace dm
