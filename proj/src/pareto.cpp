#include "agentcap/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "agentcap/error.hpp"

namespace agentcap {

EnumeratedProblem enumerate_problem(const Scenario& s, bool parallel) {
    EnumeratedProblem ep;
    ep.scenario = s;
    ep.feasible = feasible_candidates(s);
    if (ep.feasible.size() == 0) throw Error(ErrorCode::EmptyFeasibleSet, "feasible distribution set empty");
    ep.family = enumerate_family(s);
    if (ep.family.empty()) throw Error(ErrorCode::Configuration, "contract family enumeration empty");

    const std::size_t n = s.n();
    std::vector<double> u;
    u.reserve(ep.family.size() * n);
    for (const auto& m : ep.family)
        for (double b : m.contract.b) u.push_back(s.utility.value(b));
    ep.responses = parallel ? omp::scan_best_responses(ep.feasible, u, ep.family.size(), s.tol_u)
                            : serial::scan_best_responses(ep.feasible, u, ep.family.size(), s.tol_u);
    return ep;
}

std::vector<Profile> EnumeratedProblem::profiles_at(double alpha) const {
    const Scenario& s = scenario;
    const std::size_t n = s.n();
    std::vector<Profile> out;
    for (std::size_t c = 0; c < family.size(); ++c) {
        const auto& b = family[c].contract;
        for (std::size_t j : responses.maximizers[c]) {
            const auto p = feasible.row(j);
            Profile pr;
            pr.contract = b;
            pr.dist = feasible.dist(j);
            pr.contract_params = family[c].params;
            pr.contract_index = c;
            pr.dist_index = feasible.ids[j];
            pr.cost = feasible.costs[j];
            double eu = 0.0;
            double ev = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                eu += p[i] * s.utility.value(b[i]);
                ev += p[i] * (alpha * s.y[i] - b[i]);
            }
            pr.agent_utility = eu - pr.cost;
            pr.principal_payoff = ev;
            pr.alpha = alpha;
            pr.capacity_binding = feasible.binds(pr.cost, s.tol_u);
            out.push_back(std::move(pr));
        }
    }
    return out;
}

std::vector<Profile> feasible_profiles(const Scenario& s, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::Validation, "alpha out of [0,1]");
    return enumerate_problem(s).profiles_at(alpha);
}

bool dominates(const Profile& q, const Profile& x, double tol) {
    return q.agent_utility >= x.agent_utility - tol && q.principal_payoff >= x.principal_payoff - tol &&
           (q.agent_utility > x.agent_utility + tol || q.principal_payoff > x.principal_payoff + tol);
}

void sort_profiles(std::vector<Profile>& profiles) {
    std::sort(profiles.begin(), profiles.end(), [](const Profile& a, const Profile& b) {
        if (a.agent_utility != b.agent_utility) return a.agent_utility > b.agent_utility;
        if (a.principal_payoff != b.principal_payoff) return a.principal_payoff > b.principal_payoff;
        if (a.contract.b != b.contract.b) return a.contract.b < b.contract.b;
        if (a.contract_index != b.contract_index) return a.contract_index < b.contract_index;
        return a.dist_index < b.dist_index;
    });
}

namespace {

struct Cluster {
    double lo;
    double hi;
};

// Single-linkage clusters of agent utilities, ascending.
std::vector<Cluster> utility_clusters(const std::vector<Profile>& profiles, double tol) {
    std::vector<double> u;
    u.reserve(profiles.size());
    for (const auto& p : profiles) u.push_back(p.agent_utility);
    std::sort(u.begin(), u.end());
    std::vector<Cluster> out;
    for (double v : u) {
        if (out.empty() || v - out.back().hi > tol) out.push_back({v, v});
        else out.back().hi = v;
    }
    return out;
}

} // namespace

// Sorted by agent utility descending, a profile x is improved upon iff
//   some q with U_q > U_x + tol has V_q >= V_x - tol, or
//   some q with U_q >= U_x - tol has V_q > V_x + tol.
// Both are prefix queries on the running maximum of V.
ParetoSet pareto_filter(std::vector<Profile> profiles, double tol_u) {
    ParetoSet ps;
    ps.tol_u = tol_u;
    if (profiles.empty()) return ps;
    ps.alpha = profiles.front().alpha;
    sort_profiles(profiles);

    const std::size_t n = profiles.size();
    std::vector<double> prefix_max(n);
    double run = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) prefix_max[i] = run = std::max(run, profiles[i].principal_payoff);

    auto count_above = [&](auto pred) {
        const auto it = std::partition_point(profiles.begin(), profiles.end(), pred);
        return static_cast<std::size_t>(it - profiles.begin());
    };

    std::vector<Profile> kept;
    for (const auto& x : profiles) {
        const double ux = x.agent_utility;
        const double vx = x.principal_payoff;
        const std::size_t strict = count_above([&](const Profile& q) { return q.agent_utility > ux + tol_u; });
        const std::size_t weak = count_above([&](const Profile& q) { return q.agent_utility >= ux - tol_u; });
        const bool dominated = (strict > 0 && prefix_max[strict - 1] >= vx - tol_u) ||
                               (weak > 0 && prefix_max[weak - 1] > vx + tol_u);
        if (!dominated) kept.push_back(x);
    }
    ps.profiles = std::move(kept);
    for (const auto& c : utility_clusters(ps.profiles, tol_u)) ps.agent_utility_levels.push_back(c.lo);
    return ps;
}

Selection select(const ParetoSet& ps, double r) {
    const double tol = ps.tol_u;
    Selection sel;
    sel.alpha = ps.alpha;
    sel.r = r;
    for (const auto& c : utility_clusters(ps.profiles, tol)) {
        if (c.lo < r - tol) continue;
        sel.chosen_level = c.lo;
        for (const auto& p : ps.profiles)
            if (p.agent_utility >= c.lo && p.agent_utility <= c.hi) sel.profiles.push_back(p);
        return sel;
    }
    throw Error(ErrorCode::EmptySelection, "no Pareto profile meets reservation");
}

} // namespace agentcap
