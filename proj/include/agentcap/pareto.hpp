#pragma once

#include <cstddef>
#include <vector>

#include "agentcap/family.hpp"
#include "agentcap/kernels.hpp"
#include "agentcap/lattice.hpp"
#include "agentcap/model.hpp"

namespace agentcap {

/// Family members paired with the agent's best-response sets. Best responses
/// do not depend on alpha, so one enumeration serves every perturbed problem.
struct EnumeratedProblem {
    Scenario scenario;
    CandidateSet feasible;
    std::vector<FamilyMember> family;
    BestResponseScan responses;

    std::size_t evaluations() const noexcept { return family.size() * feasible.size(); }
    /// One profile per (contract, maximizer), payoffs computed against alpha * y.
    std::vector<Profile> profiles_at(double alpha) const;
};

/// Throws Configuration for an empty family and EmptyFeasibleSet when D is empty.
EnumeratedProblem enumerate_problem(const Scenario& s, bool parallel = true);

std::vector<Profile> feasible_profiles(const Scenario& s, double alpha);

/// q improves on x: neither coordinate lower by more than tol, one higher by more than tol.
bool dominates(const Profile& q, const Profile& x, double tol);

struct ParetoSet {
    double alpha = 1.0;
    double tol_u = kDefaultTolU;
    std::vector<Profile> profiles;
    // agent-utility levels after merging values closer than tol_u, ascending
    std::vector<double> agent_utility_levels;
};

/// Profiles sorted by agent utility desc, principal payoff desc, contract, distribution.
void sort_profiles(std::vector<Profile>& profiles);

ParetoSet pareto_filter(std::vector<Profile> profiles, double tol_u = kDefaultTolU);

struct Selection {
    double alpha = 1.0;
    double r = 0.0;
    double chosen_level = 0.0;
    std::vector<Profile> profiles;
};

/// Profiles at the lowest utility level >= r - tol_u. Throws EmptySelection.
Selection select(const ParetoSet& ps, double r);

} // namespace agentcap
