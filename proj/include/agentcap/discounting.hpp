#pragma once

// Two payment dates with separate discount factors for principal and agent.
// Agents are risk-neutral here: the agent's dated objective is
// E_p[b(0,w) + delta_A b(1,w)] - c(p).

#include <array>
#include <vector>

#include "agentcap/agent.hpp"
#include "agentcap/model.hpp"
#include "agentcap/pareto.hpp"
#include "agentcap/scaling.hpp"

namespace agentcap {

struct DatedSchedule {
    std::array<std::vector<double>, 2> values;  // [date][state]

    /// All mass at date 0 (or date 1), zeros at the other date.
    static DatedSchedule at_date(const std::vector<double>& v, int date);
    std::size_t states() const noexcept { return values[0].size(); }
    bool splits_dates() const;
};

struct DiscountPair {
    double delta_p = 1.0;
    double delta_a = 1.0;
};

struct DiscountedValues {
    double principal = 0.0;    // E_p[sum_t delta_P^t (y(t) - b(t))]
    double agent_gross = 0.0;  // E_p[sum_t delta_A^t b(t)]
};

/// Throws Validation for discount factors outside [0, 1] or shape mismatches.
DiscountedValues discounted_values(const Scenario& s, DiscountPair d, const DatedSchedule& y2,
                                   const DatedSchedule& b2, const Distribution& p);

/// Static scenario whose agent faces c / delta_A^t (and capacity k / delta_A^t,
/// so the feasible set is unchanged). Throws DegenerateDiscount for
/// delta_A = 0 at date 1.
Scenario reduce_single_date(const Scenario& s, DiscountPair d, int date);

/// Lattice best response to a dated contract under the agent's discounting.
BestResponseSet dated_best_response(const Scenario& s, DiscountPair d, const DatedSchedule& b2);

struct DatedProfile {
    DatedSchedule b;
    Distribution p;
};

struct DiscountedSlacks {
    InequalitySlacks slacks;
    // false when payments span both dates with delta_P != delta_A; the
    // chain then carries no sign guarantee
    bool sign_guaranteed = true;
};

/// Discounted version of the inequality chain. Output differences use
/// delta_P, payment differences use delta_A with each profile's own contract.
DiscountedSlacks discounted_inequality_diagnostic(const Scenario& s, const DatedSchedule& y2, const DatedProfile& base,
                                                  const DatedProfile& candidate, DiscountPair d, double alpha);

/// Feasible profiles for a finite list of dated contracts. Profile::contract
/// holds the date-0 payments followed by the date-1 payments.
std::vector<Profile> dated_feasible_profiles(const Scenario& s, DiscountPair d, const DatedSchedule& y2,
                                             const std::vector<DatedSchedule>& contracts, double alpha);

DatedProfile to_dated(const Profile& p, std::size_t states);

} // namespace agentcap
