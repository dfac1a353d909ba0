#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "agentcap/model.hpp"

namespace agentcap {

struct FamilyMember {
    Contract contract;
    std::vector<double> params;
};

/// Names of the entries of FamilyMember::params for the family kind.
std::vector<std::string> family_param_names(const Scenario& s);

/// Finite enumeration of the contract family. Every member satisfies
/// `family_contains`. Rent-indexed linear shares consult the agent's
/// best-response value over the feasible set.
std::vector<FamilyMember> enumerate_family(const Scenario& s);

/// Membership predicate for the family's structural restriction
/// (grid bounds, nondecreasing with bounded increments, debt or live-or-die shape).
bool family_contains(const Scenario& s, const Contract& b);

} // namespace agentcap
