#pragma once

// Output-scaling factor alpha*: the supremum of alpha in [0, 1] for which
// every selected Pareto optimum of the alpha-perturbed problem leaves the
// capacity constraint slack, plus a verifier for the equivalence between
// the capacity-constrained problem and the problem with output alpha* y.

#include <optional>
#include <string>
#include <vector>

#include "agentcap/pareto.hpp"

namespace agentcap {

/// True iff every profile of select(P(alpha), u_bar) has c(p) below the
/// feasible set's binding_capacity by more than tol_u.
bool capacity_slack_predicate(const EnumeratedProblem& ep, double alpha, double u_bar);
bool capacity_slack_predicate(const Scenario& s, double alpha, double u_bar);

/// P(1, r) on an enumerated problem.
Selection base_selection(const EnumeratedProblem& ep, double r);

struct AlphaStarOptions {
    double eps = 1e-4;
    // coarse scan spacing before bisection; a non-monotone predicate is
    // detected on this scan
    double coarse_step = 0.05;
};

struct PredicatePoint {
    double alpha = 0.0;
    bool all_slack = false;
};

struct AlphaStarResult {
    double alpha_star = 0.0;
    double lo = 0.0;  // predicate holds (unless alpha* = 0)
    double hi = 0.0;  // predicate fails (unless alpha* = 1)
    std::vector<PredicatePoint> trace;  // ascending in alpha
    bool non_monotone = false;
    // slack optimum at lo, the sub-alpha* end of the bracket
    std::optional<Profile> slack_witness;
};

AlphaStarResult alpha_star(const EnumeratedProblem& ep, double u_bar, AlphaStarOptions opt = {});
AlphaStarResult alpha_star(const Scenario& s, double u_bar, AlphaStarOptions opt = {});

/// Slacks of the chain
///   E_p[y] - E_pa[y] >= E_p[b] - E_pa[b_a] >= alpha (E_p[y] - E_pa[y]) >= 0
/// and of the participation rearrangement c(p) - c(pa) >= E_p[b] - E_pa[b_a].
struct InequalitySlacks {
    double output_over_payment = 0.0;
    double payment_over_scaled_output = 0.0;
    double scaled_output = 0.0;
    double participation = 0.0;

    double min() const;
    static InequalitySlacks worst_of(const InequalitySlacks& a, const InequalitySlacks& b);
};

InequalitySlacks verify_inequalities(const Scenario& s, double alpha, const Profile& base, const Profile& candidate);

struct TheoremCheck {
    double alpha = 0.0;
    bool in_range = false;  // alpha >= alpha*; otherwise skipped
    bool all_slack = false;
    bool inclusion_ok = true;
    bool converse_ok = true;
    std::size_t candidates = 0;
    std::size_t binding_candidates = 0;
};

struct TheoremReport {
    std::vector<Profile> base_set;  // P(1, r)
    Profile base_profile;
    double u_bar = 0.0;
    AlphaStarResult alpha;
    std::vector<TheoremCheck> checks;
    InequalitySlacks worst;
    std::size_t pairs_checked = 0;
    // equalities forced when the candidate binds; worst absolute deviation
    double step2_worst = 0.0;
    std::size_t step2_cases = 0;
    std::optional<Profile> slack_witness;
    bool slack_witness_ok = false;
    std::vector<std::string> violations;

    bool inclusion_ok() const;
    bool converse_ok() const;
};

struct TheoremOptions {
    AlphaStarOptions alpha;
    double tol_num = 1e-7;
    double step2_tol = 1e-6;
};

/// Never throws on a failed check; failures land in `violations`.
/// Throws EmptySelection when P(1, r) is empty.
TheoremReport verify_theorem(const Scenario& s, double r, const std::vector<double>& alpha_grid, TheoremOptions opt = {});

/// alpha values j * step for j = 0..1/step, the last forced to 1.
std::vector<double> alpha_grid(double step);

} // namespace agentcap
