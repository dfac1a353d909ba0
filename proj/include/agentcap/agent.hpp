#pragma once

#include <cstddef>
#include <vector>

#include "agentcap/lattice.hpp"
#include "agentcap/model.hpp"

namespace agentcap {

struct BestResponseSet {
    std::vector<Distribution> maximizers;
    std::vector<std::size_t> candidate_ids; // grid solver only
    double value = 0.0;
    bool any_binding = false;
    // convex solver only: the capacity multiplier at which the penalized
    // problem was solved
    double capacity_multiplier = 0.0;
};

/// Exhaustive scan of the feasible candidates (lattice points or effort grid).
/// Keeps every maximizer within tol_u, in lexicographic lattice order.
BestResponseSet best_response_grid(const Scenario& s, const Contract& b);
BestResponseSet best_response_grid(const Scenario& s, const CandidateSet& feasible, const Contract& b);

struct ConvexSolverOptions {
    int max_iter = 200000;
    double tol = 1e-13;
};

/// Maximizes E_p[u(b)] - (1 + mu) c(p) over the simplex, then bisects on
/// mu >= 0 until c(p) <= k. Quadratic and relative-entropy costs only.
BestResponseSet best_response_convex(const Scenario& s, const Contract& b, ConvexSolverOptions opt = {});

/// Euclidean projection onto the probability simplex.
std::vector<double> project_to_simplex(std::vector<double> v);

struct AgentFocResidual {
    double rho = 0.0;
    double mu = 0.0;
    std::vector<double> residual;
    double capacity_slack = 0.0;      // k - c(p)
    double complementarity_gap = 0.0; // mu * (k - c(p))
    bool slack = false;               // k - c(p) > tol_u

    double max_abs() const;
};

/// u(b(w)) - dc/dp(w) - rho - mu * dc/dp(w), evaluated as written.
AgentFocResidual agent_foc_residual(const Scenario& s, const Contract& b, const Distribution& p, double rho, double mu);

/// Least-squares (rho, mu) for the residual above over the states in the
/// support of p, with mu clamped at 0. States outside the support report a
/// zero residual: there the condition is an inequality.
AgentFocResidual fit_agent_multipliers(const Scenario& s, const Contract& b, const Distribution& p);

} // namespace agentcap
