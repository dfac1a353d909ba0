#pragma once

// First-order conditions of the principal's program after replacing the
// agent's incentive constraint by its first-order condition
//   u(b(w)) - dc/dp(w) = rho + mu dc/dp(w)
// with mu promoted to a choice variable. Multipliers: tau (adding-up),
// delta (capacity), phi[w] (agent FOC), zeta (participation).

#include <vector>

#include "agentcap/model.hpp"

namespace agentcap {

struct PrincipalFocPoint {
    Contract b;
    Distribution p;
    double rho = 0.0;
    double mu = 0.0;
    double tau = 0.0;
    double delta = 0.0;
    double zeta = 0.0;
    std::vector<double> phi;
};

struct PrincipalFocResiduals {
    // (i)  y - b - [tau + delta g - (mu+1) sum_w' phi[w'] H(w,w') + zeta (u(b) - g)]
    std::vector<double> stationarity_p;
    // (ii) -p - [phi u'(b) + zeta p u'(b)]
    std::vector<double> stationarity_b;
    // (iii) -sum_w phi[w] g(w)
    double orthogonality = 0.0;
    // u(b) - g - rho - mu g
    std::vector<double> agent_foc;
    double adding_up = 0.0;         // sum p - 1
    double capacity_gap = 0.0;      // c(p) - k
    double participation_gap = 0.0; // E_p[u(b)] - c(p) - r

    /// Largest absolute residual over the FOC blocks and adding-up.
    double max_abs() const;
};

/// Throws Interiority unless every p(w) > 0; Differentiability for cost
/// kinds without second derivatives.
PrincipalFocResiduals principal_foc_residual(const Scenario& s, const PrincipalFocPoint& point);

/// Constraints the caller declares binding. Inactive constraints have their
/// multipliers pinned to zero (mu = delta = 0, or zeta = 0).
struct ActiveSet {
    bool capacity = false;
    bool participation = true;
};

struct FocSolverOptions {
    int max_iter = 200;
    double tol = 1e-10;
};

struct FocSolveResult {
    PrincipalFocPoint point;
    PrincipalFocResiduals residuals;
    bool converged = false;
    int iterations = 0;
    double max_residual = 0.0;  // includes declared-active constraint gaps
};

/// Agent best response to b = beta * y seeds (b, p); multipliers start at
/// zero except rho, fitted by least squares.
PrincipalFocPoint initial_foc_point(const Scenario& s, double beta = 1.0);

/// Damped Gauss-Newton on the stacked system. The step is the minimum-norm
/// least-squares solution, so free directions (e.g. mu when the capacity
/// binds under risk neutrality) stay near their starting values.
/// Throws SingularJacobianError when no descent is possible on a
/// rank-deficient Jacobian; otherwise a stalled run returns converged=false.
FocSolveResult solve_principal_foc(const Scenario& s, const PrincipalFocPoint& initial, ActiveSet active,
                                   FocSolverOptions opt = {});

struct AffineRepresentation {
    double slope = 0.0;
    double intercept_a = 0.0;  // b = slope y - A - B * curvature
    double curvature_b = 0.0;
    double fit_residual = 0.0; // max absolute deviation
    // (1 + mu) / (1 + mu + mu delta) from the point's multipliers
    double multiplier_slope = 0.0;
    std::vector<double> curvature;
};

/// Least-squares fit of b(w) on {y(w), 1, p(w)(1/u'(b(w)) + zeta) sum_w' H(w,w')}.
/// Throws DegenerateFit when y is constant.
AffineRepresentation affine_representation_check(const Scenario& s, const PrincipalFocPoint& point,
                                                 const OutputFunction& y);

} // namespace agentcap
