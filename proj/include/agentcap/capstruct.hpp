#pragma once

// Security-design consequences of output scaling: a debt contract written on
// alpha* y splits into debt with face F / alpha* plus a (1 - alpha*) equity
// stake for the principal; live-or-die contracts keep (1 - alpha*) y above
// the threshold.

#include <vector>

#include "agentcap/model.hpp"
#include "agentcap/scaling.hpp"

namespace agentcap {

/// b(w) = max{0, alpha y(w) - F}. Throws DegenerateScaling for alpha = 0 with F > 0.
Contract scaled_debt_contract(const OutputFunction& y, double face, double alpha);
/// The same contract written as alpha * max{0, y(w) - F / alpha}.
Contract scaled_debt_contract_factored(const OutputFunction& y, double face, double alpha);

struct DebtEquityDecomposition {
    double face = 0.0;
    double alpha_star = 0.0;
    double face_scaled = 0.0;        // F / alpha*
    std::vector<double> agent_leg;   // alpha* max{0, y - F/alpha*}
    std::vector<double> debt_leg;    // min{y, F/alpha*}
    std::vector<double> equity_leg;  // (1 - alpha*) max{0, y - F/alpha*}
};

DebtEquityDecomposition debt_equity_decompose(const OutputFunction& y, double face, double alpha_star);

struct LiveOrDieDecomposition {
    double threshold = 0.0;
    double alpha_star = 0.0;
    std::vector<double> agent_leg;      // 0 below l, alpha* y at or above
    std::vector<double> principal_leg;  // y below l, (1 - alpha*) y at or above
};

LiveOrDieDecomposition live_or_die_decompose(const OutputFunction& y, double threshold, double alpha_star);

struct SweepPoint {
    double capacity = 0.0;
    double alpha_star = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool non_monotone = false;
};

/// alpha*(k) for each capacity, sorted by k. Each scenario's base level is
/// the P(1, r) level at that capacity.
std::vector<SweepPoint> sweep_alpha_star(const Scenario& s, std::vector<double> k_grid, AlphaStarOptions opt = {});

} // namespace agentcap
