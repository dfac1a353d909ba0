#include "agentcap/capstruct.hpp"

#include <algorithm>
#include <string>

#include "agentcap/error.hpp"
#include "agentcap/kernels.hpp"

namespace agentcap {

namespace {

void require_scaling(double face, double alpha) {
    if (face < 0.0) throw Error(ErrorCode::Validation, "debt face value must be nonnegative");
    if (alpha < 0.0 || alpha > 1.0) throw Error(ErrorCode::Validation, "alpha out of [0,1]");
    if (alpha == 0.0 && face > 0.0) throw Error(ErrorCode::DegenerateScaling, "F/alpha undefined at alpha = 0");
}

} // namespace

Contract scaled_debt_contract(const OutputFunction& y, double face, double alpha) {
    require_scaling(face, alpha);
    Contract b;
    for (double v : y.y) b.b.push_back(std::max(0.0, alpha * v - face));
    return b;
}

Contract scaled_debt_contract_factored(const OutputFunction& y, double face, double alpha) {
    require_scaling(face, alpha);
    Contract b;
    if (alpha == 0.0) {
        b.b.assign(y.size(), 0.0);
        return b;
    }
    const double scaled = face / alpha;
    for (double v : y.y) b.b.push_back(alpha * std::max(0.0, v - scaled));
    return b;
}

DebtEquityDecomposition debt_equity_decompose(const OutputFunction& y, double face, double alpha_star) {
    require_scaling(face, alpha_star);
    DebtEquityDecomposition d;
    d.face = face;
    d.alpha_star = alpha_star;
    if (alpha_star == 0.0) {
        // F = 0: the principal holds everything as equity
        d.face_scaled = 0.0;
        for (double v : y.y) {
            d.agent_leg.push_back(0.0);
            d.debt_leg.push_back(std::min(v, 0.0));
            d.equity_leg.push_back(v - std::min(v, 0.0));
        }
        return d;
    }
    d.face_scaled = face / alpha_star;
    for (double v : y.y) {
        const double residual = std::max(0.0, v - d.face_scaled);
        const double debt = std::min(v, d.face_scaled);
        const double agent = alpha_star * residual;
        d.agent_leg.push_back(agent);
        d.debt_leg.push_back(debt);
        // equity is the remainder of the residual claim
        d.equity_leg.push_back(residual - agent);
    }
    return d;
}

LiveOrDieDecomposition live_or_die_decompose(const OutputFunction& y, double threshold, double alpha_star) {
    if (alpha_star < 0.0 || alpha_star > 1.0) throw Error(ErrorCode::Validation, "alpha out of [0,1]");
    LiveOrDieDecomposition d;
    d.threshold = threshold;
    d.alpha_star = alpha_star;
    for (double v : y.y) {
        if (v < threshold) {
            d.agent_leg.push_back(0.0);
            d.principal_leg.push_back(v);
        } else {
            const double agent = alpha_star * v;
            d.agent_leg.push_back(agent);
            d.principal_leg.push_back(v - agent);
        }
    }
    return d;
}

std::vector<SweepPoint> sweep_alpha_star(const Scenario& s, std::vector<double> k_grid, AlphaStarOptions opt) {
    std::sort(k_grid.begin(), k_grid.end());
    std::vector<SweepPoint> out(k_grid.size());
    std::vector<std::string> errors(k_grid.size());
    std::vector<int> codes(k_grid.size(), 0);
    const auto count = static_cast<std::ptrdiff_t>(k_grid.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count())
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            Scenario sk = s;
            sk.capacity = k_grid[idx];
            require_valid(sk);
            const auto ep = enumerate_problem(sk, false);
            const auto base = base_selection(ep, sk.reservation);
            const auto res = alpha_star(ep, base.chosen_level, opt);
            out[idx] = {k_grid[idx], res.alpha_star, res.lo, res.hi, res.non_monotone};
        } catch (const Error& e) {
            errors[idx] = e.what();
            codes[idx] = static_cast<int>(e.code()) + 1;
        }
    }
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (codes[i]) {
            throw Error(static_cast<ErrorCode>(codes[i] - 1), "k=" + std::to_string(k_grid[i]) + ": " + errors[i]);
        }
    }
    return out;
}

} // namespace agentcap
