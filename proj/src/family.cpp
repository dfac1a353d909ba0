#include "agentcap/family.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "agentcap/error.hpp"
#include "agentcap/kernels.hpp"
#include "agentcap/lattice.hpp"

namespace agentcap {

namespace {

constexpr double kShapeTol = 1e-12;

std::vector<FamilyMember> cartesian(const std::vector<GridRange>& axes) {
    std::vector<std::vector<double>> vals;
    for (const auto& a : axes) vals.push_back(a.values());
    std::vector<FamilyMember> out;
    if (vals.empty() || std::any_of(vals.begin(), vals.end(), [](const auto& v) { return v.empty(); })) return out;
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
        Contract b;
        for (std::size_t i = 0; i < axes.size(); ++i) b.b.push_back(vals[i][idx[i]]);
        out.push_back({std::move(b), {}});
        bool done = true;
        for (std::size_t pos = axes.size(); pos-- > 0;) {
            if (++idx[pos] < vals[pos].size()) {
                done = false;
                break;
            }
            idx[pos] = 0;
        }
        if (done) return out;
    }
}

bool monotone_bounded_slope(const Scenario& s, const Contract& b) {
    const std::size_t n = s.n();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return s.y[a] < s.y[c]; });
    for (std::size_t r = 1; r < n; ++r) {
        const double db = b[order[r]] - b[order[r - 1]];
        const double dy = s.y[order[r]] - s.y[order[r - 1]];
        if (db < -kShapeTol || db > dy + kShapeTol) return false;
    }
    return true;
}

bool within_ranges(const std::vector<GridRange>& axes, const Contract& b) {
    if (axes.size() != b.size()) return false;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const auto vals = axes[i].values();
        const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
        if (b[i] < *lo - kShapeTol || b[i] > *hi + kShapeTol) return false;
    }
    return true;
}

Contract debt(const Scenario& s, double face) {
    Contract b;
    for (double y : s.y.y) b.b.push_back(std::max(0.0, y - face));
    return b;
}

Contract live_or_die(const Scenario& s, double l) {
    Contract b;
    for (double y : s.y.y) b.b.push_back(y >= l ? y : 0.0);
    return b;
}

bool close(const Contract& a, const Contract& b, double tol) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

} // namespace

std::vector<std::string> family_param_names(const Scenario& s) {
    switch (s.family.kind) {
    case FamilyKind::LinearShare:
        if (s.family.rent_indexed) return {"beta", "w", "rent"};
        return {"beta", "w"};
    case FamilyKind::Debt: return {"face"};
    case FamilyKind::LiveOrDie: return {"threshold"};
    default: return {};
    }
}

std::vector<FamilyMember> enumerate_family(const Scenario& s) {
    const ContractFamily& f = s.family;
    const std::size_t n = s.n();
    std::vector<FamilyMember> out;
    switch (f.kind) {
    case FamilyKind::Grid:
        if (f.per_state.size() != n) throw Error(ErrorCode::Configuration, "grid family needs one range per state");
        return cartesian(f.per_state);
    case FamilyKind::MonotoneBoundedSlope: {
        if (f.per_state.size() != n) throw Error(ErrorCode::Configuration, "grid family needs one range per state");
        for (auto& m : cartesian(f.per_state))
            if (monotone_bounded_slope(s, m.contract)) out.push_back(std::move(m));
        return out;
    }
    case FamilyKind::LinearShare: {
        const auto betas = f.beta.values();
        if (!f.rent_indexed) {
            for (double beta : betas)
                for (double w : f.wage.values()) {
                    Contract b;
                    for (double y : s.y.y) b.b.push_back(beta * y + w);
                    out.push_back({std::move(b), {beta, w}});
                }
            return out;
        }
        // w = rent - max_p (beta E_p[y] - c(p)), so the best response yields
        // exactly `rent` to a risk-neutral agent
        const CandidateSet d = feasible_candidates(s);
        if (d.size() == 0) throw Error(ErrorCode::EmptyFeasibleSet, "feasible distribution set empty");
        std::vector<double> u;
        u.reserve(betas.size() * n);
        for (double beta : betas)
            for (double y : s.y.y) u.push_back(beta * y);
        const auto scan = omp::scan_best_responses(d, u, betas.size(), s.tol_u);
        for (std::size_t k = 0; k < betas.size(); ++k) {
            for (double rent : f.rent.values()) {
                const double w = rent - scan.value[k];
                Contract b;
                for (double y : s.y.y) b.b.push_back(betas[k] * y + w);
                out.push_back({std::move(b), {betas[k], w, rent}});
            }
        }
        return out;
    }
    case FamilyKind::Debt:
        for (double F : f.face.values()) out.push_back({debt(s, F), {F}});
        return out;
    case FamilyKind::LiveOrDie:
        for (double l : f.threshold.values()) out.push_back({live_or_die(s, l), {l}});
        return out;
    }
    return out;
}

bool family_contains(const Scenario& s, const Contract& b) {
    const ContractFamily& f = s.family;
    if (b.size() != s.n()) return false;
    switch (f.kind) {
    case FamilyKind::Grid: return within_ranges(f.per_state, b);
    case FamilyKind::MonotoneBoundedSlope: return within_ranges(f.per_state, b) && monotone_bounded_slope(s, b);
    case FamilyKind::LinearShare: {
        // b - beta * y must be constant for a listed beta
        for (double beta : f.beta.values()) {
            const double w = b[0] - beta * s.y[0];
            bool ok = true;
            for (std::size_t i = 1; i < b.size() && ok; ++i) ok = std::abs(b[i] - beta * s.y[i] - w) <= 1e-9;
            if (ok) return true;
        }
        return false;
    }
    case FamilyKind::Debt:
        for (double F : f.face.values())
            if (close(debt(s, F), b, kShapeTol)) return true;
        return false;
    case FamilyKind::LiveOrDie:
        for (double l : f.threshold.values())
            if (close(live_or_die(s, l), b, kShapeTol)) return true;
        return false;
    }
    return false;
}

} // namespace agentcap
