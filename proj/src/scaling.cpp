#include "agentcap/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "agentcap/error.hpp"
#include "agentcap/kernels.hpp"

namespace agentcap {

namespace {

Selection selection_at(const EnumeratedProblem& ep, double alpha, double u_bar) {
    return select(pareto_filter(ep.profiles_at(alpha), ep.scenario.tol_u), u_bar);
}

bool all_slack(const Selection& sel) {
    return std::all_of(sel.profiles.begin(), sel.profiles.end(), [](const Profile& p) { return !p.capacity_binding; });
}

bool contains(const std::vector<Profile>& set, const Profile& p) {
    return std::any_of(set.begin(), set.end(), [&](const Profile& q) { return q.same_profile(p); });
}

} // namespace

std::vector<double> alpha_grid(double step) {
    const auto count = static_cast<int>(std::llround(1.0 / step));
    std::vector<double> out;
    for (int j = 0; j <= count; ++j) out.push_back(j == count ? 1.0 : j * step);
    return out;
}

bool capacity_slack_predicate(const EnumeratedProblem& ep, double alpha, double u_bar) {
    return all_slack(selection_at(ep, alpha, u_bar));
}

bool capacity_slack_predicate(const Scenario& s, double alpha, double u_bar) {
    return capacity_slack_predicate(enumerate_problem(s), alpha, u_bar);
}

Selection base_selection(const EnumeratedProblem& ep, double r) { return selection_at(ep, 1.0, r); }

AlphaStarResult alpha_star(const EnumeratedProblem& ep, double u_bar, AlphaStarOptions opt) {
    AlphaStarResult res;
    const auto grid = alpha_grid(opt.coarse_step);
    std::vector<char> coarse(grid.size(), 0);
    // empty selections are rethrown after the parallel region
    std::vector<std::string> errors(grid.size());
    const auto count = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count())
    for (std::ptrdiff_t j = 0; j < count; ++j) {
        try {
            coarse[static_cast<std::size_t>(j)] = capacity_slack_predicate(ep, grid[static_cast<std::size_t>(j)], u_bar);
        } catch (const Error& e) {
            errors[static_cast<std::size_t>(j)] = e.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw Error(ErrorCode::EmptySelection, e);

    for (std::size_t j = 0; j < grid.size(); ++j) res.trace.push_back({grid[j], coarse[j] != 0});
    for (std::size_t j = 1; j < grid.size(); ++j)
        if (coarse[j] && !coarse[j - 1]) res.non_monotone = true;

    std::ptrdiff_t last_true = -1;
    for (std::size_t j = 0; j < grid.size(); ++j)
        if (coarse[j]) last_true = static_cast<std::ptrdiff_t>(j);

    if (last_true < 0) {
        // sup of the empty set is taken as 0
        res.alpha_star = res.lo = res.hi = 0.0;
        return res;
    }
    const auto lt = static_cast<std::size_t>(last_true);
    if (lt + 1 == grid.size()) {
        res.alpha_star = res.lo = res.hi = 1.0;
    } else {
        double lo = grid[lt];
        double hi = grid[lt + 1];
        while (hi - lo > opt.eps) {
            const double mid = 0.5 * (lo + hi);
            const bool holds = capacity_slack_predicate(ep, mid, u_bar);
            res.trace.push_back({mid, holds});
            (holds ? lo : hi) = mid;
        }
        res.lo = lo;
        res.hi = hi;
        res.alpha_star = hi;
        std::sort(res.trace.begin(), res.trace.end(),
                  [](const PredicatePoint& a, const PredicatePoint& b) { return a.alpha < b.alpha; });
    }

    // limit of sub-alpha* optima: the slack optimum closest to the capacity
    const auto sel = selection_at(ep, res.lo, u_bar);
    const Profile* best = nullptr;
    for (const auto& p : sel.profiles) {
        if (!p.capacity_binding && (!best || p.cost > best->cost)) best = &p;
    }
    if (best) res.slack_witness = *best;
    return res;
}

AlphaStarResult alpha_star(const Scenario& s, double u_bar, AlphaStarOptions opt) {
    return alpha_star(enumerate_problem(s), u_bar, opt);
}

double InequalitySlacks::min() const {
    return std::min({output_over_payment, payment_over_scaled_output, scaled_output, participation});
}

InequalitySlacks InequalitySlacks::worst_of(const InequalitySlacks& a, const InequalitySlacks& b) {
    return {std::min(a.output_over_payment, b.output_over_payment),
            std::min(a.payment_over_scaled_output, b.payment_over_scaled_output),
            std::min(a.scaled_output, b.scaled_output), std::min(a.participation, b.participation)};
}

InequalitySlacks verify_inequalities(const Scenario& s, double alpha, const Profile& base, const Profile& candidate) {
    const double dy = expectation(base.dist.p, s.y.y) - expectation(candidate.dist.p, s.y.y);
    const double db = expectation(base.dist.p, base.contract.b) - expectation(candidate.dist.p, candidate.contract.b);
    const double dc = cost(s, base.dist) - cost(s, candidate.dist);
    return {dy - db, db - alpha * dy, alpha * dy, dc - db};
}

bool TheoremReport::inclusion_ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const TheoremCheck& c) { return c.inclusion_ok; });
}

bool TheoremReport::converse_ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const TheoremCheck& c) { return c.converse_ok; });
}

TheoremReport verify_theorem(const Scenario& s, double r, const std::vector<double>& grid, TheoremOptions opt) {
    const EnumeratedProblem ep = enumerate_problem(s);
    TheoremReport rep;
    const Selection base = base_selection(ep, r);
    rep.base_set = base.profiles;
    rep.base_profile = base.profiles.front();
    rep.u_bar = base.chosen_level;
    rep.alpha = alpha_star(ep, rep.u_bar, opt.alpha);
    rep.worst = {1e300, 1e300, 1e300, 1e300};

    auto note = [&](const std::string& what, double alpha, const Profile* a, const Profile* b) {
        std::ostringstream os;
        os << what << " at alpha=" << alpha;
        if (a) os << " (contract " << a->contract_index << ", dist " << a->dist_index << ")";
        if (b) os << " vs (contract " << b->contract_index << ", dist " << b->dist_index << ")";
        rep.violations.push_back(os.str());
    };

    for (double alpha : grid) {
        TheoremCheck chk;
        chk.alpha = alpha;
        chk.in_range = alpha >= rep.alpha.alpha_star && alpha <= 1.0;
        if (!chk.in_range) {
            rep.checks.push_back(chk);
            continue;
        }
        const Selection sel = selection_at(ep, alpha, rep.u_bar);
        chk.candidates = sel.profiles.size();
        chk.all_slack = all_slack(sel);
        for (const auto& b : rep.base_set) {
            if (!contains(sel.profiles, b)) {
                chk.inclusion_ok = false;
                note("inclusion: base profile missing", alpha, &b, nullptr);
            }
        }
        for (const auto& cand : sel.profiles) {
            const bool binding = cand.capacity_binding;
            if (binding) {
                ++chk.binding_candidates;
                if (!contains(rep.base_set, cand)) {
                    chk.converse_ok = false;
                    note("converse: binding candidate not in P(1,r)", alpha, &cand, nullptr);
                }
            }
            for (const auto& b : rep.base_set) {
                const auto sl = verify_inequalities(s, alpha, b, cand);
                rep.worst = InequalitySlacks::worst_of(rep.worst, sl);
                ++rep.pairs_checked;
                if (sl.min() < -opt.tol_num) note("inequality chain violated", alpha, &b, &cand);
                if (binding) {
                    const double dev = std::max(
                        {std::abs(b.cost - ep.feasible.binding_capacity),
                         std::abs(expectation(b.dist.p, b.contract.b) - expectation(cand.dist.p, cand.contract.b)),
                         std::abs(expectation(b.dist.p, s.y.y) - expectation(cand.dist.p, s.y.y))});
                    rep.step2_worst = std::max(rep.step2_worst, dev);
                    ++rep.step2_cases;
                    if (dev > opt.step2_tol) note("binding-case equalities fail", alpha, &b, &cand);
                }
            }
        }
        rep.checks.push_back(chk);
    }
    if (rep.pairs_checked == 0) rep.worst = {};

    // The witness must also be optimal once the capacity constraint is dropped.
    rep.slack_witness = rep.alpha.slack_witness;
    if (rep.slack_witness) {
        Scenario open = s;
        const auto all = all_candidates(s);
        open.capacity = *std::max_element(all.costs.begin(), all.costs.end()) + 1.0;
        const EnumeratedProblem ep_open = enumerate_problem(open);
        try {
            const Selection sel = selection_at(ep_open, rep.alpha.lo, rep.u_bar);
            const Profile& w = *rep.slack_witness;
            rep.slack_witness_ok = std::any_of(sel.profiles.begin(), sel.profiles.end(), [&](const Profile& q) {
                if (q.dist_index != w.dist_index) return false;
                for (std::size_t i = 0; i < w.contract.size(); ++i)
                    if (std::abs(q.contract[i] - w.contract[i]) > 1e-9) return false;
                return true;
            });
        } catch (const Error&) {
            rep.slack_witness_ok = false;
        }
        if (!rep.slack_witness_ok) note("slack witness is not optimal without the capacity constraint", rep.alpha.lo, &*rep.slack_witness, nullptr);
    }
    return rep;
}

} // namespace agentcap
