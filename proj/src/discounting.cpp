#include "agentcap/discounting.hpp"

#include <cmath>

#include "agentcap/error.hpp"
#include "agentcap/kernels.hpp"
#include "agentcap/lattice.hpp"

namespace agentcap {

namespace {

void check_discount(DiscountPair d) {
    if (!(d.delta_p >= 0.0 && d.delta_p <= 1.0 && d.delta_a >= 0.0 && d.delta_a <= 1.0)) {
        throw Error(ErrorCode::Validation, "discount factors must lie in [0,1]");
    }
}

void check_shape(const DatedSchedule& x, std::size_t n) {
    if (x.values[0].size() != n || x.values[1].size() != n) {
        throw Error(ErrorCode::Validation, "dated schedule must be 2 x n");
    }
    for (const auto& row : x.values)
        for (double v : row)
            if (!std::isfinite(v)) throw Error(ErrorCode::Validation, "dated schedule has non-finite entries");
}

void require_risk_neutral(const Scenario& s) {
    if (s.utility.kind != UtilityKind::RiskNeutral) {
        throw Error(ErrorCode::Configuration, "dated payoffs are defined for risk-neutral agents");
    }
}

std::vector<double> discounted_sum(const DatedSchedule& x, double delta) {
    std::vector<double> out(x.states());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.values[0][i] + delta * x.values[1][i];
    return out;
}

} // namespace

DatedSchedule DatedSchedule::at_date(const std::vector<double>& v, int date) {
    DatedSchedule d;
    d.values[0].assign(v.size(), 0.0);
    d.values[1].assign(v.size(), 0.0);
    d.values[date == 0 ? 0 : 1] = v;
    return d;
}

bool DatedSchedule::splits_dates() const {
    bool first = false;
    bool second = false;
    for (double v : values[0]) first = first || v != 0.0;
    for (double v : values[1]) second = second || v != 0.0;
    return first && second;
}

DiscountedValues discounted_values(const Scenario& s, DiscountPair d, const DatedSchedule& y2,
                                   const DatedSchedule& b2, const Distribution& p) {
    check_discount(d);
    const std::size_t n = s.n();
    check_shape(y2, n);
    check_shape(b2, n);
    DiscountedValues out;
    for (std::size_t i = 0; i < n; ++i) {
        const double net0 = y2.values[0][i] - b2.values[0][i];
        const double net1 = y2.values[1][i] - b2.values[1][i];
        out.principal += p[i] * (net0 + d.delta_p * net1);
        out.agent_gross += p[i] * (b2.values[0][i] + d.delta_a * b2.values[1][i]);
    }
    return out;
}

Scenario reduce_single_date(const Scenario& s, DiscountPair d, int date) {
    check_discount(d);
    if (date != 0 && date != 1) throw Error(ErrorCode::Validation, "date must be 0 or 1");
    if (date == 0) return s;
    if (d.delta_a == 0.0) throw Error(ErrorCode::DegenerateDiscount, "agent discount factor is zero at date 1");
    Scenario r = s;
    r.cost.scale = s.cost.scale / d.delta_a;
    r.capacity = s.capacity / d.delta_a;
    return r;
}

BestResponseSet dated_best_response(const Scenario& s, DiscountPair d, const DatedSchedule& b2) {
    check_discount(d);
    check_shape(b2, s.n());
    require_risk_neutral(s);
    const CandidateSet feasible = feasible_candidates(s);
    if (feasible.size() == 0) throw Error(ErrorCode::EmptyFeasibleSet, "feasible distribution set empty");
    const auto u = discounted_sum(b2, d.delta_a);
    const auto scan = serial::scan_best_responses(feasible, u, 1, s.tol_u);
    BestResponseSet out;
    out.value = scan.value[0];
    for (std::size_t j : scan.maximizers[0]) {
        out.maximizers.push_back(feasible.dist(j));
        out.candidate_ids.push_back(feasible.ids[j]);
        if (feasible.binds(feasible.costs[j], s.tol_u)) out.any_binding = true;
    }
    return out;
}

DiscountedSlacks discounted_inequality_diagnostic(const Scenario& s, const DatedSchedule& y2, const DatedProfile& base,
                                                  const DatedProfile& candidate, DiscountPair d, double alpha) {
    check_discount(d);
    const std::size_t n = s.n();
    check_shape(y2, n);
    check_shape(base.b, n);
    check_shape(candidate.b, n);
    const auto y_p = discounted_sum(y2, d.delta_p);
    const auto b_base = discounted_sum(base.b, d.delta_a);
    const auto b_cand = discounted_sum(candidate.b, d.delta_a);

    const double dy = expectation(base.p.p, y_p) - expectation(candidate.p.p, y_p);
    const double db = expectation(base.p.p, b_base) - expectation(candidate.p.p, b_cand);
    const double dc = cost(s, base.p) - cost(s, candidate.p);

    DiscountedSlacks out;
    out.slacks = {dy - db, db - alpha * dy, alpha * dy, dc - db};
    const bool split = base.b.splits_dates() || candidate.b.splits_dates();
    out.sign_guaranteed = !(split && d.delta_p != d.delta_a);
    return out;
}

std::vector<Profile> dated_feasible_profiles(const Scenario& s, DiscountPair d, const DatedSchedule& y2,
                                             const std::vector<DatedSchedule>& contracts, double alpha) {
    check_discount(d);
    require_risk_neutral(s);
    const std::size_t n = s.n();
    check_shape(y2, n);
    const CandidateSet feasible = feasible_candidates(s);
    if (feasible.size() == 0) throw Error(ErrorCode::EmptyFeasibleSet, "feasible distribution set empty");

    std::vector<double> u;
    u.reserve(contracts.size() * n);
    for (const auto& c : contracts) {
        check_shape(c, n);
        const auto eff = discounted_sum(c, d.delta_a);
        u.insert(u.end(), eff.begin(), eff.end());
    }
    const auto scan = omp::scan_best_responses(feasible, u, contracts.size(), s.tol_u);
    const auto y_p = discounted_sum(y2, d.delta_p);

    std::vector<Profile> out;
    for (std::size_t c = 0; c < contracts.size(); ++c) {
        const auto b_p = discounted_sum(contracts[c], d.delta_p);
        for (std::size_t j : scan.maximizers[c]) {
            const auto p = feasible.row(j);
            Profile pr;
            pr.contract.b = contracts[c].values[0];
            pr.contract.b.insert(pr.contract.b.end(), contracts[c].values[1].begin(), contracts[c].values[1].end());
            pr.dist = feasible.dist(j);
            pr.contract_index = c;
            pr.dist_index = feasible.ids[j];
            pr.cost = feasible.costs[j];
            pr.agent_utility = expectation(p, std::span<const double>(u.data() + c * n, n)) - pr.cost;
            double v = 0.0;
            for (std::size_t i = 0; i < n; ++i) v += p[i] * (alpha * y_p[i] - b_p[i]);
            pr.principal_payoff = v;
            pr.alpha = alpha;
            pr.capacity_binding = feasible.binds(pr.cost, s.tol_u);
            out.push_back(std::move(pr));
        }
    }
    return out;
}

DatedProfile to_dated(const Profile& p, std::size_t states) {
    DatedProfile d;
    d.b.values[0].assign(p.contract.b.begin(), p.contract.b.begin() + static_cast<std::ptrdiff_t>(states));
    d.b.values[1].assign(p.contract.b.begin() + static_cast<std::ptrdiff_t>(states), p.contract.b.end());
    d.p = p.dist;
    return d;
}

} // namespace agentcap
