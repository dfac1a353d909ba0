#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "agentcap/discounting.hpp"
#include "agentcap/error.hpp"
#include "support.hpp"

using namespace agentcap;
using namespace testing_support;

TEST_CASE("discounted values: examples") {
    const Scenario s = s1_grid();
    const Distribution p{{0.8, 0.2}};
    const auto y2 = DatedSchedule::at_date(s.y.y, 0);
    const auto b2 = DatedSchedule::at_date({0.0, 0.4}, 0);
    const auto v = discounted_values(s, DiscountPair{1, 1}, y2, b2, p);
    CHECK(v.principal == principal_value(s, 1.0, Contract{{0.0, 0.4}}, p));
    CHECK(v.agent_gross - cost(s, p) == agent_value(s, Contract{{0.0, 0.4}}, p));

    DatedSchedule rep;
    rep.values = {s.y.y, s.y.y};
    const auto zero_b = DatedSchedule::at_date({0.0, 0.0}, 0);
    const auto twice = discounted_values(s, DiscountPair{1, 1}, rep, zero_b, p);
    CHECK(twice.principal == doctest::Approx(2.0 * principal_value(s, 1.0, Contract{{0, 0}}, p)));

    const auto late = DatedSchedule::at_date({0.0, 1.0}, 1);
    CHECK(discounted_values(s, DiscountPair{1, 0.5}, y2, late, p).agent_gross == doctest::Approx(0.1));

    CHECK_THROWS_AS((void)discounted_values(s, DiscountPair{1.5, 1}, y2, late, p), Error);
}

TEST_CASE("single-date reduction: examples") {
    const Scenario s = s1_grid();
    CHECK(reduce_single_date(s, DiscountPair{0.9, 0.5}, 0) == s);
    CHECK(reduce_single_date(s, DiscountPair{1, 1}, 1) == s);

    const Scenario r = reduce_single_date(s, DiscountPair{1, 0.5}, 1);
    CHECK(cost(r, std::vector<double>{0.9, 0.1}) == doctest::Approx(2.0 * 0.01));
    const auto dated = dated_best_response(s, DiscountPair{1, 0.5}, DatedSchedule::at_date({0.0, 0.4}, 1));
    const auto reduced = best_response_grid(r, Contract{{0.0, 0.4}});
    REQUIRE(dated.maximizers.size() == 1);
    CHECK(dated.maximizers.front().p[1] == doctest::Approx(0.1));
    CHECK(dated.candidate_ids == reduced.candidate_ids);

    try {
        (void)reduce_single_date(s, DiscountPair{1, 0}, 1);
        FAIL("expected degenerate discount");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateDiscount);
    }
}

TEST_CASE("dated and reduced best responses coincide on random instances") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        Scenario s = random_convex_scenario(rng, 25);
        const int date = trial % 2;
        const DiscountPair d{unif(rng), 0.05 + 0.95 * unif(rng)};
        std::vector<double> b(s.n());
        for (double& v : b) v = 2.0 * unif(rng) - 0.5;
        const auto dated = dated_best_response(s, d, DatedSchedule::at_date(b, date));
        const auto reduced = best_response_grid(reduce_single_date(s, d, date), Contract{b});
        CHECK(dated.candidate_ids == reduced.candidate_ids);
    }
}

TEST_CASE("static consistency with unit discounting and empty second date") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 20; ++trial) {
        Scenario s = random_convex_scenario(rng, 20);
        std::vector<double> b(s.n());
        for (double& v : b) v = std::uniform_real_distribution<double>(-0.5, 1.5)(rng);
        const auto b2 = DatedSchedule::at_date(b, 0);
        const auto y2 = DatedSchedule::at_date(s.y.y, 0);
        const DiscountPair one{1, 1};

        const auto dated = dated_best_response(s, one, b2);
        const auto stat = best_response_grid(s, Contract{b});
        CHECK(dated.value == stat.value);
        CHECK(dated.candidate_ids == stat.candidate_ids);

        const Distribution p = stat.maximizers.front();
        const auto v = discounted_values(s, one, y2, b2, p);
        CHECK(v.principal == principal_value(s, 1.0, Contract{b}, p));
        CHECK(v.agent_gross - cost(s, p) == agent_value(s, Contract{b}, p));

        Profile base;
        base.contract.b = b;
        base.dist = p;
        Profile cand = base;
        cand.dist = best_response_grid(s, Contract{std::vector<double>(s.n(), 0.0)}).maximizers.front();
        cand.contract.b.assign(s.n(), 0.0);
        const auto diag = discounted_inequality_diagnostic(
            s, y2, DatedProfile{b2, base.dist}, DatedProfile{DatedSchedule::at_date(cand.contract.b, 0), cand.dist}, one,
            0.6);
        const auto ref = verify_inequalities(s, 0.6, base, cand);
        CHECK(diag.slacks.output_over_payment == ref.output_over_payment);
        CHECK(diag.slacks.payment_over_scaled_output == ref.payment_over_scaled_output);
        CHECK(diag.slacks.scaled_output == ref.scaled_output);
        CHECK(diag.slacks.participation == ref.participation);
        CHECK(diag.sign_guaranteed);
    }
}

TEST_CASE("diagnostic on identical profiles") {
    const Scenario s = s1_grid();
    DatedSchedule b;
    b.values[0] = {0.0, 0.2};
    b.values[1] = {0.0, 0.3};
    const DatedProfile x{b, Distribution{{0.85, 0.15}}};
    const auto diag = discounted_inequality_diagnostic(s, DatedSchedule::at_date(s.y.y, 0), x, x, DiscountPair{1, 0.5}, 0.5);
    CHECK(diag.slacks.output_over_payment == 0.0);
    CHECK(diag.slacks.payment_over_scaled_output == 0.0);
    CHECK_FALSE(diag.sign_guaranteed);
}

TEST_CASE("split payments with unequal discounting can break the chain") {
    // enumerate small two-date instances until a negative slack appears
    const DiscountPair d{1.0, 0.5};
    bool found = false;
    std::ostringstream witness;
    for (double k : {0.04, 0.09, 0.16}) {
        Scenario s = s1_base(k, 50);
        const auto y2 = DatedSchedule::at_date(s.y.y, 0);
        std::vector<DatedSchedule> contracts;
        for (int i = 0; i <= 4; ++i)
            for (int j = 0; j <= 10; ++j) {
                DatedSchedule c;
                c.values[0] = {0.0, 0.05 * i};
                c.values[1] = {0.0, 0.1 * j};
                contracts.push_back(c);
            }
        const auto base = select(pareto_filter(dated_feasible_profiles(s, d, y2, contracts, 1.0), s.tol_u), 0.0);
        for (double alpha = 0.1; alpha <= 1.0 + 1e-12 && !found; alpha += 0.1) {
            const auto cand =
                select(pareto_filter(dated_feasible_profiles(s, d, y2, contracts, alpha), s.tol_u), base.chosen_level);
            for (const auto& b : base.profiles) {
                for (const auto& c : cand.profiles) {
                    const auto diag = discounted_inequality_diagnostic(s, y2, to_dated(b, 2), to_dated(c, 2), d, alpha);
                    if (diag.slacks.min() < -1e-9) {
                        CHECK_FALSE(diag.sign_guaranteed);
                        witness << "k=" << k << " alpha=" << alpha << " base b1_H=" << b.contract.b[3]
                                << " cand b1_H=" << c.contract.b[3] << " min slack=" << diag.slacks.min();
                        found = true;
                        break;
                    }
                }
                if (found) break;
            }
        }
        if (found) break;
    }
    CHECK(found);
    MESSAGE("witness: " << witness.str());
}
