#include <doctest.h>

#include <cmath>
#include <random>

#include "agentcap/error.hpp"
#include "agentcap/lattice.hpp"
#include "agentcap/model.hpp"
#include "support.hpp"

using namespace agentcap;
using namespace testing_support;

TEST_CASE("validation accepts S1 and reports empty feasible sets") {
    Scenario s = s1_grid();
    CHECK(validate_scenario(s).ok());

    s.capacity = -1.0;
    const auto rep = validate_scenario(s);
    REQUIRE_FALSE(rep.ok());
    bool found = false;
    for (const auto& f : rep.failures) found = found || f == "feasible distribution set empty";
    CHECK(found);
    CHECK_THROWS_AS(require_valid(s), Error);
}

TEST_CASE("table cost missing a grid point fails validation") {
    Scenario s = s1_grid(0.5, 10);
    s.cost.kind = CostKind::Table;
    for (const auto& pt : simplex_lattice(2, 10)) s.cost.table[pt] = pt[1] / 10.0;
    CHECK(validate_scenario(s).ok());
    s.cost.table.erase(std::vector<int>{3, 7});
    const auto rep = validate_scenario(s);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.failures.front() == "cost undefined at grid point");

    // off-grid queries are undefined, not interpolated
    try {
        (void)cost(s, std::vector<double>{0.33, 0.67});
        FAIL("expected an undefined-point error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UndefinedPoint);
    }
}

TEST_CASE("validation catches malformed inputs") {
    Scenario s = s1_grid();
    s.states.labels = {"L", "L"};
    CHECK_FALSE(validate_scenario(s).ok());

    s = s1_grid();
    s.cost.Q = {1, 0, 0, -1};
    CHECK_FALSE(validate_scenario(s).ok());

    s = s1_grid();
    s.utility.kind = UtilityKind::Crra;
    s.utility.gamma = 2.0;
    s.utility.offset = 0.0;  // b = 0 is outside the domain
    CHECK_FALSE(validate_scenario(s).ok());
    s.utility.offset = 1.0;
    CHECK(validate_scenario(s).ok());
}

TEST_CASE("cost examples") {
    Scenario s = s1_base();
    CHECK(cost(s, std::vector<double>{0.8, 0.2}) == doctest::Approx(0.04).epsilon(1e-15));

    s.cost.kind = CostKind::RelativeEntropy;
    s.cost.theta = 1.0;
    s.cost.q0 = {0.5, 0.5};
    CHECK(cost(s, std::vector<double>{0.5, 0.5}) == 0.0);
    // closed form log 2, cross-checked by summing p log(p/q) directly
    const double direct = 1.0 * std::log(1.0 / 0.5);
    CHECK(cost(s, std::vector<double>{1.0, 0.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(cost(s, std::vector<double>{1.0, 0.0}) == doctest::Approx(direct).epsilon(1e-15));
}

TEST_CASE("agent and principal values") {
    Scenario s = s1_base();
    const Distribution p{{0.8, 0.2}};
    CHECK(agent_value(s, Contract{{0, 0}}, p) == doctest::Approx(-0.04));
    CHECK(principal_value(s, 0.0, Contract{{0, 0}}, p) == 0.0);
    CHECK(agent_value(s, Contract{{0, 0.4}}, p) == doctest::Approx(0.04).epsilon(1e-14));
    CHECK(principal_value(s, 1.0, Contract{{0, 0.4}}, p) == doctest::Approx(0.12).epsilon(1e-14));
}

TEST_CASE("payoffs are linear in p for fixed b") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        Scenario s = random_convex_scenario(rng);
        const std::size_t n = s.n();
        const auto p = uniform_simplex(rng, n);
        std::vector<double> b(n);
        for (double& v : b) v = std::uniform_real_distribution<double>(-1, 1)(rng);
        // decompose into vertices: E_p[.] = sum_i p_i * value at e_i
        double ev = 0.0, eu = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            Distribution e{std::vector<double>(n, 0.0)};
            e.p[i] = 1.0;
            ev += p[i] * principal_value(s, 0.7, Contract{b}, e);
            eu += p[i] * (agent_value(s, Contract{b}, e) + cost(s, e));
        }
        CHECK(principal_value(s, 0.7, Contract{b}, Distribution{p}) == doctest::Approx(ev).epsilon(1e-12));
        CHECK(agent_value(s, Contract{b}, Distribution{p}) + cost(s, Distribution{p}) ==
              doctest::Approx(eu).epsilon(1e-12));
    }
}

TEST_CASE("convex costs satisfy midpoint convexity and continuity") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        Scenario s = random_convex_scenario(rng);
        const auto p = uniform_simplex(rng, s.n());
        const auto q = uniform_simplex(rng, s.n());
        std::vector<double> mid(s.n());
        for (std::size_t i = 0; i < s.n(); ++i) mid[i] = 0.5 * (p[i] + q[i]);
        CHECK(cost(s, mid) <= 0.5 * (cost(s, p) + cost(s, q)) + 1e-12);

        // along q + t (p - q): below the chord, and close to c(q) for small t
        const double cq = cost(s, q);
        const double cp = cost(s, p);
        double last = 0.0;
        for (double t : {0.5, 0.1, 0.01, 0.001}) {
            std::vector<double> r(s.n());
            for (std::size_t i = 0; i < s.n(); ++i) r[i] = q[i] + t * (p[i] - q[i]);
            const double cr = cost(s, r);
            CHECK(cr <= cq + t * (cp - cq) + 1e-12);
            last = std::abs(cr - cq);
        }
        CHECK(last < 1e-2);
    }
}

TEST_CASE("analytic gradients and Hessians match central differences") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        Scenario s = random_convex_scenario(rng);
        const std::size_t n = s.n();
        auto p = uniform_simplex(rng, n);
        for (double& v : p) v = 0.8 * v + 0.2 / static_cast<double>(n);
        const auto g = cost_gradient(s, p);
        const auto h = cost_hessian(s, p);
        for (std::size_t i = 0; i < n; ++i) {
            auto f = [&](double x) {
                auto q = p;
                q[i] = x;
                return cost(s, q);
            };
            CHECK(std::abs(central_difference(f, p[i]) - g[i]) <= 1e-6);
            for (std::size_t j = 0; j < n; ++j) {
                auto gj = [&](double x) {
                    auto q = p;
                    q[i] = x;
                    return cost_gradient(s, q)[j];
                };
                CHECK(std::abs(central_difference(gj, p[i]) - h[j * n + i]) <= 1e-6);
            }
        }
    }
}

TEST_CASE("quadratic Hessian is 2Q for symmetric Q") {
    Scenario s = s1_base();
    s.cost.Q = {1, 0, 0, 1};
    const auto h = cost_hessian(s, std::vector<double>{0.3, 0.7});
    CHECK(h == std::vector<double>{2, 0, 0, 2});
}

TEST_CASE("relative-entropy derivatives reject the boundary") {
    Scenario s = s1_base();
    s.cost.kind = CostKind::RelativeEntropy;
    s.cost.q0 = {0.5, 0.5};
    try {
        (void)cost_gradient(s, std::vector<double>{1.0, 0.0});
        FAIL("expected a differentiability error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Differentiability);
    }
}

TEST_CASE("utility derivatives match finite differences") {
    for (auto u : {AgentUtility{UtilityKind::RiskNeutral, 1, 0, 0}, AgentUtility{UtilityKind::Cara, 1.5, 0, 0},
                   AgentUtility{UtilityKind::Crra, 1, 2.0, 1.0}, AgentUtility{UtilityKind::Crra, 1, 1.0, 1.0}}) {
        for (double x : {-0.3, 0.0, 0.5, 2.0}) {
            if (!u.in_domain(x)) continue;
            CHECK(std::abs(central_difference([&](double z) { return u.value(z); }, x) - u.derivative(x)) <= 1e-6);
            CHECK(u.derivative(x) > 0.0);
        }
    }
}

TEST_CASE("lattice and candidate sets") {
    CHECK(lattice_size(3, 4) == 15);
    const auto pts = simplex_lattice(3, 4);
    REQUIRE(pts.size() == 15);
    CHECK(std::is_sorted(pts.begin(), pts.end()));
    for (const auto& p : pts) CHECK(p[0] + p[1] + p[2] == 4);

    Scenario s = s1_grid();
    const auto d = feasible_candidates(s);
    // c = p_H^2 <= 0.04 keeps p_H in {0, ..., 0.2}
    CHECK(d.size() == 21);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(is_distribution(d.row(i)));
        CHECK(d.costs[i] <= s.capacity + s.tol_u);
    }
}

TEST_CASE("effort-parameterized cost uses the effort grid") {
    Scenario s = s1_grid(0.5, 10);
    s.cost.kind = CostKind::Effort;
    for (int e = 0; e <= 4; ++e) {
        const double ph = 0.2 * e;
        s.cost.efforts.push_back(EffortPoint{double(e), Distribution{{1 - ph, ph}}, 0.05 * e * e});
    }
    REQUIRE(validate_scenario(s).ok());
    const auto d = feasible_candidates(s);
    CHECK(d.size() == 4);  // cost 0.8 at e = 4 exceeds k
    CHECK(cost(s, std::vector<double>{0.6, 0.4}) == doctest::Approx(0.2));
}
