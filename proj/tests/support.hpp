#pragma once

// Scenario builders and brute-force oracles shared by the unit and
// acceptance tests. Oracles avoid the library's kernels and filters.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "agentcap/model.hpp"

namespace testing_support {

using namespace agentcap;

// two states, y = (0, 1), c(p) = p_H^2, risk-neutral
inline Scenario s1_base(double k = 0.04, int m = 100) {
    Scenario s;
    s.states.labels = {"L", "H"};
    s.y.y = {0.0, 1.0};
    s.cost.kind = CostKind::Quadratic;
    s.cost.Q = {0, 0, 0, 1};
    s.cost.q0 = {0, 0};
    s.capacity = k;
    s.simplex_grid = m;
    return s;
}

// S1 with the rent-indexed linear-share family used for the alpha* fixture
inline Scenario s1_rent_indexed(double k = 0.04) {
    Scenario s = s1_base(k, 1000);
    s.family.kind = FamilyKind::LinearShare;
    s.family.beta = GridRange{0.0, 1.0, 0.001, {}};
    s.family.rent_indexed = true;
    s.family.rent = GridRange::list({0.0});
    return s;
}

// S1 with grid contracts b_L = 0, b_H in {0, 0.1, ..., 1}
inline Scenario s1_grid(double k = 0.04, int m = 100) {
    Scenario s = s1_base(k, m);
    s.family.kind = FamilyKind::Grid;
    s.family.per_state = {GridRange::single(0.0), GridRange{0.0, 1.0, 0.1, {}}};
    return s;
}

inline std::vector<double> uniform_simplex(std::mt19937_64& rng, std::size_t n) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> p(n);
    double sum = 0.0;
    for (double& v : p) sum += (v = e(rng));
    for (double& v : p) v /= sum;
    return p;
}

// All count vectors of length n summing to m, by recursion.
inline void lattice_rec(std::size_t n, int m, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (cur.size() + 1 == n) {
        cur.push_back(m);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int i = 0; i <= m; ++i) {
        cur.push_back(i);
        lattice_rec(n, m - i, cur, out);
        cur.pop_back();
    }
}

inline std::vector<std::vector<double>> oracle_lattice(std::size_t n, int m) {
    std::vector<std::vector<int>> counts;
    std::vector<int> cur;
    lattice_rec(n, m, cur, counts);
    std::vector<std::vector<double>> out;
    for (const auto& c : counts) {
        std::vector<double> p;
        for (int v : c) p.push_back(static_cast<double>(v) / m);
        out.push_back(p);
    }
    return out;
}

// Random strictly convex cost: quadratic with Q = A'A + eps I, or relative
// entropy with an interior baseline.
inline void random_convex_cost(std::mt19937_64& rng, Scenario& s, bool allow_entropy = true) {
    const std::size_t n = s.n();
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    if (allow_entropy && std::bernoulli_distribution(0.4)(rng)) {
        s.cost.kind = CostKind::RelativeEntropy;
        s.cost.theta = 0.1 + 0.4 * std::uniform_real_distribution<double>(0, 1)(rng);
        s.cost.q0 = uniform_simplex(rng, n);
        for (double& v : s.cost.q0) v = 0.7 * v + 0.3 / static_cast<double>(n);
        return;
    }
    s.cost.kind = CostKind::Quadratic;
    std::vector<double> a(n * n);
    for (double& v : a) v = unif(rng);
    s.cost.Q.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = i == j ? 0.05 : 0.0;
            for (std::size_t r = 0; r < n; ++r) acc += a[r * n + i] * a[r * n + j];
            s.cost.Q[i * n + j] = acc;
        }
    s.cost.q0 = uniform_simplex(rng, n);
}

// Small random convex scenario with a grid family; n in {2, 3}.
inline Scenario random_convex_scenario(std::mt19937_64& rng, int m = 20) {
    Scenario s;
    const std::size_t n = std::uniform_int_distribution<int>(2, 3)(rng);
    static const char* labels[] = {"s0", "s1", "s2", "s3"};
    for (std::size_t i = 0; i < n; ++i) s.states.labels.emplace_back(labels[i]);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    s.y.y.resize(n);
    for (double& v : s.y.y) v = std::round(unif(rng) * 20.0) / 10.0;
    std::sort(s.y.y.begin(), s.y.y.end());
    s.y.y.back() += 0.5;  // keep output nonconstant
    random_convex_cost(rng, s);
    s.simplex_grid = m;

    // capacity between the cheapest and the dearest lattice cost
    double lo = 1e300, hi = -1e300;
    for (const auto& p : oracle_lattice(n, m)) {
        const double c = cost(s, p);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    s.capacity = lo + (0.1 + 0.5 * unif(rng)) * (hi - lo);

    s.family.kind = FamilyKind::Grid;
    const double top = s.y.y.back();
    for (std::size_t i = 0; i < n; ++i) {
        s.family.per_state.push_back(GridRange{-0.2, top, (top + 0.2) / 6.0, {}});
    }
    return s;
}

struct OracleProfile {
    std::vector<double> b;
    std::vector<double> p;
    double u = 0.0;
    double v = 0.0;
    double cost = 0.0;
};

// Feasible profiles of a risk-neutral or general scenario, by direct
// evaluation over an explicit contract list.
inline std::vector<OracleProfile> oracle_profiles(const Scenario& s, const std::vector<std::vector<double>>& contracts,
                                                  double alpha) {
    const auto lattice = oracle_lattice(s.n(), s.simplex_grid);
    std::vector<std::vector<double>> feasible;
    std::vector<double> costs;
    for (const auto& p : lattice) {
        const double c = cost(s, p);
        if (c <= s.capacity + s.tol_u) {
            feasible.push_back(p);
            costs.push_back(c);
        }
    }
    std::vector<OracleProfile> out;
    for (const auto& b : contracts) {
        std::vector<double> val(feasible.size());
        double best = -1e300;
        for (std::size_t j = 0; j < feasible.size(); ++j) {
            double eu = 0.0;
            for (std::size_t i = 0; i < s.n(); ++i) eu += feasible[j][i] * s.utility.value(b[i]);
            val[j] = eu - costs[j];
            best = std::max(best, val[j]);
        }
        for (std::size_t j = 0; j < feasible.size(); ++j) {
            if (val[j] < best - s.tol_u) continue;
            OracleProfile op{b, feasible[j], val[j], 0.0, costs[j]};
            for (std::size_t i = 0; i < s.n(); ++i) op.v += feasible[j][i] * (alpha * s.y[i] - b[i]);
            out.push_back(op);
        }
    }
    return out;
}

// O(N^2) pairwise dominance.
inline std::vector<OracleProfile> oracle_pareto(const std::vector<OracleProfile>& all, double tol) {
    std::vector<OracleProfile> out;
    for (const auto& x : all) {
        bool dominated = false;
        for (const auto& q : all) {
            const bool weak = q.u >= x.u - tol && q.v >= x.v - tol;
            const bool strict = q.u > x.u + tol || q.v > x.v + tol;
            if (weak && strict) {
                dominated = true;
                break;
            }
        }
        if (!dominated) out.push_back(x);
    }
    return out;
}

inline double central_difference(const std::function<double(double)>& f, double x, double h = 1e-5) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

} // namespace testing_support
