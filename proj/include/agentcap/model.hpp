#pragma once

// Domain types for the finite-state hidden-action principal-agent problem
// with a capacity constraint c(p) <= k on the agent's effort cost.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace agentcap {

inline constexpr double kDefaultTolU = 1e-9;
inline constexpr double kSimplexTol = 1e-12;

struct StateSpace {
    std::vector<std::string> labels;
    std::size_t size() const noexcept { return labels.size(); }
    friend bool operator==(const StateSpace&, const StateSpace&) = default;
};

struct OutputFunction {
    std::vector<double> y;
    std::size_t size() const noexcept { return y.size(); }
    double operator[](std::size_t i) const { return y[i]; }
    friend bool operator==(const OutputFunction&, const OutputFunction&) = default;
};

struct Contract {
    std::vector<double> b;
    std::size_t size() const noexcept { return b.size(); }
    double operator[](std::size_t i) const { return b[i]; }
    friend bool operator==(const Contract&, const Contract&) = default;
};

struct Distribution {
    std::vector<double> p;
    std::size_t size() const noexcept { return p.size(); }
    double operator[](std::size_t i) const { return p[i]; }
    friend bool operator==(const Distribution&, const Distribution&) = default;
};

/// True when every entry is >= 0 and the entries sum to 1 within `tol`.
bool is_distribution(std::span<const double> p, double tol = kSimplexTol);

enum class CostKind { Quadratic, RelativeEntropy, Table, Effort };

struct EffortPoint {
    double effort = 0.0;
    Distribution dist;
    double cost = 0.0;
    friend bool operator==(const EffortPoint&, const EffortPoint&) = default;
};

/// Agent's cost of implementing a distribution. `scale` multiplies every kind
/// (used when a dated problem is reduced to a single date).
struct CostFunction {
    CostKind kind = CostKind::Quadratic;
    double scale = 1.0;

    // quadratic: c(p) = (p - q0)' Q (p - q0), Q row-major n x n
    std::vector<double> Q;
    // quadratic and relative-entropy baseline
    std::vector<double> q0;
    // relative-entropy: c(p) = theta * sum p log(p / q0)
    double theta = 1.0;
    // table: lattice counts (at the scenario's simplex grid) -> cost
    std::map<std::vector<int>, double> table;
    // effort-parameterized: the feasible distributions are exactly these
    std::vector<EffortPoint> efforts;

    bool is_convex_kind() const noexcept {
        return kind == CostKind::Quadratic || kind == CostKind::RelativeEntropy;
    }
    bool is_differentiable_kind() const noexcept { return is_convex_kind(); }
    friend bool operator==(const CostFunction&, const CostFunction&) = default;
};

enum class UtilityKind { RiskNeutral, Cara, Crra };

struct AgentUtility {
    UtilityKind kind = UtilityKind::RiskNeutral;
    double a = 1.0;      // CARA coefficient
    double gamma = 0.0;  // CRRA coefficient
    double offset = 0.0; // CRRA domain shift: u is evaluated at x + offset > 0

    double value(double x) const;
    double derivative(double x) const;
    bool in_domain(double x) const;
    friend bool operator==(const AgentUtility&, const AgentUtility&) = default;
};

/// Either an arithmetic range min, min+step, ..., max or an explicit list.
struct GridRange {
    double min = 0.0;
    double max = 0.0;
    double step = 0.0;
    std::vector<double> explicit_values;

    static GridRange single(double v) { return GridRange{v, v, 0.0, {}}; }
    static GridRange list(std::vector<double> vs) { return GridRange{0, 0, 0, std::move(vs)}; }
    std::vector<double> values() const;
    friend bool operator==(const GridRange&, const GridRange&) = default;
};

enum class FamilyKind { Grid, LinearShare, Debt, LiveOrDie, MonotoneBoundedSlope };

struct ContractFamily {
    FamilyKind kind = FamilyKind::Grid;
    // grid and monotone-bounded-slope: one range per state
    std::vector<GridRange> per_state;
    // linear-share: b = beta * y + w
    GridRange beta;
    GridRange wage;
    // When set, w is chosen per beta so that the agent's best-response
    // utility equals each listed rent level (risk-neutral agents only).
    bool rent_indexed = false;
    GridRange rent;
    // debt: b = max{0, y - F}
    GridRange face;
    // live-or-die: b = y at or above l, 0 below
    GridRange threshold;
    friend bool operator==(const ContractFamily&, const ContractFamily&) = default;
};

struct Scenario {
    StateSpace states;
    OutputFunction y;
    CostFunction cost;
    double capacity = 0.0;
    ContractFamily family;
    AgentUtility utility;
    double reservation = 0.0;
    int simplex_grid = 10;
    double tol_u = kDefaultTolU;

    std::size_t n() const noexcept { return states.size(); }
    friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct Profile {
    Contract contract;
    Distribution dist;
    std::vector<double> contract_params;
    std::size_t contract_index = 0;
    std::size_t dist_index = 0;
    double cost = 0.0;
    double agent_utility = 0.0;
    double principal_payoff = 0.0;
    double alpha = 1.0;
    bool capacity_binding = false;

    bool same_profile(const Profile& o) const noexcept {
        return contract_index == o.contract_index && dist_index == o.dist_index;
    }
};

struct ValidationReport {
    std::vector<std::string> failures;
    bool ok() const noexcept { return failures.empty(); }
};

ValidationReport validate_scenario(const Scenario& s);
/// Throws Error(Validation) carrying every failure when the report is not ok.
void require_valid(const Scenario& s);

double cost(const Scenario& s, const Distribution& p);
double cost(const Scenario& s, std::span<const double> p);

/// Gradient of c at p; throws Differentiability for table/effort kinds and
/// for relative-entropy costs at the simplex boundary.
std::vector<double> cost_gradient(const Scenario& s, std::span<const double> p);
/// Row-major n x n Hessian, same preconditions as cost_gradient.
std::vector<double> cost_hessian(const Scenario& s, std::span<const double> p);

double agent_value(const Scenario& s, const Contract& b, const Distribution& p);
double principal_value(const Scenario& s, double alpha, const Contract& b, const Distribution& p);

double expectation(std::span<const double> p, std::span<const double> x);

} // namespace agentcap
