#include "agentcap/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "agentcap/error.hpp"
#include "agentcap/family.hpp"
#include "agentcap/lattice.hpp"

namespace agentcap {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::Budget: return "budget";
    case ErrorCode::EmptySelection: return "empty-selection";
    case ErrorCode::EmptyFeasibleSet: return "empty-feasible-set";
    case ErrorCode::Convergence: return "convergence";
    case ErrorCode::UndefinedPoint: return "undefined-point";
    case ErrorCode::UnsupportedCost: return "unsupported-cost";
    case ErrorCode::Differentiability: return "differentiability";
    case ErrorCode::Interiority: return "interiority";
    case ErrorCode::DegenerateScaling: return "degenerate-scaling";
    case ErrorCode::DegenerateDiscount: return "degenerate-discount";
    case ErrorCode::DegenerateFit: return "degenerate-fit";
    case ErrorCode::SingularJacobian: return "singular-jacobian";
    case ErrorCode::Configuration: return "configuration";
    }
    return "unknown";
}

bool is_distribution(std::span<const double> p, double tol) {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

double expectation(std::span<const double> p, std::span<const double> x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * x[i];
    return acc;
}

// ---------------------------------------------------------------- utility

double AgentUtility::value(double x) const {
    switch (kind) {
    case UtilityKind::RiskNeutral: return x;
    case UtilityKind::Cara: return (1.0 - std::exp(-a * x)) / a;
    case UtilityKind::Crra: {
        const double z = x + offset;
        if (gamma == 1.0) return std::log(z);
        return (std::pow(z, 1.0 - gamma) - 1.0) / (1.0 - gamma);
    }
    }
    return x;
}

double AgentUtility::derivative(double x) const {
    switch (kind) {
    case UtilityKind::RiskNeutral: return 1.0;
    case UtilityKind::Cara: return std::exp(-a * x);
    case UtilityKind::Crra: return std::pow(x + offset, -gamma);
    }
    return 1.0;
}

bool AgentUtility::in_domain(double x) const {
    if (!std::isfinite(x)) return false;
    if (kind == UtilityKind::Crra) return x + offset > 0.0;
    return true;
}

// ---------------------------------------------------------------- grids

std::vector<double> GridRange::values() const {
    if (!explicit_values.empty()) return explicit_values;
    if (step <= 0.0 || max <= min) return {min};
    const auto count = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(min + static_cast<double>(i) * step);
    return out;
}

// ---------------------------------------------------------------- cost

namespace {

std::vector<int> lattice_counts(std::span<const double> p, int m) {
    std::vector<int> counts(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double scaled = p[i] * m;
        const double r = std::round(scaled);
        if (std::abs(scaled - r) > 1e-9) {
            throw Error(ErrorCode::UndefinedPoint, "cost undefined: distribution is off the simplex grid");
        }
        counts[i] = static_cast<int>(r);
    }
    return counts;
}

double raw_cost(const Scenario& s, std::span<const double> p) {
    const CostFunction& c = s.cost;
    const std::size_t n = p.size();
    switch (c.kind) {
    case CostKind::Quadratic: {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double di = p[i] - c.q0[i];
            for (std::size_t j = 0; j < n; ++j) acc += di * c.Q[i * n + j] * (p[j] - c.q0[j]);
        }
        return acc;
    }
    case CostKind::RelativeEntropy: {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (p[i] > 0.0) acc += p[i] * std::log(p[i] / c.q0[i]);
        }
        return c.theta * acc;
    }
    case CostKind::Table: {
        const auto it = c.table.find(lattice_counts(p, s.simplex_grid));
        if (it == c.table.end()) throw Error(ErrorCode::UndefinedPoint, "cost undefined at grid point");
        return it->second;
    }
    case CostKind::Effort: {
        for (const auto& e : c.efforts) {
            bool same = true;
            for (std::size_t i = 0; i < n && same; ++i) same = std::abs(e.dist.p[i] - p[i]) <= 1e-12;
            if (same) return e.cost;
        }
        throw Error(ErrorCode::UndefinedPoint, "cost undefined: distribution not on the effort grid");
    }
    }
    return 0.0;
}

void require_differentiable(const Scenario& s, std::span<const double> p) {
    if (!s.cost.is_differentiable_kind()) {
        throw Error(ErrorCode::Differentiability, "cost kind has no derivatives");
    }
    if (s.cost.kind == CostKind::RelativeEntropy) {
        for (double v : p) {
            if (!(v > 0.0)) throw Error(ErrorCode::Differentiability, "relative-entropy cost is not differentiable at the simplex boundary");
        }
    }
}

} // namespace

double cost(const Scenario& s, std::span<const double> p) { return s.cost.scale * raw_cost(s, p); }

double cost(const Scenario& s, const Distribution& p) { return cost(s, std::span<const double>(p.p)); }

std::vector<double> cost_gradient(const Scenario& s, std::span<const double> p) {
    require_differentiable(s, p);
    const std::size_t n = p.size();
    const CostFunction& c = s.cost;
    std::vector<double> g(n, 0.0);
    if (c.kind == CostKind::Quadratic) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += (c.Q[i * n + j] + c.Q[j * n + i]) * (p[j] - c.q0[j]);
            g[i] = c.scale * acc;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) g[i] = c.scale * c.theta * (std::log(p[i] / c.q0[i]) + 1.0);
    }
    return g;
}

std::vector<double> cost_hessian(const Scenario& s, std::span<const double> p) {
    require_differentiable(s, p);
    const std::size_t n = p.size();
    const CostFunction& c = s.cost;
    std::vector<double> h(n * n, 0.0);
    if (c.kind == CostKind::Quadratic) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) h[i * n + j] = c.scale * (c.Q[i * n + j] + c.Q[j * n + i]);
    } else {
        for (std::size_t i = 0; i < n; ++i) h[i * n + i] = c.scale * c.theta / p[i];
    }
    return h;
}

double agent_value(const Scenario& s, const Contract& b, const Distribution& p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * s.utility.value(b[i]);
    return acc - cost(s, p);
}

double principal_value(const Scenario& s, double alpha, const Contract& b, const Distribution& p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * (alpha * s.y[i] - b[i]);
    return acc;
}

// ---------------------------------------------------------------- validation

namespace {

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void check_cost(const Scenario& s, std::vector<std::string>& fail) {
    const std::size_t n = s.n();
    const CostFunction& c = s.cost;
    if (!(c.scale > 0.0) || !std::isfinite(c.scale)) fail.emplace_back("cost scale must be positive");
    switch (c.kind) {
    case CostKind::Quadratic: {
        if (c.Q.size() != n * n || c.q0.size() != n) {
            fail.emplace_back("quadratic cost: Q must be n x n and q0 length n");
            return;
        }
        if (!all_finite(c.Q) || !all_finite(c.q0)) fail.emplace_back("quadratic cost: non-finite parameter");
        Eigen::MatrixXd q(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) q(i, j) = 0.5 * (c.Q[i * n + j] + c.Q[j * n + i]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
        if (eig.eigenvalues().minCoeff() < -1e-12) fail.emplace_back("quadratic cost: Q not positive semidefinite");
        break;
    }
    case CostKind::RelativeEntropy:
        if (!(c.theta > 0.0)) fail.emplace_back("relative-entropy cost: theta must be positive");
        if (c.q0.size() != n) {
            fail.emplace_back("relative-entropy cost: baseline length must equal n");
            return;
        }
        if (!is_distribution(c.q0, 1e-9) || std::any_of(c.q0.begin(), c.q0.end(), [](double v) { return v <= 0.0; })) {
            fail.emplace_back("relative-entropy cost: baseline must be an interior distribution");
        }
        break;
    case CostKind::Table: {
        if (s.simplex_grid < 1) return;
        for (const auto& pt : simplex_lattice(n, s.simplex_grid)) {
            if (!c.table.contains(pt)) {
                fail.emplace_back("cost undefined at grid point");
                return;
            }
        }
        for (const auto& [k, v] : c.table) {
            if (!std::isfinite(v)) {
                fail.emplace_back("table cost: non-finite value");
                break;
            }
        }
        break;
    }
    case CostKind::Effort:
        if (c.efforts.empty()) fail.emplace_back("effort cost: empty effort grid");
        for (const auto& e : c.efforts) {
            if (e.dist.size() != n || !is_distribution(e.dist.p)) {
                fail.emplace_back("effort cost: p(.|e) is not a distribution on the states");
                break;
            }
            if (!std::isfinite(e.cost)) {
                fail.emplace_back("effort cost: non-finite cost");
                break;
            }
        }
        break;
    }
}

void check_family(const Scenario& s, std::vector<std::string>& fail) {
    const ContractFamily& f = s.family;
    if ((f.kind == FamilyKind::Grid || f.kind == FamilyKind::MonotoneBoundedSlope) && f.per_state.size() != s.n()) {
        fail.emplace_back("contract family: need one grid range per state");
        return;
    }
    if (f.kind == FamilyKind::LinearShare && f.rent_indexed && s.utility.kind != UtilityKind::RiskNeutral) {
        fail.emplace_back("contract family: rent-indexed transfers require a risk-neutral agent");
        return;
    }
    if (f.kind == FamilyKind::Debt) {
        for (double F : f.face.values())
            if (F < 0.0) fail.emplace_back("contract family: debt face value must be nonnegative");
    }
    std::vector<FamilyMember> members;
    try {
        members = enumerate_family(s);
    } catch (const Error& e) {
        fail.emplace_back(std::string("contract family: ") + e.what());
        return;
    }
    if (members.empty()) {
        fail.emplace_back("contract family enumeration empty");
        return;
    }
    for (const auto& m : members) {
        if (!all_finite(m.contract.b)) {
            fail.emplace_back("contract family: non-finite payment");
            return;
        }
        for (double v : m.contract.b) {
            if (!s.utility.in_domain(v)) {
                fail.emplace_back("contract family: payment outside the utility domain");
                return;
            }
        }
    }
}

} // namespace

ValidationReport validate_scenario(const Scenario& s) {
    ValidationReport rep;
    auto& fail = rep.failures;
    const std::size_t n = s.n();
    if (n < 2) fail.emplace_back("state space needs at least 2 states");
    {
        std::set<std::string> seen(s.states.labels.begin(), s.states.labels.end());
        if (seen.size() != n) fail.emplace_back("state labels must be distinct");
    }
    if (s.y.size() != n) fail.emplace_back("output length must equal the number of states");
    else if (!all_finite(s.y.y)) fail.emplace_back("output entries must be finite");
    if (!std::isfinite(s.capacity)) fail.emplace_back("capacity must be finite");
    if (!std::isfinite(s.reservation)) fail.emplace_back("reservation utility must be finite");
    if (s.simplex_grid < 1) fail.emplace_back("simplex grid must be a positive integer");
    if (!(s.tol_u > 0.0)) fail.emplace_back("utility tolerance must be positive");
    switch (s.utility.kind) {
    case UtilityKind::Cara:
        if (!(s.utility.a > 0.0)) fail.emplace_back("CARA coefficient must be positive");
        break;
    case UtilityKind::Crra:
        if (!(s.utility.gamma >= 0.0)) fail.emplace_back("CRRA coefficient must be nonnegative");
        break;
    default: break;
    }
    if (!fail.empty()) return rep;

    check_cost(s, fail);
    if (!fail.empty()) return rep;

    if (feasible_candidates(s).size() == 0) {
        fail.emplace_back("feasible distribution set empty");
        return rep;
    }
    check_family(s, fail);
    return rep;
}

void require_valid(const Scenario& s) {
    const auto rep = validate_scenario(s);
    if (rep.ok()) return;
    std::ostringstream msg;
    for (std::size_t i = 0; i < rep.failures.size(); ++i) msg << (i ? "; " : "") << rep.failures[i];
    throw Error(ErrorCode::Validation, msg.str());
}

} // namespace agentcap
