#include "agentcap/agent.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "agentcap/error.hpp"
#include "agentcap/kernels.hpp"

namespace agentcap {

BestResponseSet best_response_grid(const Scenario& s, const Contract& b) {
    return best_response_grid(s, feasible_candidates(s), b);
}

BestResponseSet best_response_grid(const Scenario& s, const CandidateSet& feasible, const Contract& b) {
    if (feasible.size() == 0) throw Error(ErrorCode::EmptyFeasibleSet, "feasible distribution set empty");
    std::vector<double> u(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) u[i] = s.utility.value(b[i]);
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

std::vector<double> project_to_simplex(std::vector<double> v) {
    const std::size_t n = v.size();
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cumsum += sorted[i];
        const double t = (cumsum - 1.0) / static_cast<double>(i + 1);
        if (sorted[i] - t > 0.0) theta = t;
    }
    for (double& x : v) x = std::max(x - theta, 0.0);
    return v;
}

namespace {

double largest_eigenvalue(const Scenario& s) {
    const std::size_t n = s.n();
    Eigen::MatrixXd q(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q(i, j) = 0.5 * (s.cost.Q[i * n + j] + s.cost.Q[j * n + i]);
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
}

// argmax_p E_p[u] - (1 + mu) c(p) over the simplex.
class PenalizedSolver {
public:
    PenalizedSolver(const Scenario& s, std::vector<double> u, ConvexSolverOptions opt)
        : s_(s), u_(std::move(u)), opt_(opt) {
        if (s.cost.kind == CostKind::Quadratic) lambda_max_ = std::max(largest_eigenvalue(s), 0.0);
    }

    std::vector<double> solve(double mu, const std::vector<double>& warm) const {
        return s_.cost.kind == CostKind::RelativeEntropy ? softmax(mu) : gradient_ascent(mu, warm);
    }

private:
    std::vector<double> softmax(double mu) const {
        const std::size_t n = u_.size();
        const double temp = (1.0 + mu) * s_.cost.theta * s_.cost.scale;
        std::vector<double> logits(n);
        for (std::size_t i = 0; i < n; ++i) logits[i] = std::log(s_.cost.q0[i]) + u_[i] / temp;
        const double top = *std::max_element(logits.begin(), logits.end());
        double z = 0.0;
        for (double& l : logits) z += (l = std::exp(l - top));
        for (double& l : logits) l /= z;
        return logits;
    }

    std::vector<double> gradient_ascent(double mu, std::vector<double> p) const {
        const double lipschitz = std::max(2.0 * (1.0 + mu) * s_.cost.scale * lambda_max_, 1e-12);
        const double step = 1.0 / lipschitz;
        const std::size_t n = u_.size();
        std::vector<double> next(n);
        for (int it = 0; it < opt_.max_iter; ++it) {
            const auto g = cost_gradient(s_, p);
            for (std::size_t i = 0; i < n; ++i) next[i] = p[i] + step * (u_[i] - (1.0 + mu) * g[i]);
            next = project_to_simplex(std::move(next));
            double delta = 0.0;
            for (std::size_t i = 0; i < n; ++i) delta = std::max(delta, std::abs(next[i] - p[i]));
            p.swap(next);
            next.assign(n, 0.0);
            if (delta <= opt_.tol) return p;
        }
        throw ConvergenceError("agent best response: projected ascent did not converge", p);
    }

    const Scenario& s_;
    std::vector<double> u_;
    ConvexSolverOptions opt_;
    double lambda_max_ = 0.0;
};

} // namespace

BestResponseSet best_response_convex(const Scenario& s, const Contract& b, ConvexSolverOptions opt) {
    if (!s.cost.is_convex_kind()) {
        throw Error(ErrorCode::UnsupportedCost, "convex best response needs a quadratic or relative-entropy cost");
    }
    const std::size_t n = s.n();
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = s.utility.value(b[i]);
    PenalizedSolver solver(s, u, opt);

    const std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
    auto c_of = [&](const std::vector<double>& p) { return cost(s, std::span<const double>(p)); };

    double mu = 0.0;
    std::vector<double> p = solver.solve(0.0, uniform);
    if (c_of(p) > s.capacity) {
        double lo = 0.0;
        double hi = 1.0;
        std::vector<double> p_hi = solver.solve(hi, p);
        constexpr double kMuCeiling = 1e12;
        while (c_of(p_hi) > s.capacity && hi < kMuCeiling) {
            lo = hi;
            hi *= 2.0;
            p_hi = solver.solve(hi, p_hi);
        }
        if (c_of(p_hi) > s.capacity + s.tol_u) {
            throw Error(ErrorCode::EmptyFeasibleSet, "feasible distribution set empty");
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            auto p_mid = solver.solve(mid, p_hi);
            if (c_of(p_mid) > s.capacity) {
                lo = mid;
            } else {
                hi = mid;
                p_hi = std::move(p_mid);
            }
        }
        mu = hi;
        p = std::move(p_hi);
    }

    BestResponseSet out;
    Distribution d{p};
    out.value = expectation(p, u) - c_of(p);
    out.any_binding = std::abs(c_of(p) - s.capacity) <= s.tol_u;
    out.capacity_multiplier = mu;
    out.maximizers.push_back(std::move(d));
    return out;
}

double AgentFocResidual::max_abs() const {
    double m = 0.0;
    for (double r : residual) m = std::max(m, std::abs(r));
    return m;
}

AgentFocResidual agent_foc_residual(const Scenario& s, const Contract& b, const Distribution& p, double rho, double mu) {
    if (mu < 0.0) throw Error(ErrorCode::Configuration, "capacity multiplier must be nonnegative");
    const auto g = cost_gradient(s, p.p);
    AgentFocResidual r;
    r.rho = rho;
    r.mu = mu;
    r.residual.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) r.residual[i] = s.utility.value(b[i]) - g[i] - rho - mu * g[i];
    r.capacity_slack = s.capacity - cost(s, p);
    r.complementarity_gap = mu * r.capacity_slack;
    r.slack = r.capacity_slack > s.tol_u;
    return r;
}

AgentFocResidual fit_agent_multipliers(const Scenario& s, const Contract& b, const Distribution& p) {
    const auto g = cost_gradient(s, p.p);
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 1e-12) support.push_back(i);

    // u(b) - g = rho + mu * g on the support
    const auto k = support.size();
    Eigen::MatrixXd design(k, 2);
    Eigen::VectorXd target(k);
    for (std::size_t r = 0; r < k; ++r) {
        const auto i = support[r];
        design(r, 0) = 1.0;
        design(r, 1) = g[i];
        target(r) = s.utility.value(b[i]) - g[i];
    }
    double rho = target.mean();
    double mu = 0.0;
    if (k >= 2) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        if (qr.rank() == 2) {
            const Eigen::VectorXd coef = qr.solve(target);
            if (coef(1) >= 0.0) {
                rho = coef(0);
                mu = coef(1);
            }
        }
    }
    auto r = agent_foc_residual(s, b, p, rho, mu);
    // states outside the support carry an inequality, not the stationarity equality
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!(p[i] > 1e-12)) r.residual[i] = 0.0;
    return r;
}

} // namespace agentcap
