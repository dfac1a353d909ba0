#include "agentcap/kkt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "agentcap/agent.hpp"
#include "agentcap/error.hpp"

namespace agentcap {

double PrincipalFocResiduals::max_abs() const {
    double m = std::max(std::abs(orthogonality), std::abs(adding_up));
    for (const auto* v : {&stationarity_p, &stationarity_b, &agent_foc})
        for (double r : *v) m = std::max(m, std::abs(r));
    return m;
}

PrincipalFocResiduals principal_foc_residual(const Scenario& s, const PrincipalFocPoint& pt) {
    const std::size_t n = s.n();
    for (double v : pt.p.p)
        if (!(v > 0.0)) throw Error(ErrorCode::Interiority, "first-order system needs p(w) > 0 in every state");
    const auto g = cost_gradient(s, pt.p.p);
    const auto h = cost_hessian(s, pt.p.p);
    const auto& u = s.utility;

    PrincipalFocResiduals r;
    r.stationarity_p.resize(n);
    r.stationarity_b.resize(n);
    r.agent_foc.resize(n);
    double sum_p = 0.0;
    double eu = 0.0;
    for (std::size_t w = 0; w < n; ++w) {
        const double ub = u.value(pt.b[w]);
        const double du = u.derivative(pt.b[w]);
        double curvature = 0.0;
        for (std::size_t v = 0; v < n; ++v) curvature += pt.phi[v] * h[w * n + v];
        r.stationarity_p[w] =
            s.y[w] - pt.b[w] - (pt.tau + pt.delta * g[w] - (pt.mu + 1.0) * curvature + pt.zeta * (ub - g[w]));
        r.stationarity_b[w] = -pt.p[w] - (pt.phi[w] * du + pt.zeta * pt.p[w] * du);
        r.agent_foc[w] = ub - g[w] - pt.rho - pt.mu * g[w];
        r.orthogonality -= pt.phi[w] * g[w];
        sum_p += pt.p[w];
        eu += pt.p[w] * ub;
    }
    r.adding_up = sum_p - 1.0;
    const double c = cost(s, pt.p);
    r.capacity_gap = c - s.capacity;
    r.participation_gap = eu - c - s.reservation;
    return r;
}

namespace {

// Unknown layout: b[n], p[n], phi[n], rho, tau, then mu, delta (capacity
// active), then zeta (participation active).
struct Layout {
    std::size_t n;
    ActiveSet active;

    std::size_t unknowns() const { return 3 * n + 2 + (active.capacity ? 2 : 0) + (active.participation ? 1 : 0); }
    std::size_t equations() const { return 3 * n + 2 + (active.capacity ? 1 : 0) + (active.participation ? 1 : 0); }

    Eigen::VectorXd pack(const PrincipalFocPoint& pt) const {
        Eigen::VectorXd x(unknowns());
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i) x(k++) = pt.b[i];
        for (std::size_t i = 0; i < n; ++i) x(k++) = pt.p[i];
        for (std::size_t i = 0; i < n; ++i) x(k++) = pt.phi[i];
        x(k++) = pt.rho;
        x(k++) = pt.tau;
        if (active.capacity) {
            x(k++) = pt.mu;
            x(k++) = pt.delta;
        }
        if (active.participation) x(k++) = pt.zeta;
        return x;
    }

    PrincipalFocPoint unpack(const Eigen::VectorXd& x) const {
        PrincipalFocPoint pt;
        pt.b.b.resize(n);
        pt.p.p.resize(n);
        pt.phi.resize(n);
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i) pt.b.b[i] = x(k++);
        for (std::size_t i = 0; i < n; ++i) pt.p.p[i] = x(k++);
        for (std::size_t i = 0; i < n; ++i) pt.phi[i] = x(k++);
        pt.rho = x(k++);
        pt.tau = x(k++);
        if (active.capacity) {
            pt.mu = x(k++);
            pt.delta = x(k++);
        }
        if (active.participation) pt.zeta = x(k++);
        return pt;
    }

    Eigen::VectorXd residual(const Scenario& s, const Eigen::VectorXd& x) const {
        const auto r = principal_foc_residual(s, unpack(x));
        Eigen::VectorXd f(equations());
        std::size_t k = 0;
        for (double v : r.stationarity_p) f(k++) = v;
        for (double v : r.stationarity_b) f(k++) = v;
        f(k++) = r.orthogonality;
        for (double v : r.agent_foc) f(k++) = v;
        f(k++) = r.adding_up;
        if (active.capacity) f(k++) = r.capacity_gap;
        if (active.participation) f(k++) = r.participation_gap;
        return f;
    }
};

Eigen::MatrixXd jacobian(const Scenario& s, const Layout& layout, const Eigen::VectorXd& x) {
    const auto cols = static_cast<Eigen::Index>(layout.unknowns());
    const auto rows = static_cast<Eigen::Index>(layout.equations());
    Eigen::MatrixXd j(rows, cols);
    const std::size_t n = layout.n;
    for (Eigen::Index c = 0; c < cols; ++c) {
        double h = 1e-7 * std::max(1.0, std::abs(x(c)));
        // probabilities stay strictly positive under the perturbation
        const bool is_p = static_cast<std::size_t>(c) >= n && static_cast<std::size_t>(c) < 2 * n;
        if (is_p) h = std::min(h, 0.5 * x(c));
        Eigen::VectorXd xp = x;
        Eigen::VectorXd xm = x;
        xp(c) += h;
        xm(c) -= h;
        j.col(c) = (layout.residual(s, xp) - layout.residual(s, xm)) / (2.0 * h);
    }
    return j;
}

// Largest t in (0, 1] keeping p + t dp at least a tenth of the current p.
double fraction_to_boundary(const Layout& layout, const Eigen::VectorXd& x, const Eigen::VectorXd& dx) {
    double t = 1.0;
    for (std::size_t i = layout.n; i < 2 * layout.n; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        if (dx(k) < 0.0) t = std::min(t, -0.9 * x(k) / dx(k));
    }
    return t;
}

double condition_estimate(const Eigen::MatrixXd& j) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    return smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
}

} // namespace

PrincipalFocPoint initial_foc_point(const Scenario& s, double beta) {
    const std::size_t n = s.n();
    PrincipalFocPoint pt;
    for (double y : s.y.y) pt.b.b.push_back(beta * y);
    auto br = best_response_convex(s, pt.b);
    pt.p = br.maximizers.front();
    // the system is stated for interior distributions
    for (double& v : pt.p.p) v = 0.98 * v + 0.02 / static_cast<double>(n);
    pt.phi.assign(n, 0.0);
    // least-squares rho with mu = 0
    const auto g = cost_gradient(s, pt.p.p);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += s.utility.value(pt.b[i]) - g[i];
    pt.rho = acc / static_cast<double>(n);
    return pt;
}

FocSolveResult solve_principal_foc(const Scenario& s, const PrincipalFocPoint& initial, ActiveSet active,
                                   FocSolverOptions opt) {
    const std::size_t n = s.n();
    if (!s.cost.is_convex_kind()) throw Error(ErrorCode::UnsupportedCost, "first-order system needs a quadratic or relative-entropy cost");
    if (initial.b.size() != n || initial.p.size() != n || initial.phi.size() != n) {
        throw Error(ErrorCode::Configuration, "initial point has the wrong dimension");
    }
    const Layout layout{n, active};
    PrincipalFocPoint start = initial;
    if (!active.capacity) start.mu = start.delta = 0.0;
    if (!active.participation) start.zeta = 0.0;

    Eigen::VectorXd x = layout.pack(start);
    Eigen::VectorXd f = layout.residual(s, x);

    FocSolveResult res;
    int it = 0;
    for (; it < opt.max_iter && f.cwiseAbs().maxCoeff() > opt.tol; ++it) {
        const Eigen::MatrixXd j = jacobian(s, layout, x);
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(j);
        const Eigen::VectorXd dx = cod.solve(-f);

        const double norm0 = f.norm();
        double t = fraction_to_boundary(layout, x, dx);
        bool accepted = false;
        constexpr double kFloor = 1.0 / 1048576.0; // 2^-20
        while (t >= kFloor) {
            const Eigen::VectorXd trial = x + t * dx;
            const Eigen::VectorXd ft = layout.residual(s, trial);
            if (ft.norm() < norm0) {
                x = trial;
                f = ft;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            const auto full_rank = std::min(j.rows(), j.cols());
            if (cod.rank() < full_rank) {
                throw SingularJacobianError("first-order system: singular Jacobian", condition_estimate(j));
            }
            break;
        }
    }
    res.point = layout.unpack(x);
    res.residuals = principal_foc_residual(s, res.point);
    res.iterations = it;
    res.max_residual = f.cwiseAbs().maxCoeff();
    res.converged = res.max_residual <= opt.tol;
    return res;
}

AffineRepresentation affine_representation_check(const Scenario& s, const PrincipalFocPoint& pt,
                                                 const OutputFunction& y) {
    const std::size_t n = s.n();
    const auto [ymin, ymax] = std::minmax_element(y.y.begin(), y.y.end());
    if (*ymax - *ymin <= 1e-12 * std::max(1.0, std::abs(*ymax))) {
        throw Error(ErrorCode::DegenerateFit, "constant output: slope unidentifiable");
    }
    const auto h = cost_hessian(s, pt.p.p);
    AffineRepresentation rep;
    rep.curvature.resize(n);
    double curv_scale = 0.0;
    for (std::size_t w = 0; w < n; ++w) {
        double row = 0.0;
        for (std::size_t v = 0; v < n; ++v) row += h[w * n + v];
        rep.curvature[w] = pt.p[w] * (1.0 / s.utility.derivative(pt.b[w]) + pt.zeta) * row;
        curv_scale = std::max(curv_scale, std::abs(rep.curvature[w]));
    }
    const bool use_curvature = curv_scale > 1e-10;

    const auto rows = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd design(rows, use_curvature ? 3 : 2);
    Eigen::VectorXd target(rows);
    for (Eigen::Index w = 0; w < rows; ++w) {
        const auto i = static_cast<std::size_t>(w);
        design(w, 0) = y[i];
        design(w, 1) = 1.0;
        if (use_curvature) design(w, 2) = rep.curvature[i];
        target(w) = pt.b[i];
    }
    const Eigen::VectorXd coef = design.completeOrthogonalDecomposition().solve(target);
    rep.slope = coef(0);
    rep.intercept_a = -coef(1);
    rep.curvature_b = use_curvature ? -coef(2) : 0.0;
    rep.fit_residual = (design * coef - target).cwiseAbs().maxCoeff();
    rep.multiplier_slope = (1.0 + pt.mu) / (1.0 + pt.mu + pt.mu * pt.delta);
    return rep;
}

} // namespace agentcap
