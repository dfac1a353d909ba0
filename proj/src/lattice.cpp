#include "agentcap/lattice.hpp"

#include <algorithm>

#include "agentcap/error.hpp"

namespace agentcap {

namespace {

void compose(std::size_t pos, int remaining, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (pos + 1 == cur.size()) {
        cur[pos] = remaining;
        out.push_back(cur);
        return;
    }
    for (int v = 0; v <= remaining; ++v) {
        cur[pos] = v;
        compose(pos + 1, remaining - v, cur, out);
    }
}

} // namespace

std::size_t lattice_size(std::size_t n, int m) {
    // C(m + n - 1, n - 1)
    double acc = 1.0;
    for (std::size_t i = 1; i < n; ++i) acc = acc * static_cast<double>(m + static_cast<int>(i)) / static_cast<double>(i);
    return static_cast<std::size_t>(acc + 0.5);
}

std::vector<std::vector<int>> simplex_lattice(std::size_t n, int m) {
    std::vector<std::vector<int>> out;
    if (n == 0 || m < 0) return out;
    out.reserve(lattice_size(n, m));
    std::vector<int> cur(n, 0);
    compose(0, m, cur, out);
    return out;
}

Distribution CandidateSet::dist(std::size_t i) const {
    const auto r = row(i);
    return Distribution{std::vector<double>(r.begin(), r.end())};
}

CandidateSet all_candidates(const Scenario& s) {
    CandidateSet d;
    d.n = s.n();
    if (s.cost.kind == CostKind::Effort) {
        std::size_t id = 0;
        for (const auto& e : s.cost.efforts) {
            d.probs.insert(d.probs.end(), e.dist.p.begin(), e.dist.p.end());
            d.costs.push_back(s.cost.scale * e.cost);
            d.ids.push_back(id++);
        }
        return d;
    }
    const int m = s.simplex_grid;
    const auto pts = simplex_lattice(d.n, m);
    d.probs.reserve(pts.size() * d.n);
    d.costs.reserve(pts.size());
    std::vector<double> p(d.n);
    std::size_t id = 0;
    for (const auto& counts : pts) {
        for (std::size_t i = 0; i < d.n; ++i) p[i] = static_cast<double>(counts[i]) / m;
        d.probs.insert(d.probs.end(), p.begin(), p.end());
        if (s.cost.kind == CostKind::Table) {
            const auto it = s.cost.table.find(counts);
            if (it == s.cost.table.end()) throw Error(ErrorCode::UndefinedPoint, "cost undefined at grid point");
            d.costs.push_back(s.cost.scale * it->second);
        } else {
            d.costs.push_back(cost(s, std::span<const double>(p)));
        }
        d.ids.push_back(id++);
    }
    return d;
}

CandidateSet feasible_candidates(const Scenario& s) {
    CandidateSet all = all_candidates(s);
    CandidateSet d;
    d.n = all.n;
    const double limit = s.capacity + s.tol_u;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (all.costs[i] <= limit) {
            const auto r = all.row(i);
            d.probs.insert(d.probs.end(), r.begin(), r.end());
            d.costs.push_back(all.costs[i]);
            d.ids.push_back(all.ids[i]);
        }
    }
    d.binding_capacity = s.capacity;
    if (d.size() > 0 && d.size() < all.size()) d.binding_capacity = *std::max_element(d.costs.begin(), d.costs.end());
    return d;
}

} // namespace agentcap
