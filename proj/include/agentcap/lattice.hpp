#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "agentcap/model.hpp"

namespace agentcap {

/// All count vectors of length n summing to m, in lexicographic order.
std::vector<std::vector<int>> simplex_lattice(std::size_t n, int m);

std::size_t lattice_size(std::size_t n, int m);

/// Candidate distributions the agent can choose from, stored row-major.
/// For table/quadratic/relative-entropy costs these are lattice points; for
/// effort-parameterized costs they are the effort grid's distributions.
struct CandidateSet {
    std::size_t n = 0;
    std::vector<double> probs;  // size() * n
    std::vector<double> costs;
    // position of each candidate in the unfiltered enumeration, used as the
    // distribution's identity across scenarios that differ only in capacity
    std::vector<std::size_t> ids;
    // Capacity that binding is judged against. When k excludes some
    // candidate this is the largest feasible cost, since the lattice problem
    // is the same for every k between that cost and the next one up.
    double binding_capacity = 0.0;

    bool binds(double c, double tol) const { return std::abs(c - binding_capacity) <= tol; }

    std::size_t size() const noexcept { return costs.size(); }
    std::span<const double> row(std::size_t i) const { return {probs.data() + i * n, n}; }
    Distribution dist(std::size_t i) const;
};

/// Every candidate regardless of capacity.
CandidateSet all_candidates(const Scenario& s);
/// Candidates with c(p) <= k + tol_u (the feasible set D).
CandidateSet feasible_candidates(const Scenario& s);

} // namespace agentcap
