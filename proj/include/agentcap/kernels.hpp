#pragma once

// Data-parallel best-response scan: for every contract (given as the vector
// of agent utilities u(b(w))), find the maximum of E_p[u(b)] - c(p) over a
// candidate set and every candidate within tol of it.
//
// `serial` is the reference implementation; `omp` splits contracts across
// threads. Both must return identical results, maximizers ascending.

#include <cstddef>
#include <span>
#include <vector>

#include "agentcap/lattice.hpp"

namespace agentcap {

struct BestResponseScan {
    std::vector<double> value;
    std::vector<std::vector<std::size_t>> maximizers;
};

namespace serial {
BestResponseScan scan_best_responses(const CandidateSet& d, std::span<const double> utilities,
                                     std::size_t contracts, double tol);
}

namespace omp {
BestResponseScan scan_best_responses(const CandidateSet& d, std::span<const double> utilities,
                                     std::size_t contracts, double tol);
}

/// Thread cap from AGENTCAP_THREADS, or the OpenMP default.
int thread_count();

} // namespace agentcap
