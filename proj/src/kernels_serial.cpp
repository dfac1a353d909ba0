#include "agentcap/kernels.hpp"

#include <cstdlib>
#include <limits>

#include <omp.h>

namespace agentcap {

namespace serial {

// Reference scan: two passes per contract, no buffering.
BestResponseScan scan_best_responses(const CandidateSet& d, std::span<const double> utilities,
                                     std::size_t contracts, double tol) {
    const std::size_t n = d.n;
    const std::size_t cands = d.size();
    BestResponseScan out;
    out.value.assign(contracts, -std::numeric_limits<double>::infinity());
    out.maximizers.assign(contracts, {});
    for (std::size_t c = 0; c < contracts; ++c) {
        const double* u = utilities.data() + c * n;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < cands; ++j) {
            const double* p = d.probs.data() + j * n;
            double v = 0.0;
            for (std::size_t i = 0; i < n; ++i) v += p[i] * u[i];
            v -= d.costs[j];
            if (v > best) best = v;
        }
        out.value[c] = best;
        for (std::size_t j = 0; j < cands; ++j) {
            const double* p = d.probs.data() + j * n;
            double v = 0.0;
            for (std::size_t i = 0; i < n; ++i) v += p[i] * u[i];
            v -= d.costs[j];
            if (v >= best - tol) out.maximizers[c].push_back(j);
        }
    }
    return out;
}

} // namespace serial

int thread_count() {
    if (const char* env = std::getenv("AGENTCAP_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return omp_get_max_threads();
}

} // namespace agentcap
