#include "agentcap/kernels.hpp"

#include <algorithm>
#include <limits>

#include <omp.h>

namespace agentcap::omp {

BestResponseScan scan_best_responses(const CandidateSet& d, std::span<const double> utilities,
                                     std::size_t contracts, double tol) {
    const std::size_t n = d.n;
    const std::size_t cands = d.size();
    BestResponseScan out;
    out.value.assign(contracts, -std::numeric_limits<double>::infinity());
    out.maximizers.assign(contracts, {});
    const auto count = static_cast<std::ptrdiff_t>(contracts);

#pragma omp parallel num_threads(thread_count())
    {
        std::vector<double> values(cands);
#pragma omp for schedule(dynamic, 16)
        for (std::ptrdiff_t c = 0; c < count; ++c) {
            const double* u = utilities.data() + static_cast<std::size_t>(c) * n;
            for (std::size_t j = 0; j < cands; ++j) {
                const double* p = d.probs.data() + j * n;
                double v = 0.0;
                for (std::size_t i = 0; i < n; ++i) v += p[i] * u[i];
                values[j] = v - d.costs[j];
            }
            const double best = cands ? *std::max_element(values.begin(), values.end())
                                      : -std::numeric_limits<double>::infinity();
            auto& maxi = out.maximizers[static_cast<std::size_t>(c)];
            for (std::size_t j = 0; j < cands; ++j)
                if (values[j] >= best - tol) maxi.push_back(j);
            out.value[static_cast<std::size_t>(c)] = best;
        }
    }
    return out;
}

} // namespace agentcap::omp
