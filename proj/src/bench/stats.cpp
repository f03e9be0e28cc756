// SPDX-License-Identifier: Apache-2.0

#include "oif/bench/stats.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "oif/status.hpp"

namespace oif::bench {

SampleStats stats(std::span<const double> runs) {
    const std::size_t n = runs.size();
    if (n < 2) {
        throw Error(ErrorCode::kInvalidArgument,
                    "standard error needs at least two runs, got " + std::to_string(n));
    }
    const double mean = std::accumulate(runs.begin(), runs.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double r : runs) {
        ss += (r - mean) * (r - mean);
    }
    const double se = std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1)));
    return {mean, se, 1.96 * se};
}

SampleStats RuntimeSample::summary() const {
    if (runs.size() >= 2) {
        return stats(runs);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {runs.empty() ? nan : runs.front(), nan, nan};
}

}  // namespace oif::bench
