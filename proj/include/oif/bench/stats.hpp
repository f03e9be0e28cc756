// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace oif::bench {

struct SampleStats {
    double mean;
    /// Standard error of the mean: sqrt(sum (r_i - mean)^2 / (n (n - 1))).
    double se;
    /// Half-width of the 95 % interval, 1.96 * se.
    double ci95;
};

/// Throws oif::Error(kInvalidArgument) for fewer than two runs.
SampleStats stats(std::span<const double> runs);

/// Wall-clock samples of one case, in seconds.
struct RuntimeSample {
    std::vector<double> runs;

    /// Mean and interval; ci95 is NaN with fewer than two runs.
    SampleStats summary() const;
};

}  // namespace oif::bench
