// Copyright 2026 The Herald Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef HERALD_MONTECARLO_H
#define HERALD_MONTECARLO_H

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "herald/filter.h"
#include "herald/gate.h"

namespace herald {

/// Streaming mean/variance/central-moment accumulator for one variable,
/// mergeable in a fixed order.
class MomentAccumulator {
   public:
    void add(double x);
    void merge(const MomentAccumulator &other);

    uint64_t count() const {
        return n_;
    }
    double mean() const {
        return mean_;
    }
    /// Unbiased sample variance.
    double variance() const;
    double mean_stderr() const;
    /// Large-sample standard error of the sample variance.
    double variance_stderr() const;

   private:
    uint64_t n_ = 0;
    double mean_ = 0;
    double m2_ = 0;
    double m3_ = 0;
    double m4_ = 0;
};

enum class CountMode {
    /// Run until n_trajectories have been accepted.
    kAccepted,
    /// Run exactly n_trajectories trials.
    kTotal,
};

struct RunConfig {
    GateConfig gate;
    GaussianState input = vacuum(1);
    uint64_t n_trajectories = 1'000'000;
    CountMode mode = CountMode::kAccepted;
    uint64_t seed = 0;
    int shards = 1;
    /// Cap on total trials across all shards.
    uint64_t budget = 1'000'000'000;
    /// When non-empty, every trajectory is written to this file.
    std::string dump_path;

    void validate() const;
};

struct EnsembleStats {
    uint64_t accepted = 0;
    uint64_t total = 0;
    /// True when the budget ran out before the accepted quota was met.
    bool budget_exhausted = false;
    int outcome_dims = 1;

    /// Accepted outcomes in alpha-units.
    Vec outcome_mean;
    Mat outcome_cov;
    Vec outcome_mean_se;
    Mat outcome_cov_se;

    /// Output-mode quadratures of accepted trajectories.
    Vec output_mean;
    Mat output_cov;
    Vec output_mean_se;
    Mat output_cov_se;

    /// Accepted samples, row-major: outcome_dims values per row.
    std::vector<double> outcomes;
    /// Accepted samples, row-major: (x, y) per row.
    std::vector<double> outputs;
};

/// Trajectory-level simulation of the heralded gate. Each trajectory samples
/// the Wigner quadratures of input, ancilla and vacuum ports, propagates them
/// through the optical network, applies the filter by comparing a uniform
/// draw with P_f, and feeds the outcome forward on acceptance.
EnsembleStats simulate(const RunConfig &run);
EnsembleStats simulate(const RunConfig &run, const GainSolution &solution);

struct FidelityEstimate {
    double fidelity;
    double stderr;
};

/// Gaussian fidelity of the sample moments against `target`, with a
/// bootstrap standard error over accepted trajectories.
FidelityEstimate estimate_fidelity(
    const EnsembleStats &stats, const GaussianState &target, int resamples = 200, uint64_t seed = 0);

struct RateEstimate {
    double rate;
    double stderr;
    /// 95% Wilson score interval.
    double lower;
    double upper;
};

RateEstimate acceptance_rate(const EnsembleStats &stats);

/// Rejection sampling of the filter alone on N(mean, variance I) outcomes.
struct FilterRun {
    FilterSpec spec;
    std::complex<double> mean = 0.0;
    double variance = 0.5;
    uint64_t n_trials = 10'000'000;
    uint64_t seed = 0;
    int shards = 1;
};

struct FilterStats {
    uint64_t total = 0;
    /// One accumulator per outcome dimension.
    std::vector<MomentAccumulator> accepted;
    /// Accepted outcomes with |alpha| < alpha_c.
    std::vector<MomentAccumulator> accepted_inside;

    uint64_t accepted_count() const {
        return accepted.empty() ? 0 : accepted[0].count();
    }
};

FilterStats simulate_filter(const FilterRun &run);

/// Raw trajectory dump.
///
/// Header (16 bytes): "HERALDTJ", u32 version, u32 outcome count d.
/// Record (8 d + 17 bytes): d x f64 outcome (alpha-units), u8 accepted,
/// 2 x f64 output (x, y), NaN when rejected. All little-endian.
inline constexpr uint32_t kTrajectoryDumpVersion = 1;

struct TrajectoryRecord {
    std::vector<double> outcome;
    bool accepted;
    double output_x;
    double output_y;
};

std::vector<TrajectoryRecord> read_trajectory_dump(const std::string &path);

}  // namespace herald

#endif
