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


#include "herald/montecarlo.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "herald/errors.h"
#include "herald/philox.h"

using namespace herald;

namespace {

RunConfig small_run(double t_m, double g, uint64_t n, uint64_t seed) {
    RunConfig run;
    run.gate.r_t = db_to_r(2.0);
    run.gate.ancilla = AncillaSpec::pure_db(6.0);
    run.gate.t_m = t_m;
    run.gate.filter = {g, 1.0, run.gate.outcome_dims()};
    run.input = coherent({0.4, -0.2});
    run.gate.filter.alpha_c =
        cutoff_for_rule(run.gate, unity_gain_solve(run.gate), CutoffRule{1 - 1e-6, std::complex<double>(0.4, -0.2)});
    run.n_trajectories = n;
    run.seed = seed;
    return run;
}

}  // namespace

TEST(philox, known_answers) {
    using B = Philox4x32::Block;
    EXPECT_EQ(Philox4x32(0, 0)(B{0, 0, 0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32(0xffffffff, 0xffffffff)(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}),
              (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32(0xa4093822, 0x299f31d0)(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}),
              (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(philox, stream_normals) {
    PhiloxStream s(Philox4x32(7), 0, 0);
    MomentAccumulator acc;
    for (int i = 0; i < 200000; i++) {
        acc.add(s.normal());
    }
    EXPECT_NEAR(acc.mean(), 0.0, 4 * acc.mean_stderr());
    EXPECT_NEAR(acc.variance(), 1.0, 4 * acc.variance_stderr());
}

TEST(moments, merge_matches_sequential) {
    MomentAccumulator all, a, b;
    for (int i = 0; i < 1000; i++) {
        const double x = std::sin(0.37 * i) * 3 + 0.01 * i;
        all.add(x);
        (i < 400 ? a : b).add(x);
    }
    a.merge(b);
    EXPECT_EQ(a.count(), all.count());
    EXPECT_NEAR(a.mean(), all.mean(), 1e-12);
    EXPECT_NEAR(a.variance(), all.variance(), 1e-11);
    EXPECT_NEAR(a.variance_stderr(), all.variance_stderr(), 1e-11);
}

TEST(moments, small_sample_values) {
    MomentAccumulator acc;
    for (double x : {1.0, 2.0, 3.0, 4.0}) {
        acc.add(x);
    }
    EXPECT_DOUBLE_EQ(acc.mean(), 2.5);
    EXPECT_NEAR(acc.variance(), 5.0 / 3.0, 1e-14);
    EXPECT_NEAR(acc.mean_stderr(), std::sqrt(5.0 / 12.0), 1e-14);
}

TEST(montecarlo, reproducible_for_fixed_seed_and_shards) {
    RunConfig run = small_run(1.0, 1.3, 3000, 42);
    run.shards = 3;
    EnsembleStats a = simulate(run);
    EnsembleStats b = simulate(run);
    EXPECT_EQ(a.total, b.total);
    EXPECT_EQ(a.outputs, b.outputs);
    run.seed = 43;
    EXPECT_NE(simulate(run).outputs, a.outputs);
}

TEST(montecarlo, matches_analytic_moments) {
    for (double t_m : {1.0, 0.5}) {
        RunConfig run = small_run(t_m, 1.3, 40000, 5);
        EnsembleStats s = simulate(run);
        GateResult r = heralded_output(run.gate, run.input);
        for (int i = 0; i < 2; i++) {
            EXPECT_NEAR(s.output_mean(i), r.output.mean()(i), 4 * s.output_mean_se(i)) << t_m;
            EXPECT_NEAR(s.output_cov(i, i), r.output.cov()(i, i), 4 * s.output_cov_se(i, i)) << t_m;
        }
        RateEstimate rate = acceptance_rate(s);
        EXPECT_NEAR(rate.rate, r.success_probability, 4 * rate.stderr);
        EXPECT_LE(rate.lower, rate.rate);
        EXPECT_GE(rate.upper, rate.rate);
        FidelityEstimate f = estimate_fidelity(s, r.target, 50, 9);
        EXPECT_NEAR(f.fidelity, r.fidelity, 4 * f.stderr + 1e-3);
    }
}

TEST(montecarlo, unit_strength_accepts_everything) {
    RunConfig run = small_run(1.0, 1.0, 2000, 1);
    EnsembleStats s = simulate(run);
    EXPECT_EQ(s.accepted, s.total);
    EXPECT_EQ(acceptance_rate(s).rate, 1.0);
}

TEST(montecarlo, total_count_mode) {
    RunConfig run = small_run(1.0, 1.5, 5000, 3);
    run.mode = CountMode::kTotal;
    EnsembleStats s = simulate(run);
    EXPECT_EQ(s.total, 5000u);
    EXPECT_LT(s.accepted, s.total);
}

TEST(montecarlo, budget_and_starvation) {
    RunConfig run = small_run(1.0, 1.5, 100000, 3);
    run.budget = 20000;
    EnsembleStats s = simulate(run);
    EXPECT_TRUE(s.budget_exhausted);
    EXPECT_EQ(s.total, 20000u);

    run.gate.filter.g_f = 20;
    run.gate.filter.alpha_c = cutoff_for_rule(run.gate, unity_gain_solve(run.gate), CutoffRule{1 - 1e-9, 0.0});
    run.budget = 10;
    try {
        simulate(run);
        FAIL() << "expected starvation";
    } catch (const NumericalError &e) {
        EXPECT_EQ(e.kind(), error_kind::kAcceptanceStarvation);
    }
}

TEST(montecarlo, run_validation) {
    RunConfig run = small_run(1.0, 1.5, 100, 3);
    run.shards = 0;
    EXPECT_THROW(run.validate(), std::invalid_argument);
}

TEST(montecarlo, trajectory_dump_round_trip) {
    const auto path = std::filesystem::temp_directory_path() / "herald_dump_test.bin";
    RunConfig run = small_run(0.5, 1.5, 500, 8);
    run.shards = 2;
    run.dump_path = path.string();
    EnsembleStats s = simulate(run);
    std::vector<TrajectoryRecord> records = read_trajectory_dump(path.string());
    ASSERT_EQ(records.size(), s.total);
    uint64_t accepted = 0;
    for (const auto &r : records) {
        EXPECT_EQ(r.outcome.size(), 2u);
        accepted += r.accepted;
    }
    EXPECT_EQ(accepted, s.accepted);
    {
        std::ifstream f(path, std::ios::binary);
        char magic[8];
        f.read(magic, 8);
        EXPECT_EQ(std::string(magic, 8), "HERALDTJ");
    }
    std::filesystem::remove(path);
    EXPECT_FALSE(std::filesystem::exists(path.string() + ".shard0"));
}

TEST(filter_sampling, amplified_moments) {
    FilterRun run;
    run.spec = {1.5, 4.0, 1};
    run.mean = 0.3;
    run.n_trials = 400000;
    run.seed = 2;
    run.shards = 2;
    FilterStats s = simulate_filter(run);
    // Cutoff far out: the accepted ensemble is the amplified Gaussian up to a tiny tail.
    EXPECT_NEAR(s.accepted_inside[0].mean(), 1.5 * 0.3, 4 * s.accepted_inside[0].mean_stderr());
    EXPECT_NEAR(s.accepted_inside[0].variance(), 0.75, 4 * s.accepted_inside[0].variance_stderr());
    const double p = success_probability(run.spec, Vec::Constant(1, 0.3), Mat::Constant(1, 1, 0.5));
    EXPECT_NEAR(double(s.accepted_count()) / s.total, p, 4 * std::sqrt(p * (1 - p) / s.total));
}
