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


#include "herald/experiment_config.h"

#include <gtest/gtest.h>

#include <sstream>

#include "herald/experiments.h"

using namespace herald;

namespace {

ExperimentConfig parse(const std::string &text) {
    std::istringstream in(text);
    return ExperimentConfig::parse(in, "test");
}

}  // namespace

TEST(config, parses_sections) {
    ExperimentConfig c = parse(
        "# comment\n[scenario]\nname = demo\n[gate]\ntarget_db = 4.5\nalpha_c = auto\nunits = shot-noise\n"
        "[input]\nalpha_re = 0.5\n[run]\nengine = montecarlo\nseed = 99\n");
    EXPECT_EQ(c.scenario, "demo");
    EXPECT_DOUBLE_EQ(c.target_db, 4.5);
    EXPECT_FALSE(c.alpha_c.has_value());
    EXPECT_EQ(c.units, OutcomeUnits::kShotNoise);
    EXPECT_DOUBLE_EQ(c.input_alpha.real(), 0.5);
    EXPECT_EQ(c.engine, "mc");
    EXPECT_EQ(c.seed, 99u);
}

TEST(config, rejects_bad_input) {
    EXPECT_THROW(parse("[gate]\nwarp = 1\n"), ConfigError);
    EXPECT_THROW(parse("target_db = 1\n"), ConfigError);
    EXPECT_THROW(parse("[gate\n"), ConfigError);
    EXPECT_THROW(parse("[gate]\ntarget_db\n"), ConfigError);
    EXPECT_THROW(parse("[gate]\ntarget_db = abc\n"), ConfigError);
    EXPECT_THROW(parse("[run]\nengine = warp\n").validate(), ConfigError);
}

TEST(config, grids) {
    EXPECT_EQ(parse_grid("1:2:3"), (std::vector<double>{1.0, 1.5, 2.0}));
    EXPECT_EQ(parse_grid("1, 2.5,4"), (std::vector<double>{1.0, 2.5, 4.0}));
    EXPECT_THROW(check_grid({}, "grid"), ConfigError);
    EXPECT_THROW(check_grid({1, 1, 2}, "grid"), ConfigError);
    EXPECT_THROW(check_grid({1, 3, 2}, "grid"), ConfigError);
    EXPECT_NO_THROW(check_grid({3, 2, 1}, "grid"));
}

TEST(config, resolved_round_trip) {
    ExperimentConfig c = parse("[gate]\ntarget_db = 3.3\nt_m = 0.5\n[sweep]\ngrid = 1:3:5\n");
    std::ostringstream text;
    std::string section;
    for (const auto &[key, value] : c.resolved()) {
        const auto dot = key.find('.');
        if (key.substr(0, dot) != section) {
            section = key.substr(0, dot);
            text << "[" << section << "]\n";
        }
        text << key.substr(dot + 1) << " = " << value << "\n";
    }
    ExperimentConfig back = parse(text.str());
    EXPECT_EQ(back.resolved(), c.resolved());
}

TEST(config, format_keeps_precision) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(std::stod(format_double(1.0 / 3)), 1.0 / 3);
}

TEST(experiments, sweep_rows_match_grid) {
    ExperimentConfig c = parse("[sweep]\ngrid = 1:4:7\n");
    ExperimentOutput out = run_sweep_gain(c);
    EXPECT_EQ(out.table.rows.size(), 7u);
    EXPECT_EQ(out.summary["analytic_fidelity_non_decreasing"], true);
    EXPECT_EQ(out.table.csv(), run_sweep_gain(c).table.csv());
}

TEST(experiments, tradeoff_endpoints) {
    ExperimentConfig c = parse("[sweep]\ngrid = 1:10:4\n");
    ExperimentOutput out = run_tradeoff(c);
    EXPECT_EQ(out.table.rows.size(), 12u);
    for (const auto &curve : out.summary["curves"]) {
        const double target = curve["target_db"];
        for (const auto &row : out.table.rows) {
            if (std::stod(row[0]) == target && std::stod(row[1]) == 1.0) {
                EXPECT_NEAR(std::stod(row[5]), curve["deterministic_limit"].get<double>(), 1e-12);
            }
        }
    }
}

TEST(experiments, phase_scan_is_flat) {
    ExperimentConfig c = parse("[gate]\nancilla_db = 10.5\ng_f = 4\n");
    ExperimentOutput out = run_phase_scan(c);
    EXPECT_EQ(out.table.rows.size(), 25u);
    for (const auto &s : out.summary["spread_by_target"]) {
        EXPECT_LT(s["fidelity_spread"].get<double>(), 1e-9);
    }
}

TEST(experiments, fock_demo_needs_dual_homodyne) {
    EXPECT_THROW(run_fock_demo(parse("[gate]\nt_m = 1\n")), ConfigError);
}

TEST(experiments, engine_fock_rejected_for_sweeps) {
    EXPECT_THROW(run_sweep_gain(parse("[run]\nengine = fock\n")), ConfigError);
}
