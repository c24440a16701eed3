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


#ifndef HERALD_EXPERIMENT_CONFIG_H
#define HERALD_EXPERIMENT_CONFIG_H

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "herald/gate.h"
#include "herald/montecarlo.h"

namespace herald {

/// Invalid or inconsistent experiment configuration.
class ConfigError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Parameters of one experiment run.
///
/// Text form: `key = value` lines grouped under `[section]` headers, with `#`
/// comments. Squeezing is given in dB throughout. Unknown keys are errors.
struct ExperimentConfig {
    std::string scenario = "default";

    // [gate]
    double target_db = 2.0;
    double ancilla_db = 6.0;
    /// Anti-squeezing; unset means a pure ancilla.
    std::optional<double> ancilla_antisqueezing_db;
    double ancilla_angle = 0.0;
    double t_m = 1.0;
    std::optional<double> t_s;
    double g_f = 1.0;
    /// Unset: chosen from `coverage` for the configured input.
    std::optional<double> alpha_c;
    double coverage = 0.98;
    double coverage_guard = 0.98;
    double eta_inloop = 1.0;
    double eta_verify = 1.0;
    OutcomeUnits units = OutcomeUnits::kCalibrated;

    // [input]
    std::complex<double> input_alpha = 0.0;

    // [sweep]
    std::vector<double> grid;
    std::vector<double> targets_db{2.0, 4.0, 6.0};
    std::vector<double> magnitudes{0.70, 1.05, 1.38, 1.65, 1.92};
    std::vector<double> phases{0.0, 1.2566370614359172, 2.5132741228718345, 3.7699111843077517, 5.026548245743669};
    std::vector<double> scan_targets_db{2.30, 4.81, 5.84, 8.85, 10.16};

    // [run]
    std::string engine = "analytic";
    uint64_t seed = 1;
    int shards = 1;
    uint64_t trajectories = 200'000;
    CountMode count_mode = CountMode::kAccepted;
    uint64_t budget = 1'000'000'000;
    int bootstrap = 200;
    std::string dump;

    // [fock]
    int fock_dim = 40;
    std::vector<std::string> fock_inputs{"coherent", "photon", "cat"};
    double cat_alpha = 1.0;
    int angular_nodes = 64;

    static ExperimentConfig parse(std::istream &in, const std::string &origin = "<config>");
    static ExperimentConfig load(const std::string &path);

    /// Sets `section.key` from text; throws ConfigError for unknown keys or
    /// malformed values.
    void set(const std::string &qualified_key, const std::string &value);
    /// Every key with its current value, in a fixed order.
    std::vector<std::pair<std::string, std::string>> resolved() const;
    void validate() const;

    AncillaSpec ancilla() const;
    /// Gate for the given target and filter strength; alpha_c left as set.
    GateConfig gate(double target_db, double g_f) const;
    GateConfig gate() const {
        return gate(target_db, g_f);
    }
};

/// "start:stop:steps" (inclusive, steps >= 1) or a comma-separated list.
std::vector<double> parse_grid(const std::string &text);
/// Throws ConfigError unless the grid is non-empty and strictly monotone.
void check_grid(const std::vector<double> &grid, const std::string &what);

/// Text form of a double with 17 significant digits.
std::string format_double(double v);

}  // namespace herald

#endif
