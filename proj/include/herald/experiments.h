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


#ifndef HERALD_EXPERIMENTS_H
#define HERALD_EXPERIMENTS_H

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "herald/experiment_config.h"

namespace herald {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
    std::string csv() const;
};

struct ExperimentOutput {
    Table table;
    /// Command-specific results; the CLI wraps it with config, version and seed.
    nlohmann::json summary = nlohmann::json::object();
    /// False when a self-check failed.
    bool passed = true;
};

/// Subcommands, each writing one table. Every grid point either succeeds or
/// aborts the whole command with its error.
ExperimentOutput run_tradeoff(const ExperimentConfig &config);
ExperimentOutput run_sweep_target(const ExperimentConfig &config);
ExperimentOutput run_sweep_gain(const ExperimentConfig &config);
ExperimentOutput run_sweep_ancilla(const ExperimentConfig &config);
ExperimentOutput run_phase_scan(const ExperimentConfig &config);
ExperimentOutput run_mc(const ExperimentConfig &config);
ExperimentOutput run_fock_demo(const ExperimentConfig &config);
/// Monte Carlo versus analytic 3-sigma checks; one line per check on `log`.
ExperimentOutput run_selftest(const ExperimentConfig &config, std::ostream &log);

struct Command {
    std::string name;
    std::string help;
    std::function<ExperimentOutput(const ExperimentConfig &, std::ostream &)> run;
};

const std::vector<Command> &commands();

/// Summary document: command, version, schema, seed, resolved config and
/// the command's own results.
nlohmann::json summary_document(const std::string &command, const ExperimentConfig &config, const ExperimentOutput &out);

}  // namespace herald

#endif
