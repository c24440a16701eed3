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


#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "herald/errors.h"
#include "herald/experiment_config.h"
#include "herald/experiments.h"
#include "herald/version.h"

namespace {

struct Overrides {
    std::string config;
    std::string out = ".";
    std::optional<uint64_t> seed;
    std::optional<int> shards;
    std::optional<std::string> engine;
    std::optional<std::string> grid;
};

herald::ExperimentConfig build_config(const Overrides &o) {
    herald::ExperimentConfig c = o.config.empty() ? herald::ExperimentConfig{} : herald::ExperimentConfig::load(o.config);
    if (o.seed) {
        c.set("run.seed", std::to_string(*o.seed));
    }
    if (o.shards) {
        c.set("run.shards", std::to_string(*o.shards));
    }
    if (o.engine) {
        c.set("run.engine", *o.engine);
    }
    if (o.grid) {
        c.set("sweep.grid", *o.grid);
    }
    c.validate();
    return c;
}

void write_file(const std::filesystem::path &path, const std::string &text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

int run_command(const herald::Command &cmd, const Overrides &o) {
    const herald::ExperimentConfig config = build_config(o);
    const herald::ExperimentOutput out = cmd.run(config, std::cout);
    // Results are written only after every grid point has succeeded.
    std::filesystem::create_directories(o.out);
    const std::filesystem::path base = std::filesystem::path(o.out) / cmd.name;
    write_file(base.string() + ".csv", out.table.csv());
    write_file(base.string() + ".json", herald::summary_document(cmd.name, config, out).dump(2) + "\n");
    std::cerr << cmd.name << ": " << out.table.rows.size() << " rows written to " << base.string() << ".csv\n";
    return out.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Heralded squeezing gate simulator"};
    app.set_version_flag("--version", std::string(herald::kVersion));
    app.require_subcommand(1);

    Overrides o;
    const herald::Command *selected = nullptr;
    for (const herald::Command &cmd : herald::commands()) {
        CLI::App *sub = app.add_subcommand(cmd.name, cmd.help);
        sub->add_option("--config", o.config, "Config file (key = value with [section] headers)")->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "Output directory")->capture_default_str();
        sub->add_option("--seed", o.seed, "Random seed");
        sub->add_option("--shards", o.shards, "Monte Carlo shards");
        sub->add_option("--engine", o.engine, "analytic, mc, both or fock");
        sub->add_option("--grid", o.grid, "Sweep grid, start:stop:steps or a comma list");
        sub->callback([&selected, &cmd] { selected = &cmd; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return run_command(*selected, o);
    } catch (const herald::NumericalError &e) {
        std::cerr << "error [" << e.kind() << "]: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
