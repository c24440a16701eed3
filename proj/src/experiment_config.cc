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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace herald {

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        parts.push_back(trim(item));
    }
    return parts;
}

double to_double(const std::string &key, const std::string &text) {
    const std::string t = trim(text);
    double v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v)) {
        throw ConfigError(key + ": expected a finite number, got '" + text + "'");
    }
    return v;
}

template <typename Int>
Int to_int(const std::string &key, const std::string &text) {
    const std::string t = trim(text);
    Int v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    }
    return v;
}

std::vector<double> to_list(const std::string &key, const std::string &text) {
    std::vector<double> out;
    for (const auto &p : split(text, ',')) {
        out.push_back(to_double(key, p));
    }
    if (out.empty()) {
        throw ConfigError(key + ": empty list");
    }
    return out;
}

std::string join(const std::vector<double> &v) {
    std::string s;
    for (size_t i = 0; i < v.size(); i++) {
        s += (i ? "," : "") + format_double(v[i]);
    }
    return s;
}

std::string join(const std::vector<std::string> &v) {
    std::string s;
    for (size_t i = 0; i < v.size(); i++) {
        s += (i ? "," : "") + v[i];
    }
    return s;
}

std::string optional_text(const std::optional<double> &v) {
    return v ? format_double(*v) : "auto";
}

std::optional<double> to_optional(const std::string &key, const std::string &text) {
    if (trim(text) == "auto") {
        return std::nullopt;
    }
    return to_double(key, text);
}

struct Entry {
    const char *name;
    std::function<void(ExperimentConfig &, const std::string &, const std::string &)> set;
    std::function<std::string(const ExperimentConfig &)> get;
};

#define HERALD_NUMBER(key, field)                                                                       \
    Entry {                                                                                             \
        key, [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.field = to_double(k, v); }, \
            [](const ExperimentConfig &c) { return format_double(c.field); }                            \
    }

#define HERALD_OPTIONAL(key, field)                                                                        \
    Entry {                                                                                                \
        key, [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.field = to_optional(k, v); }, \
            [](const ExperimentConfig &c) { return optional_text(c.field); }                               \
    }

#define HERALD_LIST(key, field)                                                                       \
    Entry {                                                                                           \
        key, [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.field = to_list(k, v); }, \
            [](const ExperimentConfig &c) { return join(c.field); }                                   \
    }

const std::vector<Entry> &registry() {
    static const std::vector<Entry> entries = {
        {"scenario.name", [](ExperimentConfig &c, const std::string &, const std::string &v) { c.scenario = trim(v); },
         [](const ExperimentConfig &c) { return c.scenario; }},
        HERALD_NUMBER("gate.target_db", target_db),
        HERALD_NUMBER("gate.ancilla_db", ancilla_db),
        HERALD_OPTIONAL("gate.ancilla_antisqueezing_db", ancilla_antisqueezing_db),
        HERALD_NUMBER("gate.ancilla_angle", ancilla_angle),
        HERALD_NUMBER("gate.t_m", t_m),
        HERALD_OPTIONAL("gate.t_s", t_s),
        HERALD_NUMBER("gate.g_f", g_f),
        HERALD_OPTIONAL("gate.alpha_c", alpha_c),
        HERALD_NUMBER("gate.coverage", coverage),
        HERALD_NUMBER("gate.coverage_guard", coverage_guard),
        HERALD_NUMBER("gate.eta_inloop", eta_inloop),
        HERALD_NUMBER("gate.eta_verify", eta_verify),
        {"gate.units",
         [](ExperimentConfig &c, const std::string &k, const std::string &v) {
             const std::string t = trim(v);
             if (t == "calibrated") {
                 c.units = OutcomeUnits::kCalibrated;
             } else if (t == "shot-noise") {
                 c.units = OutcomeUnits::kShotNoise;
             } else {
                 throw ConfigError(k + ": expected 'calibrated' or 'shot-noise'");
             }
         },
         [](const ExperimentConfig &c) {
             return std::string(c.units == OutcomeUnits::kCalibrated ? "calibrated" : "shot-noise");
         }},
        {"input.alpha_re",
         [](ExperimentConfig &c, const std::string &k, const std::string &v) {
             c.input_alpha.real(to_double(k, v));
         },
         [](const ExperimentConfig &c) { return format_double(c.input_alpha.real()); }},
        {"input.alpha_im",
         [](ExperimentConfig &c, const std::string &k, const std::string &v) {
             c.input_alpha.imag(to_double(k, v));
         },
         [](const ExperimentConfig &c) { return format_double(c.input_alpha.imag()); }},
        {"sweep.grid", [](ExperimentConfig &c, const std::string &, const std::string &v) { c.grid = parse_grid(v); },
         [](const ExperimentConfig &c) { return join(c.grid); }},
        HERALD_LIST("sweep.targets_db", targets_db),
        HERALD_LIST("sweep.magnitudes", magnitudes),
        HERALD_LIST("sweep.phases", phases),
        HERALD_LIST("sweep.scan_targets_db", scan_targets_db),
        {"run.engine", [](ExperimentConfig &c, const std::string &, const std::string &v) {
             c.engine = trim(v) == "montecarlo" ? "mc" : trim(v);
         },
         [](const ExperimentConfig &c) { return c.engine; }},
        {"run.seed",
         [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.seed = to_int<uint64_t>(k, v); },
         [](const ExperimentConfig &c) { return std::to_string(c.seed); }},
        {"run.shards", [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.shards = to_int<int>(k, v); },
         [](const ExperimentConfig &c) { return std::to_string(c.shards); }},
        {"run.trajectories",
         [](ExperimentConfig &c, const std::string &k, const std::string &v) {
             c.trajectories = to_int<uint64_t>(k, v);
         },
         [](const ExperimentConfig &c) { return std::to_string(c.trajectories); }},
        {"run.count",
         [](ExperimentConfig &c, const std::string &k, const std::string &v) {
             const std::string t = trim(v);
             if (t == "accepted") {
                 c.count_mode = CountMode::kAccepted;
             } else if (t == "total") {
                 c.count_mode = CountMode::kTotal;
             } else {
                 throw ConfigError(k + ": expected 'accepted' or 'total'");
             }
         },
         [](const ExperimentConfig &c) {
             return std::string(c.count_mode == CountMode::kAccepted ? "accepted" : "total");
         }},
        {"run.budget",
         [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.budget = to_int<uint64_t>(k, v); },
         [](const ExperimentConfig &c) { return std::to_string(c.budget); }},
        {"run.bootstrap",
         [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.bootstrap = to_int<int>(k, v); },
         [](const ExperimentConfig &c) { return std::to_string(c.bootstrap); }},
        {"run.dump", [](ExperimentConfig &c, const std::string &, const std::string &v) { c.dump = trim(v); },
         [](const ExperimentConfig &c) { return c.dump; }},
        {"fock.dim", [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.fock_dim = to_int<int>(k, v); },
         [](const ExperimentConfig &c) { return std::to_string(c.fock_dim); }},
        {"fock.inputs",
         [](ExperimentConfig &c, const std::string &, const std::string &v) { c.fock_inputs = split(v, ','); },
         [](const ExperimentConfig &c) { return join(c.fock_inputs); }},
        HERALD_NUMBER("fock.cat_alpha", cat_alpha),
        {"fock.angular_nodes",
         [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.angular_nodes = to_int<int>(k, v); },
         [](const ExperimentConfig &c) { return std::to_string(c.angular_nodes); }},
    };
    return entries;
}

#undef HERALD_NUMBER
#undef HERALD_OPTIONAL
#undef HERALD_LIST

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> parse_grid(const std::string &text) {
    const std::string t = trim(text);
    if (t.find(':') != std::string::npos) {
        auto parts = split(t, ':');
        if (parts.size() != 3) {
            throw ConfigError("grid: expected start:stop:steps, got '" + text + "'");
        }
        const double start = to_double("grid", parts[0]);
        const double stop = to_double("grid", parts[1]);
        const int steps = to_int<int>("grid", parts[2]);
        if (steps < 1) {
            throw ConfigError("grid: steps must be >= 1");
        }
        if (steps == 1) {
            return {start};
        }
        std::vector<double> g(steps);
        for (int i = 0; i < steps; i++) {
            g[i] = start + (stop - start) * i / (steps - 1);
        }
        return g;
    }
    if (t.empty()) {
        return {};
    }
    return to_list("grid", t);
}

void check_grid(const std::vector<double> &grid, const std::string &what) {
    if (grid.empty()) {
        throw ConfigError(what + ": grid is empty");
    }
    if (grid.size() == 1) {
        return;
    }
    const bool up = grid[1] > grid[0];
    for (size_t i = 1; i < grid.size(); i++) {
        if (up ? !(grid[i] > grid[i - 1]) : !(grid[i] < grid[i - 1])) {
            throw ConfigError(what + ": grid is not strictly monotone");
        }
    }
}

void ExperimentConfig::set(const std::string &qualified_key, const std::string &value) {
    for (const auto &e : registry()) {
        if (qualified_key == e.name) {
            e.set(*this, qualified_key, value);
            return;
        }
    }
    throw ConfigError("unknown key '" + qualified_key + "'");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::resolved() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto &e : registry()) {
        out.emplace_back(e.name, e.get(*this));
    }
    return out;
}

ExperimentConfig ExperimentConfig::parse(std::istream &in, const std::string &origin) {
    ExperimentConfig c;
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const std::string where = origin + ":" + std::to_string(lineno) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(where + "malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where + "expected key = value");
        }
        if (section.empty()) {
            throw ConfigError(where + "key outside of a section");
        }
        try {
            c.set(section + "." + trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const ConfigError &e) {
            throw ConfigError(where + e.what());
        }
    }
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path);
    }
    return parse(in, path);
}

AncillaSpec ExperimentConfig::ancilla() const {
    if (ancilla_antisqueezing_db) {
        return AncillaSpec::from_db(ancilla_db, *ancilla_antisqueezing_db, ancilla_angle);
    }
    return AncillaSpec::pure_db(ancilla_db, ancilla_angle);
}

GateConfig ExperimentConfig::gate(double target, double strength) const {
    GateConfig g;
    g.r_t = db_to_r(target);
    g.ancilla = ancilla();
    g.t_s = t_s;
    g.t_m = t_m;
    g.filter.g_f = strength;
    g.filter.alpha_c = alpha_c.value_or(1.0);
    g.eta_inloop = eta_inloop;
    g.eta_verify = eta_verify;
    g.units = units;
    g.coverage_guard = coverage_guard;
    return g;
}

void ExperimentConfig::validate() const {
    try {
        gate().validate();
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("gate: ") + e.what());
    }
    if (target_db < 0) {
        throw ConfigError("gate.target_db must be >= 0");
    }
    if (!(coverage > 0 && coverage < 1)) {
        throw ConfigError("gate.coverage must lie in (0, 1)");
    }
    static const std::vector<std::string> engines = {"analytic", "mc", "both", "fock"};
    if (std::find(engines.begin(), engines.end(), engine) == engines.end()) {
        throw ConfigError("run.engine must be analytic, mc, both or fock");
    }
    if (shards < 1) {
        throw ConfigError("run.shards must be >= 1");
    }
    if (trajectories < 1) {
        throw ConfigError("run.trajectories must be >= 1");
    }
    if (bootstrap < 2) {
        throw ConfigError("run.bootstrap must be >= 2");
    }
    if (fock_dim < 2) {
        throw ConfigError("fock.dim must be >= 2");
    }
    if (angular_nodes < 8) {
        throw ConfigError("fock.angular_nodes must be >= 8");
    }
    for (const auto &name : fock_inputs) {
        if (name != "coherent" && name != "photon" && name != "cat") {
            throw ConfigError("fock.inputs: unknown input '" + name + "'");
        }
    }
    if (magnitudes.size() != phases.size()) {
        throw ConfigError("sweep.magnitudes and sweep.phases must have equal length");
    }
    if (!grid.empty()) {
        check_grid(grid, "sweep.grid");
    }
}

}  // namespace herald
