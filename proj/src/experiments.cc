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


#include "herald/experiments.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "herald/errors.h"
#include "herald/fock.h"
#include "herald/parallel.h"
#include "herald/version.h"

namespace herald {

namespace {

using nlohmann::json;

std::string num(double v) {
    return format_double(v);
}

uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

bool wants_mc(const ExperimentConfig &c) {
    return c.engine == "mc" || c.engine == "both";
}

void require_gaussian_engine(const ExperimentConfig &c, const char *command) {
    if (c.engine == "fock") {
        throw ConfigError(std::string(command) + ": engine 'fock' is only available for fock-demo");
    }
}

std::vector<double> grid_or(const ExperimentConfig &c, const char *fallback, const char *what) {
    std::vector<double> g = c.grid.empty() ? parse_grid(fallback) : c.grid;
    check_grid(g, what);
    return g;
}

unsigned point_threads(const ExperimentConfig &c) {
    // Monte Carlo points parallelise over shards instead.
    return wants_mc(c) ? 1u : thread_budget();
}

struct PointResult {
    double alpha_c = 0;
    GateResult analytic{
        vacuum(1), vacuum(1), 0, 0, Vec(), Mat(), 0, GainSolution{1, Mat(), Vec(), Mat(), 0, false}};
    bool has_mc = false;
    RateEstimate rate{};
    FidelityEstimate fidelity{};
    EnsembleStats stats;
};

PointResult evaluate(
    const ExperimentConfig &c, GateConfig gate, const GaussianState &input, std::complex<double> rule_alpha,
    uint64_t stream, const std::string &dump = "") {
    PointResult p;
    GainSolution sol = unity_gain_solve(gate);
    if (!c.alpha_c) {
        gate.filter.alpha_c = cutoff_for_rule(gate, sol, CutoffRule{c.coverage, rule_alpha});
    }
    p.alpha_c = gate.filter.alpha_c;
    p.analytic = heralded_output(gate, sol, input);
    if (wants_mc(c) || !dump.empty()) {
        const double expected = static_cast<double>(c.trajectories) /
                                (c.count_mode == CountMode::kAccepted ? p.analytic.success_probability : 1.0);
        if (expected > static_cast<double>(c.budget)) {
            throw NumericalError(
                error_kind::kAcceptanceStarvation, "predicted success probability " +
                                                       num(p.analytic.success_probability) + " needs about " +
                                                       num(expected) + " trials, above the budget " +
                                                       std::to_string(c.budget) + " (g_f = " +
                                                       num(gate.filter.g_f) + ")");
        }
        RunConfig run;
        run.gate = gate;
        run.input = input;
        run.n_trajectories = c.trajectories;
        run.mode = c.count_mode;
        run.seed = mix_seed(c.seed, stream);
        run.shards = c.shards;
        run.budget = c.budget;
        run.dump_path = dump;
        p.stats = simulate(run, sol);
        p.rate = acceptance_rate(p.stats);
        p.fidelity = estimate_fidelity(p.stats, p.analytic.target, c.bootstrap, run.seed);
        p.has_mc = true;
    }
    return p;
}

std::vector<std::string> engine_header(const ExperimentConfig &c) {
    std::vector<std::string> h = {"success_probability", "success_stderr", "fidelity", "fidelity_stderr"};
    if (c.engine == "both") {
        for (const char *s : {"mc_success_probability", "mc_success_stderr", "mc_fidelity", "mc_fidelity_stderr"}) {
            h.emplace_back(s);
        }
    }
    return h;
}

std::vector<std::string> engine_cells(const ExperimentConfig &c, const PointResult &p) {
    std::vector<std::string> mc;
    if (p.has_mc) {
        mc = {num(p.rate.rate), num(p.rate.stderr), num(p.fidelity.fidelity), num(p.fidelity.stderr)};
    }
    if (c.engine == "mc") {
        return mc;
    }
    std::vector<std::string> cells = {num(p.analytic.success_probability), "0", num(p.analytic.fidelity), "0"};
    cells.insert(cells.end(), mc.begin(), mc.end());
    return cells;
}

/// Fidelity reported by the primary engine.
double primary_fidelity(const ExperimentConfig &c, const PointResult &p) {
    return c.engine == "mc" ? p.fidelity.fidelity : p.analytic.fidelity;
}

double primary_probability(const ExperimentConfig &c, const PointResult &p) {
    return c.engine == "mc" ? p.rate.rate : p.analytic.success_probability;
}

template <typename T>
std::vector<std::string> concat(std::vector<std::string> a, const T &b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

void Table::add(std::vector<std::string> row) {
    if (row.size() != header.size()) {
        throw std::logic_error("table row width does not match header");
    }
    rows.push_back(std::move(row));
}

std::string Table::csv() const {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string> &cells) {
        for (size_t i = 0; i < cells.size(); i++) {
            out << (i ? "," : "") << cells[i];
        }
        out << "\n";
    };
    line(header);
    for (const auto &r : rows) {
        line(r);
    }
    return out.str();
}

ExperimentOutput run_tradeoff(const ExperimentConfig &c) {
    c.validate();
    require_gaussian_engine(c, "tradeoff");
    const std::vector<double> g = grid_or(c, "1:20:20", "tradeoff g_f grid");
    check_grid(c.targets_db, "sweep.targets_db");
    const size_t per = g.size();
    auto points = parallel_map(
        c.targets_db.size() * per,
        [&](size_t i) {
            const GateConfig gate = c.gate(c.targets_db[i / per], g[i % per]);
            return evaluate(c, gate, coherent(c.input_alpha), c.input_alpha, i);
        },
        point_threads(c));

    ExperimentOutput out;
    out.table.header = concat({"target_db", "g_f", "alpha_c"}, engine_header(c));
    json curves = json::array();
    for (size_t t = 0; t < c.targets_db.size(); t++) {
        double best_f = -1;
        double best_p = 0;
        for (size_t k = 0; k < per; k++) {
            const PointResult &p = points[t * per + k];
            out.table.add(concat({num(c.targets_db[t]), num(g[k]), num(p.alpha_c)}, engine_cells(c, p)));
            if (primary_fidelity(c, p) > best_f) {
                best_f = primary_fidelity(c, p);
                best_p = primary_probability(c, p);
            }
        }
        curves.push_back({
            {"target_db", c.targets_db[t]},
            {"deterministic_limit", deterministic_limit(c.ancilla(), db_to_r(c.targets_db[t]), c.t_m)},
            {"max_fidelity", best_f},
            {"success_probability_at_max", best_p},
        });
    }
    out.summary["curves"] = curves;
    return out;
}

ExperimentOutput run_sweep_target(const ExperimentConfig &c) {
    c.validate();
    require_gaussian_engine(c, "sweep-target");
    const std::vector<double> targets = grid_or(c, "0:10:21", "sweep-target grid");
    const GaussianState input = coherent(c.input_alpha);
    auto points = parallel_map(
        targets.size(),
        [&](size_t i) {
            const GateConfig gate = c.gate(targets[i], c.g_f);
            PointResult p = evaluate(c, gate, input, c.input_alpha, i);
            const double det = deterministic_limit(c.ancilla(), gate.r_t, c.t_m);
            const double conv = conventional_output(gate, input).fidelity;
            return std::tuple{p, det, conv};
        },
        point_threads(c));
    ExperimentOutput out;
    out.table.header =
        concat({"target_db", "deterministic_limit", "conventional_fidelity", "g_f", "alpha_c"}, engine_header(c));
    for (size_t i = 0; i < targets.size(); i++) {
        const auto &[p, det, conv] = points[i];
        out.table.add(concat({num(targets[i]), num(det), num(conv), num(c.g_f), num(p.alpha_c)}, engine_cells(c, p)));
    }
    out.summary["points"] = targets.size();
    return out;
}

ExperimentOutput run_sweep_gain(const ExperimentConfig &c) {
    c.validate();
    require_gaussian_engine(c, "sweep-gain");
    const std::vector<double> g = grid_or(c, "1:20:20", "sweep-gain grid");
    auto points = parallel_map(
        g.size(),
        [&](size_t i) { return evaluate(c, c.gate(c.target_db, g[i]), coherent(c.input_alpha), c.input_alpha, i); },
        point_threads(c));
    ExperimentOutput out;
    out.table.header = concat({"target_db", "g_f", "alpha_c", "t_s"}, engine_header(c));
    bool monotone = true;
    for (size_t i = 0; i < g.size(); i++) {
        const PointResult &p = points[i];
        out.table.add(
            concat({num(c.target_db), num(g[i]), num(p.alpha_c), num(p.analytic.solution.t_s)}, engine_cells(c, p)));
        if (i > 0 && p.analytic.fidelity < points[i - 1].analytic.fidelity - 1e-12) {
            monotone = false;
        }
    }
    out.summary["analytic_fidelity_non_decreasing"] = monotone;
    return out;
}

ExperimentOutput run_sweep_ancilla(const ExperimentConfig &c) {
    c.validate();
    require_gaussian_engine(c, "sweep-ancilla");
    const std::vector<double> levels = grid_or(c, "2:12:11", "sweep-ancilla grid");
    const double excess = c.ancilla_antisqueezing_db ? *c.ancilla_antisqueezing_db - c.ancilla_db : 0.0;
    const GaussianState input = coherent(c.input_alpha);
    auto points = parallel_map(
        levels.size(),
        [&](size_t i) {
            ExperimentConfig local = c;
            local.ancilla_db = levels[i];
            if (c.ancilla_antisqueezing_db) {
                local.ancilla_antisqueezing_db = levels[i] + excess;
            }
            const GateConfig gate = local.gate();
            PointResult p = evaluate(local, gate, input, c.input_alpha, i);
            return std::pair{p, conventional_output(gate, input).fidelity};
        },
        point_threads(c));
    ExperimentOutput out;
    out.table.header =
        concat({"ancilla_db", "target_db", "g_f", "alpha_c", "conventional_fidelity"}, engine_header(c));
    for (size_t i = 0; i < levels.size(); i++) {
        const auto &[p, conv] = points[i];
        out.table.add(
            concat({num(levels[i]), num(c.target_db), num(c.g_f), num(p.alpha_c), num(conv)}, engine_cells(c, p)));
    }
    out.summary["points"] = levels.size();
    return out;
}

ExperimentOutput run_phase_scan(const ExperimentConfig &c) {
    c.validate();
    require_gaussian_engine(c, "phase-scan");
    const size_t n_in = c.magnitudes.size();
    std::vector<std::complex<double>> inputs;
    for (size_t k = 0; k < n_in; k++) {
        inputs.push_back(std::polar(c.magnitudes[k], c.phases[k]));
    }
    // One filter per target, wide enough for every input of the scan.
    auto cutoffs = parallel_map(c.scan_targets_db.size(), [&](size_t t) {
        GateConfig gate = c.gate(c.scan_targets_db[t], c.g_f);
        if (c.alpha_c) {
            return *c.alpha_c;
        }
        const GainSolution sol = unity_gain_solve(gate);
        double cut = 0;
        for (auto a : inputs) {
            cut = std::max(cut, cutoff_for_rule(gate, sol, CutoffRule{c.coverage, a}));
        }
        return cut;
    });
    auto points = parallel_map(
        c.scan_targets_db.size() * n_in,
        [&](size_t i) {
            ExperimentConfig local = c;
            local.alpha_c = cutoffs[i / n_in];
            const std::complex<double> a = inputs[i % n_in];
            return evaluate(local, local.gate(c.scan_targets_db[i / n_in], c.g_f), coherent(a), a, i);
        },
        point_threads(c));
    ExperimentOutput out;
    out.table.header = concat({"target_db", "alpha_abs", "alpha_phase", "alpha_c"}, engine_header(c));
    json spreads = json::array();
    for (size_t t = 0; t < c.scan_targets_db.size(); t++) {
        double lo = 1, hi = 0;
        for (size_t k = 0; k < n_in; k++) {
            const PointResult &p = points[t * n_in + k];
            out.table.add(
                concat({num(c.scan_targets_db[t]), num(c.magnitudes[k]), num(c.phases[k]), num(p.alpha_c)},
                       engine_cells(c, p)));
            lo = std::min(lo, primary_fidelity(c, p));
            hi = std::max(hi, primary_fidelity(c, p));
        }
        spreads.push_back({{"target_db", c.scan_targets_db[t]}, {"fidelity_spread", hi - lo}});
    }
    out.summary["spread_by_target"] = spreads;
    return out;
}

ExperimentOutput run_mc(const ExperimentConfig &c) {
    c.validate();
    ExperimentConfig local = c;
    local.engine = "mc";
    const GaussianState input = coherent(c.input_alpha);
    PointResult p = evaluate(local, local.gate(), input, c.input_alpha, 0, c.dump);
    const Vec &am = p.analytic.output.mean();
    const Mat &ac = p.analytic.output.cov();
    const EnsembleStats &s = p.stats;
    ExperimentOutput out;
    out.table.header = {
        "target_db", "g_f", "alpha_c", "t_s", "analytic_success_probability", "analytic_fidelity", "accepted", "total",
        "acceptance_rate", "acceptance_stderr", "wilson_lower", "wilson_upper", "mc_fidelity", "mc_fidelity_stderr",
        "analytic_mean_x", "mc_mean_x", "analytic_mean_y", "mc_mean_y", "analytic_cov_xx", "mc_cov_xx",
        "analytic_cov_xy", "mc_cov_xy", "analytic_cov_yy", "mc_cov_yy"};
    out.table.add({
        num(c.target_db), num(c.g_f), num(p.alpha_c), num(p.analytic.solution.t_s),
        num(p.analytic.success_probability), num(p.analytic.fidelity), std::to_string(s.accepted),
        std::to_string(s.total), num(p.rate.rate), num(p.rate.stderr), num(p.rate.lower), num(p.rate.upper),
        num(p.fidelity.fidelity), num(p.fidelity.stderr), num(am(0)), num(s.output_mean(0)), num(am(1)),
        num(s.output_mean(1)), num(ac(0, 0)), num(s.output_cov(0, 0)), num(ac(0, 1)), num(s.output_cov(0, 1)),
        num(ac(1, 1)), num(s.output_cov(1, 1)),
    });
    out.summary["budget_exhausted"] = s.budget_exhausted;
    out.summary["fidelity_z"] = (p.fidelity.fidelity - p.analytic.fidelity) / p.fidelity.stderr;
    return out;
}

ExperimentOutput run_fock_demo(const ExperimentConfig &c) {
    c.validate();
    if (c.t_m != 0.5) {
        throw ConfigError("fock-demo needs gate.t_m = 0.5 (dual homodyne)");
    }
    const std::vector<double> g = grid_or(c, "1,1.25,1.5", "fock-demo g_f grid");
    const size_t per = g.size();
    FockGateOptions options;
    options.angular_nodes = c.angular_nodes;
    struct FockRow {
        double alpha_c;
        FockGateResult fock;
        double gaussian;
    };
    auto rows = parallel_map(c.fock_inputs.size() * per, [&](size_t i) {
        const std::string &name = c.fock_inputs[i / per];
        GateConfig gate = c.gate(c.target_db, g[i % per]);
        const GainSolution sol = unity_gain_solve(gate);
        if (!c.alpha_c) {
            gate.filter.alpha_c = cutoff_for_rule(gate, sol, CutoffRule{c.coverage, c.input_alpha});
        }
        FockState in = name == "coherent" ? fock_coherent(c.input_alpha, c.fock_dim)
                       : name == "photon" ? fock_single_photon(c.fock_dim)
                                          : fock_cat(c.cat_alpha, 1, c.fock_dim);
        double gaussian = std::numeric_limits<double>::quiet_NaN();
        if (name == "coherent") {
            gaussian = heralded_output(gate, sol, coherent(c.input_alpha)).fidelity;
        }
        return FockRow{gate.filter.alpha_c, heralded_gate_fock(gate, in, options), gaussian};
    });
    ExperimentOutput out;
    out.table.header = {"input",    "dim",           "g_f",      "alpha_c", "success_probability",
                        "fidelity", "gaussian_fidelity", "convergence_delta"};
    for (size_t i = 0; i < rows.size(); i++) {
        const FockRow &r = rows[i];
        out.table.add({
            c.fock_inputs[i / per], std::to_string(c.fock_dim), num(g[i % per]), num(r.alpha_c),
            num(r.fock.success_probability), num(r.fock.fidelity), std::isnan(r.gaussian) ? "" : num(r.gaussian),
            num(r.fock.convergence_delta),
        });
    }
    out.summary["rows"] = rows.size();
    return out;
}

ExperimentOutput run_selftest(const ExperimentConfig &c, std::ostream &log) {
    c.validate();
    ExperimentOutput out;
    out.table.header = {"check", "analytic", "monte_carlo", "stderr", "z", "result"};
    int failures = 0;
    auto check = [&](const std::string &name, double analytic, double mc, double se) {
        const double z = (mc - analytic) / se;
        const bool ok = std::abs(z) <= 3;
        failures += ok ? 0 : 1;
        log << (ok ? "PASS " : "FAIL ") << name << " (z = " << z << ")\n";
        out.table.add({name, num(analytic), num(mc), num(se), num(z), ok ? "pass" : "fail"});
    };

    {
        FilterRun run;
        run.spec = {2.0, 2.0, 2};
        run.mean = 0.5;
        run.variance = 0.5;
        run.n_trials = 1'000'000;
        run.seed = mix_seed(c.seed, 100);
        run.shards = c.shards;
        const FilterStats s = simulate_filter(run);
        const double p = success_probability(run.spec, run.mean, run.variance);
        const double n = static_cast<double>(s.total);
        check("filter success probability", p, s.accepted_count() / n, std::sqrt(p * (1 - p) / n));
    }
    {
        const double g = 1.5;
        const std::complex<double> mu(0.4, 0.2);
        FilterRun run;
        run.spec = {g, cutoff_for_coverage(g, Vec::Map(reinterpret_cast<const double *>(&mu), 2), 0.5 * Mat::Identity(2, 2), 1 - 1e-5), 2};
        run.mean = mu;
        run.variance = 0.5;
        run.n_trials = 4'000'000;
        run.seed = mix_seed(c.seed, 101);
        run.shards = c.shards;
        const FilterStats s = simulate_filter(run);
        check("filtered mean (x)", g * mu.real(), s.accepted[0].mean(), s.accepted[0].mean_stderr());
        check("filtered mean (y)", g * mu.imag(), s.accepted[1].mean(), s.accepted[1].mean_stderr());
        check("filtered variance (x)", g / 2, s.accepted[0].variance(), s.accepted[0].variance_stderr());
    }
    for (double t_m : {1.0, 0.5}) {
        ExperimentConfig local = c;
        local.t_m = t_m;
        local.alpha_c.reset();
        local.coverage = 1 - 1e-6;
        local.engine = "mc";
        const PointResult p = evaluate(local, local.gate(local.target_db, 1.2), coherent(c.input_alpha), c.input_alpha, t_m == 1.0 ? 102 : 103);
        const std::string tag = t_m == 1.0 ? " [t_m = 1]" : " [t_m = 0.5]";
        check("acceptance rate" + tag, p.analytic.success_probability, p.rate.rate, p.rate.stderr);
        check("output mean x" + tag, p.analytic.output.mean()(0), p.stats.output_mean(0), p.stats.output_mean_se(0));
        check("output mean y" + tag, p.analytic.output.mean()(1), p.stats.output_mean(1), p.stats.output_mean_se(1));
        check("output var x" + tag, p.analytic.output.cov()(0, 0), p.stats.output_cov(0, 0), p.stats.output_cov_se(0, 0));
        check("output var y" + tag, p.analytic.output.cov()(1, 1), p.stats.output_cov(1, 1), p.stats.output_cov_se(1, 1));
        check("fidelity" + tag, p.analytic.fidelity, p.fidelity.fidelity, p.fidelity.stderr);
    }
    out.passed = failures == 0;
    out.summary["checks"] = out.table.rows.size();
    out.summary["failures"] = failures;
    return out;
}

const std::vector<Command> &commands() {
    static const std::vector<Command> list = {
        {"tradeoff", "fidelity against success probability over a g_f grid, one curve per target",
         [](const ExperimentConfig &c, std::ostream &) { return run_tradeoff(c); }},
        {"sweep-target", "fidelity against target squeezing",
         [](const ExperimentConfig &c, std::ostream &) { return run_sweep_target(c); }},
        {"sweep-gain", "fidelity against filter strength",
         [](const ExperimentConfig &c, std::ostream &) { return run_sweep_gain(c); }},
        {"sweep-ancilla", "fidelity against ancilla squeezing",
         [](const ExperimentConfig &c, std::ostream &) { return run_sweep_ancilla(c); }},
        {"phase-scan", "fidelity for coherent inputs of several amplitudes and phases",
         [](const ExperimentConfig &c, std::ostream &) { return run_phase_scan(c); }},
        {"run-mc", "one Monte Carlo run compared with the analytic gate",
         [](const ExperimentConfig &c, std::ostream &) { return run_mc(c); }},
        {"fock-demo", "heralded gate on Fock-space inputs",
         [](const ExperimentConfig &c, std::ostream &) { return run_fock_demo(c); }},
        {"selftest", "Monte Carlo against analytic checks at 3 standard errors",
         [](const ExperimentConfig &c, std::ostream &log) { return run_selftest(c, log); }},
    };
    return list;
}

json summary_document(const std::string &command, const ExperimentConfig &config, const ExperimentOutput &out) {
    json cfg = json::object();
    for (const auto &[k, v] : config.resolved()) {
        cfg[k] = v;
    }
    json doc = json::object();
    doc["command"] = command;
    doc["version"] = kVersion;
    doc["schema"] = kOutputSchemaVersion;
    doc["seed"] = config.seed;
    doc["shards"] = config.shards;
    doc["config"] = cfg;
    doc["columns"] = out.table.header;
    doc["rows"] = out.table.rows.size();
    doc["passed"] = out.passed;
    doc["results"] = out.summary;
    return doc;
}

}  // namespace herald
