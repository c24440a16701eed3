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

#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "herald/errors.h"
#include "herald/parallel.h"
#include "herald/philox.h"

namespace herald {

namespace {

constexpr char kDumpMagic[8] = {'H', 'E', 'R', 'A', 'L', 'D', 'T', 'J'};
constexpr uint32_t kBootstrapStream = 0xB0075 ^ 0xFFFFFFFFu;

uint64_t share(uint64_t total, int parts, int k) {
    const uint64_t base = total / static_cast<uint64_t>(parts);
    const uint64_t extra = total % static_cast<uint64_t>(parts);
    return base + (static_cast<uint64_t>(k) < extra ? 1 : 0);
}

void put_u32(std::ostream &out, uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; i++) {
        b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    }
    out.write(b, 4);
}

void put_f64(std::ostream &out, double v) {
    const auto bits = std::bit_cast<uint64_t>(v);
    char b[8];
    for (int i = 0; i < 8; i++) {
        b[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
    }
    out.write(b, 8);
}

uint64_t get_le(std::istream &in, int bytes) {
    unsigned char b[8] = {};
    if (!in.read(reinterpret_cast<char *>(b), bytes)) {
        throw std::runtime_error("truncated trajectory dump");
    }
    uint64_t v = 0;
    for (int i = bytes - 1; i >= 0; i--) {
        v = (v << 8) | b[i];
    }
    return v;
}

Mat lower_factor(const Mat &cov, const char *what) {
    Eigen::LLT<Mat> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw NumericalError(error_kind::kDegenerateMarginal, std::string(what) + " covariance is not positive definite");
    }
    return llt.matrixL();
}

/// Precomputed coefficients for one trajectory of the optical network.
struct GateSampler {
    Vec in_mean;
    Mat in_factor;
    Mat anc_factor;
    double st, rt;
    double eta, leak;
    double tm, rm;
    double eta_v, leak_v;
    int dims;
    Vec scale;
    Mat gains;
    FilterSpec filter;

    GateSampler(const RunConfig &run, const GainSolution &sol)
        : in_mean(run.input.mean()),
          in_factor(lower_factor(run.input.cov(), "input")),
          anc_factor(lower_factor(squeezed_vacuum(run.gate.ancilla).cov(), "ancilla")),
          st(std::sqrt(sol.t_s)),
          rt(std::sqrt(1 - sol.t_s)),
          eta(std::sqrt(run.gate.eta_inloop)),
          leak(std::sqrt(1 - run.gate.eta_inloop)),
          tm(std::sqrt(run.gate.t_m)),
          rm(std::sqrt(1 - run.gate.t_m)),
          eta_v(std::sqrt(run.gate.eta_verify)),
          leak_v(std::sqrt(1 - run.gate.eta_verify)),
          dims(run.gate.outcome_dims()),
          scale(sol.outcome_scale),
          gains(sol.gains),
          filter(run.gate.effective_filter()) {
    }

    /// Returns true on acceptance; `alpha` receives the outcome and `out`
    /// the output quadratures (accepted trajectories only).
    bool run(PhiloxStream &rng, double *alpha, double *out) const {
        double z0 = rng.normal();
        double z1 = rng.normal();
        const double in_x = in_mean(0) + in_factor(0, 0) * z0;
        const double in_y = in_mean(1) + in_factor(1, 0) * z0 + in_factor(1, 1) * z1;
        z0 = rng.normal();
        z1 = rng.normal();
        const double anc_x = anc_factor(0, 0) * z0;
        const double anc_y = anc_factor(1, 0) * z0 + anc_factor(1, 1) * z1;

        const double b_x = st * in_x + rt * anc_x;
        const double b_y = st * in_y + rt * anc_y;
        double c_x = rt * in_x - st * anc_x;
        double c_y = rt * in_y - st * anc_y;
        c_x = eta * c_x + leak * rng.normal();
        c_y = eta * c_y + leak * rng.normal();

        double o[2];
        if (dims == 2) {
            const double v_x = rng.normal();
            const double v_y = rng.normal();
            o[0] = (rm * c_x - tm * v_x) / rm;
            o[1] = (tm * c_y + rm * v_y) / tm;
        } else {
            o[0] = c_y;
        }
        for (int i = 0; i < dims; i++) {
            alpha[i] = scale(i) * o[i];
        }
        const double u = rng.uniform();
        const std::complex<double> a = dims == 2 ? std::complex<double>(alpha[0], alpha[1]) : alpha[0];
        if (!(u < acceptance_probability(filter, a))) {
            return false;
        }
        double x = b_x;
        double y = b_y;
        for (int i = 0; i < dims; i++) {
            x += gains(0, i) * o[i];
            y += gains(1, i) * o[i];
        }
        out[0] = eta_v * x + leak_v * rng.normal();
        out[1] = eta_v * y + leak_v * rng.normal();
        return true;
    }
};

struct ShardResult {
    uint64_t total = 0;
    uint64_t accepted = 0;
    std::vector<double> outcomes;
    std::vector<double> outputs;
};

std::string shard_dump_path(const std::string &path, int shard) {
    return path + ".shard" + std::to_string(shard);
}

ShardResult run_shard(const RunConfig &run, const GateSampler &sampler, int shard) {
    const uint64_t quota = share(run.n_trajectories, run.shards, shard);
    const uint64_t budget = share(run.budget, run.shards, shard);
    const Philox4x32 gen(run.seed);
    std::ofstream dump;
    if (!run.dump_path.empty()) {
        dump.open(shard_dump_path(run.dump_path, shard), std::ios::binary);
        if (!dump) {
            throw std::runtime_error("cannot open trajectory dump " + run.dump_path);
        }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    ShardResult r;
    double alpha[2];
    double out[2];
    auto done = [&] {
        if (run.mode == CountMode::kAccepted) {
            return r.accepted >= quota || r.total >= budget;
        }
        return r.total >= quota;
    };
    while (!done()) {
        PhiloxStream rng(gen, static_cast<uint32_t>(shard), r.total);
        const bool ok = sampler.run(rng, alpha, out);
        r.total++;
        if (ok) {
            r.accepted++;
            r.outcomes.insert(r.outcomes.end(), alpha, alpha + sampler.dims);
            r.outputs.insert(r.outputs.end(), out, out + 2);
        }
        if (dump.is_open()) {
            for (int i = 0; i < sampler.dims; i++) {
                put_f64(dump, alpha[i]);
            }
            dump.put(ok ? 1 : 0);
            put_f64(dump, ok ? out[0] : nan);
            put_f64(dump, ok ? out[1] : nan);
        }
    }
    return r;
}

void merge_dumps(const RunConfig &run, int dims) {
    std::ofstream out(run.dump_path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open trajectory dump " + run.dump_path);
    }
    out.write(kDumpMagic, 8);
    put_u32(out, kTrajectoryDumpVersion);
    put_u32(out, static_cast<uint32_t>(dims));
    for (int s = 0; s < run.shards; s++) {
        const std::string part = shard_dump_path(run.dump_path, s);
        {
            std::ifstream in(part, std::ios::binary);
            out << in.rdbuf();
        }
        std::filesystem::remove(part);
    }
}

/// Sample mean, covariance and their standard errors of row-major samples.
void sample_moments(const std::vector<double> &data, int cols, Vec &mean, Mat &cov, Vec &mean_se, Mat &cov_se) {
    const size_t n = data.size() / cols;
    mean = Vec::Zero(cols);
    for (size_t r = 0; r < n; r++) {
        for (int i = 0; i < cols; i++) {
            mean(i) += data[r * cols + i];
        }
    }
    mean /= static_cast<double>(n);
    Mat m2 = Mat::Zero(cols, cols);
    Mat m4 = Mat::Zero(cols, cols);
    for (size_t r = 0; r < n; r++) {
        for (int i = 0; i < cols; i++) {
            const double di = data[r * cols + i] - mean(i);
            for (int j = 0; j < cols; j++) {
                const double dj = data[r * cols + j] - mean(j);
                m2(i, j) += di * dj;
                m4(i, j) += di * di * dj * dj;
            }
        }
    }
    const double nd = static_cast<double>(n);
    cov = m2 / (nd - 1);
    mean_se = (cov.diagonal() / nd).cwiseSqrt();
    cov_se.resize(cols, cols);
    for (int i = 0; i < cols; i++) {
        for (int j = 0; j < cols; j++) {
            const double c = m2(i, j) / nd;
            cov_se(i, j) = std::sqrt(std::max(0.0, m4(i, j) / nd - c * c) / nd);
        }
    }
}

}  // namespace

void MomentAccumulator::add(double x) {
    const double n1 = static_cast<double>(n_);
    n_++;
    const double n = static_cast<double>(n_);
    const double delta = x - mean_;
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * n1;
    mean_ += delta_n;
    m4_ += term1 * delta_n2 * (n * n - 3 * n + 3) + 6 * delta_n2 * m2_ - 4 * delta_n * m3_;
    m3_ += term1 * delta_n * (n - 2) - 3 * delta_n * m2_;
    m2_ += term1;
}

void MomentAccumulator::merge(const MomentAccumulator &o) {
    if (o.n_ == 0) {
        return;
    }
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(o.n_);
    const double n = na + nb;
    const double d = o.mean_ - mean_;
    const double d2 = d * d;
    const double m2 = m2_ + o.m2_ + d2 * na * nb / n;
    const double m3 = m3_ + o.m3_ + d2 * d * na * nb * (na - nb) / (n * n) + 3 * d * (na * o.m2_ - nb * m2_) / n;
    const double m4 = m4_ + o.m4_ + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                      6 * d2 * (na * na * o.m2_ + nb * nb * m2_) / (n * n) + 4 * d * (na * o.m3_ - nb * m3_) / n;
    n_ += o.n_;
    mean_ += d * nb / n;
    m2_ = m2;
    m3_ = m3;
    m4_ = m4;
}

double MomentAccumulator::variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : std::numeric_limits<double>::quiet_NaN();
}

double MomentAccumulator::mean_stderr() const {
    return std::sqrt(variance() / static_cast<double>(n_));
}

double MomentAccumulator::variance_stderr() const {
    const double n = static_cast<double>(n_);
    const double var = m2_ / n;
    return std::sqrt(std::max(0.0, m4_ / n - var * var) / n);
}

void RunConfig::validate() const {
    gate.validate();
    if (input.nmodes() != 1) {
        throw std::invalid_argument("Monte Carlo input must be a single mode");
    }
    if (n_trajectories < 1) {
        throw std::invalid_argument("n_trajectories must be >= 1");
    }
    if (shards < 1) {
        throw std::invalid_argument("shards must be >= 1");
    }
    if (mode == CountMode::kTotal && n_trajectories > budget) {
        throw std::invalid_argument("n_trajectories exceeds the trajectory budget");
    }
}

EnsembleStats simulate(const RunConfig &run) {
    run.validate();
    return simulate(run, unity_gain_solve(run.gate));
}

EnsembleStats simulate(const RunConfig &run, const GainSolution &solution) {
    run.validate();
    const GateSampler sampler(run, solution);
    auto shards = parallel_map(static_cast<size_t>(run.shards), [&](size_t s) {
        return run_shard(run, sampler, static_cast<int>(s));
    });

    EnsembleStats stats;
    stats.outcome_dims = sampler.dims;
    for (int s = 0; s < run.shards; s++) {
        ShardResult &r = shards[s];
        stats.total += r.total;
        stats.accepted += r.accepted;
        if (run.mode == CountMode::kAccepted && r.accepted < share(run.n_trajectories, run.shards, s)) {
            stats.budget_exhausted = true;
        }
        stats.outcomes.insert(stats.outcomes.end(), r.outcomes.begin(), r.outcomes.end());
        stats.outputs.insert(stats.outputs.end(), r.outputs.begin(), r.outputs.end());
        std::vector<double>().swap(r.outcomes);
        std::vector<double>().swap(r.outputs);
    }
    if (!run.dump_path.empty()) {
        merge_dumps(run, sampler.dims);
    }
    if (stats.accepted < 2) {
        throw NumericalError(
            error_kind::kAcceptanceStarvation, std::to_string(stats.accepted) + " of " + std::to_string(stats.total) +
                                                   " trajectories accepted; rate below " +
                                                   std::to_string(3.0 / static_cast<double>(stats.total)) +
                                                   " at 95% confidence");
    }
    sample_moments(
        stats.outcomes, sampler.dims, stats.outcome_mean, stats.outcome_cov, stats.outcome_mean_se,
        stats.outcome_cov_se);
    sample_moments(
        stats.outputs, 2, stats.output_mean, stats.output_cov, stats.output_mean_se, stats.output_cov_se);
    return stats;
}

FidelityEstimate estimate_fidelity(
    const EnsembleStats &stats, const GaussianState &target, int resamples, uint64_t seed) {
    if (resamples < 2) {
        throw std::invalid_argument("bootstrap needs at least two resamples");
    }
    const size_t n = stats.outputs.size() / 2;
    if (n < 2) {
        throw std::invalid_argument("fidelity estimate needs at least two accepted trajectories");
    }
    const double point = fidelity(GaussianState(stats.output_mean, stats.output_cov), target);
    const Philox4x32 gen(seed);
    const auto reps = parallel_map(static_cast<size_t>(resamples), [&](size_t b) {
        PhiloxStream rng(gen, kBootstrapStream, b);
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        for (size_t k = 0; k < n; k++) {
            const size_t r = std::min(n - 1, static_cast<size_t>(rng.uniform() * static_cast<double>(n)));
            const double x = stats.outputs[2 * r];
            const double y = stats.outputs[2 * r + 1];
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            syy += y * y;
        }
        const double nd = static_cast<double>(n);
        Vec mean(2);
        mean << sx / nd, sy / nd;
        Mat cov(2, 2);
        cov << sxx - sx * mean(0), sxy - sx * mean(1), sxy - sx * mean(1), syy - sy * mean(1);
        cov /= nd - 1;
        return fidelity(GaussianState(mean, cov), target);
    });
    MomentAccumulator acc;
    for (double f : reps) {
        acc.add(f);
    }
    return {point, std::sqrt(acc.variance())};
}

RateEstimate acceptance_rate(const EnsembleStats &stats) {
    if (stats.total == 0) {
        throw std::invalid_argument("no trajectories recorded");
    }
    const double n = static_cast<double>(stats.total);
    const double p = static_cast<double>(stats.accepted) / n;
    const double z = 1.959963984540054;
    const double z2 = z * z;
    const double center = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {p, std::sqrt(p * (1 - p) / n), std::max(0.0, center - half), std::min(1.0, center + half)};
}

FilterStats simulate_filter(const FilterRun &run) {
    run.spec.validate();
    if (!(run.variance > 0)) {
        throw std::invalid_argument("outcome variance must be positive");
    }
    if (run.shards < 1 || run.n_trials < 1) {
        throw std::invalid_argument("filter run needs shards >= 1 and n_trials >= 1");
    }
    const int d = run.spec.dims;
    if (d == 1 && run.mean.imag() != 0) {
        throw std::invalid_argument("one-dimensional filter needs a real outcome mean");
    }
    const Philox4x32 gen(run.seed);
    const double sigma = std::sqrt(run.variance);
    const double c2 = run.spec.alpha_c * run.spec.alpha_c;
    auto shards = parallel_map(static_cast<size_t>(run.shards), [&](size_t s) {
        FilterStats part;
        part.accepted.resize(d);
        part.accepted_inside.resize(d);
        const uint64_t quota = share(run.n_trials, run.shards, static_cast<int>(s));
        for (uint64_t i = 0; i < quota; i++) {
            PhiloxStream rng(gen, static_cast<uint32_t>(s), i);
            const double x = run.mean.real() + sigma * rng.normal();
            const double y = d == 2 ? run.mean.imag() + sigma * rng.normal() : 0.0;
            const double u = rng.uniform();
            const std::complex<double> a(x, y);
            if (!(u < acceptance_probability(run.spec, a))) {
                continue;
            }
            const bool inside = std::norm(a) < c2;
            part.accepted[0].add(x);
            if (inside) {
                part.accepted_inside[0].add(x);
            }
            if (d == 2) {
                part.accepted[1].add(y);
                if (inside) {
                    part.accepted_inside[1].add(y);
                }
            }
        }
        part.total = quota;
        return part;
    });
    FilterStats stats;
    stats.accepted.resize(d);
    stats.accepted_inside.resize(d);
    for (const FilterStats &part : shards) {
        stats.total += part.total;
        for (int i = 0; i < d; i++) {
            stats.accepted[i].merge(part.accepted[i]);
            stats.accepted_inside[i].merge(part.accepted_inside[i]);
        }
    }
    return stats;
}

std::vector<TrajectoryRecord> read_trajectory_dump(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open trajectory dump " + path);
    }
    char magic[8];
    if (!in.read(magic, 8) || !std::equal(magic, magic + 8, kDumpMagic)) {
        throw std::runtime_error("not a trajectory dump: " + path);
    }
    const auto version = static_cast<uint32_t>(get_le(in, 4));
    if (version != kTrajectoryDumpVersion) {
        throw std::runtime_error("unsupported trajectory dump version " + std::to_string(version));
    }
    const auto dims = static_cast<int>(get_le(in, 4));
    std::vector<TrajectoryRecord> records;
    while (in.peek() != std::char_traits<char>::eof()) {
        TrajectoryRecord rec;
        for (int i = 0; i < dims; i++) {
            rec.outcome.push_back(std::bit_cast<double>(get_le(in, 8)));
        }
        rec.accepted = get_le(in, 1) != 0;
        rec.output_x = std::bit_cast<double>(get_le(in, 8));
        rec.output_y = std::bit_cast<double>(get_le(in, 8));
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace herald
