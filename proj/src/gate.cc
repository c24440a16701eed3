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


#include "herald/gate.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "herald/errors.h"
#include "herald/parallel.h"

namespace herald {

namespace {

constexpr double kResidualTol = 1e-8;

bool in_unit_interval(double v) {
    return v > 0 && v <= 1 && std::isfinite(v);
}

/// Heralded-output moments without the regime guard or success probability.
struct Propagation {
    GaussianState output;
    Vec alpha_mean;
    Mat alpha_cov;
};

struct JointBlocks {
    Vec mu_b;
    Vec mu_o;
    Mat s_bb;
    Mat s_bo;
    Mat s_oo;
};

JointBlocks split(const GateJoint &joint) {
    const int d = joint.dims;
    return {
        joint.mean.head(2),
        joint.mean.tail(d),
        joint.cov.topLeftCorner(2, 2),
        joint.cov.topRightCorner(2, d),
        joint.cov.bottomRightCorner(d, d),
    };
}

Mat regression(const JointBlocks &j) {
    Eigen::LLT<Mat> llt(j.s_oo);
    if (llt.info() != Eigen::Success) {
        throw NumericalError(error_kind::kDegenerateMarginal, "in-loop outcome covariance is singular");
    }
    return llt.solve(j.s_bo.transpose()).transpose();
}

/// Filtered outcome mean gain and covariance in quadrature units.
struct OutcomeFilter {
    Mat gamma;
    Mat cov;
};

OutcomeFilter filter_in_quadrature_units(const FilterSpec &spec, const Vec &scale, const Mat &s_oo) {
    const int d = static_cast<int>(scale.size());
    if (spec.is_identity()) {
        return {Mat::Identity(d, d), s_oo};
    }
    const Mat dmat = scale.asDiagonal();
    const Mat dinv = scale.cwiseInverse().asDiagonal();
    FilteredOutcome f = filter_outcome(spec, Vec::Zero(d), dmat * s_oo * dmat);
    return {dinv * f.mean_gain * dmat, dinv * f.cov * dinv};
}

Mat input_mean_map(const GateConfig &config, double t_s) {
    const int d = config.outcome_dims();
    Mat map(2 + d, 2);
    for (int k = 0; k < 2; k++) {
        Vec e = Vec::Zero(2);
        e(k) = 1;
        map.col(k) = gate_joint(config, t_s, GaussianState(e, Mat::Identity(2, 2))).mean;
    }
    return map;
}

GainSolution solve_at(const GateConfig &config, double t_s) {
    const int d = config.outcome_dims();
    GainSolution sol;
    sol.t_s = t_s;
    sol.outcome_scale = outcome_scale(config, t_s);
    JointBlocks j = split(gate_joint(config, t_s, vacuum(1)));
    const Mat k = regression(j);
    OutcomeFilter f = filter_in_quadrature_units(config.effective_filter(), sol.outcome_scale, j.s_oo);
    sol.gamma = f.gamma;

    const Mat map = input_mean_map(config, t_s);
    const Mat b = map.topRows(2);
    const Mat c = map.bottomRows(d);
    const Mat s_t = squeezer(config.r_t, 0.0, 0, 1).matrix;
    const Mat rhs = s_t - b - k * (f.gamma - Mat::Identity(d, d)) * c;
    const Mat a = f.gamma * c;
    if (config.gain_override) {
        sol.gains = *config.gain_override;
        sol.overridden = true;
    } else {
        sol.gains = a.transpose().completeOrthogonalDecomposition().solve(rhs.transpose()).transpose();
    }
    sol.residual = (sol.gains * a - rhs).cwiseAbs().maxCoeff();
    return sol;
}

Propagation propagate(const GateConfig &config, const GainSolution &sol, const GaussianState &input) {
    JointBlocks j = split(gate_joint(config, sol.t_s, input));
    const Mat k = regression(j);
    const Mat s = j.s_bb - k * j.s_bo.transpose();
    const Mat dmat = sol.outcome_scale.asDiagonal();
    Propagation p{GaussianState(Vec::Zero(2), Mat::Identity(2, 2)), dmat * j.mu_o, dmat * j.s_oo * dmat};

    OutcomeFilter f = filter_in_quadrature_units(config.effective_filter(), sol.outcome_scale, j.s_oo);
    const Vec mu_filtered = f.gamma * j.mu_o;
    const Mat coupling = k + sol.gains;
    Vec mean = j.mu_b + k * (mu_filtered - j.mu_o) + sol.gains * mu_filtered;
    Mat cov = s + coupling * f.cov * coupling.transpose();
    p.output = loss_channel(GaussianState(mean, cov), 0, config.eta_verify);
    return p;
}

double vacuum_fidelity(const GateConfig &config, const GainSolution &sol) {
    GaussianState in = vacuum(1);
    return fidelity(propagate(config, sol, in).output, target_state(in, config.r_t));
}

double optimise_t_s(const GateConfig &config) {
    auto objective = [&](double log_t) {
        try {
            return -vacuum_fidelity(config, solve_at(config, std::exp(log_t)));
        } catch (const NumericalError &) {
            return 1.0;
        }
    };
    // Coarse scan in log t_s, then Brent inside the best bracket.
    constexpr int kScan = 48;
    const double lo = std::log(1e-4);
    const double hi = -1e-6;
    double best = std::numeric_limits<double>::infinity();
    int best_k = 0;
    for (int k = 0; k <= kScan; k++) {
        double v = objective(lo + (hi - lo) * k / kScan);
        if (v < best) {
            best = v;
            best_k = k;
        }
    }
    const double a = lo + (hi - lo) * std::max(0, best_k - 1) / kScan;
    const double b = lo + (hi - lo) * std::min(kScan, best_k + 1) / kScan;
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::brent_find_minima(objective, a, b, std::numeric_limits<double>::digits / 2, iters);
    if (!(r.second < 0)) {
        throw NumericalError(error_kind::kNoUnityGainSolution, "no beamsplitter ratio yields a solvable gate");
    }
    return std::exp(r.first);
}

}  // namespace

void GateConfig::validate() const {
    if (!(r_t >= 0) || !std::isfinite(r_t)) {
        throw std::invalid_argument("target squeezing r_t must be finite and >= 0");
    }
    ancilla.validate();
    if (t_s && !in_unit_interval(*t_s)) {
        throw std::invalid_argument("t_s must lie in (0, 1]");
    }
    if (!in_unit_interval(t_m)) {
        throw std::invalid_argument("t_m must lie in (0, 1]");
    }
    if (!in_unit_interval(eta_inloop) || !in_unit_interval(eta_verify)) {
        throw std::invalid_argument("efficiencies must lie in (0, 1]");
    }
    effective_filter().validate();
    if (!(coverage_guard >= 0 && coverage_guard < 1)) {
        throw std::invalid_argument("coverage guard must lie in [0, 1)");
    }
    if (gain_override && (gain_override->rows() != 2 || gain_override->cols() != outcome_dims())) {
        throw std::invalid_argument("gain override must be 2 x outcome dimension");
    }
}

GaussianState target_state(const GaussianState &input, double r_t) {
    if (input.nmodes() != 1) {
        throw std::invalid_argument("target_state expects a single-mode input");
    }
    return apply(input, squeezer(r_t, 0.0, 0, 1));
}

GateJoint gate_joint(const GateConfig &config, double t_s, const GaussianState &input) {
    if (input.nmodes() != 1) {
        throw std::invalid_argument("gate input must be a single mode");
    }
    const bool split_outcome = config.t_m < 1.0;
    const int n = split_outcome ? 3 : 2;
    GaussianState state = tensor(input, squeezed_vacuum(config.ancilla));
    if (split_outcome) {
        state = tensor(state, vacuum(1));
    }
    state = apply(state, beamsplitter(t_s, 0, 1, n));
    state = loss_channel(state, 1, config.eta_inloop);
    const int d = config.outcome_dims();
    Mat select = Mat::Zero(2 + d, 2 * n);
    select(0, 0) = 1;
    select(1, 1) = 1;
    if (split_outcome) {
        state = apply(state, beamsplitter(config.t_m, 1, 2, n));
        select(2, 4) = 1 / std::sqrt(1 - config.t_m);
        select(3, 3) = 1 / std::sqrt(config.t_m);
    } else {
        select(2, 3) = 1;
    }
    return {select * state.mean(), select * state.cov() * select.transpose(), d};
}

Vec outcome_scale(const GateConfig &config, double t_s) {
    const int d = config.outcome_dims();
    if (config.units == OutcomeUnits::kShotNoise) {
        return Vec::Constant(d, 0.5);
    }
    GateJoint j = gate_joint(config, t_s, vacuum(1));
    Vec scale(d);
    for (int i = 0; i < d; i++) {
        scale(i) = 1 / std::sqrt(2 * j.cov(2 + i, 2 + i));
    }
    return scale;
}

GainSolution unity_gain_solve(const GateConfig &config) {
    config.validate();
    double t_s;
    if (config.t_s) {
        t_s = *config.t_s;
    } else if (config.t_m == 1.0) {
        t_s = std::exp(-2 * config.r_t);
    } else {
        t_s = optimise_t_s(config);
    }
    GainSolution sol = solve_at(config, t_s);
    if (!sol.overridden && sol.residual > kResidualTol) {
        throw NumericalError(
            error_kind::kNoUnityGainSolution,
            "mean constraint residual " + std::to_string(sol.residual) + " at t_s = " + std::to_string(t_s));
    }
    return sol;
}

GateResult conventional_output(const GateConfig &config, const GaussianState &input) {
    GateConfig plain = config;
    plain.filter.g_f = 1.0;
    GainSolution sol = unity_gain_solve(plain);
    GateJoint joint = gate_joint(plain, sol.t_s, input);
    const int d = joint.dims;
    Mat map(2, 2 + d);
    map << Mat::Identity(2, 2), sol.gains;
    GaussianState out(map * joint.mean, map * joint.cov * map.transpose());
    out = loss_channel(out, 0, plain.eta_verify);
    GaussianState target = target_state(input, plain.r_t);
    const Mat dmat = sol.outcome_scale.asDiagonal();
    return GateResult{
        out,
        target,
        fidelity(out, target),
        1.0,
        dmat * joint.mean.tail(d),
        dmat * joint.cov.bottomRightCorner(d, d) * dmat,
        1.0,
        sol,
    };
}

GateResult heralded_output(const GateConfig &config, const GaussianState &input) {
    return heralded_output(config, unity_gain_solve(config), input);
}

GateResult heralded_output(const GateConfig &config, const GainSolution &solution, const GaussianState &input) {
    config.validate();
    Propagation p = propagate(config, solution, input);
    const FilterSpec spec = config.effective_filter();
    double coverage = 1.0;
    double p_s = 1.0;
    if (!spec.is_identity()) {
        coverage = filter_outcome(spec, p.alpha_mean, p.alpha_cov).coverage;
        if (coverage < config.coverage_guard - 1e-12) {
            throw NumericalError(
                error_kind::kOperationalRegimeExceeded,
                "filtered coverage " + std::to_string(coverage) + " inside alpha_c = " + std::to_string(spec.alpha_c) +
                    " is below " + std::to_string(config.coverage_guard));
        }
        p_s = success_probability(spec, p.alpha_mean, p.alpha_cov);
        if (!(p_s > 0)) {
            throw NumericalError(
                error_kind::kProbabilityUnderflow, "success probability below double range at g_f = " +
                                                       std::to_string(spec.g_f) +
                                                       ", alpha_c = " + std::to_string(spec.alpha_c));
        }
    }
    GaussianState target = target_state(input, config.r_t);
    const double f = fidelity(p.output, target);
    return GateResult{p.output, target, f, p_s, p.alpha_mean, p.alpha_cov, coverage, solution};
}

double deterministic_limit(const AncillaSpec &ancilla, double r_t, double t_m) {
    GateConfig config;
    config.r_t = r_t;
    config.ancilla = ancilla;
    config.t_m = t_m;
    return conventional_output(config, vacuum(1)).fidelity;
}

double cutoff_for_rule(const GateConfig &config, const GainSolution &solution, const CutoffRule &rule) {
    JointBlocks j = split(gate_joint(config, solution.t_s, coherent(rule.input_alpha)));
    const Mat dmat = solution.outcome_scale.asDiagonal();
    return cutoff_for_coverage(config.filter.g_f, dmat * j.mu_o, dmat * j.s_oo * dmat, rule.coverage);
}

std::vector<TradeoffPoint> tradeoff_curve(
    const GateConfig &base, const std::vector<double> &g_grid, const CutoffRule &rule) {
    return parallel_map(g_grid.size(), [&](size_t i) {
        GateConfig config = base;
        config.filter.g_f = g_grid[i];
        GainSolution sol = unity_gain_solve(config);
        config.filter.alpha_c = cutoff_for_rule(config, sol, rule);
        GateResult r = heralded_output(config, sol, coherent(rule.input_alpha));
        return TradeoffPoint{g_grid[i], config.filter.alpha_c, r.success_probability, r.fidelity, sol.t_s, sol.gains};
    });
}

}  // namespace herald
