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


#ifndef HERALD_GATE_H
#define HERALD_GATE_H

#include <optional>
#include <vector>

#include "herald/filter.h"
#include "herald/gaussian.h"

namespace herald {

/// How in-loop outcomes are converted to the filter's alpha-units.
enum class OutcomeUnits {
    /// alpha_i = o_i / sqrt(2 V_i), with V_i the outcome variance for a
    /// coherent input. Coherent inputs then see the unit heterodyne kernel and
    /// the filtered mean gain is exactly g_f.
    kCalibrated,
    /// alpha = o / 2, the vacuum-normalised heterodyne scale.
    kShotNoise,
};

/// Heralded squeezing gate.
///
/// Mode 0 carries the input, mode 1 the ancilla (squeezed along `ancilla.angle`).
/// They meet on a beamsplitter of transmissivity t_s; the transmitted port is
/// the output mode, the reflected port passes an in-loop loss `eta_inloop` and
/// is split by t_m between a y-homodyne (transmitted) and an x-homodyne
/// (reflected). For t_m = 1 only the y quadrature is measured. Outcomes are
/// normalised so that they carry the reflected field with unit coefficient.
struct GateConfig {
    double r_t = 0.0;
    AncillaSpec ancilla;
    /// Unset: chosen by `unity_gain_solve`.
    std::optional<double> t_s;
    double t_m = 1.0;
    /// `filter.dims` is ignored; the outcome dimension follows from t_m.
    FilterSpec filter;
    double eta_inloop = 1.0;
    double eta_verify = 1.0;
    OutcomeUnits units = OutcomeUnits::kCalibrated;
    /// Minimum filtered coverage inside alpha_c before the Gaussian
    /// description of the heralded output is refused.
    double coverage_guard = 0.98;
    /// Feedforward gains (2 x outcome_dims) replacing the unity-gain solution.
    std::optional<Mat> gain_override;

    void validate() const;
    int outcome_dims() const {
        return t_m == 1.0 ? 1 : 2;
    }
    FilterSpec effective_filter() const {
        return {filter.g_f, filter.alpha_c, outcome_dims()};
    }
};

struct GainSolution {
    double t_s;
    /// Feedforward gains, 2 x dims, acting on outcomes in quadrature units.
    Mat gains;
    /// alpha_i = outcome_scale_i * o_i.
    Vec outcome_scale;
    /// Filtered mean amplification of the outcome for coherent inputs.
    Mat gamma;
    /// Largest entry of the unity-gain constraint residual.
    double residual;
    bool overridden = false;
};

/// Joint Gaussian of (output-mode quadratures, in-loop outcomes) before the
/// filter, in quadrature units.
struct GateJoint {
    Vec mean;
    Mat cov;
    int dims;
};

struct GateResult {
    GaussianState output;
    GaussianState target;
    double fidelity;
    double success_probability;
    /// Outcome marginal in alpha-units.
    Vec outcome_mean;
    Mat outcome_cov;
    double coverage;
    GainSolution solution;
};

GaussianState target_state(const GaussianState &input, double r_t);

GateJoint gate_joint(const GateConfig &config, double t_s, const GaussianState &input);
/// Outcome scale (alpha per quadrature unit) for the given t_s.
Vec outcome_scale(const GateConfig &config, double t_s);

/// Unity-gain feedforward. For t_m = 1, t_s = exp(-2 r_t) and the gain on
/// the measured quadrature follows from the mean constraint. For t_m < 1 both
/// gains are solved for each t_s and t_s maximises the coherent-input fidelity.
/// An explicit `config.t_s` is honoured and checked for solvability.
GainSolution unity_gain_solve(const GateConfig &config);

/// Exact Gaussian propagation of the deterministic gate (g_f forced to 1).
GateResult conventional_output(const GateConfig &config, const GaussianState &input);

GateResult heralded_output(const GateConfig &config, const GaussianState &input);
GateResult heralded_output(const GateConfig &config, const GainSolution &solution, const GaussianState &input);

/// Ideal conventional-gate fidelity for a pure or mixed ancilla.
double deterministic_limit(const AncillaSpec &ancilla, double r_t, double t_m = 1.0);

struct CutoffRule {
    double coverage = 0.98;
    /// Coherent amplitude whose outcome distribution sets the cutoff.
    std::complex<double> input_alpha = 0.0;
};

struct TradeoffPoint {
    double g_f;
    double alpha_c;
    double success_probability;
    double fidelity;
    double t_s;
    Mat gains;
};

/// One heralded result per filter strength; each point picks alpha_c with
/// `cutoff_for_coverage` on the filtered outcome of the rule's input.
std::vector<TradeoffPoint> tradeoff_curve(
    const GateConfig &base, const std::vector<double> &g_grid, const CutoffRule &rule = {});

/// Cutoff meeting `rule` for the given config and strength.
double cutoff_for_rule(const GateConfig &config, const GainSolution &solution, const CutoffRule &rule);

}  // namespace herald

#endif
