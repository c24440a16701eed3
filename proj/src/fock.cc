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


#include "herald/fock.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "herald/errors.h"

namespace herald {

namespace {

using cd = std::complex<double>;

void check_dim(int dim) {
    if (dim < 1) {
        throw std::invalid_argument("Fock dimension must be >= 1");
    }
}

/// Truncates an extended amplitude vector to `dim`, checking the tail.
FockState truncate(const CVec &ext, int dim, const char *what) {
    const double total = ext.squaredNorm();
    const double tail = (ext.size() > dim) ? ext.tail(ext.size() - dim).squaredNorm() / total : 0.0;
    if (tail > kFockTailTol) {
        throw NumericalError(
            error_kind::kTruncationTailOverflow,
            std::string(what) + " has tail mass " + std::to_string(tail) + " above dimension " + std::to_string(dim));
    }
    FockState s;
    s.dim = dim;
    s.modes = 1;
    s.amplitudes = ext.head(dim) / ext.head(dim).norm();
    s.truncation_tail = tail;
    return s;
}

int extended_dim(int dim, double mean_photons) {
    return 2 * dim + 64 + static_cast<int>(4 * mean_photons);
}

CVec coherent_amplitudes(cd alpha, int n) {
    CVec c(n);
    c(0) = std::exp(-0.5 * std::norm(alpha));
    for (int k = 1; k < n; k++) {
        c(k) = c(k - 1) * alpha / std::sqrt(static_cast<double>(k));
    }
    return c;
}

/// Annihilation operator on `dim` levels.
Mat lowering(int dim) {
    Mat a = Mat::Zero(dim, dim);
    for (int n = 1; n < dim; n++) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

/// Two-mode beamsplitter on the block of N total photons, basis |j, N - j>.
Mat beamsplitter_block(double theta, int total) {
    Mat j = Mat::Zero(total + 1, total + 1);
    for (int k = 0; k <= total; k++) {
        if (k < total) {
            j(k + 1, k) = std::sqrt(static_cast<double>((k + 1) * (total - k)));
        }
        if (k > 0) {
            j(k - 1, k) = -std::sqrt(static_cast<double>(k * (total - k + 1)));
        }
    }
    Mat r = (theta * j).exp();
    for (int k = 0; k <= total; k++) {
        if ((total - k) % 2 == 1) {
            r.row(k) *= -1;
        }
    }
    return r;
}

struct OutcomeGrid {
    std::vector<double> radius;
    std::vector<double> radial_weight;
    std::vector<double> angle;
    double angular_weight;
};

template <int N>
void add_gauss_segment(OutcomeGrid &grid, double a, double b) {
    using rule = boost::math::quadrature::gauss<double, N>;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const auto &x = rule::abscissa();
    const auto &w = rule::weights();
    for (size_t i = 0; i < x.size(); i++) {
        for (double sign : {-1.0, 1.0}) {
            if (x[i] == 0 && sign > 0) {
                continue;
            }
            grid.radius.push_back(mid + sign * half * x[i]);
            grid.radial_weight.push_back(half * w[i]);
        }
    }
}

template <int N>
OutcomeGrid make_grid(double cutoff, double r_max, int angular) {
    OutcomeGrid g;
    add_gauss_segment<N>(g, 0, cutoff);
    add_gauss_segment<N>(g, cutoff, r_max);
    for (int k = 0; k < angular; k++) {
        g.angle.push_back(2 * std::numbers::pi * k / angular);
    }
    g.angular_weight = 2 * std::numbers::pi / angular;
    return g;
}

struct GateIntegral {
    CMat rho;
    double probability;
    double kept;
};

}  // namespace

CMat FockState::as_matrix() const {
    if (modes != 2) {
        throw std::invalid_argument("as_matrix needs a two-mode state");
    }
    CMat m(dim, dim);
    for (int i = 0; i < dim; i++) {
        for (int j = 0; j < dim; j++) {
            m(i, j) = amplitudes(i * dim + j);
        }
    }
    return m;
}

FockState fock_coherent(cd alpha, int dim) {
    check_dim(dim);
    return truncate(coherent_amplitudes(alpha, extended_dim(dim, std::norm(alpha))), dim, "coherent state");
}

FockState fock_single_photon(int dim) {
    if (dim < 2) {
        throw NumericalError(error_kind::kTruncationTailOverflow, "single photon needs dimension >= 2");
    }
    FockState s;
    s.dim = dim;
    s.amplitudes = CVec::Zero(dim);
    s.amplitudes(1) = 1;
    return s;
}

FockState fock_cat(cd alpha, int parity, int dim) {
    check_dim(dim);
    if (parity != 1 && parity != -1) {
        throw std::invalid_argument("cat parity must be +1 or -1");
    }
    if (parity == -1 && alpha == 0.0) {
        throw std::invalid_argument("odd cat needs alpha != 0");
    }
    const int ext = extended_dim(dim, std::norm(alpha));
    CVec c = coherent_amplitudes(alpha, ext) + static_cast<double>(parity) * coherent_amplitudes(-alpha, ext);
    return truncate(c, dim, "cat state");
}

FockState fock_squeezed_vacuum(double r, int dim, double angle) {
    check_dim(dim);
    if (!(r >= 0) || !std::isfinite(r)) {
        throw std::invalid_argument("squeezing r must be finite and >= 0");
    }
    const int ext = extended_dim(dim, std::sinh(r) * std::sinh(r)) * 2;
    CVec c = CVec::Zero(ext);
    const double t = -std::tanh(r);
    double amp = 1 / std::sqrt(std::cosh(r));
    for (int n = 0; 2 * n < ext; n++) {
        c(2 * n) = amp * std::polar(1.0, 2.0 * n * angle);
        amp *= t * std::sqrt(static_cast<double>((2 * n + 1) * (2 * n + 2))) / (2.0 * (n + 1));
    }
    return truncate(c, dim, "squeezed vacuum");
}

FockState fock_product(const FockState &a, const FockState &b) {
    if (a.modes != 1 || b.modes != 1 || a.dim != b.dim) {
        throw std::invalid_argument("fock_product needs two single-mode states of equal dimension");
    }
    FockState s;
    s.dim = a.dim;
    s.modes = 2;
    s.amplitudes.resize(a.dim * a.dim);
    for (int i = 0; i < a.dim; i++) {
        for (int j = 0; j < a.dim; j++) {
            s.amplitudes(i * a.dim + j) = a.amplitudes(i) * b.amplitudes(j);
        }
    }
    s.truncation_tail = a.truncation_tail + b.truncation_tail;
    return s;
}

FockState fock_beamsplitter(const FockState &state, double t) {
    if (state.modes != 2) {
        throw std::invalid_argument("beamsplitter needs a two-mode state");
    }
    if (!(t >= 0 && t <= 1)) {
        throw std::invalid_argument("transmissivity must lie in [0, 1]");
    }
    const int d = state.dim;
    const int out = 2 * d - 1;
    const double theta = std::acos(std::sqrt(t));
    FockState s;
    s.dim = out;
    s.modes = 2;
    s.amplitudes = CVec::Zero(out * out);
    s.truncation_tail = state.truncation_tail;
    for (int total = 0; total <= 2 * d - 2; total++) {
        const int lo = std::max(0, total - (d - 1));
        const int hi = std::min(total, d - 1);
        CVec in = CVec::Zero(total + 1);
        bool any = false;
        for (int j = lo; j <= hi; j++) {
            in(j) = state.amplitudes(j * d + (total - j));
            any = any || in(j) != 0.0;
        }
        if (!any) {
            continue;
        }
        const CVec res = beamsplitter_block(theta, total).cast<cd>() * in;
        for (int j = 0; j <= total; j++) {
            s.amplitudes(j * out + (total - j)) = res(j);
        }
    }
    return s;
}

CMat displacement_matrix(cd beta, int dim) {
    check_dim(dim);
    CMat d(dim, dim);
    const cd bc = std::conj(beta);
    d(0, 0) = std::exp(-0.5 * std::norm(beta));
    for (int m = 1; m < dim; m++) {
        d(m, 0) = beta / std::sqrt(static_cast<double>(m)) * d(m - 1, 0);
    }
    for (int n = 1; n < dim; n++) {
        const double sn = std::sqrt(static_cast<double>(n));
        d(0, n) = -bc * d(0, n - 1) / sn;
        for (int m = 1; m < dim; m++) {
            d(m, n) = (std::sqrt(static_cast<double>(m)) * d(m - 1, n - 1) - bc * d(m, n - 1)) / sn;
        }
    }
    return d;
}

FockState fock_squeeze(const FockState &state, double r, int out_dim) {
    if (state.modes != 1) {
        throw std::invalid_argument("fock_squeeze needs a single-mode state");
    }
    check_dim(out_dim);
    const int pad = std::max(state.dim, out_dim) + 80;
    const Mat a = lowering(pad);
    const Mat gen = 0.5 * r * (a * a - a.transpose() * a.transpose());
    CVec in = CVec::Zero(pad);
    in.head(state.dim) = state.amplitudes;
    const CVec out = gen.exp().cast<cd>() * in;
    FockState s = truncate(out, out_dim, "squeezed target");
    s.truncation_tail += state.truncation_tail;
    return s;
}

HeterodyneProjection heterodyne_project(const FockState &state, int mode, cd alpha) {
    if (state.modes != 2 || (mode != 0 && mode != 1)) {
        throw std::invalid_argument("heterodyne_project needs a two-mode state and mode 0 or 1");
    }
    const CMat m = state.as_matrix();
    const CVec v = coherent_amplitudes(std::conj(alpha), state.dim);
    const CVec phi = mode == 1 ? CVec(m * v) : CVec(m.transpose() * v);
    const double mass = phi.squaredNorm();
    FockState rest;
    rest.dim = state.dim;
    rest.amplitudes = mass > 0 ? CVec(phi / std::sqrt(mass)) : phi;
    return {rest, mass / std::numbers::pi};
}

void fock_moments(const CMat &rho, Vec &mean, Mat &cov) {
    const int dim = static_cast<int>(rho.rows());
    const CMat a = lowering(dim).cast<cd>();
    const cd ea = (rho * a).trace();
    const cd ea2 = (rho * a * a).trace();
    const double n = (rho * a.adjoint() * a).trace().real();
    mean.resize(2);
    mean << 2 * ea.real(), 2 * ea.imag();
    cov.resize(2, 2);
    cov(0, 0) = 2 * ea2.real() + 2 * n + 1 - mean(0) * mean(0);
    cov(1, 1) = -2 * ea2.real() + 2 * n + 1 - mean(1) * mean(1);
    cov(0, 1) = cov(1, 0) = 2 * ea2.imag() - mean(0) * mean(1);
}

namespace {

struct FockGatePlan {
    CMat psi;
    Vec scale;
    Mat gains;
    FilterSpec filter;
    double r_max;
};

template <int N>
GateIntegral integrate_gate(const FockGatePlan &plan, int angular) {
    const OutcomeGrid grid = make_grid<N>(plan.filter.alpha_c, plan.r_max, angular);
    const int dim = static_cast<int>(plan.psi.rows());
    const double jacobian = 1 / (4 * plan.scale(0) * plan.scale(1) * std::numbers::pi);
    GateIntegral out{CMat::Zero(dim, dim), 0, 0};
    for (size_t i = 0; i < grid.radius.size(); i++) {
        const double rad = grid.radius[i];
        for (double th : grid.angle) {
            const double ax = rad * std::cos(th);
            const double ay = rad * std::sin(th);
            const double w = grid.radial_weight[i] * grid.angular_weight * rad * jacobian *
                             acceptance_probability(plan.filter, cd(ax, ay));
            const double ox = ax / plan.scale(0);
            const double oy = ay / plan.scale(1);
            const CVec v = coherent_amplitudes(cd(ox, -oy) * 0.5, dim);
            const CVec phi = plan.psi * v;
            const cd beta(
                0.5 * (plan.gains(0, 0) * ox + plan.gains(0, 1) * oy),
                0.5 * (plan.gains(1, 0) * ox + plan.gains(1, 1) * oy));
            const CVec shifted = displacement_matrix(beta, dim) * phi;
            out.rho.noalias() += w * shifted * shifted.adjoint();
            out.probability += w * phi.squaredNorm();
            out.kept += w * shifted.squaredNorm();
        }
    }
    return out;
}

}  // namespace

FockGateResult heralded_gate_fock(const GateConfig &config, const FockState &input, const FockGateOptions &options) {
    config.validate();
    if (config.t_m != 0.5) {
        throw std::invalid_argument("the Fock engine supports only t_m = 0.5");
    }
    if (!config.ancilla.is_pure()) {
        throw std::invalid_argument("the Fock engine needs a pure ancilla");
    }
    if (config.eta_inloop != 1.0 || config.eta_verify != 1.0) {
        throw std::invalid_argument("the Fock engine supports only unit efficiencies");
    }
    if (input.modes != 1) {
        throw std::invalid_argument("Fock gate input must be a single mode");
    }
    if (options.angular_nodes < 8) {
        throw std::invalid_argument("angular_nodes must be >= 8");
    }

    GainSolution sol = unity_gain_solve(config);
    const double r_a = -0.5 * std::log(config.ancilla.v_sq);
    const FockState ancilla = fock_squeezed_vacuum(r_a, input.dim, config.ancilla.angle);
    const FockState joint = fock_beamsplitter(fock_product(input, ancilla), sol.t_s);

    Vec in_mean;
    Mat in_cov;
    fock_moments(input.amplitudes * input.amplitudes.adjoint(), in_mean, in_cov);
    const Vec outcome_mean = gate_joint(config, sol.t_s, GaussianState(in_mean, Mat::Identity(2, 2))).mean.tail(2);
    const double reach = sol.outcome_scale.cwiseProduct(outcome_mean).norm();

    FockGatePlan plan{
        joint.as_matrix(),
        sol.outcome_scale,
        sol.gains,
        config.effective_filter(),
        std::max(config.filter.alpha_c, reach) + options.radius_margin,
    };
    GateIntegral fine = integrate_gate<40>(plan, options.angular_nodes);
    if (!(fine.probability > 0)) {
        throw NumericalError(error_kind::kProbabilityUnderflow, "heralded probability vanished on the outcome grid");
    }
    const double lost = (fine.probability - fine.kept) / fine.probability;
    if (lost > kFockTailTol) {
        throw NumericalError(
            error_kind::kTruncationTailOverflow,
            "displaced output loses " + std::to_string(lost) + " of its mass at dimension " + std::to_string(joint.dim));
    }

    FockGateResult res;
    res.solution = sol;
    res.success_probability = fine.probability;
    res.rho = fine.rho / fine.rho.trace().real();
    const FockState target = fock_squeeze(input, config.r_t, joint.dim);
    res.fidelity = std::clamp((target.amplitudes.adjoint() * res.rho * target.amplitudes)(0, 0).real(), 0.0, 1.0);
    res.convergence_delta = 0;
    if (options.check_convergence) {
        GateIntegral coarse = integrate_gate<20>(plan, options.angular_nodes / 2);
        const CMat rho_c = coarse.rho / coarse.rho.trace().real();
        const double f_c = (target.amplitudes.adjoint() * rho_c * target.amplitudes)(0, 0).real();
        res.convergence_delta = std::max(
            std::abs(f_c - res.fidelity), std::abs(coarse.probability - fine.probability) / fine.probability);
        if (res.convergence_delta > options.convergence_tol) {
            throw NumericalError(
                error_kind::kQuadratureNonConvergence,
                "outcome grid refinement changed the result by " + std::to_string(res.convergence_delta));
        }
    }
    return res;
}

}  // namespace herald
