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


#include "herald/gaussian.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "herald/errors.h"

namespace herald {

namespace {

void check_mode(int mode, int nmodes) {
    if (mode < 0 || mode >= nmodes) {
        throw std::out_of_range("mode " + std::to_string(mode) + " out of range for " + std::to_string(nmodes) + " modes");
    }
}

Mat rotation_block(double phi) {
    Mat r(2, 2);
    r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    return r;
}

std::vector<int> remaining_coordinates(int nmodes, int removed_mode) {
    std::vector<int> out;
    for (int k = 0; k < nmodes; k++) {
        if (k != removed_mode) {
            out.push_back(2 * k);
            out.push_back(2 * k + 1);
        }
    }
    return out;
}

}  // namespace

GaussianState::GaussianState(Vec mean, Mat cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
    if (mean_.size() == 0 || mean_.size() % 2 != 0) {
        throw std::invalid_argument("Gaussian state needs a non-empty mean of even length");
    }
    if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
        throw std::invalid_argument("covariance shape does not match mean");
    }
    if (!mean_.allFinite() || !cov_.allFinite()) {
        throw std::invalid_argument("Gaussian state has non-finite entries");
    }
    cov_ = (0.5 * (cov_ + cov_.transpose())).eval();
}

std::vector<double> GaussianState::symplectic_eigenvalues() const {
    const int n = nmodes();
    Eigen::EigenSolver<Mat> solver(symplectic_form(n) * cov_, false);
    std::vector<double> mags;
    for (int k = 0; k < 2 * n; k++) {
        mags.push_back(std::abs(solver.eigenvalues()[k].imag()));
    }
    std::sort(mags.begin(), mags.end());
    std::vector<double> out;
    for (int k = 0; k < n; k++) {
        out.push_back(0.5 * (mags[2 * k] + mags[2 * k + 1]));
    }
    return out;
}

bool GaussianState::is_physical(double tol) const {
    const int n = nmodes();
    Eigen::MatrixXcd m = cov_.cast<std::complex<double>>();
    m += std::complex<double>(0, 1) * symplectic_form(n).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff() >= -tol;
}

double GaussianState::purity() const {
    return 1.0 / std::sqrt(cov_.determinant());
}

GaussianState GaussianState::mode(int k) const {
    check_mode(k, nmodes());
    return GaussianState(mean_.segment(2 * k, 2), cov_.block(2 * k, 2 * k, 2, 2));
}

SymplecticOp SymplecticOp::identity(int nmodes) {
    return {Mat::Identity(2 * nmodes, 2 * nmodes), Vec::Zero(2 * nmodes)};
}

SymplecticOp SymplecticOp::after(const SymplecticOp &first) const {
    if (first.matrix.rows() != matrix.rows()) {
        throw std::invalid_argument("composing operations on different mode counts");
    }
    return {matrix * first.matrix, matrix * first.displacement + displacement};
}

Mat symplectic_form(int nmodes) {
    Mat omega = Mat::Zero(2 * nmodes, 2 * nmodes);
    for (int k = 0; k < nmodes; k++) {
        omega(2 * k, 2 * k + 1) = 1;
        omega(2 * k + 1, 2 * k) = -1;
    }
    return omega;
}

bool is_symplectic(const Mat &m, double tol) {
    if (m.rows() != m.cols() || m.rows() % 2 != 0) {
        return false;
    }
    Mat omega = symplectic_form(static_cast<int>(m.rows() / 2));
    return (m * omega * m.transpose() - omega).cwiseAbs().maxCoeff() <= tol;
}

AncillaSpec AncillaSpec::from_db(double squeezing_db, double antisqueezing_db, double angle) {
    AncillaSpec spec{db_to_variance(squeezing_db), db_to_variance(-antisqueezing_db), angle};
    spec.validate();
    return spec;
}

AncillaSpec AncillaSpec::pure_db(double squeezing_db, double angle) {
    double v = db_to_variance(squeezing_db);
    AncillaSpec spec{v, 1.0 / v, angle};
    spec.validate();
    return spec;
}

void AncillaSpec::validate() const {
    if (!(v_sq > 0) || !std::isfinite(v_asq) || !std::isfinite(angle)) {
        throw std::invalid_argument("ancilla variances must be positive and finite");
    }
    if (v_sq > 1 + 1e-12 || v_asq < 1 - 1e-12) {
        throw std::invalid_argument("ancilla must satisfy v_sq <= 1 <= v_asq");
    }
    if (v_sq * v_asq < 1 - 1e-12) {
        throw std::invalid_argument("ancilla violates the uncertainty relation v_sq * v_asq >= 1");
    }
}

bool AncillaSpec::is_pure(double tol) const {
    return std::abs(v_sq * v_asq - 1) <= tol;
}

double db_to_variance(double db) {
    return std::pow(10.0, -db / 10.0);
}

double variance_to_db(double variance) {
    if (!(variance > 0)) {
        throw std::invalid_argument("variance must be positive");
    }
    return -10.0 * std::log10(variance);
}

double db_to_r(double db) {
    return db / 20.0 * std::log(10.0);
}

double r_to_db(double r) {
    return 20.0 * r / std::log(10.0);
}

GaussianState vacuum(int nmodes) {
    if (nmodes < 1) {
        throw std::invalid_argument("vacuum needs at least one mode");
    }
    return GaussianState(Vec::Zero(2 * nmodes), Mat::Identity(2 * nmodes, 2 * nmodes));
}

GaussianState coherent(std::complex<double> alpha) {
    Vec mean(2);
    mean << 2 * alpha.real(), 2 * alpha.imag();
    return GaussianState(mean, Mat::Identity(2, 2));
}

GaussianState squeezed_vacuum(const AncillaSpec &spec) {
    spec.validate();
    Mat r = rotation_block(spec.angle);
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = spec.v_sq;
    d(1, 1) = spec.v_asq;
    return GaussianState(Vec::Zero(2), r * d * r.transpose());
}

GaussianState tensor(const GaussianState &a, const GaussianState &b) {
    const auto na = a.mean().size();
    const auto nb = b.mean().size();
    Vec mean(na + nb);
    mean << a.mean(), b.mean();
    Mat cov = Mat::Zero(na + nb, na + nb);
    cov.topLeftCorner(na, na) = a.cov();
    cov.bottomRightCorner(nb, nb) = b.cov();
    return GaussianState(mean, cov);
}

SymplecticOp beamsplitter(double t, int mode_a, int mode_b, int nmodes) {
    if (!(t >= 0 && t <= 1)) {
        throw std::invalid_argument("beamsplitter transmissivity must lie in [0, 1]");
    }
    check_mode(mode_a, nmodes);
    check_mode(mode_b, nmodes);
    if (mode_a == mode_b) {
        throw std::invalid_argument("beamsplitter needs two distinct modes");
    }
    SymplecticOp op = SymplecticOp::identity(nmodes);
    const double st = std::sqrt(t);
    const double sr = std::sqrt(1 - t);
    for (int q = 0; q < 2; q++) {
        int ia = 2 * mode_a + q;
        int ib = 2 * mode_b + q;
        op.matrix(ia, ia) = st;
        op.matrix(ia, ib) = sr;
        op.matrix(ib, ia) = sr;
        op.matrix(ib, ib) = -st;
    }
    return op;
}

SymplecticOp squeezer(double r, double angle, int mode, int nmodes) {
    if (!std::isfinite(r) || !std::isfinite(angle)) {
        throw std::invalid_argument("squeezing parameter must be finite");
    }
    check_mode(mode, nmodes);
    Mat rot = rotation_block(angle);
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = std::exp(-r);
    d(1, 1) = std::exp(r);
    SymplecticOp op = SymplecticOp::identity(nmodes);
    op.matrix.block(2 * mode, 2 * mode, 2, 2) = rot * d * rot.transpose();
    return op;
}

SymplecticOp rotation(double phi, int mode, int nmodes) {
    check_mode(mode, nmodes);
    SymplecticOp op = SymplecticOp::identity(nmodes);
    op.matrix.block(2 * mode, 2 * mode, 2, 2) = rotation_block(phi);
    return op;
}

GaussianState apply(const GaussianState &state, const SymplecticOp &op) {
    if (op.matrix.rows() != state.mean().size()) {
        throw std::invalid_argument("operation and state have different mode counts");
    }
    return GaussianState(op.matrix * state.mean() + op.displacement, op.matrix * state.cov() * op.matrix.transpose());
}

GaussianState loss_channel(const GaussianState &state, int mode, double eta) {
    if (!(eta > 0 && eta <= 1)) {
        throw std::invalid_argument("efficiency must lie in (0, 1]");
    }
    check_mode(mode, state.nmodes());
    const double s = std::sqrt(eta);
    Vec mean = state.mean();
    Mat cov = state.cov();
    mean.segment(2 * mode, 2) *= s;
    cov.middleRows(2 * mode, 2) *= s;
    cov.middleCols(2 * mode, 2) *= s;
    cov.block(2 * mode, 2 * mode, 2, 2) += (1 - eta) * Mat::Identity(2, 2);
    return GaussianState(mean, cov);
}

GaussianState displace(const GaussianState &state, int mode, double dx, double dy) {
    check_mode(mode, state.nmodes());
    Vec mean = state.mean();
    mean(2 * mode) += dx;
    mean(2 * mode + 1) += dy;
    return GaussianState(mean, state.cov());
}

ConditionalGaussian condition_coordinates(
    const Vec &mean, const Mat &cov, const std::vector<int> &measured, const Vec &values, const Mat &noise) {
    const int n = static_cast<int>(mean.size());
    const int m = static_cast<int>(measured.size());
    if (values.size() != m || noise.rows() != m || noise.cols() != m) {
        throw std::invalid_argument("measurement shapes do not match");
    }
    std::vector<bool> is_measured(n, false);
    for (int idx : measured) {
        if (idx < 0 || idx >= n || is_measured[idx]) {
            throw std::invalid_argument("bad measured coordinate list");
        }
        is_measured[idx] = true;
    }
    std::vector<int> rest;
    for (int k = 0; k < n; k++) {
        if (!is_measured[k]) {
            rest.push_back(k);
        }
    }
    const int r = static_cast<int>(rest.size());
    Vec mu_r(r), mu_m(m);
    Mat a(r, r), b(r, m), c(m, m);
    for (int i = 0; i < r; i++) {
        mu_r(i) = mean(rest[i]);
        for (int j = 0; j < r; j++) {
            a(i, j) = cov(rest[i], rest[j]);
        }
        for (int j = 0; j < m; j++) {
            b(i, j) = cov(rest[i], measured[j]);
        }
    }
    for (int i = 0; i < m; i++) {
        mu_m(i) = mean(measured[i]);
        for (int j = 0; j < m; j++) {
            c(i, j) = cov(measured[i], measured[j]);
        }
    }
    Mat c_noisy = c + noise;
    Eigen::LLT<Mat> llt(c_noisy);
    if (llt.info() != Eigen::Success || llt.matrixLLT().diagonal().minCoeff() <= 1e-150) {
        throw NumericalError(error_kind::kDegenerateMarginal, "measured marginal covariance is not positive definite");
    }
    Mat gain = llt.solve(b.transpose()).transpose();
    ConditionalGaussian out;
    out.mean = mu_r + gain * (values - mu_m);
    out.cov = a - gain * b.transpose();
    out.marginal_mean = mu_m;
    out.marginal_cov = c_noisy;
    return out;
}

HomodyneResult condition_on_homodyne(const GaussianState &state, int mode, Quadrature q, double outcome) {
    const int n = state.nmodes();
    check_mode(mode, n);
    if (n < 2) {
        throw std::invalid_argument("homodyne conditioning needs at least one unmeasured mode");
    }
    const int idx = 2 * mode + (q == Quadrature::kY ? 1 : 0);
    Vec value(1);
    value << outcome;
    // Condition on the measured quadrature, then drop its partner.
    std::vector<int> measured{idx};
    ConditionalGaussian cond = condition_coordinates(state.mean(), state.cov(), measured, value, Mat::Zero(1, 1));
    std::vector<int> keep_all;
    for (int k = 0; k < 2 * n; k++) {
        if (k != idx) {
            keep_all.push_back(k);
        }
    }
    std::vector<int> keep = remaining_coordinates(n, mode);
    Vec mean(keep.size());
    Mat cov(keep.size(), keep.size());
    for (size_t i = 0; i < keep.size(); i++) {
        auto pi = std::find(keep_all.begin(), keep_all.end(), keep[i]) - keep_all.begin();
        mean(i) = cond.mean(pi);
        for (size_t j = 0; j < keep.size(); j++) {
            auto pj = std::find(keep_all.begin(), keep_all.end(), keep[j]) - keep_all.begin();
            cov(i, j) = cond.cov(pi, pj);
        }
    }
    return {GaussianState(mean, cov), cond.marginal_mean(0), cond.marginal_cov(0, 0)};
}

GaussianState condition_on_heterodyne(const GaussianState &state, int mode, std::complex<double> alpha) {
    const int n = state.nmodes();
    check_mode(mode, n);
    if (n < 2) {
        throw std::invalid_argument("heterodyne conditioning needs at least one unmeasured mode");
    }
    Vec values(2);
    values << 2 * alpha.real(), 2 * alpha.imag();
    ConditionalGaussian cond =
        condition_coordinates(state.mean(), state.cov(), {2 * mode, 2 * mode + 1}, values, Mat::Identity(2, 2));
    return GaussianState(cond.mean, cond.cov);
}

double fidelity(const GaussianState &a, const GaussianState &b) {
    if (a.nmodes() != 1 || b.nmodes() != 1) {
        throw std::invalid_argument("fidelity is implemented for single-mode states only");
    }
    Mat sum = a.cov() + b.cov();
    Vec d = a.mean() - b.mean();
    const double big_delta = sum.determinant();
    // Pure states have det = 1 only up to rounding; sqrt(small_delta) would
    // turn that rounding into a 1e-8 error.
    auto excess = [](const Mat &cov) {
        const double e = cov.determinant() - 1;
        return std::abs(e) < 1e-12 ? 0.0 : e;
    };
    const double small_delta = std::max(0.0, excess(a.cov()) * excess(b.cov()));
    const double exponent = -0.5 * d.dot(sum.ldlt().solve(d));
    // 2 / (sqrt(D + d) - sqrt(d)), rationalised against cancellation for mixed pairs.
    const double f = 2.0 * (std::sqrt(big_delta + small_delta) + std::sqrt(small_delta)) / big_delta * std::exp(exponent);
    return std::clamp(f, 0.0, 1.0);
}

}  // namespace herald
