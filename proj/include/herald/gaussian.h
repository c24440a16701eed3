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

#ifndef HERALD_GAUSSIAN_H
#define HERALD_GAUSSIAN_H

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace herald {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Quadrature convention used throughout the library:
///
///     x = a + a^dagger,   y = -i (a - a^dagger),   vacuum variance 1.
///
/// Phase-space vectors are ordered (x1, y1, x2, y2, ...). A coherent state
/// |alpha> has mean (2 Re alpha, 2 Im alpha). In these units the heterodyne
/// kernel exp(-|alpha - alpha0|^2) over the complex outcome alpha has
/// variance 1/2 per real component, i.e. quadrature variance 2.
inline constexpr double kAlgebraicTol = 1e-10;
inline constexpr double kPhysicalityTol = 1e-9;

enum class Quadrature { kX, kY };

/// Mean vector and covariance matrix of an N-mode Gaussian state.
///
/// The covariance is symmetrized on construction. Physicality
/// (cov + i Omega >= 0) is not enforced here; call `is_physical`.
class GaussianState {
   public:
    GaussianState(Vec mean, Mat cov);

    int nmodes() const {
        return static_cast<int>(mean_.size() / 2);
    }
    const Vec &mean() const {
        return mean_;
    }
    const Mat &cov() const {
        return cov_;
    }

    /// Symplectic eigenvalues in ascending order.
    std::vector<double> symplectic_eigenvalues() const;
    bool is_physical(double tol = kPhysicalityTol) const;
    /// Purity 1/sqrt(det cov).
    double purity() const;

    /// Marginal state of a single mode.
    GaussianState mode(int k) const;

   private:
    Vec mean_;
    Mat cov_;
};

/// Affine phase-space map q -> matrix q + displacement.
struct SymplecticOp {
    Mat matrix;
    Vec displacement;

    static SymplecticOp identity(int nmodes);
    int nmodes() const {
        return static_cast<int>(matrix.rows() / 2);
    }
    /// `this` after `first`.
    SymplecticOp after(const SymplecticOp &first) const;
};

Mat symplectic_form(int nmodes);
bool is_symplectic(const Mat &m, double tol = kAlgebraicTol);

/// Squeezed vacuum resource. `v_sq` is the variance along `angle`, `v_asq`
/// the variance along the orthogonal axis (vacuum = 1).
struct AncillaSpec {
    double v_sq = 1.0;
    double v_asq = 1.0;
    double angle = 0.0;

    /// Squeezing and anti-squeezing quoted in dB below/above vacuum.
    static AncillaSpec from_db(double squeezing_db, double antisqueezing_db, double angle = 0.0);
    /// Pure squeezed vacuum with `squeezing_db` of squeezing.
    static AncillaSpec pure_db(double squeezing_db, double angle = 0.0);

    void validate() const;
    bool is_pure(double tol = 1e-9) const;
};

// dB conventions: s = -10 log10(V / V_vac), V = exp(-2 r).
double db_to_variance(double db);
double variance_to_db(double variance);
double db_to_r(double db);
double r_to_db(double r);

GaussianState vacuum(int nmodes);
GaussianState coherent(std::complex<double> alpha);
GaussianState squeezed_vacuum(const AncillaSpec &spec);
/// Product state a (x) b with a's modes first.
GaussianState tensor(const GaussianState &a, const GaussianState &b);

/// Beamsplitter of transmissivity t acting on modes (a, b):
///
///     out_a =  sqrt(t) a + sqrt(1-t) b
///     out_b = sqrt(1-t) a -  sqrt(t) b
///
/// out_a is the transmitted port of `a`, out_b the reflected port.
SymplecticOp beamsplitter(double t, int mode_a, int mode_b, int nmodes);
/// Single-mode squeezer; at angle 0 it scales x by exp(-r) and y by exp(+r).
SymplecticOp squeezer(double r, double angle, int mode, int nmodes);
/// Phase-space rotation by phi (alpha -> alpha e^{i phi}).
SymplecticOp rotation(double phi, int mode, int nmodes);

GaussianState apply(const GaussianState &state, const SymplecticOp &op);
/// Pure-loss channel of efficiency eta on one mode.
GaussianState loss_channel(const GaussianState &state, int mode, double eta);
GaussianState displace(const GaussianState &state, int mode, double dx, double dy);

struct HomodyneResult {
    GaussianState conditional;
    /// Pre-measurement marginal of the measured quadrature.
    double marginal_mean;
    double marginal_variance;
};

/// Homodyne detection of one quadrature of `mode` with the given outcome.
/// Returns the state of the remaining modes (the measured mode is removed).
HomodyneResult condition_on_homodyne(const GaussianState &state, int mode, Quadrature q, double outcome);

/// Heterodyne (balanced dual homodyne) detection of `mode`, i.e. projection
/// onto the coherent state |alpha>. Returns the state of the remaining modes.
GaussianState condition_on_heterodyne(const GaussianState &state, int mode, std::complex<double> alpha);

/// Generic Gaussian conditioning of the coordinates `measured` on the
/// observed values, with additional measurement-noise covariance `noise`.
struct ConditionalGaussian {
    Vec mean;
    Mat cov;
    Vec marginal_mean;
    Mat marginal_cov;
};
ConditionalGaussian condition_coordinates(
    const Vec &mean, const Mat &cov, const std::vector<int> &measured, const Vec &values, const Mat &noise);

/// Uhlmann fidelity (squared-overlap convention) of two single-mode states.
double fidelity(const GaussianState &a, const GaussianState &b);

}  // namespace herald

#endif
