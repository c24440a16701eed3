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


#ifndef HERALD_FOCK_H
#define HERALD_FOCK_H

#include <complex>

#include <Eigen/Dense>

#include "herald/gate.h"

namespace herald {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Truncated photon-number state of one or two modes. Two-mode amplitudes
/// are stored with index n0 * dim + n1.
struct FockState {
    int dim = 1;
    int modes = 1;
    CVec amplitudes;
    /// Probability mass discarded by the truncation at construction.
    double truncation_tail = 0;

    double norm() const {
        return amplitudes.norm();
    }
    /// Two-mode amplitudes as a dim x dim matrix (row = mode 0).
    CMat as_matrix() const;
};

/// Largest truncation tail accepted by the constructors.
inline constexpr double kFockTailTol = 1e-6;

FockState fock_coherent(std::complex<double> alpha, int dim);
FockState fock_single_photon(int dim);
/// Normalised |alpha> + parity |-alpha>, parity = +1 (even) or -1 (odd).
FockState fock_cat(std::complex<double> alpha, int parity, int dim);
/// Squeezed vacuum with variance exp(-2r) along `angle`.
FockState fock_squeezed_vacuum(double r, int dim, double angle = 0.0);
FockState fock_product(const FockState &a, const FockState &b);

/// Beamsplitter with the gaussian-core convention
///
///     a -> sqrt(t) a + sqrt(1-t) b,   b -> sqrt(1-t) a - sqrt(t) b.
///
/// The result has dimension 2 dim - 1 per mode so that every photon-number
/// block is kept whole.
FockState fock_beamsplitter(const FockState &state, double t);

/// <m|D(beta)|n> for m, n < dim.
CMat displacement_matrix(std::complex<double> beta, int dim);

/// S(r) = exp(r (a^2 - a^dagger^2) / 2) applied to a single-mode state,
/// computed on a padded space and returned at `out_dim`.
FockState fock_squeeze(const FockState &state, double r, int out_dim);

struct HeterodyneProjection {
    /// Normalised conditional state of the other mode.
    FockState remaining;
    /// Q-distribution density of the outcome alpha.
    double density;
};

/// Projection of `mode` onto the coherent state |alpha> with POVM
/// normalisation 1/pi.
HeterodyneProjection heterodyne_project(const FockState &state, int mode, std::complex<double> alpha);

/// Quadrature means and covariance of a single-mode density matrix.
void fock_moments(const CMat &rho, Vec &mean, Mat &cov);

struct FockGateOptions {
    /// Trapezoid nodes in angle; radial segments use 40-point Gauss-Legendre.
    int angular_nodes = 64;
    /// Outcome radius covered beyond max(alpha_c, |outcome mean|).
    double radius_margin = 12.0;
    /// Re-run on a grid with half the nodes and compare.
    bool check_convergence = true;
    double convergence_tol = 1e-6;
};

struct FockGateResult {
    /// Normalised output density matrix, dimension 2 dim - 1.
    CMat rho;
    double success_probability;
    double fidelity;
    /// Largest change in fidelity or relative success probability between
    /// the coarse and fine outcome grids.
    double convergence_delta;
    GainSolution solution;
};

/// Heralded gate on a Fock-space input. Supports the dual-homodyne topology
/// (t_m = 1/2) with a pure ancilla and unit efficiencies; gains, t_s and the
/// outcome scale come from `unity_gain_solve`.
FockGateResult heralded_gate_fock(const GateConfig &config, const FockState &input, const FockGateOptions &options = {});

}  // namespace herald

#endif
