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


#ifndef HERALD_FILTER_H
#define HERALD_FILTER_H

#include <complex>

#include "herald/gaussian.h"

namespace herald {

/// Heralding filter: an outcome alpha is accepted with probability
///
///     P_f(alpha) = exp[(1 - 1/g_f)(|alpha|^2 - alpha_c^2)]   for |alpha| < alpha_c,
///     P_f(alpha) = 1                                       otherwise.
///
/// Outcomes are expressed in alpha-units, where a coherent state measured by
/// heterodyne produces the kernel exp(-|alpha - alpha0|^2). For `dims == 1`
/// the law is restricted to the real axis.
struct FilterSpec {
    double g_f = 1.0;
    double alpha_c = 1.0;
    int dims = 2;

    void validate() const;
    /// Exponent coefficient 1 - 1/g_f.
    double lambda() const {
        return 1.0 - 1.0 / g_f;
    }
    bool is_identity() const {
        return g_f == 1.0;
    }
};

double acceptance_probability(const FilterSpec &spec, std::complex<double> alpha);
double acceptance_probability(const FilterSpec &spec, double alpha);

/// Shot-noise adapter from quadrature units (vacuum variance 1) to alpha-units.
inline double alpha_from_quadrature(double x) {
    return 0.5 * x;
}
inline std::complex<double> alpha_from_quadratures(double x, double y) {
    return {0.5 * x, 0.5 * y};
}

/// Result of multiplying an isotropic Gaussian outcome density by P_f.
///
/// Inside the cutoff the product is `weight` times the normalised Gaussian
/// N(mean, variance); `coverage` is that Gaussian's mass inside the cutoff.
/// For the unit kernel (variance 1/2) mean and variance are both scaled by g_f.
struct FilteredGaussian {
    std::complex<double> mean;
    double variance;
    double weight;
    double log_weight;
    double coverage;
};

/// Throws NumericalError(gain-variance breakdown) when 2 lambda V >= 1.
FilteredGaussian filtered_gaussian(const FilterSpec &spec, std::complex<double> mean, double variance);
double success_probability(const FilterSpec &spec, std::complex<double> mean, double variance);
double coverage_fraction(const FilterSpec &spec, std::complex<double> mean, double variance);

/// alpha_c = g_f^2 |alpha_m| + beta g_f sigma / sqrt(2).
double recommended_cutoff(double g_f, double outcome_magnitude, double sigma, double beta);
/// beta for which `recommended_cutoff` reaches `target` filtered coverage.
double beta_for_coverage(double g_f, std::complex<double> mean, double variance, int dims, double target = 0.98);

// Matrix forms for correlated or anisotropic outcome Gaussians (dims x dims).

struct FilteredOutcome {
    Vec mean;
    Mat cov;
    /// Linear map taking the prior mean to the filtered mean.
    Mat mean_gain;
    double log_weight;
    double coverage;
};

FilteredOutcome filter_outcome(const FilterSpec &spec, const Vec &mean, const Mat &cov);
double success_probability(const FilterSpec &spec, const Vec &mean, const Mat &cov);
double coverage_fraction(const FilterSpec &spec, const Vec &mean, const Mat &cov);
/// Smallest cutoff whose filtered coverage is at least `target`.
double cutoff_for_coverage(double g_f, const Vec &mean, const Mat &cov, double target = 0.98);

struct DiskMass {
    double inside;
    double outside;
};

/// Mass of N(mean, cov) inside and outside the disk |alpha| < radius (an
/// interval in one dimension). Both parts are computed directly so that tiny
/// tails keep their relative accuracy.
DiskMass gaussian_disk_mass(const Vec &mean, const Mat &cov, double radius);

/// exp(-z) I_0(z) for z >= 0.
double bessel_i0_scaled(double z);

}  // namespace herald

#endif
