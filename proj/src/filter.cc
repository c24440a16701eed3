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


#include "herald/filter.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/trapezoidal.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "herald/errors.h"

namespace herald {

namespace {

constexpr double kQuadratureRelTol = 1e-8;
constexpr double kTinyMass = 1e-300;

Vec as_vec(std::complex<double> mean, int dims) {
    Vec v(dims);
    v(0) = mean.real();
    if (dims == 2) {
        v(1) = mean.imag();
    }
    return v;
}

void check_scalar_args(const FilterSpec &spec, std::complex<double> mean, double variance) {
    spec.validate();
    if (!(variance > 0) || !std::isfinite(variance)) {
        throw std::invalid_argument("outcome variance must be positive and finite");
    }
    if (spec.dims == 1 && mean.imag() != 0) {
        throw std::invalid_argument("one-dimensional filter needs a real outcome mean");
    }
}

/// Adaptive Gauss-Kronrod over consecutive breakpoints; throws when the
/// accumulated error estimate exceeds the relative target.
template <typename F>
double integrate_pieces(const F &f, std::vector<double> points) {
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    double total = 0;
    double error = 0;
    for (size_t k = 0; k + 1 < points.size(); k++) {
        double err = 0;
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            f, points[k], points[k + 1], 18, 1e-13, &err);
        error += err;
    }
    if (!(error <= kQuadratureRelTol * std::abs(total) + kTinyMass)) {
        throw NumericalError(
            error_kind::kQuadratureNonConvergence,
            "disk integral error estimate " + std::to_string(error) + " for value " + std::to_string(total));
    }
    return total;
}

std::vector<double> radial_breakpoints(double lo, double hi, double center, double sigma) {
    std::vector<double> pts{lo, hi};
    for (double k : {-12.0, -6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0, 12.0}) {
        double p = center + k * sigma;
        if (p > lo && p < hi) {
            pts.push_back(p);
        }
    }
    return pts;
}

DiskMass interval_mass(double mu, double variance, double radius) {
    const double m = std::abs(mu);
    const double s = std::sqrt(2 * variance);
    const double u = (radius - m) / s;
    const double w = (radius + m) / s;
    DiskMass out;
    out.outside = 0.5 * std::erfc(u) + 0.5 * std::erfc(w);
    if (u > 0) {
        out.inside = 0.5 * (std::erf(u) + std::erf(w));
    } else {
        out.inside = 0.5 * (std::erfc(-u) - std::erfc(w));
    }
    return out;
}

DiskMass isotropic_disk_mass(double rho, double variance, double radius) {
    const double sigma = std::sqrt(variance);
    auto density = [&](double r) {
        if (r <= 0) {
            return 0.0;
        }
        const double d = r - rho;
        return r / variance * std::exp(-d * d / (2 * variance)) * bessel_i0_scaled(r * rho / variance);
    };
    const double hi = std::max(radius, rho) + 40 * sigma;
    DiskMass out;
    out.inside = radius > 0 ? integrate_pieces(density, radial_breakpoints(0, radius, rho, sigma)) : 0.0;
    out.outside = integrate_pieces(density, radial_breakpoints(radius, hi, rho, sigma));
    return out;
}

DiskMass anisotropic_disk_mass(const Vec &mean, const Mat &cov, double radius) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
    const Vec var = eig.eigenvalues();
    if (var.minCoeff() <= 0) {
        throw NumericalError(error_kind::kDegenerateMarginal, "outcome covariance is not positive definite");
    }
    // The disk is rotation invariant, so work in the covariance eigenbasis.
    const Vec m = eig.eigenvectors().transpose() * mean;
    const double norm = 1.0 / (2 * std::numbers::pi * std::sqrt(var(0) * var(1)));
    auto ring = [&](double r) {
        if (r <= 0) {
            return 0.0;
        }
        auto f = [&](double theta) {
            const double dx = r * std::cos(theta) - m(0);
            const double dy = r * std::sin(theta) - m(1);
            return std::exp(-0.5 * (dx * dx / var(0) + dy * dy / var(1)));
        };
        return r * norm * boost::math::quadrature::trapezoidal(f, 0.0, 2 * std::numbers::pi, 1e-13, 16);
    };
    const double rho = m.norm();
    const double sigma_max = std::sqrt(var.maxCoeff());
    const double sigma_min = std::sqrt(var.minCoeff());
    const double hi = std::max(radius, rho) + 40 * sigma_max;
    std::vector<double> inner = radial_breakpoints(0, radius, rho, sigma_min);
    std::vector<double> outer = radial_breakpoints(radius, hi, rho, sigma_min);
    for (double k : {1.0, 3.0, 6.0, 12.0}) {
        for (double p : {rho - k * sigma_max, rho + k * sigma_max}) {
            if (p > 0 && p < radius) {
                inner.push_back(p);
            } else if (p > radius && p < hi) {
                outer.push_back(p);
            }
        }
    }
    DiskMass out;
    out.inside = radius > 0 ? integrate_pieces(ring, inner) : 0.0;
    out.outside = integrate_pieces(ring, outer);
    return out;
}

/// Integral of N(mean, cov) times the filter weight over the disk, evaluated
/// directly. Used when the filtered ensemble is not Gaussian.
double direct_inside_mass(const FilterSpec &spec, const Vec &mean, const Mat &cov) {
    const double c = spec.alpha_c;
    const double lambda = spec.lambda();
    auto weight = [&](double r) { return std::exp(lambda * (r * r - c * c)); };
    if (spec.dims == 1) {
        const double v = cov(0, 0);
        const double mu = mean(0);
        std::vector<double> pts = radial_breakpoints(-c, c, mu, std::sqrt(v));
        auto f = [&](double x) {
            return std::exp(-(x - mu) * (x - mu) / (2 * v)) / std::sqrt(2 * std::numbers::pi * v) * weight(x);
        };
        return integrate_pieces(f, pts);
    }
    Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
    const Vec var = eig.eigenvalues();
    const Vec m = eig.eigenvectors().transpose() * mean;
    const double norm = 1.0 / (2 * std::numbers::pi * std::sqrt(var(0) * var(1)));
    auto ring = [&](double r) {
        if (r <= 0) {
            return 0.0;
        }
        auto f = [&](double theta) {
            const double dx = r * std::cos(theta) - m(0);
            const double dy = r * std::sin(theta) - m(1);
            return std::exp(-0.5 * (dx * dx / var(0) + dy * dy / var(1)));
        };
        return r * norm * weight(r) * boost::math::quadrature::trapezoidal(f, 0.0, 2 * std::numbers::pi, 1e-13, 16);
    };
    return integrate_pieces(ring, radial_breakpoints(0, c, m.norm(), std::sqrt(var.minCoeff())));
}

void check_outcome_shapes(const FilterSpec &spec, const Vec &mean, const Mat &cov) {
    spec.validate();
    if (mean.size() != spec.dims || cov.rows() != spec.dims || cov.cols() != spec.dims) {
        throw std::invalid_argument("outcome mean/covariance do not match filter dimension");
    }
}

}  // namespace

void FilterSpec::validate() const {
    if (!(g_f >= 1) || !std::isfinite(g_f)) {
        throw std::invalid_argument("filter strength g_f must be finite and >= 1");
    }
    if (!(alpha_c > 0) || !std::isfinite(alpha_c)) {
        throw std::invalid_argument("filter cutoff alpha_c must be finite and > 0");
    }
    if (dims != 1 && dims != 2) {
        throw std::invalid_argument("filter dims must be 1 or 2");
    }
}

double acceptance_probability(const FilterSpec &spec, std::complex<double> alpha) {
    spec.validate();
    const double mag2 = std::norm(alpha);
    const double c2 = spec.alpha_c * spec.alpha_c;
    if (mag2 >= c2) {
        return 1.0;
    }
    return std::exp(spec.lambda() * (mag2 - c2));
}

double acceptance_probability(const FilterSpec &spec, double alpha) {
    return acceptance_probability(spec, std::complex<double>(alpha, 0.0));
}

double bessel_i0_scaled(double z) {
    if (z < 0) {
        throw std::invalid_argument("bessel_i0_scaled needs z >= 0");
    }
    if (z < 500) {
        return boost::math::cyl_bessel_i(0, z) * std::exp(-z);
    }
    // Hankel asymptotic series; the fourth term is below 1e-11 here.
    const double inv = 1.0 / (8 * z);
    const double series = 1 + inv + 4.5 * inv * inv + 37.5 * inv * inv * inv + 459.375 * inv * inv * inv * inv;
    return series / std::sqrt(2 * std::numbers::pi * z);
}

DiskMass gaussian_disk_mass(const Vec &mean, const Mat &cov, double radius) {
    if (radius < 0) {
        throw std::invalid_argument("disk radius must be non-negative");
    }
    if (mean.size() == 1) {
        if (!(cov(0, 0) > 0)) {
            throw NumericalError(error_kind::kDegenerateMarginal, "outcome variance is not positive");
        }
        return interval_mass(mean(0), cov(0, 0), radius);
    }
    if (mean.size() != 2 || cov.rows() != 2 || cov.cols() != 2) {
        throw std::invalid_argument("disk mass needs a 1- or 2-dimensional Gaussian");
    }
    const double v = 0.5 * (cov(0, 0) + cov(1, 1));
    const bool isotropic = std::abs(cov(0, 1)) <= 1e-14 * v && std::abs(cov(0, 0) - cov(1, 1)) <= 1e-14 * v;
    if (isotropic) {
        if (!(v > 0)) {
            throw NumericalError(error_kind::kDegenerateMarginal, "outcome variance is not positive");
        }
        return isotropic_disk_mass(mean.norm(), v, radius);
    }
    return anisotropic_disk_mass(mean, cov, radius);
}

FilteredOutcome filter_outcome(const FilterSpec &spec, const Vec &mean, const Mat &cov) {
    check_outcome_shapes(spec, mean, cov);
    const int d = spec.dims;
    const double lambda = spec.lambda();
    Eigen::LLT<Mat> prior(cov);
    if (prior.info() != Eigen::Success) {
        throw NumericalError(error_kind::kDegenerateMarginal, "outcome covariance is not positive definite");
    }
    const Mat precision = prior.solve(Mat::Identity(d, d));
    const Mat filtered_precision = precision - 2 * lambda * Mat::Identity(d, d);
    Eigen::SelfAdjointEigenSolver<Mat> eig(filtered_precision, Eigen::EigenvaluesOnly);
    const double min_eig = eig.eigenvalues().minCoeff();
    if (!(min_eig > 1e-12 * precision.norm())) {
        throw NumericalError(
            error_kind::kGainVarianceBreakdown,
            "2 lambda V >= 1 (lambda = " + std::to_string(lambda) + "); the filtered ensemble is not Gaussian");
    }
    FilteredOutcome out;
    out.cov = filtered_precision.inverse();
    out.cov = (0.5 * (out.cov + out.cov.transpose())).eval();
    out.mean_gain = out.cov * precision;
    out.mean = out.mean_gain * mean;
    const double quad_prior = mean.dot(precision * mean);
    const double quad_post = out.mean.dot(filtered_precision * out.mean);
    out.log_weight = 0.5 * std::log(out.cov.determinant() / cov.determinant()) -
                     lambda * spec.alpha_c * spec.alpha_c + 0.5 * quad_post - 0.5 * quad_prior;
    out.coverage = gaussian_disk_mass(out.mean, out.cov, spec.alpha_c).inside;
    return out;
}

double success_probability(const FilterSpec &spec, const Vec &mean, const Mat &cov) {
    check_outcome_shapes(spec, mean, cov);
    if (spec.is_identity()) {
        return 1.0;
    }
    const double outside = gaussian_disk_mass(mean, cov, spec.alpha_c).outside;
    Eigen::SelfAdjointEigenSolver<Mat> eig(cov, Eigen::EigenvaluesOnly);
    if (2 * spec.lambda() * eig.eigenvalues().maxCoeff() >= 1 - 1e-9) {
        // The filtered weight is not normalisable, but the disk is bounded.
        return std::min(direct_inside_mass(spec, mean, cov) + outside, 1.0);
    }
    FilteredOutcome f = filter_outcome(spec, mean, cov);
    const double p = std::exp(f.log_weight) * f.coverage + outside;
    return std::min(p, 1.0);
}

double coverage_fraction(const FilterSpec &spec, const Vec &mean, const Mat &cov) {
    return filter_outcome(spec, mean, cov).coverage;
}

double cutoff_for_coverage(double g_f, const Vec &mean, const Mat &cov, double target) {
    if (!(target > 0 && target < 1)) {
        throw std::invalid_argument("coverage target must lie in (0, 1)");
    }
    FilterSpec spec{g_f, 1.0, static_cast<int>(mean.size())};
    FilteredOutcome f = filter_outcome(spec, mean, cov);
    const double sigma = std::sqrt(Eigen::SelfAdjointEigenSolver<Mat>(f.cov).eigenvalues().maxCoeff());
    auto excess = [&](double radius) { return gaussian_disk_mass(f.mean, f.cov, radius).inside - target; };
    double lo = 0;
    double hi = f.mean.norm() + 10 * sigma;
    while (excess(hi) < 0) {
        lo = hi;
        hi *= 2;
    }
    std::uintmax_t iters = 200;
    auto bracket = boost::math::tools::toms748_solve(
        excess, lo, hi, [](double a, double b) { return std::abs(b - a) <= 1e-13 * std::max(1.0, std::abs(b)); },
        iters);
    return bracket.second;
}

FilteredGaussian filtered_gaussian(const FilterSpec &spec, std::complex<double> mean, double variance) {
    check_scalar_args(spec, mean, variance);
    const int d = spec.dims;
    FilteredOutcome f = filter_outcome(spec, as_vec(mean, d), variance * Mat::Identity(d, d));
    FilteredGaussian out;
    out.mean = {f.mean(0), d == 2 ? f.mean(1) : 0.0};
    out.variance = f.cov(0, 0);
    out.log_weight = f.log_weight;
    out.weight = std::exp(f.log_weight);
    out.coverage = f.coverage;
    return out;
}

double success_probability(const FilterSpec &spec, std::complex<double> mean, double variance) {
    check_scalar_args(spec, mean, variance);
    return success_probability(spec, as_vec(mean, spec.dims), variance * Mat::Identity(spec.dims, spec.dims));
}

double coverage_fraction(const FilterSpec &spec, std::complex<double> mean, double variance) {
    return filtered_gaussian(spec, mean, variance).coverage;
}

double recommended_cutoff(double g_f, double outcome_magnitude, double sigma, double beta) {
    return g_f * g_f * outcome_magnitude + beta * g_f * sigma / std::numbers::sqrt2;
}

double beta_for_coverage(double g_f, std::complex<double> mean, double variance, int dims, double target) {
    FilterSpec probe{g_f, 1.0, dims};
    check_scalar_args(probe, mean, variance);
    const double cutoff = cutoff_for_coverage(g_f, as_vec(mean, dims), variance * Mat::Identity(dims, dims), target);
    const double sigma = std::sqrt(variance);
    return (cutoff - g_f * g_f * std::abs(mean)) * std::numbers::sqrt2 / (g_f * sigma);
}

}  // namespace herald
