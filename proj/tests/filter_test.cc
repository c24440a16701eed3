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

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "herald/errors.h"

using namespace herald;

namespace {

double simpson(const std::function<double(double)> &f, double a, double b, int n = 4000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; i++) {
        s += f(a + i * h) * (i % 2 ? 4 : 2);
    }
    return s * h / 3;
}

// Polar-coordinate reference: trapezoid in angle, Simpson in radius.
double reference_probability_2d(double g, double cut, std::complex<double> mu, double v) {
    const double lambda = 1 - 1 / g;
    const double rmax = std::abs(mu) + 14 * std::sqrt(v);
    auto ring = [&](double rho) {
        const int m = 256;
        double s = 0;
        for (int k = 0; k < m; k++) {
            const std::complex<double> a = std::polar(rho, 2 * std::numbers::pi * k / m);
            s += std::exp(-std::norm(a - mu) / (2 * v));
        }
        const double pf = rho < cut ? std::exp(lambda * (rho * rho - cut * cut)) : 1.0;
        return s / m * rho * pf / v;
    };
    double total = simpson(ring, 0, cut);
    if (rmax > cut) {
        total += simpson(ring, cut, rmax);
    }
    return total;
}

double reference_probability_1d(double g, double cut, double mu, double v) {
    const double lambda = 1 - 1 / g;
    auto density = [&](double x) { return std::exp(-(x - mu) * (x - mu) / (2 * v)) / std::sqrt(2 * std::numbers::pi * v); };
    const double inside = simpson([&](double x) { return density(x) * std::exp(lambda * (x * x - cut * cut)); }, -cut, cut);
    const double s = std::sqrt(2 * v);
    return inside + 0.5 * std::erfc((cut - mu) / s) + 0.5 * std::erfc((cut + mu) / s);
}

}  // namespace

TEST(filter, acceptance_law) {
    FilterSpec spec{3.0, 2.0, 2};
    EXPECT_DOUBLE_EQ(acceptance_probability(spec, std::complex<double>(2.5, 0.1)), 1.0);
    const std::complex<double> a(0.6, -0.8);
    EXPECT_NEAR(acceptance_probability(spec, a), std::exp((1 - 1.0 / 3) * (1.0 - 4.0)), 1e-15);
    EXPECT_NEAR(acceptance_probability(FilterSpec{1.0, 2.0, 2}, a), 1.0, 0);
    EXPECT_NEAR(acceptance_probability(FilterSpec{3.0, 2.0, 1}, -1.5), std::exp((2.0 / 3) * (2.25 - 4)), 1e-15);
}

TEST(filter, spec_validation) {
    EXPECT_THROW((FilterSpec{0.5, 1.0, 2}).validate(), std::invalid_argument);
    EXPECT_THROW((FilterSpec{2.0, 0.0, 2}).validate(), std::invalid_argument);
    EXPECT_THROW((FilterSpec{2.0, 1.0, 3}).validate(), std::invalid_argument);
    EXPECT_NO_THROW((FilterSpec{1.0, 1.0, 1}).validate());
}

TEST(filter, unit_strength_always_succeeds) {
    EXPECT_EQ(success_probability(FilterSpec{1.0, 3.0, 2}, {0.4, 0.2}, 0.5), 1.0);
    EXPECT_EQ(success_probability(FilterSpec{1.0, 3.0, 1}, Vec::Constant(1, 0.3), Mat::Constant(1, 1, 0.7)), 1.0);
}

TEST(filter, amplified_moments) {
    const std::complex<double> mu(0.4, -0.3);
    for (double g : {1.5, 3.0, 12.63}) {
        FilteredGaussian f = filtered_gaussian(FilterSpec{g, 8.0, 2}, mu, 0.5);
        EXPECT_NEAR(f.mean.real(), g * mu.real(), 1e-12);
        EXPECT_NEAR(f.mean.imag(), g * mu.imag(), 1e-12);
        EXPECT_NEAR(f.variance, g * 0.5, 1e-12);
    }
}

TEST(filter, success_probability_against_reference_2d) {
    struct Case {
        double g, cut, re, im, v;
    };
    for (const Case &c : {Case{2.0, 2.0, 0.5, 0.0, 0.5}, Case{1.5, 3.5, 0.3, -0.7, 0.5}, Case{5.0, 4.0, 1.0, 1.0, 0.5},
                          Case{1.2, 1.0, 0.0, 0.0, 0.8}, Case{3.0, 2.5, -1.5, 0.4, 0.6}}) {
        const double ref = reference_probability_2d(c.g, c.cut, {c.re, c.im}, c.v);
        const double got = success_probability(FilterSpec{c.g, c.cut, 2}, {c.re, c.im}, c.v);
        EXPECT_NEAR(got / ref, 1.0, 1e-8) << c.g << " " << c.cut;
    }
}

TEST(filter, success_probability_against_reference_1d) {
    for (double g : {1.3, 2.0, 6.0}) {
        for (double mu : {0.0, 0.7, -1.4}) {
            const double ref = reference_probability_1d(g, 2.5, mu, 0.5);
            const double got = success_probability(FilterSpec{g, 2.5, 1}, Vec::Constant(1, mu), Mat::Constant(1, 1, 0.5));
            EXPECT_NEAR(got / ref, 1.0, 1e-9);
        }
    }
}

TEST(filter, success_probability_beyond_breakdown) {
    // 2 lambda V > 1: no filtered Gaussian, but the acceptance probability is finite.
    for (int dims : {1, 2}) {
        const double ref = dims == 2 ? reference_probability_2d(4.0, 1.5, {0.3, 0.2}, 0.9)
                                     : reference_probability_1d(4.0, 1.5, 0.3, 0.9);
        const double got = dims == 2 ? success_probability(FilterSpec{4.0, 1.5, 2}, {0.3, 0.2}, 0.9)
                                     : success_probability(FilterSpec{4.0, 1.5, 1}, 0.3, 0.9);
        EXPECT_NEAR(got / ref, 1.0, 1e-8) << dims;
    }
}

TEST(filter, matrix_form_matches_scalar_form) {
    const std::complex<double> mu(0.8, 0.2);
    Vec m(2);
    m << mu.real(), mu.imag();
    const FilterSpec spec{2.5, 3.0, 2};
    EXPECT_NEAR(success_probability(spec, m, 0.5 * Mat::Identity(2, 2)) / success_probability(spec, mu, 0.5), 1.0, 1e-10);
    FilteredOutcome f = filter_outcome(spec, m, 0.5 * Mat::Identity(2, 2));
    EXPECT_NEAR(f.mean(0), 2.5 * mu.real(), 1e-12);
    EXPECT_NEAR(f.cov(0, 0), 1.25, 1e-12);
}

TEST(filter, anisotropic_filtered_moments) {
    Mat cov(2, 2);
    cov << 0.6, 0.1, 0.1, 0.35;
    Vec m(2);
    m << 0.3, -0.2;
    const double g = 2.0;
    FilteredOutcome f = filter_outcome(FilterSpec{g, 10.0, 2}, m, cov);
    const Mat precision = cov.inverse() - 2 * (1 - 1 / g) * Mat::Identity(2, 2);
    const Mat expected_cov = precision.inverse();
    EXPECT_TRUE(f.cov.isApprox(expected_cov, 1e-12));
    EXPECT_TRUE(f.mean.isApprox(expected_cov * cov.inverse() * m, 1e-12));
    // Anisotropic P_s against brute force on a Cartesian grid.
    const double cut = 1.5;
    const double h = 0.004;
    const double lambda = 1 - 1 / g;
    const Mat inv = cov.inverse();
    const double norm = 1 / (2 * std::numbers::pi * std::sqrt(cov.determinant()));
    double p = 0;
    for (double x = -8; x < 8; x += h) {
        for (double y = -8; y < 8; y += h) {
            Vec d(2);
            d << x - m(0), y - m(1);
            const double r2 = x * x + y * y;
            const double pf = r2 < cut * cut ? std::exp(lambda * (r2 - cut * cut)) : 1.0;
            p += norm * std::exp(-0.5 * d.dot(inv * d)) * pf * h * h;
        }
    }
    EXPECT_NEAR(success_probability(FilterSpec{g, cut, 2}, m, cov), p, 2e-4);
}

TEST(filter, breakdown_when_precision_not_positive) {
    try {
        filtered_gaussian(FilterSpec{2.0, 3.0, 2}, 0.0, 2.0);
        FAIL() << "expected breakdown";
    } catch (const NumericalError &e) {
        EXPECT_EQ(e.kind(), error_kind::kGainVarianceBreakdown);
    }
}

TEST(filter, disk_masses) {
    const double s2 = 0.7;
    DiskMass iso = gaussian_disk_mass(Vec::Zero(2), s2 * Mat::Identity(2, 2), 1.3);
    EXPECT_NEAR(iso.inside, 1 - std::exp(-1.3 * 1.3 / (2 * s2)), 1e-12);
    EXPECT_NEAR(iso.inside + iso.outside, 1.0, 1e-12);
    DiskMass line = gaussian_disk_mass(Vec::Constant(1, 0.4), Mat::Constant(1, 1, s2), 1.0);
    const double s = std::sqrt(2 * s2);
    EXPECT_NEAR(line.inside, 0.5 * (std::erf((1.0 - 0.4) / s) + std::erf((1.0 + 0.4) / s)), 1e-13);
    // Far tail stays accurate in relative terms.
    DiskMass tail = gaussian_disk_mass(Vec::Zero(2), 0.5 * Mat::Identity(2, 2), 8.0);
    EXPECT_NEAR(tail.outside / std::exp(-64.0), 1.0, 1e-9);
}

TEST(filter, scaled_bessel) {
    for (double z : {0.0, 0.5, 3.0, 40.0, 300.0, 499.999, 500.001, 650.0}) {
        EXPECT_NEAR(bessel_i0_scaled(z) / (std::cyl_bessel_i(0.0, z) * std::exp(-z)), 1.0, 1e-12) << z;
    }
    EXPECT_NEAR(bessel_i0_scaled(1e6) * std::sqrt(2 * std::numbers::pi * 1e6), 1.0, 1e-6);
}

TEST(filter, cutoff_for_coverage_hits_target) {
    Vec m(2);
    m << 0.5, 0.1;
    const Mat cov = 0.75 * Mat::Identity(2, 2);
    for (double target : {0.9, 0.98, 1 - 1e-6}) {
        const double cut = cutoff_for_coverage(1.5, m, cov, target);
        EXPECT_NEAR(coverage_fraction(FilterSpec{1.5, cut, 2}, m, cov), target, 1e-9);
    }
}
