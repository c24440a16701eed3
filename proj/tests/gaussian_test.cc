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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "herald/errors.h"

using namespace herald;

namespace {

// Two-mode squeezed vacuum with x-correlated and y-anticorrelated quadratures.
GaussianState two_mode_squeezed(double r) {
    const double c = std::cosh(2 * r);
    const double s = std::sinh(2 * r);
    Mat cov = Mat::Zero(4, 4);
    cov.diagonal().setConstant(c);
    cov(0, 2) = cov(2, 0) = s;
    cov(1, 3) = cov(3, 1) = -s;
    return GaussianState(Vec::Zero(4), cov);
}

}  // namespace

TEST(gaussian, db_conversions) {
    EXPECT_NEAR(db_to_variance(3.0), 0.50118723362727224, 1e-15);
    EXPECT_NEAR(db_to_r(20.0 / std::numbers::ln10), 1.0, 1e-15);
    for (double db : {0.0, 2.3, 6.0, 10.5}) {
        EXPECT_NEAR(db_to_variance(db), std::exp(-2 * db_to_r(db)), 1e-14);
        EXPECT_NEAR(variance_to_db(db_to_variance(db)), db, 1e-12);
        EXPECT_NEAR(r_to_db(db_to_r(db)), db, 1e-12);
    }
}

TEST(gaussian, vacuum_and_coherent) {
    GaussianState v = vacuum(2);
    EXPECT_TRUE(v.is_physical());
    EXPECT_NEAR(v.purity(), 1.0, 1e-14);

    GaussianState c = coherent({0.3, -1.2});
    EXPECT_NEAR(c.mean()(0), 0.6, 1e-15);
    EXPECT_NEAR(c.mean()(1), -2.4, 1e-15);
    EXPECT_TRUE(c.cov().isApprox(Mat::Identity(2, 2)));
}

TEST(gaussian, unphysical_covariance_rejected) {
    GaussianState s(Vec::Zero(2), 0.5 * Mat::Identity(2, 2));
    EXPECT_FALSE(s.is_physical());
    GaussianState thermal(Vec::Zero(2), 3 * Mat::Identity(2, 2));
    EXPECT_TRUE(thermal.is_physical());
    EXPECT_NEAR(thermal.symplectic_eigenvalues()[0], 3.0, 1e-12);
    EXPECT_NEAR(thermal.purity(), 1.0 / 3.0, 1e-12);
}

TEST(gaussian, squeezer_at_zero_angle) {
    const double r = 0.7;
    GaussianState s = apply(vacuum(1), squeezer(r, 0.0, 0, 1));
    EXPECT_NEAR(s.cov()(0, 0), std::exp(-2 * r), 1e-14);
    EXPECT_NEAR(s.cov()(1, 1), std::exp(2 * r), 1e-13);
    EXPECT_NEAR(s.cov()(0, 1), 0.0, 1e-14);
    EXPECT_TRUE(is_symplectic(squeezer(r, 0.4, 0, 1).matrix));
}

TEST(gaussian, ancilla_spec_matches_squeezer) {
    GaussianState a = squeezed_vacuum(AncillaSpec::pure_db(6.0));
    GaussianState b = apply(vacuum(1), squeezer(db_to_r(6.0), 0.0, 0, 1));
    EXPECT_TRUE(a.cov().isApprox(b.cov(), 1e-13));
    EXPECT_TRUE(AncillaSpec::pure_db(6.0).is_pure());
    EXPECT_FALSE(AncillaSpec::from_db(6.0, 9.0).is_pure());
    EXPECT_THROW(AncillaSpec::from_db(6.0, 3.0).validate(), std::invalid_argument);
}

TEST(gaussian, beamsplitter_mixes_amplitudes) {
    const double t = 0.3;
    const std::complex<double> a(0.5, 0.2), b(-0.4, 1.1);
    GaussianState out = apply(tensor(coherent(a), coherent(b)), beamsplitter(t, 0, 1, 2));
    const std::complex<double> oa = std::sqrt(t) * a + std::sqrt(1 - t) * b;
    const std::complex<double> ob = std::sqrt(1 - t) * a - std::sqrt(t) * b;
    EXPECT_NEAR(out.mean()(0), 2 * oa.real(), 1e-14);
    EXPECT_NEAR(out.mean()(1), 2 * oa.imag(), 1e-14);
    EXPECT_NEAR(out.mean()(2), 2 * ob.real(), 1e-14);
    EXPECT_NEAR(out.mean()(3), 2 * ob.imag(), 1e-14);
    EXPECT_TRUE(out.cov().isApprox(Mat::Identity(4, 4), 1e-14));
    EXPECT_TRUE(is_symplectic(beamsplitter(t, 0, 1, 2).matrix));
}

TEST(gaussian, loss_channel) {
    const double eta = 0.8;
    GaussianState s = loss_channel(squeezed_vacuum(AncillaSpec::pure_db(6.0)), 0, eta);
    const double v = db_to_variance(6.0);
    EXPECT_NEAR(s.cov()(0, 0), eta * v + 1 - eta, 1e-14);
    EXPECT_NEAR(s.cov()(1, 1), eta / v + 1 - eta, 1e-13);
    GaussianState c = loss_channel(coherent({1.0, 0.0}), 0, eta);
    EXPECT_NEAR(c.mean()(0), 2 * std::sqrt(eta), 1e-14);
}

TEST(gaussian, fidelity_closed_forms) {
    const std::complex<double> a(0.3, 0.1), b(-0.2, 0.6);
    EXPECT_NEAR(fidelity(coherent(a), coherent(a)), 1.0, 1e-14);
    EXPECT_NEAR(fidelity(coherent(a), coherent(b)), std::exp(-std::norm(a - b)), 1e-14);
    const double r = 0.5;
    GaussianState sq = apply(vacuum(1), squeezer(r, 0.0, 0, 1));
    EXPECT_NEAR(fidelity(sq, vacuum(1)), 1.0 / std::cosh(r), 1e-13);
    // Thermal vs vacuum: F = 2 / (1 + V).
    GaussianState th(Vec::Zero(2), 2.5 * Mat::Identity(2, 2));
    EXPECT_NEAR(fidelity(th, vacuum(1)), 2.0 / 3.5, 1e-13);
}

TEST(gaussian, homodyne_on_two_mode_squeezed_vacuum) {
    const double r = 0.6;
    const double c = std::cosh(2 * r), s = std::sinh(2 * r);
    HomodyneResult h = condition_on_homodyne(two_mode_squeezed(r), 1, Quadrature::kX, 0.8);
    EXPECT_NEAR(h.marginal_mean, 0.0, 1e-14);
    EXPECT_NEAR(h.marginal_variance, c, 1e-13);
    EXPECT_NEAR(h.conditional.cov()(0, 0), 1.0 / c, 1e-13);
    EXPECT_NEAR(h.conditional.cov()(1, 1), c, 1e-13);
    EXPECT_NEAR(h.conditional.mean()(0), s / c * 0.8, 1e-13);
}

TEST(gaussian, heterodyne_on_two_mode_squeezed_vacuum) {
    const double r = 0.6;
    const std::complex<double> alpha(0.7, -0.4);
    GaussianState out = condition_on_heterodyne(two_mode_squeezed(r), 1, alpha);
    const std::complex<double> expected = std::tanh(r) * std::conj(alpha);
    EXPECT_TRUE(out.cov().isApprox(Mat::Identity(2, 2), 1e-12));
    EXPECT_NEAR(out.mean()(0), 2 * expected.real(), 1e-12);
    EXPECT_NEAR(out.mean()(1), 2 * expected.imag(), 1e-12);
}

TEST(gaussian, product_state_conditioning_leaves_other_mode) {
    GaussianState prod = tensor(coherent({0.2, 0.1}), squeezed_vacuum(AncillaSpec::pure_db(3.0)));
    HomodyneResult h = condition_on_homodyne(prod, 1, Quadrature::kY, 2.0);
    EXPECT_TRUE(h.conditional.mean().isApprox(coherent({0.2, 0.1}).mean(), 1e-14));
    EXPECT_TRUE(h.conditional.cov().isApprox(Mat::Identity(2, 2), 1e-14));
}

TEST(gaussian, composition_order) {
    SymplecticOp bs = beamsplitter(0.4, 0, 1, 2);
    SymplecticOp sq = squeezer(0.3, 0.0, 0, 2);
    GaussianState in = tensor(coherent({0.5, 0.0}), vacuum(1));
    GaussianState seq = apply(apply(in, sq), bs);
    GaussianState comp = apply(in, bs.after(sq));
    EXPECT_TRUE(seq.cov().isApprox(comp.cov(), 1e-13));
    EXPECT_TRUE(seq.mean().isApprox(comp.mean(), 1e-13));
}
