// Copyright 2026 The PTCB Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include <gtest/gtest.h>

#include "oracle/dense.hpp"
#include "ptcb/crb.hpp"
#include "ptcb/error.hpp"
#include "ptcb/noise.hpp"

namespace {

using oracle::Mat;
using ptcb::PauliString;
using ptcb::TransferMatrix;

PauliString P(const char* letters) { return PauliString::from_letters(letters); }

ptcb::CrbSettings ExactSettings() {
  ptcb::CrbSettings s;
  s.inner = ptcb::InnerMode::Exact;
  return s;
}

TEST(CrbLayers, ConsecutiveProducts) {
  const std::vector<PauliString> t = {P("XI"), P("YZ"), P("IZ")};
  const auto layers = ptcb::crb_layers(t);
  ASSERT_EQ(layers.size(), 3u);
  EXPECT_EQ(layers[0], P("ZZ"));
  EXPECT_EQ(layers[1], P("YI"));
  EXPECT_EQ(layers[2], P("IZ"));
  const std::vector<PauliString> one = {P("XY")};
  EXPECT_EQ(ptcb::crb_layers(one), one);
  EXPECT_THROW(ptcb::crb_layers(std::vector<PauliString>{}), ptcb::ValidationError);
}

TEST(CrbEigenvalue, DephasingOnOneQubit) {
  const auto noise = ptcb::dephasing_channel(0.1, 1);
  const auto x = ptcb::estimate_pauli_eigenvalue(noise, P("X"), ExactSettings());
  EXPECT_NEAR(x.eigenvalue, 0.8, 1e-12);
  EXPECT_NEAR(x.exact, 0.8, 1e-15);
  EXPECT_LT(x.fit_residual, 1e-10);
  const auto z = ptcb::estimate_pauli_eigenvalue(noise, P("Z"), ExactSettings());
  EXPECT_NEAR(z.eigenvalue, 1.0, 1e-12);
  const auto id = ptcb::estimate_pauli_eigenvalue(noise, P("I"), ExactSettings());
  EXPECT_EQ(id.eigenvalue, 1.0);
  EXPECT_TRUE(id.f.empty());

  const auto f = ptcb::estimate_twirl_fidelity(noise, 0, ExactSettings());
  EXPECT_NEAR(f.estimate, 0.9, 1e-12);
  EXPECT_NEAR(f.exact, 0.9, 1e-15);
  EXPECT_EQ(f.eigenvalues.size(), 4u);
}

TEST(CrbEigenvalue, MatchesTwirledDiagonal) {
  const auto noise = ptcb::composite_noise(ptcb::NoiseSpec{0.02, 0.03, 0.2, 0, 1, 0}, 2);
  const auto twirl = ptcb::pauli_twirl(noise).diagonal();
  auto settings = ExactSettings();
  settings.spam = ptcb::SpamSpec{0.02, 0.03};
  const auto est = ptcb::estimate_twirl_fidelity(noise, 0, settings);
  ASSERT_EQ(est.eigenvalues.size(), 16u);
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_NEAR(est.eigenvalues[i].eigenvalue, twirl[i], 1e-12) << i;
    EXPECT_NEAR(est.eigenvalues[i].exact, twirl[i], 1e-15);
    EXPECT_LT(est.eigenvalues[i].fit_residual, 1e-10);
  }
  EXPECT_NEAR(est.estimate, ptcb::process_fidelity(noise), 1e-12);
}

TEST(CrbEigenvalue, SpamOnlyChangesThePrefactor) {
  const auto noise = ptcb::composite_noise(ptcb::NoiseSpec{0.01, 0.04, 0.1, 1, 0, 0}, 2);
  auto clean = ExactSettings();
  auto dirty = clean;
  dirty.spam = ptcb::SpamSpec{0.05, 0.02};
  for (const char* q : {"XI", "ZZ", "YX"}) {
    const auto a = ptcb::estimate_pauli_eigenvalue(noise, P(q), clean);
    const auto b = ptcb::estimate_pauli_eigenvalue(noise, P(q), dirty);
    EXPECT_NEAR(a.eigenvalue, b.eigenvalue, 1e-12) << q;
    EXPECT_LT(b.prefactor, a.prefactor);
  }
}

// Density-matrix model of a one-qubit sequence with noise after every layer.
TEST(CrbOracle, ExhaustiveMatchesDensityMatrices) {
  Mat a0(2, 2), a1(2, 2), r(2, 2);
  const double g = 0.1, th = 0.4;
  a0 << 1, 0, 0, std::sqrt(1 - g);
  a1 << 0, std::sqrt(g), 0, 0;
  r << std::cos(th / 2), -std::sin(th / 2), std::sin(th / 2), std::cos(th / 2);
  const std::vector<Mat> kraus = {r * a0, r * a1};
  const TransferMatrix noise(1, oracle::ptm(kraus, 1));
  ptcb::CrbSettings settings;
  settings.inner = ptcb::InnerMode::Exhaustive;
  for (const char* ql : {"X", "Y", "Z"}) {
    const auto q = P(ql);
    const Mat qm = oracle::pauli(ql);
    const Mat rho0 = (Mat::Identity(2, 2) + qm) / 2.0;
    for (std::size_t m = 0; m <= 4; ++m) {
      std::size_t total = 1;
      for (std::size_t i = 0; i <= m; ++i) total *= 4;
      double want = 0.0;
      std::vector<PauliString> t(m + 1, PauliString(1));
      for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        for (std::size_t j = m + 1; j-- > 0;) {
          t[j] = PauliString::from_index(1, rest % 4);
          rest /= 4;
        }
        Mat rho = rho0;
        auto step = [&](const Mat& p) { rho = oracle::apply_kraus(kraus, Mat(p * rho * p.adjoint())); };
        if (m == 0) {
          step(oracle::pauli(t[0].letters()));
        } else {
          for (std::size_t i = 1; i <= m; ++i) {
            step(oracle::pauli(t[i].letters()) * oracle::pauli(t[i - 1].letters()));
          }
          step(oracle::pauli(t[m].letters()));
        }
        const Mat p0 = oracle::pauli(t[0].letters());
        const double lambda = (p0 * qm - qm * p0).norm() < 1e-12 ? 1.0 : -1.0;
        want += lambda * ((Mat::Identity(2, 2) + qm) / 2.0 * rho).trace().real();
      }
      want /= static_cast<double>(total);
      EXPECT_NEAR(ptcb::f_of_m(noise, q, m, settings), want, 1e-12) << ql << " m=" << m;
      EXPECT_NEAR(ptcb::f_of_m(noise, q, m, ExactSettings()), want, 1e-12) << ql << " m=" << m;
    }
  }
}

TEST(CrbSampling, DeterministicAndThreadIndependent) {
  const auto noise = ptcb::composite_noise(ptcb::NoiseSpec{0.01, 0.02, 0.1, 0, 2, 0}, 3);
  ptcb::CrbSettings settings;
  settings.inner_samples = 30;
  settings.shots = 500;
  settings.seed = 11;
  settings.threads = 1;
  const auto a = ptcb::estimate_twirl_fidelity(noise, 12, settings, true);
  settings.threads = 5;
  const auto b = ptcb::estimate_twirl_fidelity(noise, 12, settings, true);
  EXPECT_EQ(a.estimate, b.estimate);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].paulis, b.records[i].paulis);
    EXPECT_EQ(a.records[i].probability, b.records[i].probability);
  }
  ASSERT_EQ(a.eigenvalues.size(), 12u);
  EXPECT_TRUE(settings.inner_samples * settings.depths.size() * 12 >= a.records.size());
}

TEST(CrbSampling, SampledEstimateNearExact) {
  const auto noise = ptcb::composite_noise(ptcb::NoiseSpec{0.01, 0.02, 0.1, 0, 1, 0}, 2);
  ptcb::CrbSettings settings;
  settings.inner_samples = 200;
  const auto est = ptcb::estimate_twirl_fidelity(noise, 0, settings);
  EXPECT_NEAR(est.estimate, est.exact, 0.02);
}

TEST(CrbSettings, Validation) {
  ptcb::CrbSettings s;
  s.depths = {2, 2};
  EXPECT_THROW(s.validate(), ptcb::ValidationError);
  s.depths = {1, 2};
  s.inner = ptcb::InnerMode::Exact;
  s.shots = 10;
  EXPECT_THROW(s.validate(), ptcb::ValidationError);
  s.shots = 0;
  EXPECT_NO_THROW(s.validate());
  const auto noise = ptcb::dephasing_channel(0.1, 2);
  EXPECT_THROW(ptcb::estimate_pauli_eigenvalue(noise, P("X"), s), ptcb::DimensionError);
  TransferMatrix broken = TransferMatrix::identity(1);
  broken(0, 3) = 0.5;
  EXPECT_THROW(ptcb::estimate_pauli_eigenvalue(broken, P("X"), s), ptcb::ValidationError);
}

}  // namespace
