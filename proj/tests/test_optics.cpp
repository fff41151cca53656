// Copyright 2026 The rspsim authors
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

#include <catch2/catch_amalgamated.hpp>
#include <numbers>
#include <random>

#include "rspsim/optics.hpp"
#include "rspsim/qstate.hpp"
#include "test_support.hpp"

using namespace rspsim;
using namespace rspsim::optics;
using qstate::complexd;
using qstate::Matrix2cd;
using qstate::Vector2cd;
using Catch::Matchers::WithinAbs;

namespace {
constexpr double kPi = std::numbers::pi;

double ket_distance_up_to_phase(const Vector2cd& a, const Vector2cd& b) {
  return 1.0 - std::abs(a.normalized().dot(b.normalized().conjugate()));
}
}  // namespace

TEST_CASE("HWP at zero is sigma_z up to global phase") {
  const Matrix2cd w = waveplate_jones(WavePlate::half(0.0));
  // diag(-i, i) = -i sigma_z.
  CHECK((w - complexd(0, -1) * qstate::sigma_z()).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("HWP at 22.5 degrees maps H to D") {
  const Matrix2cd w = waveplate_jones(WavePlate::half(kPi / 8.0));
  CHECK(ket_distance_up_to_phase(w * qstate::ket_h(), qstate::ket_d()) < 1e-12);
}

TEST_CASE("QWP at 45 degrees maps H to a circular state") {
  const Matrix2cd w = waveplate_jones(WavePlate::quarter(kPi / 4.0));
  const auto b = qstate::bloch_from_state(
      qstate::DensityMatrix1Q::pure(w * qstate::ket_h()));
  CHECK_THAT(std::abs(b.s2), WithinAbs(1.0, 1e-12));
  CHECK_THAT(b.s1, WithinAbs(0.0, 1e-12));
  CHECK_THAT(b.s3, WithinAbs(0.0, 1e-12));
}

TEST_CASE("wave plates are unitary for any angle and retardance") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> angle(0.0, kPi);
  std::uniform_real_distribution<double> ret(0.01, 2.0 * kPi - 0.01);
  for (int i = 0; i < 500; ++i) {
    const Matrix2cd w = waveplate_jones(WavePlate{angle(rng), ret(rng)});
    CHECK((w * w.adjoint() - Matrix2cd::Identity()).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("retardance scales linearly with design over operating wavelength") {
  CHECK_THAT(retardance_at(kPi, 702.0, 702.0), WithinAbs(kPi, 1e-12));
  CHECK_THAT(retardance_at(kPi, 702.0, 670.0), WithinAbs(kPi * 702.0 / 670.0, 1e-12));
  CHECK_THAT(retardance_at(kPi / 2.0, 702.0, 737.0),
             WithinAbs(kPi / 2.0 * 702.0 / 737.0, 1e-12));
  CHECK_THROWS_AS(retardance_at(kPi, 0.0, 670.0), std::invalid_argument);
}

namespace {

// Conditional Bob state when the partial polarizer filter acts on the
// trigger of |phi+>.
qstate::DensityMatrix1Q bob_after_polarizer(double t_d, double t_a,
                                            const qstate::PureQubit& axis) {
  const LocalFilter f =
      partial_polarizer_kraus(PartialPolarizer(t_d, t_a), axis);
  const auto filtered =
      qstate::apply_alice(qstate::DensityMatrix2Q::bell_phi_plus(), f.mat);
  return qstate::partial_trace_A(filtered).normalized();
}

}  // namespace

TEST_CASE("partial polarizer limiting cases on the Bell state") {
  const qstate::PureQubit axis_d{0.0, 0.0};

  const auto ideal = bob_after_polarizer(1.0, 0.0, axis_d);
  CHECK((ideal.mat - qstate::ket_d() * qstate::ket_d().adjoint())
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  const auto none = bob_after_polarizer(0.4, 0.4, axis_d);
  CHECK((none.mat - 0.5 * Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial polarizer reproduces the closed-form conditional state") {
  // [[1, N(T_D - T_A)], [N(T_D - T_A), 1]]/2 in H/V, over a 21 x 21 grid.
  const qstate::PureQubit axis_d{0.0, 0.0};
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const double t_d = i / 20.0;
      const double t_a = j / 20.0;
      if (t_d == 0.0 && t_a == 0.0) continue;
      const double off = (t_d - t_a) / (t_d + t_a);
      Matrix2cd expected;
      expected << 0.5, 0.5 * off, 0.5 * off, 0.5;
      const auto bob = bob_after_polarizer(t_d, t_a, axis_d);
      CHECK((bob.mat - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("partial polarizer off-design point from the closed form") {
  const auto bob = bob_after_polarizer(0.75, 0.25, qstate::PureQubit{0.0, 0.0});
  CHECK_THAT(bob.mat(0, 1).real(), WithinAbs(0.25, 1e-12));
  CHECK_THAT(qstate::bloch_from_state(bob).length(), WithinAbs(0.5, 1e-12));
}

TEST_CASE("partial polarizer rejects the all-blocking setting") {
  CHECK_THROWS_AS(PartialPolarizer(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("unit transmissions give the identity filter") {
  const LocalFilter f = partial_polarizer_kraus(PartialPolarizer(1.0, 1.0),
                                                qstate::PureQubit{0.3, 1.1});
  CHECK((f.mat - Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("filter_svd reconstructs and sorts descending") {
  SECTION("identity") {
    const FilterSvd s = filter_svd(LocalFilter{});
    CHECK_THAT(s.d(0), WithinAbs(1.0, 1e-12));
    CHECK_THAT(s.d(1), WithinAbs(1.0, 1e-12));
    CHECK((s.v.adjoint() * s.d.cast<complexd>().asDiagonal() * s.u -
           Matrix2cd::Identity())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
  SECTION("diagonal input") {
    const FilterSvd s = filter_svd(procrustean(0.3, 0.8));
    CHECK_THAT(s.d(0), WithinAbs(0.8, 1e-12));
    CHECK_THAT(s.d(1), WithinAbs(0.3, 1e-12));
  }
  SECTION("random filters") {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 1000; ++i) {
      const LocalFilter f{test_support::random_filter(rng)};
      const FilterSvd s = filter_svd(f);
      CHECK(s.d(0) >= s.d(1));
      CHECK(s.d(0) <= 1.0 + 1e-12);
      const Matrix2cd back =
          s.v.adjoint() * s.d.cast<complexd>().asDiagonal() * s.u;
      CHECK((back - f.mat).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("singular values are invariant under unitary composition") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 1000; ++i) {
    const LocalFilter f{test_support::random_filter(rng)};
    const Matrix2cd pre = test_support::random_unitary<2>(rng);
    const Matrix2cd post = test_support::random_unitary<2>(rng);
    const FilterSvd a = filter_svd(f);
    const FilterSvd b = filter_svd(LocalFilter{post * f.mat * pre});
    CHECK_THAT(a.d(0), WithinAbs(b.d(0), 1e-12));
    CHECK_THAT(a.d(1), WithinAbs(b.d(1), 1e-12));
  }
}

TEST_CASE("procrustean filters") {
  CHECK((procrustean(1.0, 1.0).mat - Matrix2cd::Identity())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  const Matrix2cd v_proj = qstate::ket_v() * qstate::ket_v().adjoint();
  CHECK((procrustean(0.0, 1.0).mat - v_proj).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THAT(procrustean(1.0 / std::sqrt(3.0), 1.0).mat(0, 0).real(),
             WithinAbs(1.0 / std::sqrt(3.0), 1e-12));
  CHECK_THROWS_AS(procrustean(1.2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(procrustean(0.5, -0.1), std::invalid_argument);
}

TEST_CASE("compose multiplies in propagation order") {
  CHECK((compose({Matrix2cd::Identity(), Matrix2cd::Identity()}).mat -
         Matrix2cd::Identity())
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  // HWP at 22.5 degrees takes |H> to |D>, then an ideal D polarizer passes
  // it with amplitude 1 up to phase.
  const Matrix2cd hwp = waveplate_jones(WavePlate::half(kPi / 8.0));
  const Matrix2cd pol = partial_polarizer_kraus(PartialPolarizer(1.0, 0.0),
                                                qstate::PureQubit{0.0, 0.0})
                            .mat;
  const Vector2cd out = compose({hwp, pol}).mat * qstate::ket_h();
  CHECK_THAT(out.norm(), WithinAbs(1.0, 1e-12));

  CHECK_THROWS_AS(compose({}), std::invalid_argument);
  CHECK_THROWS_AS(compose({2.0 * Matrix2cd::Identity()}),
                  std::invalid_argument);
}

TEST_CASE("filter mixtures enforce the completeness inequality") {
  const LocalFilter d_proj = partial_polarizer_kraus(
      PartialPolarizer(1.0, 0.0), qstate::PureQubit{0.0, 0.0});
  CHECK_NOTHROW(FilterMixture({{0.5, d_proj}, {0.5, d_proj}}));
  CHECK_THROWS_AS(FilterMixture({{0.8, LocalFilter{}}, {0.8, LocalFilter{}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(FilterMixture({}), std::invalid_argument);
}
