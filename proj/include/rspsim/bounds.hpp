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

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rspsim/detail/seeding.hpp"
#include "rspsim/optics.hpp"
#include "rspsim/qstate.hpp"

/// \file bounds.hpp
/// Which single-qubit states can be remotely prepared from a given two-qubit
/// resource when Bob keeps or discards on a single classical bit and Alice is
/// limited to local filters. Closed forms for Bell-diagonal (tetrahedron)
/// resources, a Monte Carlo sampler over single filters for anything else,
/// and the Procrustean distillation step for pure non-maximal entanglement.

namespace rspsim::bounds {

using qstate::BlochVector;
using qstate::complexd;
using qstate::DensityMatrix2Q;
using qstate::Matrix2cd;
using qstate::Matrix4cd;

/// Bell-diagonal state 1/4 (I x I + sum_i t_i sigma_i x sigma_i), valid when
/// (t1, t2, t3) lies in the tetrahedron with vertices (-1,-1,-1), (-1,1,1),
/// (1,-1,1), (1,1,-1).
struct TetrahedronState {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
};

/// The four eigenvalues in closed form.
inline std::array<double, 4> tetra_eigenvalues(const TetrahedronState& t) {
  return {(1.0 - t.t1 + t.t2 + t.t3) / 4.0, (1.0 + t.t1 - t.t2 + t.t3) / 4.0,
          (1.0 + t.t1 + t.t2 - t.t3) / 4.0, (1.0 - t.t1 - t.t2 - t.t3) / 4.0};
}

inline DensityMatrix2Q tetra_state(const TetrahedronState& t) {
  const auto ev = tetra_eigenvalues(t);
  for (int i = 0; i < 4; ++i) {
    if (ev[i] < -1e-12) {
      throw std::invalid_argument(
          "tetra_state: point outside the tetrahedron, eigenvalue lambda_" +
          std::to_string(i + 1) + " = " + std::to_string(ev[i]));
    }
  }
  Matrix4cd m = 0.25 * Matrix4cd::Identity();
  m += 0.25 * t.t1 * qstate::kron(qstate::sigma_x(), qstate::sigma_x());
  m += 0.25 * t.t2 * qstate::kron(qstate::sigma_y(), qstate::sigma_y());
  m += 0.25 * t.t3 * qstate::kron(qstate::sigma_z(), qstate::sigma_z());
  return DensityMatrix2Q(m);
}

/// Entangled iff some eigenvalue exceeds 1/2, equivalently (t1, t2, t3)
/// outside the octahedron embedded in the tetrahedron.
inline bool is_entangled(const TetrahedronState& t) {
  const auto ev = tetra_eigenvalues(t);
  double max_ev = ev[0];
  for (double e : ev) max_ev = std::max(max_ev, e);
  return max_ev > 0.5 + 1e-12;
}

/// The preparable region: origin-centered ellipsoid with semi-axes
/// (|t1|, |t2|, |t3|).
struct PreparableEllipsoid {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;

  /// Quadratic-form residual over the non-degenerate axes; <= 0 inside.
  double residual(const BlochVector& v) const {
    double q = 0.0;
    const double coords[3] = {v.s1, v.s2, v.s3};
    const double axes[3] = {a1, a2, a3};
    for (int i = 0; i < 3; ++i) {
      if (axes[i] > 1e-12) q += (coords[i] / axes[i]) * (coords[i] / axes[i]);
    }
    return q - 1.0;
  }

  /// Largest coordinate magnitude along a degenerate (zero-length) axis.
  double degenerate_excess(const BlochVector& v) const {
    double worst = 0.0;
    const double coords[3] = {v.s1, v.s2, v.s3};
    const double axes[3] = {a1, a2, a3};
    for (int i = 0; i < 3; ++i) {
      if (axes[i] <= 1e-12) worst = std::max(worst, std::abs(coords[i]));
    }
    return worst;
  }

  bool contains(const BlochVector& v, double tol = 1e-9) const {
    return residual(v) <= tol && degenerate_excess(v) <= 1e-9;
  }
};

inline PreparableEllipsoid preparable_ellipsoid(const TetrahedronState& t) {
  tetra_state(t);  // validity check
  return PreparableEllipsoid{std::abs(t.t1), std::abs(t.t2), std::abs(t.t3)};
}

/// Rotation axis n = (sin a cos b, sin a sin b, cos a).
struct RotationAxis {
  double alpha = 0.0;
  double beta = 0.0;

  std::array<double, 3> n() const {
    return {std::sin(alpha) * std::cos(beta), std::sin(alpha) * std::sin(beta),
            std::cos(alpha)};
  }
};

namespace detail_bounds {

// Bob's unnormalized reduced matrix after the Alice filter M, without
// revalidating: rho_B = sum_{c,d} (M^dag M)_{dc} R[c][d] over Alice blocks.
inline Matrix2cd bob_after_filter(const Matrix4cd& rho, const Matrix2cd& m) {
  const Matrix2cd g = m.adjoint() * m;
  Matrix2cd out = Matrix2cd::Zero();
  for (int c = 0; c < 2; ++c)
    for (int d = 0; d < 2; ++d) out += g(d, c) * rho.block<2, 2>(2 * c, 2 * d);
  return out;
}

inline BlochVector bloch_of_unnormalized(const Matrix2cd& m, double trace) {
  return BlochVector{(m * qstate::sigma_x()).real().trace() / trace,
                     (m * qstate::sigma_y()).real().trace() / trace,
                     (m * qstate::sigma_z()).real().trace() / trace};
}

}  // namespace detail_bounds

/// Bob's Bloch vector when Alice rotates by i n.sigma and projects onto |0>:
/// (t1 sin2a cos b, t2 sin2a sin b, t3 cos2a). The closed form is checked
/// against the direct filter computation on every call.
inline BlochVector surface_point(const TetrahedronState& t,
                                 const RotationAxis& axis) {
  const BlochVector closed{t.t1 * std::sin(2.0 * axis.alpha) *
                               std::cos(axis.beta),
                           t.t2 * std::sin(2.0 * axis.alpha) *
                               std::sin(axis.beta),
                           t.t3 * std::cos(2.0 * axis.alpha)};

  const auto n = axis.n();
  const Matrix2cd u =
      complexd(0.0, 1.0) * (n[0] * qstate::sigma_x() + n[1] * qstate::sigma_y() +
                            n[2] * qstate::sigma_z());
  const Matrix2cd filter = qstate::ket_h() * qstate::ket_h().adjoint() * u;
  const DensityMatrix2Q rho = tetra_state(t);
  const Matrix2cd bob = detail_bounds::bob_after_filter(rho.mat, filter);
  const double p = bob.real().trace();
  if (p < 1e-15) {
    throw std::runtime_error("surface_point: projection succeeds with "
                             "probability below 1e-15");
  }
  const BlochVector direct = detail_bounds::bloch_of_unnormalized(bob, p);
  const double err = std::max({std::abs(direct.s1 - closed.s1),
                               std::abs(direct.s2 - closed.s2),
                               std::abs(direct.s3 - closed.s3)});
  if (err > 1e-10) {
    throw std::runtime_error(
        "surface_point: closed form disagrees with the direct filter "
        "computation by " + std::to_string(err));
  }
  return closed;
}

/// Tr rho_AB^2 = (1 + t1^2 + t2^2 + t3^2)/4.
inline double purity_AB(const TetrahedronState& t) {
  return 0.25 * (1.0 + t.t1 * t.t1 + t.t2 * t.t2 + t.t3 * t.t3);
}

/// Largest purity Bob can receive: (1 + max t_i^2)/2.
inline double max_purity_B(const TetrahedronState& t) {
  const double m =
      std::max({t.t1 * t.t1, t.t2 * t.t2, t.t3 * t.t3});
  return 0.5 * (1.0 + m);
}

/// One sampled preparation outcome.
struct McSample {
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
  double success = 0.0;
};

/// Sample single local filters M = D(a, b) U with (a, b) uniform on [0,1]^2,
/// U = cos(th) I + i sin(th) n.sigma with th uniform and n area-uniform, and
/// record Bob's normalized Bloch vector. Samples with success probability
/// below 1e-12 are discarded. Sampling is chunked so that each chunk has an
/// independent derived seed; results are merge-order independent.
inline std::vector<McSample> monte_carlo_preparable(
    const DensityMatrix2Q& resource, std::size_t n_samples,
    std::uint64_t seed) {
  if (n_samples < 1) {
    throw std::invalid_argument("monte_carlo_preparable: n_samples >= 1");
  }
  constexpr std::size_t kChunk = 4096;
  std::vector<McSample> samples;
  samples.reserve(n_samples);
  for (std::size_t start = 0; start < n_samples; start += kChunk) {
    std::mt19937_64 rng(detail::mix_seed(seed, start / kChunk));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t stop = std::min(n_samples, start + kChunk);
    for (std::size_t i = start; i < stop; ++i) {
      const double a = unit(rng);
      const double b = unit(rng);
      const double th = 2.0 * std::numbers::pi * unit(rng);
      const double z = 2.0 * unit(rng) - 1.0;
      const double az = 2.0 * std::numbers::pi * unit(rng);
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double n1 = s * std::cos(az), n2 = s * std::sin(az), n3 = z;

      Matrix2cd u = std::cos(th) * Matrix2cd::Identity() +
                    complexd(0.0, std::sin(th)) *
                        (n1 * qstate::sigma_x() + n2 * qstate::sigma_y() +
                         n3 * qstate::sigma_z());
      Matrix2cd d = Matrix2cd::Zero();
      d(0, 0) = a;
      d(1, 1) = b;
      const Matrix2cd filter = d * u;

      const Matrix2cd bob =
          detail_bounds::bob_after_filter(resource.mat, filter);
      const double p = bob.real().trace();
      if (p < 1e-12) continue;
      const BlochVector v = detail_bounds::bloch_of_unnormalized(bob, p);
      samples.push_back(McSample{v.s1, v.s2, v.s3, p});
    }
  }
  return samples;
}

/// Bound-check summary of a sample cloud against an ellipsoid.
struct McSummary {
  std::size_t violations = 0;    // samples outside beyond tolerance
  double max_residual = -1.0;    // largest quadratic-form residual
  double max_degenerate = 0.0;   // largest excess along degenerate axes
  double max_purity = 0.0;       // largest Bob purity seen
};

inline McSummary summarize_against_ellipsoid(
    const std::vector<McSample>& samples, const PreparableEllipsoid& e,
    double tol = 1e-9) {
  McSummary sum;
  for (const McSample& s : samples) {
    const BlochVector v{s.s1, s.s2, s.s3};
    sum.max_residual = std::max(sum.max_residual, e.residual(v));
    sum.max_degenerate = std::max(sum.max_degenerate, e.degenerate_excess(v));
    if (!e.contains(v, tol)) ++sum.violations;
    const double len2 = v.s1 * v.s1 + v.s2 * v.s2 + v.s3 * v.s3;
    sum.max_purity = std::max(sum.max_purity, 0.5 * (1.0 + len2));
  }
  return sum;
}

/// Procrustean distillation of sqrt(p)|00> + sqrt(1-p)|11>, p in (1/2, 1):
/// the filter diag(sqrt((1-p)/p), 1) yields the Bell state with success
/// probability 2(1 - p).
inline std::pair<optics::LocalFilter, double> distill_pure(double p) {
  if (!(p > 0.5 && p < 1.0)) {
    throw std::invalid_argument(
        "distill_pure: p must lie in (1/2, 1), got " + std::to_string(p));
  }
  const double a = std::sqrt((1.0 - p) / p);
  return {optics::procrustean(a, 1.0), 2.0 * (1.0 - p)};
}

}  // namespace rspsim::bounds
