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

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>

/// \file qstate.hpp
/// Dense one- and two-qubit density matrices with the polarization basis
/// conventions used throughout the library, plus the standard state metrics
/// (fidelity, purity, partial trace, Bloch coordinates).
///
/// Basis convention: computational basis {|H>, |V>};
/// |D> = (|H>+|V>)/sqrt(2), |A> = (|H>-|V>)/sqrt(2),
/// |R> = (|H>+i|V>)/sqrt(2), |L> = (|H>-i|V>)/sqrt(2).
/// Bloch axis 1 is D/A (sigma_x), axis 2 is R/L (sigma_y), axis 3 is H/V
/// (sigma_z).

namespace rspsim::qstate {

using complexd = std::complex<double>;
using Eigen::Matrix2cd;
using Eigen::Matrix4cd;
using Eigen::Vector2cd;
using Eigen::Vector4cd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;

// Basis kets.
inline Vector2cd ket_h() { return Vector2cd(1.0, 0.0); }
inline Vector2cd ket_v() { return Vector2cd(0.0, 1.0); }
inline Vector2cd ket_d() { return Vector2cd(1.0, 1.0) / std::sqrt(2.0); }
inline Vector2cd ket_a() { return Vector2cd(1.0, -1.0) / std::sqrt(2.0); }
inline Vector2cd ket_r() {
  return Vector2cd(complexd(1.0, 0.0), complexd(0.0, 1.0)) / std::sqrt(2.0);
}
inline Vector2cd ket_l() {
  return Vector2cd(complexd(1.0, 0.0), complexd(0.0, -1.0)) / std::sqrt(2.0);
}

inline Matrix2cd sigma_x() {
  Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix2cd sigma_y() {
  Matrix2cd m;
  m << complexd(0, 0), complexd(0, -1), complexd(0, 1), complexd(0, 0);
  return m;
}
inline Matrix2cd sigma_z() {
  Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

/// Pauli operator for Bloch axis i in {1, 2, 3}.
inline Matrix2cd pauli(int i) {
  switch (i) {
    case 1:
      return sigma_x();
    case 2:
      return sigma_y();
    case 3:
      return sigma_z();
    default:
      throw std::invalid_argument("pauli: axis must be 1, 2 or 3");
  }
}

inline Matrix4cd kron(const Matrix2cd& a, const Matrix2cd& b) {
  Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

/// Poincare-sphere coordinate of a qubit state.
struct BlochVector {
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;

  double length() const { return std::sqrt(s1 * s1 + s2 * s2 + s3 * s3); }
};

/// Pure qubit |psi(theta, phi)> = cos(theta)|D> + e^{i phi} sin(theta)|A>.
struct PureQubit {
  double theta = 0.0;
  double phi = 0.0;

  Vector2cd ket() const {
    return std::cos(theta) * ket_d() +
           std::exp(complexd(0.0, phi)) * std::sin(theta) * ket_a();
  }

  /// The orthogonal complement |psi_perp>, <psi_perp|psi> = 0.
  Vector2cd orthogonal_ket() const {
    return std::sin(theta) * ket_d() -
           std::exp(complexd(0.0, phi)) * std::cos(theta) * ket_a();
  }
};

namespace detail {

template <typename Mat>
void check_density(const Mat& m, bool unnormalized, const char* what) {
  const Mat herm_defect = m - m.adjoint();
  if (herm_defect.cwiseAbs().maxCoeff() > kHermitianTol) {
    std::ostringstream os;
    os << what << ": matrix is not Hermitian (defect "
       << herm_defect.cwiseAbs().maxCoeff() << ")";
    throw std::invalid_argument(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  const double min_ev = es.eigenvalues().minCoeff();
  if (min_ev < -kPsdTol) {
    std::ostringstream os;
    os << what << ": matrix is not positive semidefinite (eigenvalue "
       << min_ev << ")";
    throw std::invalid_argument(os.str());
  }
  const double tr = m.real().trace();
  if (!unnormalized && std::abs(tr - 1.0) > kTraceTol) {
    std::ostringstream os;
    os << what << ": trace = " << tr << ", expected 1";
    throw std::invalid_argument(os.str());
  }
  if (unnormalized && tr < 0.0) {
    throw std::invalid_argument(std::string(what) + ": negative trace");
  }
}

}  // namespace detail

/// A 2x2 Hermitian PSD matrix. When `trace_is_probability` is set the trace
/// carries the success probability of a filtering operation instead of 1.
struct DensityMatrix1Q {
  Matrix2cd mat = Matrix2cd::Identity() * 0.5;
  bool trace_is_probability = false;

  DensityMatrix1Q() = default;

  explicit DensityMatrix1Q(const Matrix2cd& m, bool unnormalized = false)
      : mat(m), trace_is_probability(unnormalized) {
    detail::check_density(mat, unnormalized, "DensityMatrix1Q");
  }

  static DensityMatrix1Q pure(const Vector2cd& psi) {
    const Vector2cd n = psi.normalized();
    return DensityMatrix1Q(n * n.adjoint());
  }

  static DensityMatrix1Q maximally_mixed() { return DensityMatrix1Q(); }

  double trace() const { return mat.real().trace(); }

  bool is_normalized() const { return std::abs(trace() - 1.0) <= kTraceTol; }

  DensityMatrix1Q normalized() const {
    const double tr = trace();
    if (tr <= 0.0) {
      throw std::invalid_argument("DensityMatrix1Q: cannot normalize, trace " +
                                  std::to_string(tr));
    }
    return DensityMatrix1Q(mat / tr);
  }
};

/// A 4x4 Hermitian PSD matrix for the joint trigger/remote pair.
struct DensityMatrix2Q {
  Matrix4cd mat = Matrix4cd::Identity() * 0.25;
  bool trace_is_probability = false;

  DensityMatrix2Q() = default;

  explicit DensityMatrix2Q(const Matrix4cd& m, bool unnormalized = false)
      : mat(m), trace_is_probability(unnormalized) {
    detail::check_density(mat, unnormalized, "DensityMatrix2Q");
  }

  static DensityMatrix2Q pure(const Vector4cd& psi) {
    const Vector4cd n = psi.normalized();
    return DensityMatrix2Q(n * n.adjoint());
  }

  static DensityMatrix2Q maximally_mixed() { return DensityMatrix2Q(); }

  /// (|HH> + |VV>)/sqrt(2), equivalently (|DD> + |AA>)/sqrt(2).
  static DensityMatrix2Q bell_phi_plus() {
    Vector4cd psi;
    psi << 1, 0, 0, 1;
    return pure(psi);
  }

  double trace() const { return mat.real().trace(); }

  bool is_normalized() const { return std::abs(trace() - 1.0) <= kTraceTol; }

  DensityMatrix2Q normalized() const {
    const double tr = trace();
    if (tr <= 0.0) {
      throw std::invalid_argument("DensityMatrix2Q: cannot normalize, trace " +
                                  std::to_string(tr));
    }
    return DensityMatrix2Q(mat / tr);
  }
};

inline BlochVector bloch_from_state(const DensityMatrix1Q& rho) {
  if (!rho.is_normalized()) {
    throw std::invalid_argument("bloch_from_state: trace = " +
                                std::to_string(rho.trace()) + ", expected 1");
  }
  BlochVector b;
  b.s1 = (rho.mat * sigma_x()).real().trace();
  b.s2 = (rho.mat * sigma_y()).real().trace();
  b.s3 = (rho.mat * sigma_z()).real().trace();
  return b;
}

inline DensityMatrix1Q state_from_bloch(const BlochVector& b) {
  if (b.length() > 1.0 + 1e-9) {
    throw std::invalid_argument("state_from_bloch: |s| = " +
                                std::to_string(b.length()) + " exceeds 1");
  }
  Matrix2cd m = 0.5 * (Matrix2cd::Identity() + b.s1 * sigma_x() +
                       b.s2 * sigma_y() + b.s3 * sigma_z());
  // Clip roundoff for points on the sphere surface.
  Eigen::SelfAdjointEigenSolver<Matrix2cd> es(m);
  Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0);
  m = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  return DensityMatrix1Q(m / m.real().trace());
}

namespace detail {

template <typename Mat>
double fidelity_impl(const Mat& a, const Mat& b) {
  Eigen::SelfAdjointEigenSolver<Mat> esa(a);
  // Clamp roundoff-negative eigenvalues; operatorSqrt would produce NaN.
  const auto ev = esa.eigenvalues().cwiseMax(0.0).cwiseSqrt().eval();
  const Mat sqrt_a = esa.eigenvectors() *
                     ev.template cast<complexd>().asDiagonal() *
                     esa.eigenvectors().adjoint();
  const Mat inner = sqrt_a * b * sqrt_a;
  Eigen::SelfAdjointEigenSolver<Mat> esi(inner, Eigen::EigenvaluesOnly);
  double sum = 0.0;
  for (int i = 0; i < inner.rows(); ++i) {
    sum += std::sqrt(std::max(0.0, esi.eigenvalues()[i]));
  }
  return std::min(1.0, sum * sum);
}

}  // namespace detail

/// Uhlmann fidelity F = |Tr sqrt(sqrt(a) b sqrt(a))|^2, in [0, 1].
inline double fidelity(const DensityMatrix1Q& a, const DensityMatrix1Q& b) {
  if (!a.is_normalized() || !b.is_normalized()) {
    throw std::invalid_argument("fidelity: both states must be normalized");
  }
  return detail::fidelity_impl(a.mat, b.mat);
}

inline double fidelity(const DensityMatrix2Q& a, const DensityMatrix2Q& b) {
  if (!a.is_normalized() || !b.is_normalized()) {
    throw std::invalid_argument("fidelity: both states must be normalized");
  }
  return detail::fidelity_impl(a.mat, b.mat);
}

/// Tr rho^2.
inline double purity(const DensityMatrix1Q& rho) {
  if (!rho.is_normalized()) {
    throw std::invalid_argument("purity: state must be normalized");
  }
  return (rho.mat * rho.mat).real().trace();
}

inline double purity(const DensityMatrix2Q& rho) {
  if (!rho.is_normalized()) {
    throw std::invalid_argument("purity: state must be normalized");
  }
  return (rho.mat * rho.mat).real().trace();
}

/// Bob's reduced matrix Tr_A. Trace (hence any success probability) is
/// preserved; input may be unnormalized.
inline DensityMatrix1Q partial_trace_A(const DensityMatrix2Q& rho) {
  Matrix2cd out = Matrix2cd::Zero();
  for (int a = 0; a < 2; ++a) {
    out += rho.mat.block<2, 2>(2 * a, 2 * a);
  }
  return DensityMatrix1Q(out, /*unnormalized=*/!rho.is_normalized());
}

/// Alice's reduced matrix Tr_B.
inline DensityMatrix1Q partial_trace_B(const DensityMatrix2Q& rho) {
  Matrix2cd out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      out(a, b) = rho.mat.block<2, 2>(2 * a, 2 * b).trace();
  return DensityMatrix1Q(out, /*unnormalized=*/!rho.is_normalized());
}

/// (M x I) rho (M^dag x I), unnormalized. The output trace is the filter
/// success probability. Filters with a singular value above 1 amplify and are
/// rejected.
inline DensityMatrix2Q apply_alice(const DensityMatrix2Q& rho,
                                   const Matrix2cd& filter) {
  Eigen::JacobiSVD<Matrix2cd> svd(filter);
  const double smax = svd.singularValues().maxCoeff();
  if (smax > 1.0 + 1e-12) {
    throw std::invalid_argument(
        "apply_alice: filter singular value " + std::to_string(smax) +
        " exceeds 1 (unphysical amplification)");
  }
  const Matrix4cd big = kron(filter, Matrix2cd::Identity());
  return DensityMatrix2Q(big * rho.mat * big.adjoint(), /*unnormalized=*/true);
}

}  // namespace rspsim::qstate
