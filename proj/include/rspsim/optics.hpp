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

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rspsim/qstate.hpp"

/// \file optics.hpp
/// Jones-calculus models of the physical elements in the trigger arm: wave
/// plates at arbitrary retardance, the variable partial polarizer, and the
/// general local filter with its singular-value decomposition.

namespace rspsim::optics {

using qstate::complexd;
using qstate::Matrix2cd;
using qstate::PureQubit;
using qstate::Vector2cd;

/// A birefringent wave plate: fast axis at `fast_axis_angle` from horizontal,
/// phase retardance `retardance` (pi for an ideal HWP, pi/2 for an ideal QWP).
struct WavePlate {
  double fast_axis_angle = 0.0;  // radians
  double retardance = std::numbers::pi;

  static WavePlate half(double angle,
                        double retardance = std::numbers::pi) {
    return WavePlate{angle, retardance};
  }
  static WavePlate quarter(double angle,
                           double retardance = std::numbers::pi / 2.0) {
    return WavePlate{angle, retardance};
  }
};

/// W = R(h) diag(e^{-i d/2}, e^{+i d/2}) R(-h), unitary for any (h, d).
inline Matrix2cd waveplate_jones(const WavePlate& plate) {
  const double h = plate.fast_axis_angle;
  const double d = plate.retardance;
  if (!(d > 0.0 && d < 2.0 * std::numbers::pi)) {
    throw std::invalid_argument("waveplate_jones: retardance out of (0, 2pi)");
  }
  Matrix2cd rot;
  rot << std::cos(h), -std::sin(h), std::sin(h), std::cos(h);
  Matrix2cd phase = Matrix2cd::Zero();
  phase(0, 0) = std::exp(complexd(0.0, -d / 2.0));
  phase(1, 1) = std::exp(complexd(0.0, d / 2.0));
  return rot * phase * rot.transpose();
}

/// Retardance of a zero-order plate away from its design wavelength,
/// d(lambda) = d_design * lambda_design / lambda (dispersionless model).
inline double retardance_at(double design_retardance, double design_wavelength,
                            double operating_wavelength) {
  if (design_wavelength <= 0.0 || operating_wavelength <= 0.0) {
    throw std::invalid_argument("retardance_at: wavelengths must be positive");
  }
  return design_retardance * design_wavelength / operating_wavelength;
}

/// Variable partial polarizer: intensity transmissions t_d (filter axis) and
/// t_a (orthogonal axis), each in [0, 1].
struct PartialPolarizer {
  double t_d = 1.0;
  double t_a = 1.0;

  PartialPolarizer(double td, double ta) : t_d(td), t_a(ta) {
    if (t_d < 0.0 || t_d > 1.0 || t_a < 0.0 || t_a > 1.0) {
      throw std::invalid_argument(
          "PartialPolarizer: transmissions must lie in [0, 1]");
    }
    if (t_d == 0.0 && t_a == 0.0) {
      throw std::invalid_argument(
          "PartialPolarizer: both transmissions zero, nothing transmitted");
    }
  }
};

/// A non-trace-preserving single-qubit operation with singular values <= 1,
/// realizable probabilistically on the trigger photon.
struct LocalFilter {
  Matrix2cd mat = Matrix2cd::Identity();

  LocalFilter() = default;

  explicit LocalFilter(const Matrix2cd& m) : mat(m) {
    Eigen::JacobiSVD<Matrix2cd> svd(mat);
    const double smax = svd.singularValues().maxCoeff();
    if (smax > 1.0 + 1e-12) {
      throw std::invalid_argument("LocalFilter: singular value " +
                                  std::to_string(smax) +
                                  " exceeds 1 (unphysical amplification)");
    }
  }
};

/// Amplitude filter sqrt(t_d)|z><z| + sqrt(t_a)|z_perp><z_perp| with |z> the
/// polarizer axis state.
inline LocalFilter partial_polarizer_kraus(const PartialPolarizer& pp,
                                           const PureQubit& axis_state) {
  const Vector2cd z = axis_state.ket();
  const Vector2cd zp = axis_state.orthogonal_ket();
  Matrix2cd m = std::sqrt(pp.t_d) * (z * z.adjoint()) +
                std::sqrt(pp.t_a) * (zp * zp.adjoint());
  return LocalFilter(m);
}

struct FilterSvd {
  Matrix2cd v;               // unitary
  Eigen::Vector2d d;         // singular values, descending, in [0, 1]
  Matrix2cd u;               // unitary
};

/// Decompose M = V^dag D U with D diagonal non-negative, sorted descending.
inline FilterSvd filter_svd(const LocalFilter& filter) {
  Eigen::JacobiSVD<Matrix2cd> svd(filter.mat,
                                  Eigen::ComputeFullU | Eigen::ComputeFullV);
  FilterSvd out;
  out.v = svd.matrixU().adjoint();
  out.d = svd.singularValues();
  out.u = svd.matrixV().adjoint();
  return out;
}

/// The diagonal filter diag(a, b), 0 <= a, b <= 1.
inline LocalFilter procrustean(double a, double b) {
  if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0) {
    throw std::invalid_argument("procrustean: entries must lie in [0, 1]");
  }
  Matrix2cd m = Matrix2cd::Zero();
  m(0, 0) = a;
  m(1, 1) = b;
  return LocalFilter(m);
}

/// Product of Jones matrices / filters in propagation order: the first list
/// element acts on the light first.
inline LocalFilter compose(const std::vector<Matrix2cd>& elements) {
  if (elements.empty()) {
    throw std::invalid_argument("compose: empty element list");
  }
  Matrix2cd product = Matrix2cd::Identity();
  for (const Matrix2cd& e : elements) {
    product = e * product;
  }
  return LocalFilter(product);  // throws if the chain amplifies
}

/// Probabilistic mixture {(p_i, M_i)} with sum p_i M_i^dag M_i <= I,
/// at most four terms.
struct FilterMixture {
  std::vector<std::pair<double, LocalFilter>> terms;

  explicit FilterMixture(std::vector<std::pair<double, LocalFilter>> t)
      : terms(std::move(t)) {
    if (terms.empty() || terms.size() > 4) {
      throw std::invalid_argument("FilterMixture: need 1 to 4 terms");
    }
    Matrix2cd sum = Matrix2cd::Zero();
    for (const auto& [p, m] : terms) {
      if (p < 0.0) {
        throw std::invalid_argument("FilterMixture: negative probability");
      }
      sum += p * m.mat.adjoint() * m.mat;
    }
    Eigen::SelfAdjointEigenSolver<Matrix2cd> es(sum, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().maxCoeff() > 1.0 + 1e-12) {
      throw std::invalid_argument(
          "FilterMixture: sum p_i M_i^dag M_i exceeds the identity");
    }
  }
};

}  // namespace rspsim::optics
