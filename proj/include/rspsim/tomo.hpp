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

#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "rspsim/detail/nelder_mead.hpp"
#include "rspsim/detail/seeding.hpp"
#include "rspsim/qstate.hpp"

/// \file tomo.hpp
/// Simulated photon-counting measurements and maximum-likelihood density
/// matrix reconstruction. One qubit uses the six projections H, V, D, A, L,
/// R; two qubits use all 36 product projectors of the 6 x 6 label grid.
///
/// The likelihood is the Gaussian approximation to Poisson counting,
/// sum_nu (N0 p_nu - n_nu)^2 / (2 N0 p_nu), with p_nu floored at 1e-10.
/// Reconstruction goes through the positivity-enforcing parameterization
/// rho = T^dag T / Tr(T^dag T), T lower-triangular, initialized from a
/// clamped linear inversion.

namespace rspsim::tomo {

using qstate::DensityMatrix1Q;
using qstate::DensityMatrix2Q;
using qstate::Matrix2cd;
using qstate::Matrix4cd;
using qstate::Vector2cd;

inline const std::vector<std::string>& labels_1q() {
  static const std::vector<std::string> labels = {"H", "V", "D",
                                                  "A", "L", "R"};
  return labels;
}

inline Vector2cd label_ket(char label) {
  switch (label) {
    case 'H':
      return qstate::ket_h();
    case 'V':
      return qstate::ket_v();
    case 'D':
      return qstate::ket_d();
    case 'A':
      return qstate::ket_a();
    case 'L':
      return qstate::ket_l();
    case 'R':
      return qstate::ket_r();
    default:
      throw std::invalid_argument(std::string("label_ket: unknown label ") +
                                  label);
  }
}

/// The six single-qubit analysis projectors; H+V = D+A = L+R = I.
struct ProjectorSet1Q {
  std::vector<std::string> labels;
  std::vector<Matrix2cd> projectors;
};

inline ProjectorSet1Q projector_set_1q() {
  ProjectorSet1Q set;
  for (const std::string& l : labels_1q()) {
    const Vector2cd k = label_ket(l[0]);
    set.labels.push_back(l);
    set.projectors.push_back(k * k.adjoint());
  }
  return set;
}

/// The 36 product projectors ("HH", "HV", ..., "RR"), trigger label first.
struct ProjectorSet2Q {
  std::vector<std::string> labels;
  std::vector<Matrix4cd> projectors;
};

inline ProjectorSet2Q projector_set_2q() {
  ProjectorSet2Q set;
  for (const std::string& a : labels_1q()) {
    for (const std::string& b : labels_1q()) {
      const Vector2cd ka = label_ket(a[0]);
      const Vector2cd kb = label_ket(b[0]);
      set.labels.push_back(a + b);
      set.projectors.push_back(
          qstate::kron(ka * ka.adjoint(), kb * kb.adjoint()));
    }
  }
  return set;
}

/// Simulated coincidence counts. Counts are stored as doubles so that exact
/// expectation counts (non-integer) can round-trip through the same record;
/// simulated records always hold non-negative integers.
struct CountRecord {
  std::vector<std::string> labels;
  std::vector<double> counts;
  double n0 = 0.0;        // expected counts for a unit-probability setting
  std::uint64_t seed = 0;

  double count_for(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) return counts[i];
    }
    throw std::invalid_argument("CountRecord: missing label " + label);
  }
};

namespace detail_tomo {

template <typename Mat>
CountRecord simulate_counts_impl(const Mat& rho,
                                 const std::vector<std::string>& labels,
                                 const std::vector<Mat>& projectors, double n0,
                                 std::uint64_t seed) {
  if (n0 <= 0.0) {
    throw std::invalid_argument("simulate_counts: N0 must be positive");
  }
  CountRecord record;
  record.labels = labels;
  record.n0 = n0;
  record.seed = seed;
  std::mt19937_64 rng(rspsim::detail::mix_seed(seed, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::max(0.0, (rho * projectors[i]).real().trace());
    std::poisson_distribution<long long> dist(n0 * p);
    record.counts.push_back(p == 0.0 ? 0.0
                                     : static_cast<double>(dist(rng)));
  }
  return record;
}

}  // namespace detail_tomo

/// Draw Poisson counts with mean N0 Tr(rho P_nu) for each projector.
/// Deterministic for a fixed seed.
inline CountRecord simulate_counts(const DensityMatrix1Q& rho,
                                   const ProjectorSet1Q& set, double n0,
                                   std::uint64_t seed) {
  if (!rho.is_normalized()) {
    throw std::invalid_argument("simulate_counts: state must be normalized");
  }
  return detail_tomo::simulate_counts_impl(rho.mat, set.labels, set.projectors,
                                           n0, seed);
}

inline CountRecord simulate_counts(const DensityMatrix2Q& rho,
                                   const ProjectorSet2Q& set, double n0,
                                   std::uint64_t seed) {
  if (!rho.is_normalized()) {
    throw std::invalid_argument("simulate_counts: state must be normalized");
  }
  return detail_tomo::simulate_counts_impl(rho.mat, set.labels, set.projectors,
                                           n0, seed);
}

namespace detail_tomo {

// Bloch axis of each basis pair: (plus label, minus label, axis index).
struct BasisPair {
  char plus;
  char minus;
  int axis;
};

inline const std::vector<BasisPair>& basis_pairs() {
  static const std::vector<BasisPair> pairs = {
      {'D', 'A', 1}, {'R', 'L', 2}, {'H', 'V', 3}};
  return pairs;
}

}  // namespace detail_tomo

/// Stokes-style inversion from the six counts. The result matches the
/// relative frequencies exactly but may be unphysical (negative eigenvalue).
inline Matrix2cd linear_inversion_1q(const CountRecord& counts) {
  Matrix2cd m = 0.5 * Matrix2cd::Identity();
  for (const auto& pair : detail_tomo::basis_pairs()) {
    const double np = counts.count_for(std::string(1, pair.plus));
    const double nm = counts.count_for(std::string(1, pair.minus));
    if (np + nm <= 0.0) {
      throw std::invalid_argument(
          std::string("linear_inversion_1q: zero total counts in basis pair ") +
          pair.plus + "/" + pair.minus);
    }
    const double s = (np - nm) / (np + nm);
    m += 0.5 * s * qstate::pauli(pair.axis);
  }
  return m;
}

/// Two-qubit analog from the 36 correlations. Correlation terms come from
/// each basis-pair block; single-qubit terms average over the partner bases.
inline Matrix4cd linear_inversion_2q(const CountRecord& counts) {
  double corr[4][4] = {};
  corr[0][0] = 1.0;
  const auto& pairs = detail_tomo::basis_pairs();
  for (const auto& pa : pairs) {
    for (const auto& pb : pairs) {
      const double npp = counts.count_for({pa.plus, pb.plus});
      const double npm = counts.count_for({pa.plus, pb.minus});
      const double nmp = counts.count_for({pa.minus, pb.plus});
      const double nmm = counts.count_for({pa.minus, pb.minus});
      const double total = npp + npm + nmp + nmm;
      if (total <= 0.0) {
        throw std::invalid_argument(
            std::string("linear_inversion_2q: zero total counts in block ") +
            pa.plus + pb.plus);
      }
      corr[pa.axis][pb.axis] = (npp - npm - nmp + nmm) / total;
      corr[pa.axis][0] += (npp + npm - nmp - nmm) / total / 3.0;
      corr[0][pb.axis] += (npp - npm + nmp - nmm) / total / 3.0;
    }
  }
  Matrix4cd m = Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const Matrix2cd a = i == 0 ? Matrix2cd::Identity() : qstate::pauli(i);
      const Matrix2cd b = j == 0 ? Matrix2cd::Identity() : qstate::pauli(j);
      m += 0.25 * corr[i][j] * qstate::kron(a, b);
    }
  }
  return m;
}

/// A physically valid reconstruction with fit diagnostics.
struct TomographyResult1Q {
  DensityMatrix1Q rho_hat;
  double log_likelihood = 0.0;
  long iterations = 0;
};

struct TomographyResult2Q {
  DensityMatrix2Q rho_hat;
  double log_likelihood = 0.0;
  long iterations = 0;
};

class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& msg)
      : std::runtime_error(msg) {}
};

namespace detail_tomo {

// rho = T^dag T / Tr(T^dag T), T lower-triangular: N real diagonal entries
// followed by (re, im) pairs for the below-diagonal entries, row-major.
template <int N>
Eigen::Matrix<qstate::complexd, N, N> rho_from_params(
    const std::vector<double>& x) {
  Eigen::Matrix<qstate::complexd, N, N> t =
      Eigen::Matrix<qstate::complexd, N, N>::Zero();
  int k = N;
  for (int i = 0; i < N; ++i) {
    t(i, i) = x[i];
    for (int j = 0; j < i; ++j) {
      t(i, j) = qstate::complexd(x[k], x[k + 1]);
      k += 2;
    }
  }
  Eigen::Matrix<qstate::complexd, N, N> rho = t.adjoint() * t;
  const double tr = rho.real().trace();
  if (tr <= 0.0) return Eigen::Matrix<qstate::complexd, N, N>::Identity() / N;
  return rho / tr;
}

// Parameters reproducing `rho` exactly: a triangular factor with rho =
// T^dag T, obtained from the Cholesky factor of the index-reversed matrix.
template <int N>
std::vector<double> params_from_rho(Eigen::Matrix<qstate::complexd, N, N> rho) {
  Eigen::Matrix<qstate::complexd, N, N> rev;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) rev(i, j) = rho(N - 1 - i, N - 1 - j);
  rev += 1e-12 * Eigen::Matrix<qstate::complexd, N, N>::Identity();
  Eigen::LLT<Eigen::Matrix<qstate::complexd, N, N>> llt(rev);
  if (llt.info() != Eigen::Success) {
    throw ConvergenceError("tomography: Cholesky of initializer failed");
  }
  const Eigen::Matrix<qstate::complexd, N, N> l = llt.matrixL();
  // upper = P L P satisfies rho ~= upper * upper^dag, so T = upper^dag.
  Eigen::Matrix<qstate::complexd, N, N> t;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) t(i, j) = std::conj(l(N - 1 - j, N - 1 - i));
  std::vector<double> x(N * N, 0.0);
  int k = N;
  for (int i = 0; i < N; ++i) {
    x[i] = t(i, i).real();
    for (int j = 0; j < i; ++j) {
      x[k] = t(i, j).real();
      x[k + 1] = t(i, j).imag();
      k += 2;
    }
  }
  return x;
}

// Zero negative eigenvalues and renormalize. Only tomography may do this.
template <typename Mat>
Mat clamp_psd(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
  auto ev = es.eigenvalues().cwiseMax(0.0).eval();
  if (ev.sum() <= 0.0) {
    return Mat::Identity() / m.rows();
  }
  ev /= ev.sum();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

template <int N, typename Mat>
std::pair<Mat, std::pair<double, long>> mle_impl(
    const CountRecord& counts, const std::vector<Mat>& projectors,
    const Mat& init, long max_evaluations) {
  double total = 0.0;
  for (double c : counts.counts) total += c;
  if (total <= 0.0) {
    throw std::invalid_argument("mle_reconstruct: zero total counts");
  }
  const double n0 = counts.n0;
  auto objective = [&](const std::vector<double>& x) -> double {
    const Mat rho = rho_from_params<N>(x);
    double obj = 0.0;
    for (std::size_t nu = 0; nu < projectors.size(); ++nu) {
      const double p =
          std::max(1e-10, (rho * projectors[nu]).real().trace());
      const double diff = n0 * p - counts.counts[nu];
      obj += diff * diff / (2.0 * n0 * p);
    }
    return obj;
  };

  std::vector<double> x0 = params_from_rho<N>(clamp_psd(init));
  detail::NelderMeadOptions opts;
  opts.tolerance = 1e-10;
  opts.max_evaluations = max_evaluations;
  opts.initial_step = 0.02;
  opts.restarts = 4;
  const detail::NelderMeadResult r = detail::nelder_mead(objective, x0, opts);
  if (!r.converged) {
    throw ConvergenceError(
        "mle_reconstruct: simplex did not converge after " +
        std::to_string(r.evaluations) + " evaluations (objective " +
        std::to_string(r.fval) + ")");
  }
  return {rho_from_params<N>(r.x), {-r.fval, r.evaluations}};
}

}  // namespace detail_tomo

inline TomographyResult1Q mle_reconstruct(const CountRecord& counts,
                                          const ProjectorSet1Q& set) {
  const Matrix2cd init = linear_inversion_1q(counts);
  auto [rho, diag] = detail_tomo::mle_impl<2>(counts, set.projectors, init,
                                              20000L);
  TomographyResult1Q out;
  out.rho_hat = DensityMatrix1Q(detail_tomo::clamp_psd(rho));
  out.log_likelihood = diag.first;
  out.iterations = diag.second;
  return out;
}

inline TomographyResult2Q mle_reconstruct(const CountRecord& counts,
                                          const ProjectorSet2Q& set) {
  const Matrix4cd init = linear_inversion_2q(counts);
  auto [rho, diag] = detail_tomo::mle_impl<4>(counts, set.projectors, init,
                                              100000L);
  TomographyResult2Q out;
  out.rho_hat = DensityMatrix2Q(detail_tomo::clamp_psd(rho));
  out.log_likelihood = diag.first;
  out.iterations = diag.second;
  return out;
}

}  // namespace rspsim::tomo
