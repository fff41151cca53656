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
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rspsim/detail/nelder_mead.hpp"
#include "rspsim/optics.hpp"
#include "rspsim/qstate.hpp"

/// \file rsp.hpp
/// The remote-state-preparation protocol: trigger-arm settings computation
/// (closed form for ideal plates, numeric fidelity maximization otherwise),
/// conditional-state prediction, efficiency accounting and great-circle
/// feedforward correction.
///
/// The trigger photon passes a QWP, then a HWP, then a partial polarizer
/// whose filter axis is |D>. Conditioning is on transmission through the
/// polarizer (the "D" outcome); the orthogonal outcome only enters the
/// feedforward correction.

namespace rspsim::rsp {

using qstate::BlochVector;
using qstate::complexd;
using qstate::DensityMatrix1Q;
using qstate::DensityMatrix2Q;
using qstate::Matrix2cd;
using qstate::PureQubit;
using qstate::Vector2cd;
using qstate::Vector4cd;

/// Target qubit (theta, phi, lambda):
/// rho = (1 - lambda)|psi(theta, phi)><psi(theta, phi)| + (lambda/2) I.
struct TargetState {
  double theta = 0.0;
  double phi = 0.0;
  double lam = 0.0;  // mixedness in [0, 1]
};

inline DensityMatrix1Q target_density(const TargetState& t) {
  if (t.lam < 0.0 || t.lam > 1.0) {
    throw std::invalid_argument("target_density: lambda must lie in [0, 1]");
  }
  const Vector2cd psi = PureQubit{t.theta, t.phi}.ket();
  const Matrix2cd m = (1.0 - t.lam) * (psi * psi.adjoint()) +
                      (t.lam / 2.0) * Matrix2cd::Identity();
  return DensityMatrix1Q(m);
}

/// Trigger-arm settings plus the prediction they were computed from.
struct PrepSettings {
  double qwp_angle = 0.0;
  double hwp_angle = 0.0;
  double t_d = 1.0;
  double t_a = 1.0;
  double predicted_fidelity = 0.0;
  double success_probability = 0.0;
};

/// Plate retardances actually in effect (ideal: QWP pi/2, HWP pi).
struct PlateRetardances {
  double qwp = std::numbers::pi / 2.0;
  double hwp = std::numbers::pi;
};

/// Knobs for a realistic entangled resource:
/// (1 - w)|chi><chi| + w I/4 with |chi> = cos(e)|HH> + e^{i p} sin(e)|VV>.
struct ResourceSpec {
  double epsilon = std::numbers::pi / 4.0;
  double rel_phase = 0.0;
  double white_noise = 0.0;
};

inline DensityMatrix2Q make_resource(const ResourceSpec& spec) {
  if (spec.white_noise < 0.0 || spec.white_noise > 1.0) {
    throw std::invalid_argument("make_resource: white_noise must be in [0,1]");
  }
  Vector4cd chi = Vector4cd::Zero();
  chi(0) = std::cos(spec.epsilon);
  chi(3) = std::exp(complexd(0.0, spec.rel_phase)) * std::sin(spec.epsilon);
  const auto m = (1.0 - spec.white_noise) * (chi * chi.adjoint()) +
                 (spec.white_noise / 4.0) * Eigen::Matrix4cd::Identity();
  return DensityMatrix2Q(m);
}

/// The full trigger-arm filter: QWP, then HWP, then partial polarizer along D.
inline optics::LocalFilter trigger_filter(const PrepSettings& s,
                                          const PlateRetardances& rets) {
  const Matrix2cd qwp =
      optics::waveplate_jones(optics::WavePlate{s.qwp_angle, rets.qwp});
  const Matrix2cd hwp =
      optics::waveplate_jones(optics::WavePlate{s.hwp_angle, rets.hwp});
  const optics::LocalFilter pol = optics::partial_polarizer_kraus(
      optics::PartialPolarizer(s.t_d, s.t_a), PureQubit{0.0, 0.0});
  return optics::compose({qwp, hwp, pol.mat});
}

/// Bob's conditional state and the success probability (trace before
/// normalization) for given resource, settings and retardances.
inline std::pair<DensityMatrix1Q, double> predict_rpq(
    const DensityMatrix2Q& resource, const PrepSettings& settings,
    const PlateRetardances& rets = {}) {
  const optics::LocalFilter filter = trigger_filter(settings, rets);
  const DensityMatrix2Q filtered = qstate::apply_alice(resource, filter.mat);
  const DensityMatrix1Q bob = qstate::partial_trace_A(filtered);
  const double p = bob.trace();
  if (p < 1e-15) {
    throw std::runtime_error(
        "predict_rpq: success probability below 1e-15, conditioning on a "
        "null event");
  }
  return {bob.normalized(), p};
}

namespace detail_rsp {

inline BlochVector bloch_of_ket(const Vector2cd& psi) {
  return qstate::bloch_from_state(qstate::DensityMatrix1Q::pure(psi));
}

}  // namespace detail_rsp

/// Closed-form settings for the ideal |phi+> resource and ideal retardances.
/// The mixedness maps to transmissions via (t_d - t_a)/(t_d + t_a) = 1 -
/// lambda with t_d fixed to 1 to maximize the count rate.
inline PrepSettings ideal_settings(const TargetState& target) {
  const DensityMatrix2Q bell = DensityMatrix2Q::bell_phi_plus();
  const DensityMatrix1Q wanted = target_density(target);

  PrepSettings best;
  if (target.lam >= 1.0 - 1e-15) {
    // Plates irrelevant; report canonical zero angles.
    best = PrepSettings{0.0, 0.0, 1.0, 1.0, 0.0, 0.0};
    auto [state, p] = predict_rpq(bell, best);
    best.predicted_fidelity = qstate::fidelity(wanted, state);
    best.success_probability = p;
    return best;
  }

  const double t_a = target.lam / (2.0 - target.lam);

  // The polarizer picks W|chi> where |chi> is the conjugate of the target's
  // pure part, so the plates must map |chi> onto |D>. The QWP brings |chi>
  // to a linear polarization, the HWP rotates that onto the diagonal.
  const Vector2cd chi = PureQubit{target.theta, target.phi}.ket().conjugate();
  const BlochVector r = detail_rsp::bloch_of_ket(chi);
  const double q0 = 0.5 * std::atan2(r.s1, r.s3);

  best.predicted_fidelity = -1.0;
  for (const double q : {q0, q0 + std::numbers::pi / 2.0}) {
    const Matrix2cd wq = optics::waveplate_jones(
        optics::WavePlate{q, std::numbers::pi / 2.0});
    const BlochVector v = detail_rsp::bloch_of_ket(wq * chi);
    const double h0 = 0.25 * std::atan2(v.s1, v.s3) + std::numbers::pi / 8.0;
    for (int k = 0; k < 4; ++k) {
      const double h = h0 + k * std::numbers::pi / 4.0;
      PrepSettings cand{q, h, 1.0, t_a, 0.0, 0.0};
      auto [state, p] = predict_rpq(bell, cand);
      cand.predicted_fidelity = qstate::fidelity(wanted, state);
      cand.success_probability = p;
      if (cand.predicted_fidelity > best.predicted_fidelity) best = cand;
    }
  }
  return best;
}

/// Thrown when the settings optimizer fails to converge; carries the best
/// settings found so far.
class OptimizationError : public std::runtime_error {
 public:
  OptimizationError(const std::string& msg, PrepSettings best)
      : std::runtime_error(msg), best_found(best) {}
  PrepSettings best_found;
};

/// Maximize fidelity(target, predict_rpq(resource, ...)) over the plate
/// angles and the transmission ratio. Multi-start (5 x 5 x 3 grid plus the
/// ideal-plate closed form) with simplex refinement; deterministic.
inline PrepSettings optimize_settings(const DensityMatrix2Q& resource,
                                      const PlateRetardances& rets,
                                      const TargetState& target) {
  const DensityMatrix1Q wanted = target_density(target);

  auto settings_of = [](const std::vector<double>& x) {
    const double s = std::sin(x[2]);
    return PrepSettings{x[0], x[1], 1.0, s * s, 0.0, 0.0};
  };
  auto objective = [&](const std::vector<double>& x) -> double {
    try {
      const auto [state, p] = predict_rpq(resource, settings_of(x), rets);
      (void)p;
      return 1.0 - qstate::fidelity(wanted, state);
    } catch (const std::runtime_error&) {
      return 1.0;  // null-event conditioning: worst objective
    }
  };
  auto ratio_param = [](double ratio) { return std::asin(std::sqrt(ratio)); };

  std::vector<std::vector<double>> starts;
  for (int iq = 0; iq < 5; ++iq) {
    for (int ih = 0; ih < 5; ++ih) {
      for (const double ratio : {0.1, 0.5, 0.9}) {
        starts.push_back({iq * std::numbers::pi / 10.0,
                          ih * std::numbers::pi / 10.0, ratio_param(ratio)});
      }
    }
  }
  {
    const PrepSettings guess = ideal_settings(target);
    starts.push_back({guess.qwp_angle, guess.hwp_angle,
                      ratio_param(guess.t_a / guess.t_d)});
  }

  detail::NelderMeadOptions opts;
  opts.tolerance = 1e-10;
  opts.max_evaluations = 4000;
  opts.initial_step = 0.15;

  std::vector<double> best_x;
  double best_f = 2.0;
  bool any_converged = false;
  for (const auto& x0 : starts) {
    const detail::NelderMeadResult r = detail::nelder_mead(objective, x0, opts);
    any_converged = any_converged || r.converged;
    if (r.fval < best_f) {  // strict: ties keep the earlier start
      best_f = r.fval;
      best_x = r.x;
    }
  }

  PrepSettings out = settings_of(best_x);
  const auto [state, p] = predict_rpq(resource, out, rets);
  out.predicted_fidelity = qstate::fidelity(wanted, state);
  out.success_probability = p;
  if (!any_converged) {
    throw OptimizationError("optimize_settings: no start converged", out);
  }
  return out;
}

/// Which trigger outcome Alice reported.
enum class TriggerOutcome { D, A };

/// A great circle of the Poincare sphere, given by its unit normal.
struct GreatCircle {
  double n1 = 0.0;
  double n2 = 0.0;
  double n3 = 1.0;  // default: the D/A - L/R equator

  static GreatCircle from_normal(double a, double b, double c) {
    const double len = std::sqrt(a * a + b * b + c * c);
    if (len < 1e-15) {
      throw std::invalid_argument("GreatCircle: zero normal");
    }
    return GreatCircle{a / len, b / len, c / len};
  }

  /// The fixed correction unitary n . sigma (a 180-degree Poincare rotation
  /// about the normal, taking every |psi_perp> on the circle to |psi>).
  Matrix2cd correction() const {
    return n1 * qstate::sigma_x() + n2 * qstate::sigma_y() +
           n3 * qstate::sigma_z();
  }
};

/// Apply the feedforward rule: identity on outcome D, the circle's fixed
/// correction unitary on outcome A. Only states on the declared circle are
/// correctable (the universal-NOT obstruction elsewhere).
inline DensityMatrix1Q feedforward_correct(const DensityMatrix1Q& state,
                                           TriggerOutcome outcome,
                                           const GreatCircle& circle) {
  const BlochVector b = qstate::bloch_from_state(state);
  const double off = std::abs(b.s1 * circle.n1 + b.s2 * circle.n2 +
                              b.s3 * circle.n3);
  if (off > 1e-9) {
    throw std::invalid_argument(
        "feedforward_correct: state off the declared great circle by " +
        std::to_string(off));
  }
  if (outcome == TriggerOutcome::D) return state;
  const Matrix2cd u = circle.correction();
  return DensityMatrix1Q(u * state.mat * u.adjoint());
}

/// Bob's state from a probabilistic filter mixture (with its overall success
/// probability). The output Bloch vector is the success-probability-weighted
/// convex combination of the single-filter outputs.
inline std::pair<DensityMatrix1Q, double> mixture_rsp(
    const DensityMatrix2Q& resource, const optics::FilterMixture& mix) {
  Eigen::Matrix2cd sum = Eigen::Matrix2cd::Zero();
  for (const auto& [p, m] : mix.terms) {
    const DensityMatrix2Q filtered = qstate::apply_alice(resource, m.mat);
    sum += p * qstate::partial_trace_A(filtered).mat;
  }
  const double total = sum.real().trace();
  if (total < 1e-15) {
    throw std::runtime_error("mixture_rsp: zero overall success probability");
  }
  return {DensityMatrix1Q(sum / total), total};
}

}  // namespace rspsim::rsp
