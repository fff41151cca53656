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
#include <numbers>
#include <vector>

#include "rspsim/detail/seeding.hpp"
#include "rspsim/rsp.hpp"
#include "rspsim/tomo.hpp"

/// \file experiment.hpp
/// The end-to-end verification loop: tomograph the entangled resource,
/// optimize trigger settings against the reconstruction, simulate and
/// reconstruct the remotely prepared qubit, and report the fidelity between
/// the expected and the reconstructed state.

namespace rspsim::tomo {

struct ExperimentResult {
  rsp::TargetState target;
  rsp::PrepSettings settings;
  qstate::DensityMatrix1Q expected;  // prediction from the reconstructed resource
  TomographyResult1Q reconstruction;
  double fidelity = 0.0;             // fidelity(expected, reconstruction)
};

/// One target through the full loop. The resource is tomographed per call;
/// use run_experiment_series to share one resource reconstruction across a
/// target list, as a real run would.
inline ExperimentResult rsp_experiment(const rsp::ResourceSpec& resource_spec,
                                       const rsp::TargetState& target,
                                       double n0, std::uint64_t seed,
                                       const rsp::PlateRetardances& rets = {}) {
  const qstate::DensityMatrix2Q truth = rsp::make_resource(resource_spec);
  const CountRecord counts2 = simulate_counts(
      truth, projector_set_2q(), n0, detail::mix_seed(seed, 0));
  const TomographyResult2Q resource_hat =
      mle_reconstruct(counts2, projector_set_2q());

  ExperimentResult out;
  out.target = target;
  out.settings = rsp::optimize_settings(resource_hat.rho_hat, rets, target);
  out.expected =
      rsp::predict_rpq(resource_hat.rho_hat, out.settings, rets).first;

  const qstate::DensityMatrix1Q actual =
      rsp::predict_rpq(truth, out.settings, rets).first;
  const CountRecord counts1 = simulate_counts(
      actual, projector_set_1q(), n0, detail::mix_seed(seed, 1));
  out.reconstruction = mle_reconstruct(counts1, projector_set_1q());
  out.fidelity = qstate::fidelity(out.expected, out.reconstruction.rho_hat);
  return out;
}

/// The full loop over a target list with a single resource tomography.
inline std::vector<ExperimentResult> run_experiment_series(
    const rsp::ResourceSpec& resource_spec,
    const std::vector<rsp::TargetState>& targets, double n0,
    std::uint64_t seed, const rsp::PlateRetardances& rets = {}) {
  const qstate::DensityMatrix2Q truth = rsp::make_resource(resource_spec);
  const CountRecord counts2 = simulate_counts(
      truth, projector_set_2q(), n0, detail::mix_seed(seed, 0));
  const TomographyResult2Q resource_hat =
      mle_reconstruct(counts2, projector_set_2q());

  std::vector<ExperimentResult> results;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    ExperimentResult r;
    r.target = targets[i];
    r.settings = rsp::optimize_settings(resource_hat.rho_hat, rets, targets[i]);
    r.expected = rsp::predict_rpq(resource_hat.rho_hat, r.settings, rets).first;
    const qstate::DensityMatrix1Q actual =
        rsp::predict_rpq(truth, r.settings, rets).first;
    const CountRecord counts1 = simulate_counts(
        actual, projector_set_1q(), n0, detail::mix_seed(seed, 1 + i));
    r.reconstruction = mle_reconstruct(counts1, projector_set_1q());
    r.fidelity = qstate::fidelity(r.expected, r.reconstruction.rho_hat);
    results.push_back(r);
  }
  return results;
}

/// Six states of decreasing Bloch length along each of the three Poincare
/// axes (18 targets total), the geometry of the published state grid.
inline std::vector<rsp::TargetState> axis_sweep_targets() {
  // (theta, phi) pointing along Bloch axes 1 (D), 2 (R) and 3 (H).
  const double axes[3][2] = {{0.0, 0.0},
                             {std::numbers::pi / 4.0, -std::numbers::pi / 2.0},
                             {std::numbers::pi / 4.0, 0.0}};
  std::vector<rsp::TargetState> targets;
  for (const auto& axis : axes) {
    for (int k = 0; k < 6; ++k) {
      targets.push_back(rsp::TargetState{axis[0], axis[1], k / 5.0});
    }
  }
  return targets;
}

}  // namespace rspsim::tomo
