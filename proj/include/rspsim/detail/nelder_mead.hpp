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

#include <algorithm>
#include <cstddef>
#include <functional>
#include <vector>

// Derivative-free simplex minimizer with restarts, used by the settings
// optimizer and the tomography likelihood fit.

namespace rspsim::detail {

struct NelderMeadResult {
  std::vector<double> x;
  double fval = 0.0;
  long evaluations = 0;
  bool converged = false;
};

struct NelderMeadOptions {
  double tolerance = 1e-10;      // convergence: spread of simplex f values
  long max_evaluations = 100000;
  double initial_step = 0.1;
  int restarts = 3;              // re-seed the simplex around the best point
};

inline NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, NelderMeadOptions opts = {}) {
  const std::size_t n = x0.size();
  NelderMeadResult result;
  result.x = x0;
  result.fval = f(x0);
  result.evaluations = 1;

  double step = opts.initial_step;
  for (int restart = 0; restart <= opts.restarts; ++restart) {
    // Simplex around the current best point.
    std::vector<std::vector<double>> pts(n + 1, result.x);
    std::vector<double> fv(n + 1);
    fv[0] = result.fval;
    for (std::size_t i = 0; i < n; ++i) {
      pts[i + 1][i] += step;
      fv[i + 1] = f(pts[i + 1]);
      ++result.evaluations;
    }

    auto order = [&] {
      std::vector<std::size_t> idx(n + 1);
      for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
      std::sort(idx.begin(), idx.end(),
                [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
      std::vector<std::vector<double>> p2(n + 1);
      std::vector<double> f2(n + 1);
      for (std::size_t i = 0; i <= n; ++i) {
        p2[i] = pts[idx[i]];
        f2[i] = fv[idx[i]];
      }
      pts.swap(p2);
      fv.swap(f2);
    };
    order();

    bool done = false;
    while (result.evaluations < opts.max_evaluations) {
      if (fv[n] - fv[0] < opts.tolerance) {
        done = true;
        break;
      }
      std::vector<double> centroid(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / n;

      auto along = [&](double coeff) {
        std::vector<double> p(n);
        for (std::size_t j = 0; j < n; ++j)
          p[j] = centroid[j] + coeff * (pts[n][j] - centroid[j]);
        return p;
      };

      const std::vector<double> refl = along(-1.0);
      const double f_refl = f(refl);
      ++result.evaluations;
      if (f_refl < fv[0]) {
        const std::vector<double> exp_pt = along(-2.0);
        const double f_exp = f(exp_pt);
        ++result.evaluations;
        pts[n] = f_exp < f_refl ? exp_pt : refl;
        fv[n] = std::min(f_exp, f_refl);
      } else if (f_refl < fv[n - 1]) {
        pts[n] = refl;
        fv[n] = f_refl;
      } else {
        const std::vector<double> con =
            along(f_refl < fv[n] ? -0.5 : 0.5);
        const double f_con = f(con);
        ++result.evaluations;
        if (f_con < std::min(f_refl, fv[n])) {
          pts[n] = con;
          fv[n] = f_con;
        } else {
          // Shrink toward the best vertex.
          for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j)
              pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
            fv[i] = f(pts[i]);
            ++result.evaluations;
          }
        }
      }
      order();
    }

    if (fv[0] < result.fval) {
      result.fval = fv[0];
      result.x = pts[0];
    }
    result.converged = done;
    if (done && restart > 0) break;  // stable across a restart
    step *= 0.25;
  }
  return result;
}

}  // namespace rspsim::detail
