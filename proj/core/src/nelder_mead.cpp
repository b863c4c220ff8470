/*
 Copyright 2026 The COP Planner Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "cop/optimizer.hpp"
#include "optimizer_common.hpp"

namespace cop::detail {

namespace {

double penalized(const Sample& s, double penalty) {
  if (!std::isfinite(s.f) || !std::isfinite(s.violation)) {
    return std::numeric_limits<double>::infinity();
  }
  double sq = 0.0;
  for (Eigen::Index i = 0; i < s.c.size(); ++i) {
    const double v = std::max(0.0, -s.c[i]);
    sq += v * v;
  }
  return s.f + penalty * sq;
}

}  // namespace

OptRun nelder_mead(const Evaluator& evaluate, const VecX& a0, const FeasibleBox& box,
                   const OptimizerBudget& budget) {
  const Eigen::Index n = a0.size();
  Recorder rec(evaluate, budget, n);
  const VecX start = box.project(a0);

  std::vector<Sample> pts;
  std::vector<double> phi;
  auto add = [&](const VecX& a) {
    Sample s = rec.eval(box.project(a));
    const double p = penalized(s, budget.penalty);
    return std::make_pair(std::move(s), p);
  };
  {
    auto [s, p] = add(start);
    pts.push_back(std::move(s));
    phi.push_back(p);
  }
  if (n == 0) return rec.finish("simplex-size", 0);
  const MatX init = initial_simplex(start, box, budget.rho_begin);
  for (Eigen::Index j = 1; j <= n; ++j) {
    if (!rec.stop_reason().empty()) return rec.finish(rec.stop_reason(), 0);
    auto [s, p] = add(init.col(j));
    pts.push_back(std::move(s));
    phi.push_back(p);
  }

  std::vector<std::size_t> order(pts.size());
  int iterations = 0;
  std::string reason;
  while (true) {
    reason = rec.stop_reason();
    if (!reason.empty()) break;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return phi[a] < phi[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];

    double diameter = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      diameter = std::max(diameter, (pts[i].a - pts[best].a).norm());
    }
    if (diameter < budget.rho_end) {
      reason = rec.converged_reason("simplex-size");
      break;
    }
    ++iterations;

    VecX centroid = VecX::Zero(n);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i != worst) centroid += pts[i].a;
    }
    centroid /= static_cast<double>(n);
    const VecX dir = centroid - pts[worst].a;

    auto [sr, pr] = add(centroid + dir);
    if (pr < phi[best]) {
      if (!rec.stop_reason().empty()) {
        pts[worst] = std::move(sr);
        phi[worst] = pr;
        continue;
      }
      auto [se, pe] = add(centroid + 2.0 * dir);
      if (pe < pr) {
        pts[worst] = std::move(se);
        phi[worst] = pe;
      } else {
        pts[worst] = std::move(sr);
        phi[worst] = pr;
      }
      continue;
    }
    if (pr < phi[second]) {
      pts[worst] = std::move(sr);
      phi[worst] = pr;
      continue;
    }
    if (!rec.stop_reason().empty()) continue;
    const bool outside = pr < phi[worst];
    auto [sc, pc] = add(outside ? VecX(centroid + 0.5 * dir) : VecX(centroid - 0.5 * dir));
    if (pc < std::min(pr, phi[worst])) {
      pts[worst] = std::move(sc);
      phi[worst] = pc;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i == best || !rec.stop_reason().empty()) continue;
      auto [ss, ps] = add(pts[best].a + 0.5 * (pts[i].a - pts[best].a));
      pts[i] = std::move(ss);
      phi[i] = ps;
    }
  }
  return rec.finish(reason, iterations);
}

}  // namespace cop::detail
