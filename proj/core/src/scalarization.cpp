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

#include "cop/scalarization.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cop/errors.hpp"

namespace cop {

namespace {

void validate_weights(const VecX& w, int k) {
  if (w.size() != k) throw DomainError("weight vector length must match the objective count");
  if (!(w.array() >= 0.0).all()) throw DomainError("weights must be non-negative");
  if (!(std::abs(w.sum() - 1.0) <= 1e-9)) throw DomainError("weights must sum to one");
}

}  // namespace

bool ParetoAnchors::degenerate(int i) const { return !(std::abs(nadir(i) - utopia(i)) > 0.0); }

bool ParetoAnchors::any_degenerate() const {
  for (int i = 0; i < size(); ++i) {
    if (degenerate(i)) return true;
  }
  return false;
}

ParetoAnchors compute_anchors_unchecked(const MatX& cost_matrix) {
  if (cost_matrix.rows() != cost_matrix.cols() || cost_matrix.rows() < 1) {
    throw DomainError("cost matrix must be square and non-empty");
  }
  ParetoAnchors a;
  a.utopia = cost_matrix.diagonal();
  a.nadir = cost_matrix.colwise().maxCoeff().transpose();
  return a;
}

ParetoAnchors compute_anchors(const MatX& cost_matrix) {
  ParetoAnchors a = compute_anchors_unchecked(cost_matrix);
  if (a.size() > 1) {
    for (int i = 0; i < a.size(); ++i) {
      if (a.degenerate(i)) {
        throw DegenerateRangeError("objective " + std::to_string(i) +
                                   " has nadir equal to utopia and cannot be normalized");
      }
    }
  }
  return a;
}

double tchebycheff(const ObjectiveVector& F, const ParetoAnchors& anchors, const VecX& weights,
                   double rho) {
  const int k = anchors.size();
  if (F.size() != k) throw DomainError("objective vector length must match the anchors");
  validate_weights(weights, k);
  if (!(rho >= 0.0)) throw DomainError("rho must be non-negative");
  if (!F.allFinite()) return std::numeric_limits<double>::infinity();

  double worst = 0.0;
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    const double gap = std::abs(F(i) - anchors.utopia(i));
    sum += gap;
    if (weights(i) == 0.0) continue;
    if (anchors.degenerate(i)) {
      throw DegenerateRangeError("objective " + std::to_string(i) +
                                 " has a degenerate range but a positive weight");
    }
    const double lambda = weights(i) / std::abs(anchors.nadir(i) - anchors.utopia(i));
    worst = std::max(worst, lambda * gap);
  }
  return worst + rho * sum;
}

double tchebycheff_normalized(const ObjectiveVector& F, const ParetoAnchors& anchors,
                              const VecX& weights, double rho) {
  const int k = anchors.size();
  if (F.size() != k) throw DomainError("objective vector length must match the anchors");
  validate_weights(weights, k);
  if (!(rho >= 0.0)) throw DomainError("rho must be non-negative");
  if (!F.allFinite()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    if (anchors.degenerate(i)) {
      if (weights(i) == 0.0) continue;
      throw DegenerateRangeError("objective " + std::to_string(i) +
                                 " has a degenerate range but a positive weight");
    }
    const double gap = std::abs(F(i) - anchors.utopia(i)) /
                       std::abs(anchors.nadir(i) - anchors.utopia(i));
    sum += gap;
    worst = std::max(worst, weights(i) * gap);
  }
  return worst + rho * sum;
}

double tchebycheff(const ObjectiveVector& F, const ParetoAnchors& anchors, const VecX& weights,
                   double rho, Augmentation augmentation) {
  return augmentation == Augmentation::kRaw ? tchebycheff(F, anchors, weights, rho)
                                            : tchebycheff_normalized(F, anchors, weights, rho);
}

double linear_scalarization(const ObjectiveVector& F, const ParetoAnchors& anchors,
                            const VecX& weights) {
  const int k = anchors.size();
  validate_weights(weights, k);
  double out = 0.0;
  for (int i = 0; i < k; ++i) {
    if (weights(i) == 0.0) continue;
    out += weights(i) * (F(i) - anchors.utopia(i)) / std::abs(anchors.nadir(i) - anchors.utopia(i));
  }
  return out;
}

}  // namespace cop
