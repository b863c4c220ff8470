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

#ifndef COP_LIE_HPP
#define COP_LIE_HPP

#include <utility>
#include <vector>

#include "cop/dual.hpp"
#include "cop/errors.hpp"
#include "cop/types.hpp"

namespace cop {

/// Highest Lie-derivative order supported by lie_stack.
inline constexpr int kMaxLieOrder = 4;

/// Lie derivatives L^0 h .. L^n h of an output map along a vector field at
/// one point, together with their state gradients (n_h x n_x each).
struct LieStack {
  std::vector<VecX> values;
  std::vector<MatX> gradients;

  int order() const { return static_cast<int>(values.size()) - 1; }
};

namespace detail {

/// L^I h evaluated at x for any scalar type S.
///
/// L^I h(x) = d/de L^{I-1} h(x + e f(x)) at e = 0, obtained by seeding one
/// more dual layer with the field value.
template <int I, typename S, typename Field, typename Output>
VecXT<S> lie_value(const Field& f, const Output& h, const VecXT<S>& x) {
  if constexpr (I == 0) {
    return h(x);
  } else {
    using D = Dual<S>;
    const VecXT<S> fx = f(x);
    VecXT<D> xd(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) xd(k) = D(x(k), fx(k));
    const VecXT<D> inner = lie_value<I - 1, D>(f, h, xd);
    VecXT<S> out(inner.size());
    for (Eigen::Index k = 0; k < inner.size(); ++k) out(k) = inner(k).d;
    return out;
  }
}

template <int I, typename Field, typename Output>
void fill_level(const Field& f, const Output& h, const VecX& x, LieStack& stack) {
  stack.values.push_back(lie_value<I, double>(f, h, x));
  const Eigen::Index n_x = x.size();
  MatX grad(stack.values.back().size(), n_x);
  using D = Dual<double>;
  VecXT<D> xd(n_x);
  for (Eigen::Index j = 0; j < n_x; ++j) {
    for (Eigen::Index k = 0; k < n_x; ++k) xd(k) = D(x(k), k == j ? 1.0 : 0.0);
    const VecXT<D> col = lie_value<I, D>(f, h, xd);
    for (Eigen::Index r = 0; r < col.size(); ++r) grad(r, j) = col(r).d;
  }
  stack.gradients.push_back(std::move(grad));
}

template <typename Field, typename Output, int... Is>
void fill_stack(const Field& f, const Output& h, const VecX& x, int order, LieStack& stack,
                std::integer_sequence<int, Is...>) {
  ((Is <= order ? fill_level<Is>(f, h, x, stack) : void()), ...);
}

}  // namespace detail

/// Computes L^0 h .. L^order h and their gradients at x.
///
/// `f` and `h` must be generic callables accepting Eigen column vectors of
/// any scalar type (double and nested Dual); inputs are captured by the
/// callables and held constant. Derivatives are exact (forward-mode AD).
template <typename Field, typename Output>
LieStack lie_stack(const Field& f, const Output& h, const VecX& x, int order) {
  if (order < 0 || order > kMaxLieOrder) {
    throw DomainError("Lie derivative order must lie in [0, " + std::to_string(kMaxLieOrder) + "]");
  }
  LieStack stack;
  detail::fill_stack(f, h, x, order, stack, std::make_integer_sequence<int, kMaxLieOrder + 1>{});
  for (const auto& g : stack.gradients) {
    if (!g.allFinite()) throw NumericalError("non-finite Lie derivative gradient");
  }
  return stack;
}

/// K(dt) = sum_{i=0..n} dt^i / i! * grad L^i h.
MatX taylor_jacobian(const std::vector<MatX>& gradients, double dt, int n);

}  // namespace cop

#endif  // COP_LIE_HPP
