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

#ifndef COP_DUAL_HPP
#define COP_DUAL_HPP

#include <cmath>
#include <concepts>
#include <limits>

#include <Eigen/Core>

namespace cop {

/// Forward-mode dual number carrying a single directional derivative.
///
/// Dual numbers nest: Dual<Dual<double>> carries mixed second derivatives,
/// which is what the Lie-derivative recursion relies on. All arithmetic is
/// exact in the sense of automatic differentiation; there is no step size.
template <typename T>
struct Dual {
  T v{};
  T d{};

  Dual() = default;
  Dual(const T& value, const T& deriv) : v(value), d(deriv) {}
  template <typename S>
    requires std::constructible_from<T, S>
  Dual(const S& value) : v(value), d(0) {}  // NOLINT(google-explicit-constructor)

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { *this = *this * o; return *this; }
  Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }

  friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
  friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
  friend Dual operator+(const Dual& a) { return a; }
  friend Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
  friend Dual operator/(const Dual& a, const Dual& b) {
    const T inv = T(1) / b.v;
    return {a.v * inv, (a.d - a.v * inv * b.d) * inv};
  }

  friend Dual sqrt(const Dual& a) {
    using std::sqrt;
    const T s = sqrt(a.v);
    return {s, a.d / (T(2) * s)};
  }
  friend Dual abs(const Dual& a) { return a.v < T(0) ? -a : a; }

  friend bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
  friend bool operator<=(const Dual& a, const Dual& b) { return a.v <= b.v; }
  friend bool operator>=(const Dual& a, const Dual& b) { return a.v >= b.v; }
  friend bool operator==(const Dual& a, const Dual& b) { return a.v == b.v && a.d == b.d; }
};

/// Strips every derivative layer.
inline double primal(double x) { return x; }
template <typename T>
double primal(const Dual<T>& x) {
  return primal(x.v);
}

}  // namespace cop

namespace Eigen {

template <typename T>
struct NumTraits<cop::Dual<T>> : GenericNumTraits<cop::Dual<T>> {
  using Real = cop::Dual<T>;
  using NonInteger = cop::Dual<T>;
  using Nested = cop::Dual<T>;
  using Literal = cop::Dual<T>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2 * NumTraits<T>::ReadCost,
    AddCost = 2 * NumTraits<T>::AddCost,
    MulCost = 3 * NumTraits<T>::MulCost
  };
  static inline Real epsilon() { return Real(std::numeric_limits<double>::epsilon()); }
  static inline Real dummy_precision() { return Real(1e-12); }
  static inline Real highest() { return Real(std::numeric_limits<double>::max()); }
  static inline Real lowest() { return Real(std::numeric_limits<double>::lowest()); }
  static inline int digits10() { return std::numeric_limits<double>::digits10; }
};

}  // namespace Eigen

#endif  // COP_DUAL_HPP
