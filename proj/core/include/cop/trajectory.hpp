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

#ifndef COP_TRAJECTORY_HPP
#define COP_TRAJECTORY_HPP

#include <span>
#include <vector>

#include "cop/controller.hpp"
#include "cop/types.hpp"

namespace cop {

/// A timed way-point: column k of `values` holds the k-th time derivative
/// of every trajectory dimension (rows).
struct Waypoint {
  double t = 0.0;
  MatX values;  ///< n_dim x n_jc

  int n_dim() const { return static_cast<int>(values.rows()); }
  int n_jc() const { return static_cast<int>(values.cols()); }
};

/// Piecewise Bezier curve of degree d = 2 n_jc - 1 over timed pieces.
class PiecewiseBezier {
 public:
  PiecewiseBezier() = default;
  /// control_points[i] is n_dim x (d + 1) for piece i over [times[i], times[i+1]].
  PiecewiseBezier(std::vector<double> times, std::vector<MatX> control_points, int n_jc);

  int n_pieces() const { return static_cast<int>(control_points_.size()); }
  int n_dim() const { return n_dim_; }
  int n_jc() const { return n_jc_; }
  int degree() const { return 2 * n_jc_ - 1; }
  double start_time() const { return times_.front(); }
  double end_time() const { return times_.back(); }
  const std::vector<double>& times() const { return times_; }
  const MatX& control_points(int piece) const { return control_points_.at(piece); }

  /// Derivative of the given order at t. Orders above the degree are zero.
  /// Throws DomainError when t lies outside [t_0, t_n].
  VecX evaluate(double t, int order = 0) const;
  /// Evaluation restricted to one piece (t may sit on either piece boundary).
  VecX evaluate_piece(int piece, double t, int order) const;
  int piece_index(double t) const;

  /// Reference for the tracking controller; requires n_dim == 4.
  ReferencePoint reference(double t) const;

 private:
  std::vector<double> times_;
  std::vector<MatX> control_points_;
  int n_dim_ = 0;
  int n_jc_ = 0;
};

/// Solves each piece's control points from the boundary values of its two
/// way-points (value, velocity, ... up to order n_jc - 1).
PiecewiseBezier solve_control_points(const std::vector<Waypoint>& waypoints);

/// de Casteljau evaluation of a Bezier curve with control points as columns.
VecX de_casteljau(const MatX& control_points, double s);

/// Maps the flat decision vector a onto a way-point sequence.
///
/// The head and tail way-points and the way-point times are fixed; the free
/// variables are the values of the interior way-points (all dimensions), and
/// optionally their higher derivatives. Non-free interior derivatives are
/// zero.
class WaypointLayout {
 public:
  WaypointLayout() = default;
  WaypointLayout(Waypoint head, Waypoint tail, int n_pieces, bool free_derivatives = false);

  int n_pieces() const { return n_pieces_; }
  int n_dim() const { return head_.n_dim(); }
  int n_jc() const { return head_.n_jc(); }
  bool free_derivatives() const { return free_derivatives_; }
  double duration() const { return tail_.t - head_.t; }
  const Waypoint& head() const { return head_; }
  const Waypoint& tail() const { return tail_; }
  void set_tail_values(const MatX& values);
  std::vector<double> waypoint_times() const;

  /// Number of free decision variables.
  int size() const;
  std::vector<Waypoint> unpack(std::span<const double> a) const;
  std::vector<Waypoint> unpack(const VecX& a) const { return unpack(std::span(a.data(), a.size())); }
  VecX pack(const std::vector<Waypoint>& waypoints) const;
  PiecewiseBezier build(const VecX& a) const { return solve_control_points(unpack(a)); }

  /// Linear interpolation between head and tail values for every interior way-point.
  VecX straight_line() const;

 private:
  int per_waypoint() const;

  Waypoint head_;
  Waypoint tail_;
  int n_pieces_ = 0;
  bool free_derivatives_ = false;
};

/// Box bounds of the feasible set for the decision vector.
struct FeasibleBox {
  VecX lower;
  VecX upper;

  bool contains(const VecX& a) const;
  VecX project(const VecX& a) const;
};

/// Box over the free way-point values: position rows take the workspace
/// bounds, yaw rows +-yaw_limit, derivative entries +-derivative_limit.
FeasibleBox make_feasible_box(const WaypointLayout& layout, const Vec3& workspace_min,
                              const Vec3& workspace_max, double yaw_limit,
                              double derivative_limit);

}  // namespace cop

#endif  // COP_TRAJECTORY_HPP
