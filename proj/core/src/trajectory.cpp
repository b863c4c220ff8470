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

#include "cop/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/LU>

#include "cop/errors.hpp"

namespace cop {

namespace {

constexpr double kTimeSlack = 1e-9;

double falling_factorial(int d, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= d - i;
  return out;
}

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

}  // namespace

VecX de_casteljau(const MatX& control_points, double s) {
  MatX work = control_points;
  const int n = static_cast<int>(work.cols());
  for (int level = 1; level < n; ++level) {
    for (int j = 0; j < n - level; ++j) {
      work.col(j) = (1.0 - s) * work.col(j) + s * work.col(j + 1);
    }
  }
  return work.col(0);
}

PiecewiseBezier::PiecewiseBezier(std::vector<double> times, std::vector<MatX> control_points,
                                 int n_jc)
    : times_(std::move(times)), control_points_(std::move(control_points)), n_jc_(n_jc) {
  if (n_jc_ < 1) throw DomainError("n_jc must be at least 1");
  if (control_points_.empty() || times_.size() != control_points_.size() + 1) {
    throw DomainError("piecewise Bezier needs n pieces and n + 1 times");
  }
  n_dim_ = static_cast<int>(control_points_.front().rows());
  for (const auto& cp : control_points_) {
    if (cp.rows() != n_dim_ || cp.cols() != 2 * n_jc_) {
      throw DomainError("control point block has the wrong shape for degree 2 n_jc - 1");
    }
  }
  for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
    if (!(times_[i + 1] > times_[i])) throw DomainError("piece times must be strictly increasing");
  }
}

int PiecewiseBezier::piece_index(double t) const {
  const double t0 = times_.front();
  const double tn = times_.back();
  const double slack = kTimeSlack * std::max(1.0, std::abs(tn));
  if (!(t >= t0 - slack && t <= tn + slack)) {
    throw DomainError("time " + std::to_string(t) + " outside trajectory span");
  }
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const int idx = static_cast<int>(it - times_.begin()) - 1;
  return std::clamp(idx, 0, n_pieces() - 1);
}

VecX PiecewiseBezier::evaluate_piece(int piece, double t, int order) const {
  if (order < 0) throw DomainError("derivative order must be non-negative");
  const int d = degree();
  if (order > d) return VecX::Zero(n_dim_);
  const double t0 = times_.at(piece);
  const double duration = times_.at(piece + 1) - t0;
  const double s = std::clamp((t - t0) / duration, 0.0, 1.0);

  MatX hodograph = control_points_[piece];
  for (int r = 1; r <= order; ++r) {
    const int cols = d - r + 1;
    MatX next(n_dim_, cols);
    for (int j = 0; j < cols; ++j) {
      next.col(j) = (d - r + 1) * (hodograph.col(j + 1) - hodograph.col(j));
    }
    hodograph = std::move(next);
  }
  return de_casteljau(hodograph, s) / std::pow(duration, order);
}

VecX PiecewiseBezier::evaluate(double t, int order) const {
  return evaluate_piece(piece_index(t), t, order);
}

ReferencePoint PiecewiseBezier::reference(double t) const {
  if (n_dim_ != 4) throw DomainError("controller reference needs a 4-dimensional trajectory");
  const int piece = piece_index(t);
  ReferencePoint ref;
  ref.position = evaluate_piece(piece, t, 0);
  ref.velocity = evaluate_piece(piece, t, 1);
  ref.acceleration = evaluate_piece(piece, t, 2);
  return ref;
}

PiecewiseBezier solve_control_points(const std::vector<Waypoint>& waypoints) {
  if (waypoints.size() < 2) throw DomainError("at least two way-points are required");
  const int n_dim = waypoints.front().n_dim();
  const int n_jc = waypoints.front().n_jc();
  if (n_dim < 1 || n_jc < 1) throw DomainError("way-points must have at least one row and column");
  for (const auto& wp : waypoints) {
    if (wp.n_dim() != n_dim || wp.n_jc() != n_jc) {
      throw DomainError("inconsistent way-point shapes");
    }
  }
  const int d = 2 * n_jc - 1;
  const int n_c = d + 1;

  // Rows 0..n_jc-1: derivative k at s = 0; rows n_jc..: derivative k at s = 1.
  MatX A = MatX::Zero(n_c, n_c);
  for (int k = 0; k < n_jc; ++k) {
    const double scale = falling_factorial(d, k);
    for (int j = 0; j <= k; ++j) {
      const double sign = ((k - j) % 2 == 0) ? 1.0 : -1.0;
      A(k, j) += scale * sign * binomial(k, j);
      A(n_jc + k, d - k + j) += scale * sign * binomial(k, j);
    }
  }
  Eigen::FullPivLU<MatX> lu(A);

  std::vector<double> times;
  std::vector<MatX> pieces;
  times.reserve(waypoints.size());
  for (const auto& wp : waypoints) times.push_back(wp.t);
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const double duration = waypoints[i + 1].t - waypoints[i].t;
    if (!(duration > 0.0)) {
      throw DomainError("way-point times must be strictly increasing (singular system)");
    }
    MatX rhs(n_c, n_dim);
    for (int k = 0; k < n_jc; ++k) {
      const double dt_k = std::pow(duration, k);
      rhs.row(k) = waypoints[i].values.col(k).transpose() * dt_k;
      rhs.row(n_jc + k) = waypoints[i + 1].values.col(k).transpose() * dt_k;
    }
    pieces.emplace_back(lu.solve(rhs).transpose());
  }
  return PiecewiseBezier(std::move(times), std::move(pieces), n_jc);
}

WaypointLayout::WaypointLayout(Waypoint head, Waypoint tail, int n_pieces, bool free_derivatives)
    : head_(std::move(head)), tail_(std::move(tail)), n_pieces_(n_pieces),
      free_derivatives_(free_derivatives) {
  if (n_pieces_ < 1) throw DomainError("at least one trajectory piece is required");
  if (head_.n_dim() != tail_.n_dim() || head_.n_jc() != tail_.n_jc()) {
    throw DomainError("head and tail way-points differ in shape");
  }
  if (!(tail_.t > head_.t)) throw DomainError("tail time must follow head time");
}

void WaypointLayout::set_tail_values(const MatX& values) {
  if (values.rows() != tail_.values.rows() || values.cols() != tail_.values.cols()) {
    throw DomainError("tail way-point shape mismatch");
  }
  tail_.values = values;
}

std::vector<double> WaypointLayout::waypoint_times() const {
  std::vector<double> times(n_pieces_ + 1);
  for (int i = 0; i <= n_pieces_; ++i) {
    times[i] = head_.t + duration() * static_cast<double>(i) / n_pieces_;
  }
  times.back() = tail_.t;
  return times;
}

int WaypointLayout::per_waypoint() const { return n_dim() * (free_derivatives_ ? n_jc() : 1); }

int WaypointLayout::size() const { return (n_pieces_ - 1) * per_waypoint(); }

std::vector<Waypoint> WaypointLayout::unpack(std::span<const double> a) const {
  if (static_cast<int>(a.size()) != size()) {
    throw DomainError("decision vector has " + std::to_string(a.size()) + " entries, expected " +
                      std::to_string(size()));
  }
  const auto times = waypoint_times();
  std::vector<Waypoint> out;
  out.reserve(n_pieces_ + 1);
  out.push_back(head_);
  const int orders = free_derivatives_ ? n_jc() : 1;
  std::size_t idx = 0;
  for (int i = 1; i < n_pieces_; ++i) {
    Waypoint wp{times[i], MatX::Zero(n_dim(), n_jc())};
    for (int dim = 0; dim < n_dim(); ++dim) {
      for (int k = 0; k < orders; ++k) wp.values(dim, k) = a[idx++];
    }
    out.push_back(std::move(wp));
  }
  out.push_back(tail_);
  return out;
}

VecX WaypointLayout::pack(const std::vector<Waypoint>& waypoints) const {
  if (static_cast<int>(waypoints.size()) != n_pieces_ + 1) {
    throw DomainError("way-point count does not match the layout");
  }
  const int orders = free_derivatives_ ? n_jc() : 1;
  VecX a(size());
  int idx = 0;
  for (int i = 1; i < n_pieces_; ++i) {
    const auto& wp = waypoints[i];
    if (wp.n_dim() != n_dim() || wp.n_jc() != n_jc()) throw DomainError("way-point shape mismatch");
    for (int dim = 0; dim < n_dim(); ++dim) {
      for (int k = 0; k < orders; ++k) a(idx++) = wp.values(dim, k);
    }
  }
  return a;
}

VecX WaypointLayout::straight_line() const {
  std::vector<Waypoint> wps;
  const auto times = waypoint_times();
  wps.push_back(head_);
  for (int i = 1; i < n_pieces_; ++i) {
    const double s = static_cast<double>(i) / n_pieces_;
    Waypoint wp{times[i], MatX::Zero(n_dim(), n_jc())};
    wp.values.col(0) = (1.0 - s) * head_.values.col(0) + s * tail_.values.col(0);
    wps.push_back(std::move(wp));
  }
  wps.push_back(tail_);
  return pack(wps);
}

bool FeasibleBox::contains(const VecX& a) const {
  return a.size() == lower.size() && (a.array() >= lower.array()).all() &&
         (a.array() <= upper.array()).all();
}

VecX FeasibleBox::project(const VecX& a) const { return a.cwiseMax(lower).cwiseMin(upper); }

FeasibleBox make_feasible_box(const WaypointLayout& layout, const Vec3& workspace_min,
                              const Vec3& workspace_max, double yaw_limit,
                              double derivative_limit) {
  FeasibleBox box{VecX(layout.size()), VecX(layout.size())};
  const int orders = layout.free_derivatives() ? layout.n_jc() : 1;
  int idx = 0;
  for (int i = 1; i < layout.n_pieces(); ++i) {
    for (int dim = 0; dim < layout.n_dim(); ++dim) {
      for (int k = 0; k < orders; ++k, ++idx) {
        if (k > 0) {
          box.lower(idx) = -derivative_limit;
          box.upper(idx) = derivative_limit;
        } else if (dim < 3) {
          box.lower(idx) = workspace_min(dim);
          box.upper(idx) = workspace_max(dim);
        } else {
          box.lower(idx) = -yaw_limit;
          box.upper(idx) = yaw_limit;
        }
      }
    }
  }
  return box;
}

}  // namespace cop
