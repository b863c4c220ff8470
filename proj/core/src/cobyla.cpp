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
#include <vector>

#include <Eigen/LU>

#include "cop/errors.hpp"
#include "cop/optimizer.hpp"
#include "optimizer_common.hpp"

namespace cop {

namespace detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Region {
  const VecX& c;
  const MatX& A;
  const VecX& lo;
  const VecX& hi;
  double radius;
};

VecX project_ball(const VecX& x, double radius) {
  const double r = x.norm();
  return r > radius ? VecX(x * (radius / r)) : x;
}

VecX project_box(const VecX& x, const VecX& lo, const VecX& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

VecX project_halfspace(const VecX& x, double c, const VecX& a) {
  const double a2 = a.squaredNorm();
  const double s = c + a.dot(x);
  if (s >= 0.0 || a2 == 0.0) return x;
  return x - (s / a2) * a;
}

/// Dykstra's alternating projection onto ball, box and every half-space.
VecX project_region(const VecX& z, const Region& r) {
  const Eigen::Index m = r.c.size();
  const std::size_t sets = static_cast<std::size_t>(2 + m);
  std::vector<VecX> incr(sets, VecX::Zero(z.size()));
  VecX x = z;
  const double tol = 1e-13 * std::max(r.radius, 1e-300);
  for (int it = 0; it < 5000; ++it) {
    const VecX before = x;
    for (std::size_t k = 0; k < sets; ++k) {
      const VecX y = x + incr[k];
      VecX p;
      if (k == 0) {
        p = project_ball(y, r.radius);
      } else if (k == 1) {
        p = project_box(y, r.lo, r.hi);
      } else {
        const auto i = static_cast<Eigen::Index>(k - 2);
        p = project_halfspace(y, r.c[i], r.A.col(i));
      }
      incr[k] = y - p;
      x = p;
    }
    if ((x - before).norm() <= tol) break;
  }
  return x;
}

double linear_violation(const VecX& c, const MatX& A, const VecX& d) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) v = std::max(v, -(c[i] + A.col(i).dot(d)));
  return v;
}

}  // namespace

VecX trust_region_step(const VecX& g, const VecX& c, const MatX& A, const VecX& lo, const VecX& hi,
                       double radius) {
  const Region region{c, A, lo, hi, radius};
  const VecX zero = VecX::Zero(g.size());
  const VecX restore = project_region(zero, region);
  const double scale = 1.0 + (c.size() > 0 ? c.cwiseAbs().maxCoeff() : 0.0);
  const bool consistent = restore.norm() <= radius * (1.0 + 1e-9) &&
                          linear_violation(c, A, restore) <= 1e-10 * scale &&
                          (restore.array() >= lo.array() - 1e-12).all() &&
                          (restore.array() <= hi.array() + 1e-12).all();
  if (consistent) {
    const double gn = g.norm();
    if (gn == 0.0) return restore;
    // The projection of a far point along -g approximates the minimizer of
    // the linear model over the region.
    return project_region(-(1e3 * radius / gn) * g, region);
  }
  // Linearized constraints unattainable: move against the worst one.
  Eigen::Index worst = 0;
  (-c).maxCoeff(&worst);
  const VecX a = A.col(worst);
  const double an = a.norm();
  if (an == 0.0) return zero;
  const Region box_ball{VecX(), MatX(), lo, hi, radius};
  return project_region((1e3 * radius / an) * a, box_ball);
}

MatX initial_simplex(const VecX& a0, const FeasibleBox& box, double rho) {
  const Eigen::Index n = a0.size();
  MatX pts(n, n + 1);
  pts.col(0) = a0;
  for (Eigen::Index j = 0; j < n; ++j) {
    VecX p = a0;
    const double up = box.upper[j] - a0[j];
    const double down = a0[j] - box.lower[j];
    if (up >= rho) {
      p[j] += rho;
    } else if (down >= rho) {
      p[j] -= rho;
    } else {
      p[j] += up >= down ? up : -down;
    }
    pts.col(j + 1) = p;
  }
  return pts;
}

}  // namespace detail

namespace {

using detail::Sample;

struct Model {
  std::vector<std::size_t> others;
  MatX D;
  MatX Dinv;
  VecX g;
  MatX A;
  VecX dist;
  VecX sigma;
  bool invertible = false;
};

double merit(const Sample& s, double mu) {
  if (!std::isfinite(s.violation) || !std::isfinite(s.f)) return std::numeric_limits<double>::infinity();
  return s.f + mu * s.violation;
}

std::size_t best_vertex(const std::vector<Sample>& pts, double mu) {
  std::size_t b = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double mi = merit(pts[i], mu);
    const double mb = merit(pts[b], mu);
    if (mi < mb || (mi == mb && pts[i].violation < pts[b].violation)) b = i;
  }
  return b;
}

/// Values used for the linear models. Failed evaluations are replaced by a
/// pessimistic surrogate so the model stays finite.
void model_values(const std::vector<Sample>& pts, Eigen::Index m, VecX& f, MatX& c) {
  const auto np = static_cast<Eigen::Index>(pts.size());
  f.resize(np);
  c.resize(m, np);
  double fmax = -std::numeric_limits<double>::infinity();
  double fmin = std::numeric_limits<double>::infinity();
  VecX cmin = VecX::Constant(m, std::numeric_limits<double>::infinity());
  for (const auto& s : pts) {
    if (std::isfinite(s.f)) {
      fmax = std::max(fmax, s.f);
      fmin = std::min(fmin, s.f);
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      if (std::isfinite(s.c[i])) cmin[i] = std::min(cmin[i], s.c[i]);
    }
  }
  if (!std::isfinite(fmax)) fmax = fmin = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!std::isfinite(cmin[i])) cmin[i] = 0.0;
  }
  const double fcap = fmax + 10.0 * (fmax - fmin + 1.0);
  for (Eigen::Index k = 0; k < np; ++k) {
    const Sample& s = pts[static_cast<std::size_t>(k)];
    f[k] = std::isfinite(s.f) ? s.f : fcap;
    for (Eigen::Index i = 0; i < m; ++i) {
      c(i, k) = std::isfinite(s.c[i]) ? s.c[i] : cmin[i] - 1.0;
    }
  }
}

Model build_model(const std::vector<Sample>& pts, std::size_t b, Eigen::Index m) {
  const Eigen::Index n = pts[b].a.size();
  Model md;
  md.D.resize(n, n);
  VecX f;
  MatX c;
  model_values(pts, m, f, c);
  VecX df(n);
  MatX dc(n, m);
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i == b) continue;
    md.others.push_back(i);
    md.D.col(col) = pts[i].a - pts[b].a;
    df[col] = f[static_cast<Eigen::Index>(i)] - f[static_cast<Eigen::Index>(b)];
    dc.row(col) = (c.col(static_cast<Eigen::Index>(i)) - c.col(static_cast<Eigen::Index>(b))).transpose();
    ++col;
  }
  Eigen::FullPivLU<MatX> lu(md.D);
  md.invertible = lu.isInvertible();
  if (!md.invertible) return md;
  md.Dinv = lu.inverse();
  // D^T g = df, so g = D^{-T} df; likewise for every constraint.
  md.g = md.Dinv.transpose() * df;
  md.A = md.Dinv.transpose() * dc;
  md.dist.resize(n);
  md.sigma.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    md.dist[j] = md.D.col(j).norm();
    md.sigma[j] = 1.0 / md.Dinv.row(j).norm();
  }
  return md;
}

bool geometry_ok(const Model& md, double rho) {
  return (md.dist.array() <= 2.1 * rho).all() && (md.sigma.array() >= 0.25 * rho).all();
}

OptRun cobyla(const Evaluator& evaluate, const VecX& a0, const FeasibleBox& box,
              const OptimizerBudget& budget) {
  const Eigen::Index n = a0.size();
  detail::Recorder rec(evaluate, budget, n);
  const VecX start = box.project(a0);

  std::vector<Sample> pts;
  pts.push_back(rec.eval(start));
  const Eigen::Index m = pts[0].c.size();
  auto checked_eval = [&](const VecX& a) {
    Sample s = rec.eval(box.project(a));
    if (s.c.size() != m) throw DomainError("minimize: constraint count changed between evaluations");
    return s;
  };
  if (n == 0) return rec.finish("trust-radius", 0);

  double rho = budget.rho_begin;
  const MatX init = detail::initial_simplex(start, box, rho);
  for (Eigen::Index j = 1; j <= n; ++j) {
    if (!rec.stop_reason().empty()) return rec.finish(rec.stop_reason(), 0);
    pts.push_back(checked_eval(init.col(j)));
  }

  double mu = 0.0;
  int iterations = 0;
  bool need_geometry = false;
  std::string reason;

  auto reduce_rho = [&]() {
    if (rho <= budget.rho_end) return false;
    rho *= 0.5;
    if (rho <= 1.5 * budget.rho_end) rho = budget.rho_end;
    return true;
  };

  while (true) {
    reason = rec.stop_reason();
    if (!reason.empty()) break;
    ++iterations;

    std::size_t b = best_vertex(pts, mu);
    Model md = build_model(pts, b, m);
    if (!md.invertible) {
      // Degenerate simplex: rebuild around the best point.
      const MatX fresh = detail::initial_simplex(pts[b].a, box, rho);
      std::vector<Sample> rebuilt{pts[b]};
      for (Eigen::Index j = 1; j <= n && rec.stop_reason().empty(); ++j) {
        rebuilt.push_back(checked_eval(fresh.col(j)));
      }
      if (static_cast<Eigen::Index>(rebuilt.size()) != n + 1) continue;
      pts = std::move(rebuilt);
      continue;
    }
    const bool good = geometry_ok(md, rho);
    const Sample& xb = pts[b];
    const VecX cb = [&] {
      VecX f;
      MatX c;
      model_values(pts, m, f, c);
      return VecX(c.col(static_cast<Eigen::Index>(b)));
    }();

    auto geometry_step = [&]() {
      Eigen::Index j = 0;
      if ((md.dist.array() > 2.1 * rho).any()) {
        md.dist.maxCoeff(&j);
      } else {
        md.sigma.minCoeff(&j);
      }
      const VecX normal = md.Dinv.row(j).transpose().normalized();
      const double v0 = std::max(0.0, cb.size() ? (-cb).maxCoeff() : 0.0);
      auto model_merit = [&](const VecX& s) {
        double v = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) v = std::max(v, -(cb[i] + md.A.col(i).dot(s)));
        return md.g.dot(s) + mu * (v - v0);
      };
      VecX plus = box.project(xb.a + rho * normal) - xb.a;
      VecX minus = box.project(xb.a - rho * normal) - xb.a;
      VecX step;
      const double lp = plus.norm();
      const double lm = minus.norm();
      if (lp >= 0.5 * rho && lm >= 0.5 * rho) {
        step = model_merit(plus) <= model_merit(minus) ? plus : minus;
      } else {
        step = lp >= lm ? plus : minus;
      }
      pts[md.others[static_cast<std::size_t>(j)]] = checked_eval(xb.a + step);
    };

    if (need_geometry) {
      need_geometry = false;
      if (!good) {
        geometry_step();
        continue;
      }
      if (!reduce_rho()) {
        reason = rec.converged_reason("trust-radius");
        break;
      }
      continue;
    }

    const VecX lo = box.lower - xb.a;
    const VecX hi = box.upper - xb.a;
    const VecX d = detail::trust_region_step(md.g, cb, md.A, lo, hi, rho);
    if (d.norm() < 0.5 * rho) {
      if (good) {
        if (!reduce_rho()) {
          reason = rec.converged_reason("trust-radius");
          break;
        }
      } else {
        geometry_step();
      }
      continue;
    }

    const double v0 = std::max(0.0, m ? (-cb).maxCoeff() : 0.0);
    double vd = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) vd = std::max(vd, -(cb[i] + md.A.col(i).dot(d)));
    const double pred_f = -md.g.dot(d);
    const double pred_v = v0 - vd;
    if (pred_v > 0.0 && pred_f < 0.0) {
      const double barmu = -pred_f / pred_v;
      if (mu < 1.5 * barmu) {
        mu = 2.0 * barmu;
        if (best_vertex(pts, mu) != b) continue;
      }
    }
    const double pred = pred_f + mu * pred_v;

    const Sample trial = checked_eval(xb.a + d);
    const double mb = merit(xb, mu);
    const double mt = merit(trial, mu);
    const double ratio = pred > 0.0 && std::isfinite(mt) ? (mb - mt) / pred : -1.0;

    // Replace the vertex whose removal gives the best-shaped new simplex.
    const VecX vol = (md.Dinv * d).cwiseAbs();
    Eigen::Index jdrop = -1;
    double best_score = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double far = std::max(1.0, md.dist[j] / (1.1 * rho));
      const double score = vol[j] * far * far;
      if (score > best_score) {
        best_score = score;
        jdrop = j;
      }
    }
    if (jdrop >= 0 && (mt < mb || best_score > 1.0)) {
      pts[md.others[static_cast<std::size_t>(jdrop)]] = trial;
    }
    if (ratio < 0.1) need_geometry = true;
  }
  return rec.finish(reason, iterations);
}

}  // namespace

OptRun minimize(const Evaluator& evaluate, const VecX& a0, const FeasibleBox& box,
                const OptimizerBudget& budget) {
  if (box.lower.size() != a0.size() || box.upper.size() != a0.size()) {
    throw DomainError("minimize: box dimension does not match the start point");
  }
  if ((box.lower.array() > box.upper.array()).any()) {
    throw DomainError("minimize: box lower bound exceeds upper bound");
  }
  if (!(budget.rho_begin > 0.0) || !(budget.rho_end > 0.0) || budget.rho_end > budget.rho_begin) {
    throw DomainError("minimize: need 0 < rho_end <= rho_begin");
  }
  if (budget.max_evaluations <= 0) {
    // Nothing may be evaluated: hand back the projected start untouched.
    OptRun run;
    run.a_best = box.project(a0);
    run.feasible = false;
    run.termination = "budget";
    return run;
  }
  if (budget.method == OptimizerMethod::kNelderMead) {
    return detail::nelder_mead(evaluate, a0, box, budget);
  }
  return cobyla(evaluate, a0, box, budget);
}

}  // namespace cop
