// Copyright (c) 2026 The se3d Authors
// SPDX-License-Identifier: Apache-2.0

#include "se3d/losses.hpp"

#include <algorithm>
#include <cmath>

#include "se3d/errors.hpp"

namespace se3d::losses {
namespace {

// |cos dr| below this is treated as the kink itself, so the orientation
// term is exactly gamma at dr = +-pi/2 and its subgradient is 0 there.
constexpr double kOrientKinkEps = 1e-12;

constexpr double kIouFdStep = 1e-4;

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double box_param(const Box3D& b, int i) {
  switch (i) {
    case 0: return b.cx;
    case 1: return b.cy;
    case 2: return b.cz;
    case 3: return b.w;
    case 4: return b.l;
    case 5: return b.h;
    default: return b.r;
  }
}

void set_box_param(Box3D& b, int i, double v) {
  switch (i) {
    case 0: b.cx = v; break;
    case 1: b.cy = v; break;
    case 2: b.cz = v; break;
    case 3: b.w = v; break;
    case 4: b.l = v; break;
    case 5: b.h = v; break;
    default: b.r = v; break;
  }
}

// One 3D corner of a box and its Jacobian row w.r.t. the 7 box params.
// sx, sy, sz are the corner signs; corner = center + R(r) (sx l/2, sy w/2)
// in the BEV plane and cz + sz h/2 vertically.
struct CornerWithJac {
  Vec3 p;
  BoxGrad dx{}, dy{}, dz{};
};

CornerWithJac corner_jacobian(const Box3D& b, double sx, double sy,
                              double sz) {
  const double c = std::cos(b.r);
  const double s = std::sin(b.r);
  const double lx = sx * 0.5 * b.l;
  const double ly = sy * 0.5 * b.w;
  CornerWithJac out;
  out.p = {b.cx + lx * c - ly * s, b.cy + lx * s + ly * c, b.cz + sz * 0.5 * b.h};
  out.dx[0] = 1.0;
  out.dx[3] = -s * sy * 0.5;
  out.dx[4] = c * sx * 0.5;
  out.dx[6] = -lx * s - ly * c;
  out.dy[1] = 1.0;
  out.dy[3] = c * sy * 0.5;
  out.dy[4] = s * sx * 0.5;
  out.dy[6] = lx * c - ly * s;
  out.dz[2] = 1.0;
  out.dz[5] = sz * 0.5;
  return out;
}

// c^2 / d^2 with the analytic gradient w.r.t. the pred box. d^2 depends on
// the pred corners through the axis-aligned extremes; the locally active
// corner supplies the derivative (ties have measure zero).
PartialLoss center_term_with_grad(const Box3D& pred, const Box3D& gt) {
  const double signs[4][2] = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
  std::vector<CornerWithJac> pred_corners;
  pred_corners.reserve(8);
  for (double sz : {-1.0, 1.0}) {
    for (const auto& sxy : signs) {
      pred_corners.push_back(corner_jacobian(pred, sxy[0], sxy[1], sz));
    }
  }
  const auto gt_corners = geom::box_corners_3d(gt);

  // Per axis: extreme values and, when a pred corner is active, its
  // gradient row (gt corners contribute zero gradient).
  double lo[3], hi[3];
  BoxGrad dlo[3]{}, dhi[3]{};
  for (int ax = 0; ax < 3; ++ax) {
    lo[ax] = 1e300;
    hi[ax] = -1e300;
  }
  auto consider = [&](double v, const BoxGrad* g, int ax) {
    static const BoxGrad kZero{};
    const BoxGrad& grad = g ? *g : kZero;
    if (v < lo[ax]) {
      lo[ax] = v;
      dlo[ax] = grad;
    }
    if (v > hi[ax]) {
      hi[ax] = v;
      dhi[ax] = grad;
    }
  };
  for (const CornerWithJac& c : pred_corners) {
    consider(c.p.x, &c.dx, 0);
    consider(c.p.y, &c.dy, 1);
    consider(c.p.z, &c.dz, 2);
  }
  for (const Vec3& c : gt_corners) {
    consider(c.x, nullptr, 0);
    consider(c.y, nullptr, 1);
    consider(c.z, nullptr, 2);
  }

  double d2 = 0.0;
  BoxGrad dd2{};
  for (int ax = 0; ax < 3; ++ax) {
    const double ext = hi[ax] - lo[ax];
    d2 += ext * ext;
    for (int k = 0; k < kBoxParams; ++k) {
      dd2[static_cast<std::size_t>(k)] +=
          2.0 * ext *
          (dhi[ax][static_cast<std::size_t>(k)] -
           dlo[ax][static_cast<std::size_t>(k)]);
    }
  }

  const Vec3 diff = pred.center() - gt.center();
  const double c2 = dot(diff, diff);
  BoxGrad dc2{};
  dc2[0] = 2.0 * diff.x;
  dc2[1] = 2.0 * diff.y;
  dc2[2] = 2.0 * diff.z;

  PartialLoss out;
  out.value = c2 / d2;
  for (int k = 0; k < kBoxParams; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    out.grad[ks] = dc2[ks] / d2 - c2 * dd2[ks] / (d2 * d2);
  }
  return out;
}

}  // namespace

ValueGrad smooth_l1(double x, double beta) {
  if (std::abs(x) < beta) {
    return {0.5 * x * x / beta, x / beta};
  }
  return {std::abs(x) - 0.5 * beta, sign(x)};
}

double orient_term(double delta_r, double gamma) {
  const double c = std::cos(delta_r);
  if (std::abs(c) < kOrientKinkEps) return gamma;
  return gamma * (1.0 - std::abs(c));
}

double orient_term_grad(double delta_r, double gamma) {
  const double c = std::cos(delta_r);
  if (std::abs(c) < kOrientKinkEps) return 0.0;
  return gamma * sign(c) * std::sin(delta_r);
}

PartialLoss odiou_center_orient(const Box3D& pred, const Box3D& gt,
                                double gamma) {
  PartialLoss out = center_term_with_grad(pred, gt);
  const double dr = pred.r - gt.r;
  out.value += orient_term(dr, gamma);
  out.grad[6] += orient_term_grad(dr, gamma);
  return out;
}

ODIoUBreakdown odiou_loss(const Box3D& pred, const Box3D& gt, double gamma) {
  ODIoUBreakdown out;
  const PartialLoss center = center_term_with_grad(pred, gt);
  out.center_term = center.value;
  out.orient_term = orient_term(pred.r - gt.r, gamma);
  out.iou_term = 1.0 - geom::iou_3d(pred, gt);
  out.total = out.iou_term + out.center_term + out.orient_term;
  out.grad = center.grad;
  out.grad[6] += orient_term_grad(pred.r - gt.r, gamma);
  // The rotated-IoU term is piecewise smooth with no simple closed-form
  // derivative; central differences per box parameter.
  for (int k = 0; k < kBoxParams; ++k) {
    Box3D plus = pred;
    Box3D minus = pred;
    set_box_param(plus, k, box_param(pred, k) + kIouFdStep);
    set_box_param(minus, k, box_param(pred, k) - kIouFdStep);
    const double diou =
        (geom::iou_3d(plus, gt) - geom::iou_3d(minus, gt)) / (2.0 * kIouFdStep);
    out.grad[static_cast<std::size_t>(k)] -= diou;
  }
  return out;
}

BoxConsistency consistency_box_loss(const matching::MatchSet& matches,
                                    std::span<const Detection> student,
                                    std::span<const Detection> teacher,
                                    double beta) {
  BoxConsistency out;
  if (matches.pairs.empty()) return out;
  const double n = static_cast<double>(matches.pairs.size());
  for (const matching::MatchedPair& pair : matches.pairs) {
    if (pair.student_index < 0 ||
        pair.student_index >= static_cast<int>(student.size()) ||
        pair.teacher_index < 0 ||
        pair.teacher_index >= static_cast<int>(teacher.size())) {
      throw MismatchedIndices("match references detection out of range");
    }
    const Box3D& s = student[static_cast<std::size_t>(pair.student_index)].box;
    const Box3D& t = teacher[static_cast<std::size_t>(pair.teacher_index)].box;
    BoxGrad grad{};
    double sum = 0.0;
    const double sv[6] = {s.cx, s.cy, s.cz, s.w, s.l, s.h};
    const double tv[6] = {t.cx, t.cy, t.cz, t.w, t.l, t.h};
    for (int e = 0; e < 6; ++e) {
      const double diff = sv[e] - tv[e];
      const ValueGrad sl = smooth_l1(std::abs(diff), beta);
      sum += sl.value;
      grad[static_cast<std::size_t>(e)] = sl.grad * sign(diff) / (7.0 * n);
    }
    const double sr = std::sin(s.r - t.r);
    const ValueGrad sl = smooth_l1(std::abs(sr), beta);
    sum += sl.value;
    grad[6] = sl.grad * sign(sr) * std::cos(s.r - t.r) / (7.0 * n);
    out.value += sum / (7.0 * n);
    out.grads.emplace_back(pair.student_index, grad);
  }
  return out;
}

ClsConsistency consistency_cls_loss(const matching::MatchSet& matches,
                                    std::span<const Detection> student,
                                    std::span<const Detection> teacher,
                                    double beta) {
  ClsConsistency out;
  if (matches.pairs.empty()) return out;
  const double n = static_cast<double>(matches.pairs.size());
  for (const matching::MatchedPair& pair : matches.pairs) {
    if (pair.student_index < 0 ||
        pair.student_index >= static_cast<int>(student.size()) ||
        pair.teacher_index < 0 ||
        pair.teacher_index >= static_cast<int>(teacher.size())) {
      throw MismatchedIndices("match references detection out of range");
    }
    const double ss =
        student[static_cast<std::size_t>(pair.student_index)].score();
    const double ts =
        teacher[static_cast<std::size_t>(pair.teacher_index)].score();
    const double diff = ss - ts;
    const ValueGrad sl = smooth_l1(std::abs(diff), beta);
    out.value += sl.value / n;
    out.grads.emplace_back(pair.student_index,
                           sl.grad * sign(diff) * ss * (1.0 - ss) / n);
  }
  return out;
}

double consistency_total(double box_loss, double cls_loss) {
  return box_loss + cls_loss;
}

ValueGrad focal_loss(double logit, int target, double alpha, double gamma_f) {
  const double p = sigmoid(logit);
  if (target == 1) {
    const double u = 1.0 - p;
    const double s = softplus(-logit);  // -log(p)
    const double ug = std::pow(u, gamma_f);
    return {alpha * ug * s, -alpha * ug * (gamma_f * p * s + u)};
  }
  const double t = softplus(logit);  // -log(1-p)
  const double pg = std::pow(p, gamma_f);
  return {(1.0 - alpha) * pg * t,
          (1.0 - alpha) * pg * (gamma_f * (1.0 - p) * t + p)};
}

DirectionLoss direction_loss(const std::array<double, 2>& logits,
                             int target_dir) {
  const double m = std::max(logits[0], logits[1]);
  const double lse =
      m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m));
  DirectionLoss out;
  out.value = lse - logits[static_cast<std::size_t>(target_dir)];
  for (int i = 0; i < 2; ++i) {
    out.grad[static_cast<std::size_t>(i)] =
        std::exp(logits[static_cast<std::size_t>(i)] - lse) -
        (i == target_dir ? 1.0 : 0.0);
  }
  return out;
}

double student_total_loss(const LossParts& parts, const LossWeights& weights) {
  return parts.cls + weights.omega1 * parts.box + weights.omega2 * parts.dir +
         weights.mu_t * (parts.cons_cls + parts.cons_box);
}

double mu_ramp(double epoch, double ramp_epochs) {
  const double x = ramp_epochs > 0.0 ? std::min(epoch / ramp_epochs, 1.0) : 1.0;
  return std::exp(-5.0 * (1.0 - x) * (1.0 - x));
}

double cosine_lr(double step, double total_steps, double lr_max,
                 double lr_min) {
  const double pi = 3.14159265358979323846;
  return lr_min +
         0.5 * (lr_max - lr_min) * (1.0 + std::cos(pi * step / total_steps));
}

GradCheckReport grad_check(const LossFn& fn, std::span<const double> point,
                           double step) {
  GradCheckReport report;
  report.step = step;
  const auto [value, analytic] = fn(point);
  (void)value;
  std::vector<double> probe(point.begin(), point.end());
  report.per_param_errs.resize(point.size());
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + step;
    const double fp = fn(probe).first;
    probe[i] = saved - step;
    const double fm = fn(probe).first;
    probe[i] = saved;
    const double numeric = (fp - fm) / (2.0 * step);
    const double denom =
        std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
    report.per_param_errs[i] = std::abs(analytic[i] - numeric) / denom;
    report.max_rel_err = std::max(report.max_rel_err, report.per_param_errs[i]);
  }
  return report;
}

}  // namespace se3d::losses
