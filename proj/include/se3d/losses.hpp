// Copyright (c) 2026 The se3d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "se3d/detection.hpp"
#include "se3d/matching.hpp"

namespace se3d::losses {

// Box parameters are ordered (cx, cy, cz, w, l, h, r) in every 7-vector
// gradient below.
constexpr int kBoxParams = 7;
using BoxGrad = std::array<double, kBoxParams>;

struct LossWeights {
  double omega1 = 2.0;  // supervised box-loss weight
  double omega2 = 0.2;  // direction-loss weight
  double gamma = 1.25;  // orientation-constraint weight
  double mu_t = 0.0;    // consistency ramp weight, in [0, 1]
};

struct ValueGrad {
  double value = 0.0;
  double grad = 0.0;
};

/// Smooth-L1: 0.5 x^2 / beta for |x| < beta, else |x| - 0.5 beta.
ValueGrad smooth_l1(double x, double beta = 1.0);

// Orientation-aware distance-IoU loss pieces:
//   total = (1 - IoU3d) + c^2/d^2 + gamma * (1 - |cos dr|)
// with c the 3D center distance, d the enclosing-cuboid diagonal and dr
// the BEV yaw difference. grad is d(total)/d(pred params); the center and
// orientation terms are analytic, the IoU term uses central differences.
struct ODIoUBreakdown {
  double iou_term = 0.0;
  double center_term = 0.0;
  double orient_term = 0.0;
  double total = 0.0;
  BoxGrad grad{};
};

ODIoUBreakdown odiou_loss(const Box3D& pred, const Box3D& gt,
                          double gamma = 1.25);

/// gamma * (1 - |cos dr|); exact gamma at the |cos| kink (dr = +-pi/2).
double orient_term(double delta_r, double gamma);

/// d/d(dr) of orient_term; subgradient 0 at the kinks dr = +-pi/2.
double orient_term_grad(double delta_r, double gamma);

// The analytically differentiable part of the ODIoU loss (center +
// orientation terms) with its exact gradient; used by the gradient suite.
struct PartialLoss {
  double value = 0.0;
  BoxGrad grad{};
};
PartialLoss odiou_center_orient(const Box3D& pred, const Box3D& gt,
                                double gamma = 1.25);

// Consistency loss for bounding boxes over matched pairs:
// mean over pairs of (1/7) sum_e SmoothL1(delta_e), with delta_e the
// absolute difference for x,y,z,w,l,h and |sin(r_s - r_t)| for r.
// Returns 0 with no gradients when the match set is empty.
struct BoxConsistency {
  double value = 0.0;
  std::vector<std::pair<int, BoxGrad>> grads;  // per student index
};
BoxConsistency consistency_box_loss(const matching::MatchSet& matches,
                                    std::span<const Detection> student,
                                    std::span<const Detection> teacher,
                                    double beta = 1.0);

/// Consistency loss for confidences: mean SmoothL1(|sigma(c_s) - sigma(c_t)|).
struct ClsConsistency {
  double value = 0.0;
  std::vector<std::pair<int, double>> grads;  // per student index
};
ClsConsistency consistency_cls_loss(const matching::MatchSet& matches,
                                    std::span<const Detection> student,
                                    std::span<const Detection> teacher,
                                    double beta = 1.0);

/// Overall consistency loss; both terms carry the same weight.
double consistency_total(double box_loss, double cls_loss);

/// Binary focal loss on sigmoid(logit) with analytic gradient.
ValueGrad focal_loss(double logit, int target, double alpha = 0.25,
                     double gamma_f = 2.0);

/// Softmax cross-entropy over two direction logits.
struct DirectionLoss {
  double value = 0.0;
  std::array<double, 2> grad{};
};
DirectionLoss direction_loss(const std::array<double, 2>& logits,
                             int target_dir);

struct LossParts {
  double cls = 0.0;
  double box = 0.0;
  double dir = 0.0;
  double cons_cls = 0.0;
  double cons_box = 0.0;
};

/// L_cls + w1 L_box + w2 L_dir + mu_t (L^c_cls + L^c_box).
double student_total_loss(const LossParts& parts, const LossWeights& weights);

/// Consistency ramp exp(-5 (1-x)^2) with x = min(epoch / ramp_epochs, 1).
double mu_ramp(double epoch, double ramp_epochs = 15.0);

/// Cosine annealing between lr_max (step 0) and lr_min (step = total).
double cosine_lr(double step, double total_steps, double lr_max,
                 double lr_min);

// Central-difference gradient verification. fn returns the loss value and
// its analytic gradient at a point; relative errors use the denominator
// max(|analytic|, |numeric|, 1e-8).
struct GradCheckReport {
  double max_rel_err = 0.0;
  std::vector<double> per_param_errs;
  double step = 0.0;
};
using LossFn =
    std::function<std::pair<double, std::vector<double>>(std::span<const double>)>;
GradCheckReport grad_check(const LossFn& fn, std::span<const double> point,
                           double step = 1e-4);

}  // namespace se3d::losses
