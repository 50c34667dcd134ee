/* Copyright 2026 The mixgrad Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mixgrad/estimator.hpp"
#include "mixgrad/forward_trace.hpp"
#include "mixgrad/losses.hpp"
#include "mixgrad/mixture_model.hpp"

namespace mixgrad {

// Joint recursion for the derivatives of a quantile-transform sample with
// respect to the mixture weights, treated as K free coordinates.
//
// State per dimension d:
//   dlogp[k][j] = d log p[d][k] / d weight_j      (K x K, k-major)
//   dx[j]       = d x_d / d weight_j              (K)
// Initial conditions at d = 0:
//   dlogp[k][j] = delta_jk / weight_j
//   dx[j]       = -F_j0(x_0) / f_0(x_0)
// Step d-1 -> d:
//   dlogp[k][j] += -sum_l p[d][l]*dlogp[l][j]
//                  + (dlogf_k(x_{d-1}) - sum_l p[d][l]*dlogf_l(x_{d-1})) * dx[j]
//   dx[j] = -(1/f_d) * sum_k dlogp[k][j] * p[d][k] * F_kd(x_d)
//
// Every row keeps sum_k p[d][k]*dlogp[k][j] = 0 for d >= 1: that is the
// derivative of the simplex constraint on the responsibilities.
//
// Expectations of these raw per-weight derivatives are only meaningful
// along the simplex; see docs/gradient-recursions.md. Estimators therefore
// also report the logit-space gradient (softmax_backward of the raw one).

/// Recursion state for one dimension.
struct WeightGradRows {
  std::vector<double> dlogp_dpi;  // K x K, [k*K + j]
  std::vector<double> dx_dpi;     // K
};

WeightGradRows weight_grad_init(const MixtureModel& model, const ForwardTrace& trace);

/// Rows for dimension d (>= 1) from the rows at d-1.
WeightGradRows weight_grad_step(const MixtureModel& model, const ForwardTrace& trace, int d,
                                const WeightGradRows& prev);

/// Full D x K matrix of sample derivatives, optionally keeping the D x K x K
/// dlogp tensor (off by default: the hot path only ever needs rolling rows).
struct WeightGradient {
  int num_components = 0;
  int dimension = 0;
  std::vector<double> x;          // D
  std::vector<double> dx_dpi;     // D x K, [d*K + j]
  std::vector<double> dlogp_dpi;  // D x K x K, [(d*K + k)*K + j]; empty unless requested

  double dx_at(int d, int j) const { return dx_dpi[static_cast<std::size_t>(d) * num_components + j]; }
};

WeightGradient weight_gradient_recursion(const MixtureModel& model, const ForwardTrace& trace,
                                         bool keep_dlogp = false);

/// sum_d loss_grad[d] * dx_d/dweight_j for one sample; the raw per-weight
/// contribution to the loss-expectation gradient.
std::vector<double> per_sample_weight_grad(const MixtureModel& model, std::span<const double> x,
                                           std::span<const double> loss_grad);

/// Monte-Carlo estimate of the weight gradient of E[loss] over n ancestral
/// samples. The report carries two blocks: "weights_raw_pi" (free-coordinate
/// derivatives, as produced by the recursion) and "weights_logit" (pulled
/// back through the softmax; the one an optimizer should consume).
/// Degenerate samples are redrawn and counted; the run aborts if they exceed
/// 0.01% of n.
EstimatorReport estimate_weight_grad(const MixtureModel& model, const Loss& loss, std::int64_t n,
                                     std::uint64_t seed, int workers = 1);

namespace detail {

// Allocation-free variants for estimator hot loops.
void weight_grad_init_inplace(const MixtureModel& model, const ForwardTrace& trace,
                              std::vector<double>& dlogp, std::vector<double>& dx);
void weight_grad_step_inplace(const MixtureModel& model, const ForwardTrace& trace, int d,
                              std::vector<double>& dlogp, std::vector<double>& dx,
                              std::vector<double>& scratch_sums);

}  // namespace detail

}  // namespace mixgrad
