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
#include "mixgrad/weight_gradient.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "mixgrad/errors.hpp"
#include "mixgrad/philox.hpp"
#include "mixgrad/sampling.hpp"

namespace mixgrad {

namespace detail {

void weight_grad_init_inplace(const MixtureModel& model, const ForwardTrace& trace,
                              std::vector<double>& dlogp, std::vector<double>& dx) {
  const int k_count = model.num_components();
  dlogp.assign(static_cast<std::size_t>(k_count) * k_count, 0.0);
  dx.resize(k_count);
  for (int k = 0; k < k_count; ++k)
    dlogp[static_cast<std::size_t>(k) * k_count + k] = 1.0 / model.weights()[k];

  const double f0 = trace.cond_pdf[0];
  if (!(f0 >= kDensityFloor)) throw DegenerateSampleError(0, trace.log_cond_pdf[0]);
  for (int j = 0; j < k_count; ++j) dx[j] = -trace.cdf_at(0, j) / f0;
}

// In-place step d-1 -> d; dx must hold the row of d-1 on entry.
void weight_grad_step_inplace(const MixtureModel&, const ForwardTrace& trace, int d,
                              std::vector<double>& dlogp, std::vector<double>& dx,
                              std::vector<double>& scratch_sums) {
  const int k_count = trace.num_components;
  const std::span<const double> p = trace.resp_row(d);

  // s_prev[j] = sum_l p[l] * dlogp[l][j]; s_dx = sum_l p[l] * dlogf_l(x_{d-1}).
  scratch_sums.assign(k_count, 0.0);
  double s_dx = 0.0;
  for (int l = 0; l < k_count; ++l) {
    const double pl = p[l];
    const double* row = dlogp.data() + static_cast<std::size_t>(l) * k_count;
    for (int j = 0; j < k_count; ++j) scratch_sums[j] += pl * row[j];
    s_dx += pl * trace.dlogpdf_dx_at(d - 1, l);
  }

  for (int k = 0; k < k_count; ++k) {
    const double bracket = trace.dlogpdf_dx_at(d - 1, k) - s_dx;
    double* row = dlogp.data() + static_cast<std::size_t>(k) * k_count;
    for (int j = 0; j < k_count; ++j) row[j] += -scratch_sums[j] + bracket * dx[j];
  }

  const double fd = trace.cond_pdf[d];
  if (!(fd >= kDensityFloor)) throw DegenerateSampleError(d, trace.log_cond_pdf[d]);
  for (int j = 0; j < k_count; ++j) {
    double acc = 0.0;
    for (int k = 0; k < k_count; ++k)
      acc += dlogp[static_cast<std::size_t>(k) * k_count + j] * p[k] * trace.cdf_at(d, k);
    dx[j] = -acc / fd;
  }
}

}  // namespace detail

namespace {

// softmax_backward without allocation or renormalization, for weights
// already at hand.
void pullback_to_logits(std::span<const double> weights, std::span<const double> grad,
                        std::span<double> out) {
  double weighted = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) weighted += weights[i] * grad[i];
  for (std::size_t i = 0; i < weights.size(); ++i) out[i] = weights[i] * (grad[i] - weighted);
}

}  // namespace

WeightGradRows weight_grad_init(const MixtureModel& model, const ForwardTrace& trace) {
  WeightGradRows rows;
  detail::weight_grad_init_inplace(model, trace, rows.dlogp_dpi, rows.dx_dpi);
  return rows;
}

WeightGradRows weight_grad_step(const MixtureModel& model, const ForwardTrace& trace, int d,
                                const WeightGradRows& prev) {
  const int k_count = model.num_components();
  if (d < 1 || d >= trace.dimension)
    throw InvalidInputError("weight_grad_step: dimension index must be in [1, D)");
  if (static_cast<int>(prev.dx_dpi.size()) != k_count ||
      static_cast<int>(prev.dlogp_dpi.size()) != k_count * k_count)
    throw InvalidInputError("weight_grad_step: previous rows have wrong shape");
  for (double v : prev.dx_dpi)
    if (!std::isfinite(v)) throw InvalidInputError("weight_grad_step: non-finite previous row");

  WeightGradRows rows = prev;
  std::vector<double> scratch;
  detail::weight_grad_step_inplace(model, trace, d, rows.dlogp_dpi, rows.dx_dpi, scratch);
  return rows;
}

WeightGradient weight_gradient_recursion(const MixtureModel& model, const ForwardTrace& trace,
                                         bool keep_dlogp) {
  const int k_count = model.num_components();
  const int dim = trace.dimension;
  WeightGradient grad;
  grad.num_components = k_count;
  grad.dimension = dim;
  grad.x = trace.x;
  grad.dx_dpi.resize(static_cast<std::size_t>(dim) * k_count);
  if (keep_dlogp) grad.dlogp_dpi.resize(static_cast<std::size_t>(dim) * k_count * k_count);

  WeightGradRows rows = weight_grad_init(model, trace);
  std::vector<double> scratch;
  for (int d = 0; d < dim; ++d) {
    if (d > 0) detail::weight_grad_step_inplace(model, trace, d, rows.dlogp_dpi, rows.dx_dpi, scratch);
    for (int j = 0; j < k_count; ++j)
      grad.dx_dpi[static_cast<std::size_t>(d) * k_count + j] = rows.dx_dpi[j];
    if (keep_dlogp)
      std::copy(rows.dlogp_dpi.begin(), rows.dlogp_dpi.end(),
                grad.dlogp_dpi.begin() + static_cast<std::size_t>(d) * k_count * k_count);
  }
  return grad;
}

std::vector<double> per_sample_weight_grad(const MixtureModel& model, std::span<const double> x,
                                           std::span<const double> loss_grad) {
  if (loss_grad.size() != x.size())
    throw InvalidInputError("per_sample_weight_grad: loss gradient dimension mismatch");
  for (double g : loss_grad)
    if (!std::isfinite(g)) throw InvalidInputError("per_sample_weight_grad: non-finite loss gradient");

  const ForwardTrace trace = responsibilities_forward(model, x);
  const int k_count = model.num_components();
  std::vector<double> acc(k_count, 0.0);

  std::vector<double> dlogp, dx, scratch;
  detail::weight_grad_init_inplace(model, trace, dlogp, dx);
  for (int d = 0; d < trace.dimension; ++d) {
    if (d > 0) detail::weight_grad_step_inplace(model, trace, d, dlogp, dx, scratch);
    for (int j = 0; j < k_count; ++j) acc[j] += loss_grad[d] * dx[j];
  }
  return acc;
}

EstimatorReport estimate_weight_grad(const MixtureModel& model, const Loss& loss, std::int64_t n,
                                     std::uint64_t seed, int workers) {
  const int k_count = model.num_components();
  const int dim = model.dimension();
  const std::size_t n_coords = static_cast<std::size_t>(2) * k_count;  // raw then logit

  const auto start = std::chrono::steady_clock::now();
  auto make_batch_fn = [&]() -> detail::BatchFn {
    auto trace = std::make_shared<ForwardTrace>();
    return [&, trace](std::int64_t batch, std::int64_t quota, detail::BatchAccum& accum) {
      Philox rng(seed, static_cast<std::uint64_t>(batch) + 1);
      std::vector<double> x(dim), lg(dim), raw(k_count), values(n_coords);
      std::vector<double> dlogp, dx, scratch;
      std::int64_t produced = 0;
      std::int64_t attempts = 0;
      while (produced < quota) {
        sample_ancestral_into(model, rng, x);
        try {
          responsibilities_forward_into(model, x, *trace);
          loss.gradient(x, lg);
          std::fill(raw.begin(), raw.end(), 0.0);
          detail::weight_grad_init_inplace(model, *trace, dlogp, dx);
          for (int d = 0; d < dim; ++d) {
            if (d > 0) detail::weight_grad_step_inplace(model, *trace, d, dlogp, dx, scratch);
            for (int j = 0; j < k_count; ++j) raw[j] += lg[d] * dx[j];
          }
        } catch (const DegenerateSampleError&) {
          ++accum.degenerate;
          if (++attempts > quota * 1000 + 1000)
            throw NumericFailureError("estimate_weight_grad: too many degenerate redraws");
          continue;
        }
        for (int j = 0; j < k_count; ++j) values[j] = raw[j];
        pullback_to_logits(model.weights(), raw,
                           std::span<double>(values).subspan(k_count, k_count));
        accum.add(values);
        ++produced;
      }
    };
  };

  const detail::EstimateResult result = detail::run_batched(n, workers, n_coords, make_batch_fn);

  EstimatorReport report;
  report.method = "pathwise";
  report.n_samples = n;
  report.seed = seed;
  report.workers = workers;
  report.degenerate_samples = result.degenerate;

  CoordinateBlock raw_block{kBlockWeightsRaw, {}, {}, {}, {}};
  CoordinateBlock logit_block{kBlockWeightsLogit, {}, {}, {}, {}};
  for (int j = 0; j < k_count; ++j) {
    raw_block.labels.push_back("pi[" + std::to_string(j) + "]");
    logit_block.labels.push_back("logit[" + std::to_string(j) + "]");
    raw_block.mean.push_back(result.mean[j]);
    raw_block.variance.push_back(result.variance[j]);
    raw_block.std_error.push_back(result.std_error[j]);
    logit_block.mean.push_back(result.mean[k_count + j]);
    logit_block.variance.push_back(result.variance[k_count + j]);
    logit_block.std_error.push_back(result.std_error[k_count + j]);
  }
  report.blocks.push_back(std::move(raw_block));
  report.blocks.push_back(std::move(logit_block));
  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace mixgrad
