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
#include "mixgrad/parameter_gradient.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "mixgrad/errors.hpp"
#include "mixgrad/sampling.hpp"
#include "mixgrad/weight_gradient.hpp"

namespace mixgrad {

std::string ParameterSelector::label() const {
  switch (kind) {
    case Kind::weight:
      return "pi[" + std::to_string(component) + "]";
    case Kind::location:
      return "mu[" + std::to_string(component) + "," + std::to_string(dimension) + "]";
    case Kind::scale:
      return "sigma[" + std::to_string(component) + "," + std::to_string(dimension) + "]";
  }
  return "?";
}

std::vector<ParameterSelector> all_weight_selectors(const MixtureModel& model) {
  std::vector<ParameterSelector> out;
  for (int j = 0; j < model.num_components(); ++j) out.push_back(ParameterSelector::weight(j));
  return out;
}

std::vector<ParameterSelector> all_location_selectors(const MixtureModel& model) {
  std::vector<ParameterSelector> out;
  for (int k = 0; k < model.num_components(); ++k)
    for (int d = 0; d < model.dimension(); ++d) out.push_back(ParameterSelector::location(k, d));
  return out;
}

std::vector<ParameterSelector> all_scale_selectors(const MixtureModel& model) {
  std::vector<ParameterSelector> out;
  for (int k = 0; k < model.num_components(); ++k)
    for (int d = 0; d < model.dimension(); ++d) out.push_back(ParameterSelector::scale(k, d));
  return out;
}

std::vector<ParameterSelector> all_parameter_selectors(const MixtureModel& model) {
  std::vector<ParameterSelector> out = all_weight_selectors(model);
  const auto locs = all_location_selectors(model);
  const auto scales = all_scale_selectors(model);
  out.insert(out.end(), locs.begin(), locs.end());
  out.insert(out.end(), scales.begin(), scales.end());
  return out;
}

void validate_selector(const MixtureModel& model, const ParameterSelector& sel) {
  if (sel.component < 0 || sel.component >= model.num_components())
    throw InvalidInputError("parameter selector: component index out of range");
  if (sel.kind != ParameterSelector::Kind::weight &&
      (sel.dimension < 0 || sel.dimension >= model.dimension()))
    throw InvalidInputError("parameter selector: dimension index out of range");
}

namespace {

// dF/dmu = -pdf and dF/dsigma = -z*pdf for location-scale families; using
// the trace's pdf keeps the direct term exactly consistent with the
// conditional density it is divided by (a single-Gaussian location
// derivative comes out as exactly 1).
double dcdf_dtheta_from_trace(const MixtureModel& model, const ForwardTrace& trace,
                              const ParameterSelector& sel, int d) {
  const double pdf = trace.pdf_at(d, sel.component);
  if (sel.kind == ParameterSelector::Kind::location) return -pdf;
  const double z =
      (trace.x[d] - model.mu(sel.component, d)) / model.sigma(sel.component, d);
  return -z * pdf;
}

double dlogpdf_dtheta(const MixtureModel& model, const ParameterSelector& sel, int d, double x) {
  const Family fam = model.component_family(sel.component);
  const double mu = model.mu(sel.component, d);
  const double sigma = model.sigma(sel.component, d);
  return sel.kind == ParameterSelector::Kind::location ? family_dlogpdf_dmu(fam, mu, sigma, x)
                                                       : family_dlogpdf_dsigma(fam, mu, sigma, x);
}

// Shared single-parameter recursion. Writes dx_d/dtheta for every dimension
// into `dx_path` (natural theta coordinates). `dlogp` is K scratch.
void pathwise_path_into(const MixtureModel& model, const ForwardTrace& trace,
                        const ParameterSelector& sel, std::vector<double>& dlogp,
                        std::span<double> dx_path) {
  const int k_count = trace.num_components;
  const int dim = trace.dimension;
  const bool is_weight = sel.kind == ParameterSelector::Kind::weight;
  const int first_dim = is_weight ? 0 : sel.dimension;

  dlogp.assign(k_count, 0.0);
  for (int d = 0; d < first_dim; ++d) dx_path[d] = 0.0;

  for (int d = first_dim; d < dim; ++d) {
    const std::span<const double> p = trace.resp_row(d);
    const double fd = trace.cond_pdf[d];
    if (!(fd >= kDensityFloor)) throw DegenerateSampleError(d, trace.log_cond_pdf[d]);

    if (d == first_dim) {
      if (is_weight) {
        for (int k = 0; k < k_count; ++k)
          dlogp[k] = (k == sel.component) ? 1.0 / model.weights()[k] : 0.0;
        double acc = 0.0;
        for (int k = 0; k < k_count; ++k) acc += dlogp[k] * p[k] * trace.cdf_at(d, k);
        dx_path[d] = -acc / fd;
      } else {
        // p does not yet depend on theta at its own dimension; only the
        // explicit CDF term contributes.
        dx_path[d] = -p[sel.component] * dcdf_dtheta_from_trace(model, trace, sel, d) / fd;
      }
      continue;
    }

    // Step d-1 -> d.
    double s_prev = 0.0;
    double s_dx = 0.0;
    for (int l = 0; l < k_count; ++l) {
      s_prev += p[l] * dlogp[l];
      s_dx += p[l] * trace.dlogpdf_dx_at(d - 1, l);
    }
    const bool direct = !is_weight && (d - 1 == sel.dimension);
    const double dlogf_theta = direct ? dlogpdf_dtheta(model, sel, d - 1, trace.x[d - 1]) : 0.0;
    const double p_star = direct ? p[sel.component] : 0.0;
    const double dx_prev = dx_path[d - 1];
    for (int k = 0; k < k_count; ++k) {
      dlogp[k] += -s_prev + (trace.dlogpdf_dx_at(d - 1, k) - s_dx) * dx_prev;
      if (direct) dlogp[k] += ((k == sel.component ? 1.0 : 0.0) - p_star) * dlogf_theta;
    }

    double acc = 0.0;
    for (int k = 0; k < k_count; ++k) acc += dlogp[k] * p[k] * trace.cdf_at(d, k);
    dx_path[d] = -acc / fd;
  }
}

}  // namespace

std::vector<double> pathwise_dx_dtheta_path(const MixtureModel& model, const ForwardTrace& trace,
                                            const ParameterSelector& sel) {
  validate_selector(model, sel);
  std::vector<double> dx(trace.dimension);
  std::vector<double> dlogp;
  pathwise_path_into(model, trace, sel, dlogp, dx);
  return dx;
}

double pathwise_dx_dtheta_exact(const MixtureModel& model, const ForwardTrace& trace, int d,
                                const ParameterSelector& sel) {
  validate_selector(model, sel);
  if (d < 0 || d >= trace.dimension)
    throw InvalidInputError("pathwise_dx_dtheta_exact: dimension index out of range");
  if (sel.kind != ParameterSelector::Kind::weight && sel.dimension > d) return 0.0;
  std::vector<double> dx(trace.dimension);
  std::vector<double> dlogp;
  pathwise_path_into(model, trace, sel, dlogp, dx);
  return dx[d];
}

ComponentGrads reparam_component_grads(const MixtureModel& model, const ForwardTrace& trace,
                                       std::span<const double> loss_grad) {
  const int k_count = model.num_components();
  const int dim = model.dimension();
  if (static_cast<int>(loss_grad.size()) != dim)
    throw InvalidInputError("reparam_component_grads: loss gradient dimension mismatch");
  for (double g : loss_grad)
    if (!std::isfinite(g))
      throw InvalidInputError("reparam_component_grads: non-finite loss gradient");

  ComponentGrads grads;
  grads.num_components = k_count;
  grads.dimension = dim;
  grads.dloss_dmu.resize(static_cast<std::size_t>(k_count) * dim);
  grads.dloss_dsigma.resize(static_cast<std::size_t>(k_count) * dim);

  std::vector<double> dx(dim);
  std::vector<double> dlogp;
  for (int k = 0; k < k_count; ++k) {
    for (int d = 0; d < dim; ++d) {
      pathwise_path_into(model, trace, ParameterSelector::location(k, d), dlogp, dx);
      double acc = 0.0;
      for (int dd = d; dd < dim; ++dd) acc += loss_grad[dd] * dx[dd];
      grads.dloss_dmu[static_cast<std::size_t>(k) * dim + d] = acc;

      pathwise_path_into(model, trace, ParameterSelector::scale(k, d), dlogp, dx);
      acc = 0.0;
      for (int dd = d; dd < dim; ++dd) acc += loss_grad[dd] * dx[dd];
      grads.dloss_dsigma[static_cast<std::size_t>(k) * dim + d] = acc;
    }
  }
  return grads;
}

PartialIntegralEstimate mc_partial_integral(const MixtureModel& model, const ForwardTrace& trace,
                                            int d, const ParameterSelector& sel,
                                            std::int64_t n_inner, Philox& rng) {
  validate_selector(model, sel);
  if (d < 0 || d >= trace.dimension)
    throw InvalidInputError("mc_partial_integral: dimension index out of range");
  if (n_inner < 1) throw InvalidInputError("mc_partial_integral: need n_inner >= 1");
  const bool is_weight = sel.kind == ParameterSelector::Kind::weight;
  if (is_weight && d != 0)
    throw InvalidInputError(
        "mc_partial_integral: weight selectors are only pointwise at dimension 0");
  if (!is_weight && sel.dimension != d)
    throw InvalidInputError(
        "mc_partial_integral: component selectors must target the sampled dimension");

  const int k_count = model.num_components();
  const std::span<const double> p = trace.resp_row(d);
  const double upper = trace.x[d];

  double cdf_upper = 0.0;
  for (int k = 0; k < k_count; ++k) cdf_upper += p[k] * trace.cdf_at(d, k);

  PartialIntegralEstimate est;
  est.n_inner = n_inner;

  // Integrand of zero: parameter of a component the conditional never uses.
  if (!is_weight && p[sel.component] == 0.0) {
    est.acceptance_rate = 1.0;
    return est;
  }

  const TruncatedSampleBatch batch =
      sample_truncated(model, d, p, upper, static_cast<int>(n_inner), rng);
  est.acceptance_rate = batch.acceptance_rate();

  double sum = 0.0;
  double sum_sq = 0.0;
  for (double t : batch.samples) {
    double s;
    if (is_weight) {
      // dlog f_0(t)/dweight_j = f_j(t) / f_0(t) with f_0 the weight mixture.
      const double f_j = family_pdf(model.component_family(sel.component),
                                    model.mu(sel.component, 0), model.sigma(sel.component, 0), t);
      const double f_mix = conditional_pdf(model, p, 0, t);
      s = f_mix > 0.0 ? f_j / f_mix : 0.0;
    } else {
      const double f_star = family_pdf(model.component_family(sel.component),
                                       model.mu(sel.component, d), model.sigma(sel.component, d), t);
      const double f_mix = conditional_pdf(model, p, d, t);
      s = f_mix > 0.0
              ? p[sel.component] * f_star * dlogpdf_dtheta(model, sel, d, t) / f_mix
              : 0.0;
    }
    sum += s;
    sum_sq += s * s;
  }
  const double n = static_cast<double>(batch.samples.size());
  const double mean = sum / n;
  est.value = cdf_upper * mean;
  if (n > 1.5) {
    double var = (sum_sq - n * mean * mean) / (n - 1.0);
    if (var < 0.0) var = 0.0;
    est.std_error = cdf_upper * std::sqrt(var / n);
  }
  return est;
}

// ---------------------------------------------------------------------------
// Mixed-selector pathwise estimator.

namespace {

struct SelectorPlan {
  std::vector<int> weight_js;                   // selected weight indices
  std::vector<ParameterSelector> components;    // locations then scales, as given
  std::size_t n_coords = 0;                     // 2*weight_js + components
};

SelectorPlan make_plan(const MixtureModel& model, std::span<const ParameterSelector> selectors) {
  if (selectors.empty()) throw InvalidInputError("estimator: empty parameter selector set");
  SelectorPlan plan;
  for (const ParameterSelector& sel : selectors) {
    validate_selector(model, sel);
    if (sel.kind == ParameterSelector::Kind::weight)
      plan.weight_js.push_back(sel.component);
    else
      plan.components.push_back(sel);
  }
  plan.n_coords = 2 * plan.weight_js.size() + plan.components.size();
  return plan;
}

void assemble_blocks(EstimatorReport& report, const SelectorPlan& plan,
                     const detail::EstimateResult& result) {
  std::size_t idx = 0;
  if (!plan.weight_js.empty()) {
    CoordinateBlock raw{kBlockWeightsRaw, {}, {}, {}, {}};
    CoordinateBlock logit{kBlockWeightsLogit, {}, {}, {}, {}};
    for (int j : plan.weight_js) {
      raw.labels.push_back("pi[" + std::to_string(j) + "]");
      raw.mean.push_back(result.mean[idx]);
      raw.variance.push_back(result.variance[idx]);
      raw.std_error.push_back(result.std_error[idx]);
      ++idx;
    }
    for (int j : plan.weight_js) {
      logit.labels.push_back("logit[" + std::to_string(j) + "]");
      logit.mean.push_back(result.mean[idx]);
      logit.variance.push_back(result.variance[idx]);
      logit.std_error.push_back(result.std_error[idx]);
      ++idx;
    }
    report.blocks.push_back(std::move(raw));
    report.blocks.push_back(std::move(logit));
  }
  CoordinateBlock locations{kBlockLocations, {}, {}, {}, {}};
  CoordinateBlock scales{kBlockLogScales, {}, {}, {}, {}};
  for (const ParameterSelector& sel : plan.components) {
    CoordinateBlock& block = sel.kind == ParameterSelector::Kind::location ? locations : scales;
    const std::string label =
        (sel.kind == ParameterSelector::Kind::location ? "mu[" : "log_sigma[") +
        std::to_string(sel.component) + "," + std::to_string(sel.dimension) + "]";
    block.labels.push_back(label);
    block.mean.push_back(result.mean[idx]);
    block.variance.push_back(result.variance[idx]);
    block.std_error.push_back(result.std_error[idx]);
    ++idx;
  }
  if (!locations.labels.empty()) report.blocks.push_back(std::move(locations));
  if (!scales.labels.empty()) report.blocks.push_back(std::move(scales));
}

}  // namespace

EstimatorReport estimate_loss_grad(const MixtureModel& model, const Loss& loss,
                                   std::span<const ParameterSelector> selectors, std::int64_t n,
                                   std::uint64_t seed, int workers) {
  const SelectorPlan plan = make_plan(model, selectors);
  const int k_count = model.num_components();
  const int dim = model.dimension();
  const std::size_t n_weights = plan.weight_js.size();

  const auto start = std::chrono::steady_clock::now();
  auto make_batch_fn = [&]() -> detail::BatchFn {
    auto trace = std::make_shared<ForwardTrace>();
    return [&, trace](std::int64_t batch, std::int64_t quota, detail::BatchAccum& accum) {
      Philox rng(seed, static_cast<std::uint64_t>(batch) + 1);
      std::vector<double> x(dim), lg(dim), raw(k_count), logit(k_count), dx(dim);
      std::vector<double> dlogp, wdlogp, wdx, scratch;
      std::vector<double> values(plan.n_coords);
      std::int64_t produced = 0;
      std::int64_t attempts = 0;
      while (produced < quota) {
        sample_ancestral_into(model, rng, x);
        try {
          responsibilities_forward_into(model, x, *trace);
          loss.gradient(x, lg);
          std::size_t idx = 0;
          if (n_weights > 0) {
            std::fill(raw.begin(), raw.end(), 0.0);
            detail::weight_grad_init_inplace(model, *trace, wdlogp, wdx);
            for (int d = 0; d < dim; ++d) {
              if (d > 0) detail::weight_grad_step_inplace(model, *trace, d, wdlogp, wdx, scratch);
              for (int j = 0; j < k_count; ++j) raw[j] += lg[d] * wdx[j];
            }
            double weighted = 0.0;
            for (int j = 0; j < k_count; ++j) weighted += model.weights()[j] * raw[j];
            for (int j = 0; j < k_count; ++j)
              logit[j] = model.weights()[j] * (raw[j] - weighted);
            for (int j : plan.weight_js) values[idx++] = raw[j];
            for (int j : plan.weight_js) values[idx++] = logit[j];
          }
          for (const ParameterSelector& sel : plan.components) {
            pathwise_path_into(model, *trace, sel, dlogp, dx);
            double acc = 0.0;
            for (int d = sel.dimension; d < dim; ++d) acc += lg[d] * dx[d];
            if (sel.kind == ParameterSelector::Kind::scale)
              acc *= model.sigma(sel.component, sel.dimension);  // to log-sigma coordinates
            values[idx++] = acc;
          }
        } catch (const DegenerateSampleError&) {
          ++accum.degenerate;
          if (++attempts > quota * 1000 + 1000)
            throw NumericFailureError("estimate_loss_grad: too many degenerate redraws");
          continue;
        }
        accum.add(values);
        ++produced;
      }
    };
  };

  const detail::EstimateResult result =
      detail::run_batched(n, workers, plan.n_coords, make_batch_fn);

  EstimatorReport report;
  report.method = "pathwise";
  report.n_samples = n;
  report.seed = seed;
  report.workers = workers;
  report.degenerate_samples = result.degenerate;
  assemble_blocks(report, plan, result);
  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace mixgrad
