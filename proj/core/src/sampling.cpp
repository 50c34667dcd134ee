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
#include "mixgrad/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixgrad/errors.hpp"

namespace mixgrad {

UniformDraw make_uniform_draw(int dimension, Philox& rng) {
  UniformDraw draw;
  draw.seed = rng.seed();
  draw.u.resize(dimension);
  for (double& u : draw.u) u = rng.next_double();
  return draw;
}

UniformDraw uniform_draw_from(std::vector<double> u, std::uint64_t seed) {
  for (double v : u)
    if (!(v > 0.0 && v < 1.0))
      throw InvalidInputError("uniform draw entries must lie strictly inside (0,1)");
  return {std::move(u), seed};
}

namespace {

int draw_categorical(std::span<const double> probs, double u) {
  double cum = 0.0;
  const int n = static_cast<int>(probs.size());
  for (int k = 0; k < n; ++k) {
    cum += probs[k];
    if (u <= cum) return k;
  }
  return n - 1;  // guard against cum rounding just below 1
}

}  // namespace

void sample_ancestral_into(const MixtureModel& model, Philox& rng, std::span<double> out) {
  const int k = draw_categorical(model.weights(), rng.next_double());
  const ComponentParams& comp = model.component(k);
  for (int d = 0; d < model.dimension(); ++d)
    out[d] = family_quantile(comp.family, comp.mu[d], comp.sigma[d], rng.next_double());
}

std::vector<double> sample_ancestral(const MixtureModel& model, Philox& rng) {
  std::vector<double> x(model.dimension());
  sample_ancestral_into(model, rng, x);
  return x;
}

double conditional_cdf(const MixtureModel& model, std::span<const double> resp_row, int d,
                       double x) {
  if (static_cast<int>(resp_row.size()) != model.num_components())
    throw InvalidInputError("conditional_cdf: responsibility row size mismatch");
  double cdf = 0.0;
  for (int k = 0; k < model.num_components(); ++k) {
    if (resp_row[k] == 0.0) continue;
    cdf += resp_row[k] * family_cdf(model.component_family(k), model.mu(k, d), model.sigma(k, d), x);
  }
  return cdf;
}

double conditional_pdf(const MixtureModel& model, std::span<const double> resp_row, int d,
                       double x) {
  double pdf = 0.0;
  for (int k = 0; k < model.num_components(); ++k) {
    if (resp_row[k] == 0.0) continue;
    pdf += resp_row[k] * family_pdf(model.component_family(k), model.mu(k, d), model.sigma(k, d), x);
  }
  return pdf;
}

namespace {

double conditional_sf(const MixtureModel& model, std::span<const double> resp_row, int d,
                      double x) {
  double sf = 0.0;
  for (int k = 0; k < model.num_components(); ++k) {
    if (resp_row[k] == 0.0) continue;
    sf += resp_row[k] * family_sf(model.component_family(k), model.mu(k, d), model.sigma(k, d), x);
  }
  return sf;
}

}  // namespace

double invert_conditional_cdf(const MixtureModel& model, std::span<const double> resp_row, int d,
                              double u) {
  if (!(u > 0.0 && u < 1.0))
    throw InvalidInputError("invert_conditional_cdf: u must lie strictly inside (0,1)");
  const int k_count = model.num_components();

  // The mixture quantile lies between the smallest and largest component
  // quantile, so the component closed forms give an exact bracket.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < k_count; ++k) {
    if (resp_row[k] == 0.0 && k_count > 1) continue;
    const double q =
        family_quantile(model.component_family(k), model.mu(k, d), model.sigma(k, d), u);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw NumericFailureError("invert_conditional_cdf: failed to bracket the quantile");
  if (lo == hi) return lo;
  if (k_count == 1) return lo;

  // Past the median, solve in survival form: (1-u) - S(x) equals F(x) - u
  // but keeps absolute precision ~eps*(1-u) instead of ~eps. 1-u is exact
  // for u >= 0.5.
  const bool upper_tail = u > 0.5;
  const double su = 1.0 - u;
  auto residual = [&](double x) {
    return upper_tail ? su - conditional_sf(model, resp_row, d, x)
                      : conditional_cdf(model, resp_row, d, x) - u;
  };

  // Bisection to a short interval, then safeguarded Newton to the floor.
  double flo = residual(lo);
  double fhi = residual(hi);
  if (flo > 0.0 || fhi < 0.0) {
    const double pad = (hi - lo) + 1.0;
    lo -= pad;
    hi += pad;
    flo = residual(lo);
    fhi = residual(hi);
    if (flo > 0.0 || fhi < 0.0)
      throw NumericFailureError("invert_conditional_cdf: bracket does not contain the quantile");
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;

  const double coarse = 1e-6 * std::max({1.0, std::fabs(lo), std::fabs(hi)});
  for (int it = 0; it < 90 && hi - lo > coarse; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }

  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    const double fx = residual(x);
    if (fx == 0.0) return x;
    if (fx < 0.0)
      lo = x;
    else
      hi = x;
    const double pdf = conditional_pdf(model, resp_row, d, x);
    double next;
    if (pdf > 0.0) {
      next = x - fx / pdf;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    } else {
      next = 0.5 * (lo + hi);
    }
    if (std::fabs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::fabs(x)))
      return next;
    x = next;
  }
  if (std::fabs(residual(x)) > 1e-12)
    throw NumericFailureError("invert_conditional_cdf: Newton refinement did not converge");
  return x;
}

std::vector<double> sample_quantile_transform(const MixtureModel& model, const UniformDraw& draw) {
  const int dim = model.dimension();
  const int k_count = model.num_components();
  if (static_cast<int>(draw.u.size()) != dim)
    throw InvalidInputError("sample_quantile_transform: uniform draw dimension mismatch");
  for (double v : draw.u)
    if (!(v > 0.0 && v < 1.0))
      throw InvalidInputError("sample_quantile_transform: uniforms must lie inside (0,1)");

  std::vector<double> x(dim);
  std::vector<double> log_resp(k_count);
  std::vector<double> resp(k_count);
  {
    double mx = model.logits()[0];
    for (double l : model.logits()) mx = std::max(mx, l);
    double s = 0.0;
    for (double l : model.logits()) s += std::exp(l - mx);
    const double log_norm = mx + std::log(s);
    for (int k = 0; k < k_count; ++k) log_resp[k] = model.logits()[k] - log_norm;
  }

  for (int d = 0; d < dim; ++d) {
    for (int k = 0; k < k_count; ++k)
      resp[k] = (d == 0) ? model.weights()[k] : std::exp(log_resp[k]);
    x[d] = invert_conditional_cdf(model, resp, d, draw.u[d]);

    if (d + 1 == dim) break;
    double max_term = -HUGE_VAL;
    for (int k = 0; k < k_count; ++k) {
      log_resp[k] += family_log_pdf(model.component_family(k), model.mu(k, d), model.sigma(k, d),
                                    x[d]);
      max_term = std::max(max_term, log_resp[k]);
    }
    double sum = 0.0;
    for (int k = 0; k < k_count; ++k) sum += std::exp(log_resp[k] - max_term);
    const double log_cond = max_term + std::log(sum);
    for (int k = 0; k < k_count; ++k) log_resp[k] -= log_cond;
  }
  return x;
}

TruncatedSampleBatch sample_truncated(const MixtureModel& model, int d,
                                      std::span<const double> resp_row, double upper,
                                      int n_samples, Philox& rng,
                                      std::int64_t max_attempts_per_sample) {
  if (!std::isfinite(upper)) throw InvalidInputError("sample_truncated: upper bound must be finite");
  if (n_samples < 1) throw InvalidInputError("sample_truncated: need n_samples >= 1");
  if (max_attempts_per_sample < 1)
    throw InvalidInputError("sample_truncated: need max_attempts >= 1");

  TruncatedSampleBatch batch;
  batch.dimension = d;
  batch.upper = upper;
  batch.resp.assign(resp_row.begin(), resp_row.end());
  batch.samples.reserve(n_samples);

  std::int64_t attempts_since_accept = 0;
  while (static_cast<int>(batch.samples.size()) < n_samples) {
    const int k = draw_categorical(resp_row, rng.next_double());
    const double t = family_quantile(model.component_family(k), model.mu(k, d), model.sigma(k, d),
                                     rng.next_double());
    ++batch.attempts;
    if (t <= upper) {
      batch.samples.push_back(t);
      attempts_since_accept = 0;
    } else if (++attempts_since_accept >= max_attempts_per_sample) {
      // Smoothed estimate so an all-reject run still reports something.
      const double est = (static_cast<double>(batch.samples.size()) + 1.0) /
                         (static_cast<double>(batch.attempts) + 2.0);
      throw LowAcceptanceError(est);
    }
  }
  return batch;
}

}  // namespace mixgrad
