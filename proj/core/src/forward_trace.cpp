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
#include "mixgrad/forward_trace.hpp"

#include <algorithm>
#include <cmath>

#include "mixgrad/errors.hpp"

namespace mixgrad {

namespace {
const double kLogDensityFloor = std::log(kDensityFloor);
}

ComponentEval component_eval(const MixtureModel& model, int k, int d, double x) {
  if (k < 0 || k >= model.num_components()) throw InvalidInputError("component index out of range");
  if (d < 0 || d >= model.dimension()) throw InvalidInputError("dimension index out of range");
  if (!std::isfinite(x)) throw InvalidInputError("component_eval: non-finite x");
  const Family fam = model.component_family(k);
  const double mu = model.mu(k, d);
  const double sigma = model.sigma(k, d);
  return {family_pdf(fam, mu, sigma, x), family_cdf(fam, mu, sigma, x),
          family_dlogpdf_dx(fam, mu, sigma, x)};
}

void responsibilities_forward_into(const MixtureModel& model, std::span<const double> x,
                                   ForwardTrace& trace) {
  const int k_count = model.num_components();
  const int dim = model.dimension();
  if (static_cast<int>(x.size()) != dim)
    throw InvalidInputError("responsibilities_forward: sample dimension mismatch");
  for (double v : x)
    if (!std::isfinite(v)) throw InvalidInputError("responsibilities_forward: non-finite sample");

  trace.num_components = k_count;
  trace.dimension = dim;
  trace.x.assign(x.begin(), x.end());
  const std::size_t dk = static_cast<std::size_t>(dim) * k_count;
  trace.resp.resize(dk);
  trace.comp_pdf.resize(dk);
  trace.comp_cdf.resize(dk);
  trace.comp_dlogpdf_dx.resize(dk);
  trace.cond_pdf.resize(dim);
  trace.log_cond_pdf.resize(dim);

  // log_resp carries the recursion; resp rows are its exponentials except at
  // d = 0 where the weights are stored exactly.
  static thread_local std::vector<double> log_resp;
  log_resp.resize(k_count);
  for (int k = 0; k < k_count; ++k) log_resp[k] = model.logits()[k];
  // Normalize the logits into log probabilities once.
  {
    double mx = log_resp[0];
    for (double v : log_resp) mx = std::max(mx, v);
    double s = 0.0;
    for (double v : log_resp) s += std::exp(v - mx);
    const double log_norm = mx + std::log(s);
    for (double& v : log_resp) v -= log_norm;
  }

  for (int d = 0; d < dim; ++d) {
    double* resp_row = trace.resp.data() + static_cast<std::size_t>(d) * k_count;
    double* pdf_row = trace.comp_pdf.data() + static_cast<std::size_t>(d) * k_count;
    double* cdf_row = trace.comp_cdf.data() + static_cast<std::size_t>(d) * k_count;
    double* dlx_row = trace.comp_dlogpdf_dx.data() + static_cast<std::size_t>(d) * k_count;

    double max_term = -HUGE_VAL;
    static thread_local std::vector<double> log_pdf_row;
    log_pdf_row.resize(k_count);
    for (int k = 0; k < k_count; ++k) {
      const Family fam = model.component_family(k);
      const double mu = model.mu(k, d);
      const double sigma = model.sigma(k, d);
      const double lp = family_log_pdf(fam, mu, sigma, x[d]);
      log_pdf_row[k] = lp;
      pdf_row[k] = std::exp(lp);
      cdf_row[k] = family_cdf(fam, mu, sigma, x[d]);
      dlx_row[k] = family_dlogpdf_dx(fam, mu, sigma, x[d]);
      resp_row[k] = (d == 0) ? model.weights()[k] : std::exp(log_resp[k]);
      max_term = std::max(max_term, log_resp[k] + lp);
    }

    double sum = 0.0;
    for (int k = 0; k < k_count; ++k) sum += std::exp(log_resp[k] + log_pdf_row[k] - max_term);
    const double log_cond = max_term + std::log(sum);
    if (!(log_cond >= kLogDensityFloor)) throw DegenerateSampleError(d, log_cond);
    trace.log_cond_pdf[d] = log_cond;
    trace.cond_pdf[d] = std::exp(log_cond);

    for (int k = 0; k < k_count; ++k) log_resp[k] += log_pdf_row[k] - log_cond;
  }
}

ForwardTrace responsibilities_forward(const MixtureModel& model, std::span<const double> x) {
  ForwardTrace trace;
  responsibilities_forward_into(model, x, trace);
  return trace;
}

double joint_pdf(const MixtureModel& model, std::span<const double> x) {
  const int k_count = model.num_components();
  const int dim = model.dimension();
  if (static_cast<int>(x.size()) != dim) throw InvalidInputError("joint_pdf: dimension mismatch");
  double max_term = -HUGE_VAL;
  std::vector<double> log_terms(k_count);
  for (int k = 0; k < k_count; ++k) {
    double lt = model.logits()[k];
    for (int d = 0; d < dim; ++d)
      lt += family_log_pdf(model.component_family(k), model.mu(k, d), model.sigma(k, d), x[d]);
    log_terms[k] = lt;
    max_term = std::max(max_term, lt);
  }
  // logits may be unnormalized; subtract their log-sum once.
  double logit_mx = model.logits()[0];
  for (double l : model.logits()) logit_mx = std::max(logit_mx, l);
  double logit_sum = 0.0;
  for (double l : model.logits()) logit_sum += std::exp(l - logit_mx);
  const double log_norm = logit_mx + std::log(logit_sum);

  if (!std::isfinite(max_term)) return 0.0;
  double sum = 0.0;
  for (double lt : log_terms) sum += std::exp(lt - max_term);
  return std::exp(max_term + std::log(sum) - log_norm);
}

}  // namespace mixgrad
