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

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "mixgrad/mixture_model.hpp"
#include "mixgrad/philox.hpp"

namespace testsupport {

inline bool near_abs(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

inline bool near_rel(double a, double b, double rel, double abs_floor = 0.0) {
  return std::fabs(a - b) <= abs_floor + rel * std::max(std::fabs(a), std::fabs(b));
}

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double stat = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    stat = std::max(stat, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return stat;
}

/// One-sample KS statistic against a CDF.
inline double ks_one_sample(std::vector<double> samples,
                            const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double stat = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    stat = std::max(stat, std::fabs(static_cast<double>(i + 1) / n - f));
    stat = std::max(stat, std::fabs(f - static_cast<double>(i) / n));
  }
  return stat;
}

/// Two-sided critical values at level alpha (asymptotic Kolmogorov law).
inline double ks_critical_two_sample(double alpha, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

inline double ks_critical_one_sample(double alpha, std::size_t n) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

/// Random well-conditioned model, same parameter ranges as the zoo.
inline mixgrad::MixtureModel random_model(mixgrad::Philox& rng, int k_count, int dim,
                                          mixgrad::Family family) {
  std::vector<double> logits(k_count);
  for (double& l : logits) l = 0.7 * mixgrad::normal_quantile(rng.next_double());
  std::vector<mixgrad::ComponentParams> comps(k_count);
  for (auto& comp : comps) {
    comp.family = family;
    comp.mu.resize(dim);
    comp.sigma.resize(dim);
    for (int d = 0; d < dim; ++d) {
      comp.mu[d] = -2.5 + 5.0 * rng.next_double();
      comp.sigma[d] = 0.6 + 1.2 * rng.next_double();
    }
  }
  return mixgrad::MixtureModel::from_logits(std::move(logits), std::move(comps));
}

inline mixgrad::MixtureModel gaussian1d(double mu, double sigma) {
  return mixgrad::MixtureModel({1.0}, {{mixgrad::Family::gaussian, {mu}, {sigma}}});
}

}  // namespace testsupport
