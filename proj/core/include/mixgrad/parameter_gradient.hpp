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
#include <string>
#include <vector>

#include "mixgrad/estimator.hpp"
#include "mixgrad/forward_trace.hpp"
#include "mixgrad/losses.hpp"
#include "mixgrad/mixture_model.hpp"
#include "mixgrad/philox.hpp"

namespace mixgrad {

/// Identifies one scalar model parameter: a mixture weight, or the location
/// or scale of one component in one dimension.
struct ParameterSelector {
  enum class Kind { weight, location, scale };

  Kind kind = Kind::weight;
  int component = 0;
  int dimension = 0;  // unused for weights

  static ParameterSelector weight(int j) { return {Kind::weight, j, 0}; }
  static ParameterSelector location(int k, int d) { return {Kind::location, k, d}; }
  static ParameterSelector scale(int k, int d) { return {Kind::scale, k, d}; }

  /// "pi[j]", "mu[k,d]" or "sigma[k,d]".
  std::string label() const;

  bool operator==(const ParameterSelector&) const = default;
};

std::vector<ParameterSelector> all_weight_selectors(const MixtureModel& model);
std::vector<ParameterSelector> all_location_selectors(const MixtureModel& model);
std::vector<ParameterSelector> all_scale_selectors(const MixtureModel& model);
std::vector<ParameterSelector> all_parameter_selectors(const MixtureModel& model);

void validate_selector(const MixtureModel& model, const ParameterSelector& sel);

// Sample derivatives with respect to a single parameter, in the parameter's
// natural coordinates (raw weight, mu, sigma). The recursion is the weight
// recursion generalized to any parameter theta:
//   - dlogp starts at delta_jk/weight_j for weights, at zero otherwise;
//   - the step from d-1 to d gains the direct term
//       (delta_{k,k*} - p[d][k*]) * dlogf_{k*}(x_{d-1})/dtheta
//     when d-1 is the parameter's own dimension;
//   - dx_d gains the direct term -(1/f_d) * p[d][k*] * dF_{k*}(x_d)/dtheta
//     at the parameter's own dimension.
// Dimensions before the parameter's own are unaffected (derivative zero).
// docs/gradient-recursions.md derives this from the conditional-CDF
// identity.

/// d x_d / d theta for every dimension d.
std::vector<double> pathwise_dx_dtheta_path(const MixtureModel& model, const ForwardTrace& trace,
                                            const ParameterSelector& sel);

/// d x_d / d theta at one dimension. Zero for dimensions before a component
/// parameter's own.
double pathwise_dx_dtheta_exact(const MixtureModel& model, const ForwardTrace& trace, int d,
                                const ParameterSelector& sel);

/// Per-sample loss derivatives with respect to every component location and
/// scale (natural sigma coordinates), combining same-dimension terms with
/// the downstream responsibility recursion.
struct ComponentGrads {
  int num_components = 0;
  int dimension = 0;
  std::vector<double> dloss_dmu;     // K x D, [k*D + d]
  std::vector<double> dloss_dsigma;  // K x D
};

ComponentGrads reparam_component_grads(const MixtureModel& model, const ForwardTrace& trace,
                                       std::span<const double> loss_grad);

/// Monte-Carlo estimate of the partial integral of the parameter derivative
/// of the conditional density up to x_d, via rejection sampling from the
/// truncated conditional:
///   estimate = (F_d(x_d) / N) * sum_n dlog f_d(t_n)/dtheta,  t_n <= x_d.
/// -estimate / f_d(x_d) is an unbiased estimate of the exact sample
/// derivative, which is how the closed-form path is cross-checked.
/// Supported selectors: locations/scales at dimension d, and weights at
/// d == 0 (where the responsibilities still equal the weights).
struct PartialIntegralEstimate {
  double value = 0;
  double std_error = 0;
  std::int64_t n_inner = 0;
  double acceptance_rate = 0;
};

PartialIntegralEstimate mc_partial_integral(const MixtureModel& model, const ForwardTrace& trace,
                                            int d, const ParameterSelector& sel,
                                            std::int64_t n_inner, Philox& rng);

/// Pathwise Monte-Carlo gradient of E[loss] for an arbitrary selector set,
/// reported in optimization coordinates: logit space for weights (with the
/// raw free-coordinate block alongside), mu for locations, log(sigma) for
/// scales. Deterministic given (seed, workers).
EstimatorReport estimate_loss_grad(const MixtureModel& model, const Loss& loss,
                                   std::span<const ParameterSelector> selectors, std::int64_t n,
                                   std::uint64_t seed, int workers = 1);

}  // namespace mixgrad
