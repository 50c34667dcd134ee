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

#include <span>
#include <string>
#include <vector>

#include "mixgrad/families.hpp"

namespace mixgrad {

/// Scales below this are rejected at model construction; the recursions
/// divide by conditional densities, and near-zero scales make them spike.
inline constexpr double kScaleFloor = 1e-8;

/// Weights below this are rejected: the weight-gradient initial condition
/// contains a 1/weight term that is singular at zero.
inline constexpr double kWeightFloor = 1e-10;

/// Conditional densities below this underflow cutoff raise
/// DegenerateSampleError rather than propagating junk through divisions.
inline constexpr double kDensityFloor = 1e-300;

/// One mixture component: a product of independent univariate
/// location-scale distributions, one per dimension.
struct ComponentParams {
  Family family = Family::gaussian;
  std::vector<double> mu;     // location per dimension
  std::vector<double> sigma;  // scale per dimension, all >= kScaleFloor
};

/// Softmax with max-subtraction. Output sums to 1 and is invariant under
/// adding a constant to all logits.
std::vector<double> normalize_weights(std::span<const double> logits);

/// Pulls a gradient with respect to the normalized weights back through the
/// softmax: returns J^T * grad_weights where J is the softmax Jacobian.
/// The result always sums to zero, which is exactly the point: gradients in
/// logit coordinates respect the simplex constraint.
std::vector<double> softmax_backward(std::span<const double> logits,
                                     std::span<const double> grad_weights);

/// A K-component mixture over R^D with simplex weights and per-dimension
/// independent (diagonal) components. Immutable after construction and safe
/// to share across threads.
class MixtureModel {
 public:
  /// Weights must already lie on the simplex (sum within 1e-12 of 1).
  MixtureModel(std::vector<double> weights, std::vector<ComponentParams> components);

  /// Weights are produced from the logits by normalize_weights.
  static MixtureModel from_logits(std::vector<double> logits,
                                  std::vector<ComponentParams> components);

  int num_components() const noexcept { return static_cast<int>(weights_.size()); }
  int dimension() const noexcept { return dimension_; }

  const std::vector<double>& weights() const noexcept { return weights_; }
  /// Logits reproducing the weights; log(weights) when the model was built
  /// from weights directly.
  const std::vector<double>& logits() const noexcept { return logits_; }
  const std::vector<ComponentParams>& components() const noexcept { return components_; }
  const ComponentParams& component(int k) const { return components_.at(k); }

  Family component_family(int k) const { return components_[k].family; }
  double mu(int k, int d) const { return components_[k].mu[d]; }
  double sigma(int k, int d) const { return components_[k].sigma[d]; }

  /// Model with component k's location or scale replaced; used by
  /// finite-difference oracles.
  MixtureModel with_mu(int k, int d, double value) const;
  MixtureModel with_sigma(int k, int d, double value) const;

  /// JSON document with fields K, D, weights (or logits) and components;
  /// see README for the schema.
  static MixtureModel from_json_text(const std::string& text);
  std::string to_json_text(int indent = 2) const;

 private:
  MixtureModel(std::vector<double> weights, std::vector<double> logits,
               std::vector<ComponentParams> components);
  void validate();

  std::vector<double> weights_;
  std::vector<double> logits_;
  std::vector<ComponentParams> components_;
  int dimension_ = 0;
};

}  // namespace mixgrad
