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

namespace mixgrad {

/// Closed registry of differentiable scalar losses g(x) with exact
/// gradients. Registry ids:
///   linear        g(x) = sum_d x_d
///   quadratic     g(x) = sum_d x_d^2
///   neg-log-target  g(x) = 0.5*sum_d x_d^2 + (D/2)*log(2*pi)
///   polynomial    g(x) = sum_d sum_p coeffs[d][p-1] * x_d^p
/// A polynomial with one coefficient row per dimension is the escape hatch
/// for custom losses; keeping gradients closed-form avoids an expression
/// parser.
class Loss {
 public:
  double value(std::span<const double> x) const;

  /// Gradient dg/dx_d. Throws InvalidLossError if any entry is non-finite.
  void gradient(std::span<const double> x, std::span<double> out) const;
  std::vector<double> gradient(std::span<const double> x) const;

  const std::string& id() const noexcept { return id_; }
  /// Empty unless id is "polynomial".
  const std::vector<std::vector<double>>& coefficients() const noexcept { return coeffs_; }

  static Loss linear();
  static Loss quadratic();
  static Loss neg_log_target();
  static Loss polynomial(std::vector<std::vector<double>> coeffs);

  /// Lookup by registry id; coeffs are required iff id == "polynomial".
  static Loss from_id(const std::string& id,
                      std::vector<std::vector<double>> coeffs = {});

 private:
  Loss(std::string id, std::vector<std::vector<double>> coeffs);

  std::string id_;
  std::vector<std::vector<double>> coeffs_;
};

}  // namespace mixgrad
