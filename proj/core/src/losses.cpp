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
#include "mixgrad/losses.hpp"

#include <cmath>
#include <utility>

#include "mixgrad/errors.hpp"

namespace mixgrad {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

Loss::Loss(std::string id, std::vector<std::vector<double>> coeffs)
    : id_(std::move(id)), coeffs_(std::move(coeffs)) {}

Loss Loss::linear() { return Loss("linear", {}); }
Loss Loss::quadratic() { return Loss("quadratic", {}); }
Loss Loss::neg_log_target() { return Loss("neg-log-target", {}); }

Loss Loss::polynomial(std::vector<std::vector<double>> coeffs) {
  if (coeffs.empty()) throw InvalidInputError("polynomial loss needs one coefficient row per dimension");
  for (const auto& row : coeffs)
    for (double c : row)
      if (!std::isfinite(c)) throw InvalidInputError("polynomial loss: non-finite coefficient");
  return Loss("polynomial", std::move(coeffs));
}

Loss Loss::from_id(const std::string& id, std::vector<std::vector<double>> coeffs) {
  if (id == "linear") return linear();
  if (id == "quadratic") return quadratic();
  if (id == "neg-log-target") return neg_log_target();
  if (id == "polynomial") return polynomial(std::move(coeffs));
  throw InvalidInputError("unknown loss id \"" + id + "\"");
}

double Loss::value(std::span<const double> x) const {
  if (id_ == "linear") {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  if (id_ == "quadratic") {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
  }
  if (id_ == "neg-log-target") {
    double s = 0.0;
    for (double v : x) s += v * v;
    return 0.5 * s + 0.5 * kLog2Pi * static_cast<double>(x.size());
  }
  // polynomial
  if (coeffs_.size() != x.size())
    throw InvalidInputError("polynomial loss: coefficient rows do not match dimension");
  double s = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    double pow_x = 1.0;
    for (double c : coeffs_[d]) {
      pow_x *= x[d];
      s += c * pow_x;
    }
  }
  return s;
}

void Loss::gradient(std::span<const double> x, std::span<double> out) const {
  if (out.size() != x.size()) throw InvalidInputError("loss gradient: output size mismatch");
  if (id_ == "linear") {
    for (double& g : out) g = 1.0;
  } else if (id_ == "quadratic") {
    for (std::size_t d = 0; d < x.size(); ++d) out[d] = 2.0 * x[d];
  } else if (id_ == "neg-log-target") {
    for (std::size_t d = 0; d < x.size(); ++d) out[d] = x[d];
  } else {
    if (coeffs_.size() != x.size())
      throw InvalidInputError("polynomial loss: coefficient rows do not match dimension");
    for (std::size_t d = 0; d < x.size(); ++d) {
      double g = 0.0;
      double pow_x = 1.0;  // x^(p-1)
      for (std::size_t p = 0; p < coeffs_[d].size(); ++p) {
        g += coeffs_[d][p] * static_cast<double>(p + 1) * pow_x;
        pow_x *= x[d];
      }
      out[d] = g;
    }
  }
  for (double g : out)
    if (!std::isfinite(g)) throw InvalidLossError("loss gradient returned a non-finite value");
}

std::vector<double> Loss::gradient(std::span<const double> x) const {
  std::vector<double> out(x.size());
  gradient(x, out);
  return out;
}

}  // namespace mixgrad
