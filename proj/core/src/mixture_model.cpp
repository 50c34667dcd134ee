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
#include "mixgrad/mixture_model.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <json.hpp>

#include "mixgrad/errors.hpp"

namespace mixgrad {

std::vector<double> normalize_weights(std::span<const double> logits) {
  if (logits.empty()) throw InvalidInputError("normalize_weights: need at least one logit");
  double max_logit = logits[0];
  for (double l : logits) {
    if (!std::isfinite(l)) throw InvalidInputError("normalize_weights: non-finite logit");
    max_logit = std::max(max_logit, l);
  }
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max_logit);
    sum += out[i];
  }
  for (double& w : out) w /= sum;
  return out;
}

std::vector<double> softmax_backward(std::span<const double> logits,
                                     std::span<const double> grad_weights) {
  if (logits.size() != grad_weights.size())
    throw InvalidInputError("softmax_backward: logits and gradient length mismatch");
  for (double g : grad_weights)
    if (!std::isfinite(g)) throw InvalidInputError("softmax_backward: non-finite gradient");
  const std::vector<double> w = normalize_weights(logits);
  double weighted = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) weighted += w[i] * grad_weights[i];
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] * (grad_weights[i] - weighted);
  return out;
}

MixtureModel::MixtureModel(std::vector<double> weights, std::vector<ComponentParams> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  logits_.resize(weights_.size());
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    if (!(weights_[k] > 0.0)) throw InvalidInputError("mixture weight must be positive");
    logits_[k] = std::log(weights_[k]);
  }
  validate();
}

MixtureModel::MixtureModel(std::vector<double> weights, std::vector<double> logits,
                           std::vector<ComponentParams> components)
    : weights_(std::move(weights)), logits_(std::move(logits)), components_(std::move(components)) {
  validate();
}

MixtureModel MixtureModel::from_logits(std::vector<double> logits,
                                       std::vector<ComponentParams> components) {
  std::vector<double> weights = normalize_weights(logits);
  return MixtureModel(std::move(weights), std::move(logits), std::move(components));
}

void MixtureModel::validate() {
  const std::size_t k_count = weights_.size();
  if (k_count == 0) throw InvalidInputError("mixture needs at least one component");
  if (components_.size() != k_count)
    throw InvalidInputError("component count does not match weight count");
  if (logits_.size() != k_count) throw InvalidInputError("logit count does not match weight count");

  double sum = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w)) throw InvalidInputError("non-finite mixture weight");
    if (w < kWeightFloor)
      throw InvalidInputError("mixture weight below floor " + std::to_string(kWeightFloor));
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw InvalidInputError("mixture weights must sum to 1 within 1e-12; got sum " +
                            std::to_string(sum));

  const std::size_t dim = components_[0].mu.size();
  if (dim == 0) throw InvalidInputError("components must have at least one dimension");
  for (const ComponentParams& comp : components_) {
    if (comp.mu.size() != dim || comp.sigma.size() != dim)
      throw InvalidInputError("all components must share the same dimension");
    for (double m : comp.mu)
      if (!std::isfinite(m)) throw InvalidInputError("non-finite component location");
    for (double s : comp.sigma) {
      if (!std::isfinite(s)) throw InvalidInputError("non-finite component scale");
      if (s < kScaleFloor)
        throw InvalidInputError("component scale below floor " + std::to_string(kScaleFloor));
    }
  }
  dimension_ = static_cast<int>(dim);
}

MixtureModel MixtureModel::with_mu(int k, int d, double value) const {
  std::vector<ComponentParams> comps = components_;
  comps.at(k).mu.at(d) = value;
  return MixtureModel(weights_, logits_, std::move(comps));
}

MixtureModel MixtureModel::with_sigma(int k, int d, double value) const {
  std::vector<ComponentParams> comps = components_;
  comps.at(k).sigma.at(d) = value;
  return MixtureModel(weights_, logits_, std::move(comps));
}

namespace {

std::vector<double> require_number_array(const nlohmann::json& j, const std::string& key,
                                         std::size_t expected_size) {
  if (!j.contains(key) || !j[key].is_array())
    throw InvalidInputError("model JSON: missing array field \"" + key + "\"");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) throw InvalidInputError("model JSON: non-numeric entry in \"" + key + "\"");
    out.push_back(v.get<double>());
  }
  if (out.size() != expected_size)
    throw InvalidInputError("model JSON: field \"" + key + "\" has length " +
                            std::to_string(out.size()) + ", expected " +
                            std::to_string(expected_size));
  return out;
}

}  // namespace

MixtureModel MixtureModel::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError(std::string("model JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw InvalidInputError("model JSON: document must be an object");
  if (!j.contains("K") || !j.contains("D"))
    throw InvalidInputError("model JSON: missing K or D");
  const auto k_count = j["K"].get<std::size_t>();
  const auto dim = j["D"].get<std::size_t>();

  if (!j.contains("components") || !j["components"].is_array() ||
      j["components"].size() != k_count)
    throw InvalidInputError("model JSON: \"components\" must be an array of K entries");

  std::vector<ComponentParams> comps;
  comps.reserve(k_count);
  for (const auto& jc : j["components"]) {
    ComponentParams comp;
    if (!jc.contains("family") || !jc["family"].is_string())
      throw InvalidInputError("model JSON: component missing \"family\"");
    comp.family = family_from_name(jc["family"].get<std::string>());
    comp.mu = require_number_array(jc, "mu", dim);
    comp.sigma = require_number_array(jc, "sigma", dim);
    comps.push_back(std::move(comp));
  }

  const bool has_weights = j.contains("weights");
  const bool has_logits = j.contains("logits");
  if (has_weights == has_logits)
    throw InvalidInputError("model JSON: provide exactly one of \"weights\" or \"logits\"");
  if (has_logits)
    return MixtureModel::from_logits(require_number_array(j, "logits", k_count), std::move(comps));
  return MixtureModel(require_number_array(j, "weights", k_count), std::move(comps));
}

std::string MixtureModel::to_json_text(int indent) const {
  nlohmann::json j;
  j["K"] = num_components();
  j["D"] = dimension();
  j["weights"] = weights_;
  nlohmann::json comps = nlohmann::json::array();
  for (const ComponentParams& comp : components_) {
    nlohmann::json jc;
    jc["family"] = family_name(comp.family);
    jc["mu"] = comp.mu;
    jc["sigma"] = comp.sigma;
    comps.push_back(std::move(jc));
  }
  j["components"] = std::move(comps);
  return j.dump(indent);
}

}  // namespace mixgrad
