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
#include "mixgrad/model_zoo.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixgrad/errors.hpp"

namespace mixgrad {

namespace {

bool matches_filter(const std::string& name, const std::string& filter) {
  if (filter.empty()) return true;
  std::stringstream ss(filter);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (!token.empty() && name.find(token) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

std::vector<NamedModel> load_zoo(const std::string& directory, const std::string& filter) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory))
    throw InvalidInputError("zoo directory not found: " + directory);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<NamedModel> zoo;
  for (const fs::path& path : files) {
    const std::string name = path.stem().string();
    if (!matches_filter(name, filter)) continue;
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    zoo.push_back({name, MixtureModel::from_json_text(buffer.str())});
  }
  return zoo;
}

MixtureModel benchmark_model() {
  ComponentParams left{Family::gaussian, {-1.0}, {1.0}};
  ComponentParams right{Family::gaussian, {1.0}, {1.0}};
  return MixtureModel({0.5, 0.5}, {left, right});
}

MixtureModel identical_components_model(int k, int d, Family family) {
  if (k < 1 || d < 1) throw InvalidInputError("identical_components_model: need K >= 1, D >= 1");
  ComponentParams comp;
  comp.family = family;
  comp.mu.assign(d, 0.3);
  comp.sigma.assign(d, 1.1);
  std::vector<ComponentParams> comps(k, comp);
  std::vector<double> weights(k, 1.0 / static_cast<double>(k));
  // Make the weights sum to exactly 1 regardless of K.
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) sum += weights[i];
  weights.back() = 1.0 - sum;
  return MixtureModel(std::move(weights), std::move(comps));
}

}  // namespace mixgrad
