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

#include <string>
#include <vector>

#include "mixgrad/mixture_model.hpp"
#include "mixgrad/verification.hpp"

namespace mixgrad {

/// Loads every *.json model in a directory, sorted by file name. `filter`
/// keeps only models whose name contains one of the comma-separated
/// substrings (empty keeps all).
std::vector<NamedModel> load_zoo(const std::string& directory, const std::string& filter = "");

/// The fixed two-component benchmark model: weights (0.5, 0.5), unit-scale
/// Gaussians at -1 and +1, D = 1.
MixtureModel benchmark_model();

/// A model whose K components are identical, so the density does not depend
/// on the weights at all; gradient estimators must see that.
MixtureModel identical_components_model(int k, int d, Family family = Family::gaussian);

}  // namespace mixgrad
