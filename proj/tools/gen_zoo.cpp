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

// Regenerates the committed model zoo: K in {1,2,3,5} x D in {1,2,3,8} x
// {gaussian, logistic} with parameters drawn from a fixed seed. The files
// under zoo/ are the source of truth; this tool only exists to document
// where they came from and to rebuild them if the grid ever changes.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include <json.hpp>

#include "mixgrad/families.hpp"
#include "mixgrad/mixture_model.hpp"
#include "mixgrad/philox.hpp"

namespace {

constexpr std::uint64_t kZooSeed = 0x5EED2026;

double uniform_in(mixgrad::Philox& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.next_double();
}

}  // namespace

int main(int argc, char** argv) {
  const std::string out_dir = argc > 1 ? argv[1] : "zoo";
  std::filesystem::create_directories(out_dir);

  const int k_grid[] = {1, 2, 3, 5};
  const int d_grid[] = {1, 2, 3, 8};
  const mixgrad::Family families[] = {mixgrad::Family::gaussian, mixgrad::Family::logistic};

  std::uint64_t stream = 0;
  for (mixgrad::Family family : families) {
    for (int k_count : k_grid) {
      for (int dim : d_grid) {
        mixgrad::Philox rng(kZooSeed, stream++);

        std::vector<double> logits(k_count);
        for (double& l : logits) l = 0.7 * mixgrad::normal_quantile(rng.next_double());

        nlohmann::json components = nlohmann::json::array();
        for (int k = 0; k < k_count; ++k) {
          std::vector<double> mu(dim), sigma(dim);
          for (int d = 0; d < dim; ++d) {
            mu[d] = uniform_in(rng, -2.5, 2.5);
            sigma[d] = uniform_in(rng, 0.6, 1.8);
          }
          components.push_back({{"family", mixgrad::family_name(family)},
                                {"mu", mu},
                                {"sigma", sigma}});
        }

        nlohmann::json doc;
        doc["K"] = k_count;
        doc["D"] = dim;
        doc["logits"] = logits;
        doc["components"] = components;

        const std::string name = mixgrad::family_name(family) + "_k" + std::to_string(k_count) +
                                 "_d" + std::to_string(dim);
        std::ofstream out(out_dir + "/" + name + ".json");
        out << doc.dump(2) << "\n";
        std::cout << name << "\n";
      }
    }
  }
  return 0;
}
