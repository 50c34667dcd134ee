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
#include <benchmark/benchmark.h>

#include <vector>

#include "mixgrad/forward_trace.hpp"
#include "mixgrad/losses.hpp"
#include "mixgrad/parameter_gradient.hpp"
#include "mixgrad/philox.hpp"
#include "mixgrad/sampling.hpp"
#include "mixgrad/weight_gradient.hpp"

namespace {

using namespace mixgrad;

MixtureModel make_model(int k_count, int dim) {
  Philox rng(0xBE9C4, 0);
  std::vector<double> logits(k_count);
  for (double& l : logits) l = 0.7 * normal_quantile(rng.next_double());
  std::vector<ComponentParams> comps(k_count);
  for (auto& comp : comps) {
    comp.family = Family::gaussian;
    comp.mu.resize(dim);
    comp.sigma.resize(dim);
    for (int d = 0; d < dim; ++d) {
      comp.mu[d] = -2.5 + 5.0 * rng.next_double();
      comp.sigma[d] = 0.6 + 1.2 * rng.next_double();
    }
  }
  return MixtureModel::from_logits(std::move(logits), std::move(comps));
}

void BM_ResponsibilitiesForward(benchmark::State& state) {
  const MixtureModel model = make_model(static_cast<int>(state.range(0)),
                                        static_cast<int>(state.range(1)));
  Philox rng(1, 0);
  const auto x = sample_ancestral(model, rng);
  ForwardTrace trace;
  for (auto _ : state) {
    responsibilities_forward_into(model, x, trace);
    benchmark::DoNotOptimize(trace.cond_pdf.data());
  }
}
BENCHMARK(BM_ResponsibilitiesForward)->Args({2, 2})->Args({5, 8});

void BM_AncestralSample(benchmark::State& state) {
  const MixtureModel model = make_model(static_cast<int>(state.range(0)),
                                        static_cast<int>(state.range(1)));
  Philox rng(2, 0);
  std::vector<double> x(model.dimension());
  for (auto _ : state) {
    sample_ancestral_into(model, rng, x);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_AncestralSample)->Args({2, 2})->Args({5, 8});

void BM_QuantileTransform(benchmark::State& state) {
  const MixtureModel model = make_model(static_cast<int>(state.range(0)),
                                        static_cast<int>(state.range(1)));
  Philox rng(3, 0);
  const UniformDraw draw = make_uniform_draw(model.dimension(), rng);
  for (auto _ : state) {
    auto x = sample_quantile_transform(model, draw);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_QuantileTransform)->Args({2, 2})->Args({5, 8});

void BM_PerSampleWeightGrad(benchmark::State& state) {
  const MixtureModel model = make_model(static_cast<int>(state.range(0)),
                                        static_cast<int>(state.range(1)));
  Philox rng(4, 0);
  const auto x = sample_ancestral(model, rng);
  const std::vector<double> lg(model.dimension(), 1.0);
  for (auto _ : state) {
    auto g = per_sample_weight_grad(model, x, lg);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_PerSampleWeightGrad)->Args({2, 2})->Args({5, 8});

void BM_ReparamComponentGrads(benchmark::State& state) {
  const MixtureModel model = make_model(static_cast<int>(state.range(0)),
                                        static_cast<int>(state.range(1)));
  Philox rng(5, 0);
  const auto x = sample_ancestral(model, rng);
  const auto trace = responsibilities_forward(model, x);
  const std::vector<double> lg(model.dimension(), 1.0);
  for (auto _ : state) {
    auto g = reparam_component_grads(model, trace, lg);
    benchmark::DoNotOptimize(g.dloss_dmu.data());
  }
}
BENCHMARK(BM_ReparamComponentGrads)->Args({2, 2})->Args({5, 8});

void BM_EstimateWeightGrad(benchmark::State& state) {
  const MixtureModel model = make_model(3, 3);
  const Loss loss = Loss::quadratic();
  for (auto _ : state) {
    auto report = estimate_weight_grad(model, loss, state.range(0), 99);
    benchmark::DoNotOptimize(report.blocks.data());
  }
}
BENCHMARK(BM_EstimateWeightGrad)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
