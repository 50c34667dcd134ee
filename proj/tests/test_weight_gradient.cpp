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
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mixgrad/errors.hpp"
#include "mixgrad/model_zoo.hpp"
#include "mixgrad/weight_gradient.hpp"
#include "support.hpp"

using namespace mixgrad;
using testsupport::near_abs;
using testsupport::near_rel;

namespace {

MixtureModel two_gaussians_1d() {
  ComponentParams a{Family::gaussian, {-1.0}, {1.0}};
  ComponentParams b{Family::gaussian, {1.0}, {1.0}};
  return MixtureModel({0.5, 0.5}, {a, b});
}

MixtureModel two_gaussians_2d() {
  ComponentParams a{Family::gaussian, {-1.0, -1.0}, {1.0, 1.0}};
  ComponentParams b{Family::gaussian, {1.0, 1.0}, {1.0, 1.0}};
  return MixtureModel({0.5, 0.5}, {a, b});
}

}  // namespace

TEST_SUITE("weight_gradient") {

TEST_CASE("initial conditions: identical standard-normal components") {
  ComponentParams comp{Family::gaussian, {0.0}, {1.0}};
  const MixtureModel model({0.5, 0.5}, {comp, comp});
  const auto trace = responsibilities_forward(model, std::vector<double>{0.0});
  const auto rows = weight_grad_init(model, trace);
  // -F(0)/f(0) = -0.5/phi(0), identical for both weights.
  CHECK(near_abs(rows.dx_dpi[0], -1.2533141373155001, 1e-12));
  CHECK(rows.dx_dpi[0] == rows.dx_dpi[1]);
}

TEST_CASE("initial conditions: separated components closed form") {
  const MixtureModel model = two_gaussians_1d();
  const auto trace = responsibilities_forward(model, std::vector<double>{0.0});
  const auto rows = weight_grad_init(model, trace);
  CHECK(near_abs(rows.dx_dpi[0], -3.4770518117036942, 1e-12));
  CHECK(near_abs(rows.dx_dpi[1], -0.6556795424187986, 1e-12));
}

TEST_CASE("initial dlogp row is exactly the inverse-weight diagonal") {
  ComponentParams comp{Family::gaussian, {0.0}, {1.0}};
  const double third = 1.0 / 3.0;
  const MixtureModel model({third, third, 1.0 - 2.0 * third}, {comp, comp, comp});
  const auto trace = responsibilities_forward(model, std::vector<double>{0.4});
  const auto rows = weight_grad_init(model, trace);
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) {
      const double want = k == j ? 1.0 / model.weights()[k] : 0.0;
      CHECK(rows.dlogp_dpi[static_cast<std::size_t>(k) * 3 + j] == want);
    }
  CHECK(near_abs(rows.dlogp_dpi[0], 3.0, 1e-12));
}

TEST_CASE("step with identical components cancels the sample derivative") {
  // dlogp becomes delta_jk/pi_j - 1 and the weighted sum against the common
  // CDF vanishes, so dx is exactly zero past the first dimension.
  ComponentParams comp{Family::gaussian, {0.0, 0.0}, {1.0, 1.0}};
  const MixtureModel model({0.5, 0.5}, {comp, comp});
  const auto trace = responsibilities_forward(model, std::vector<double>{0.3, -0.9});
  const auto rows0 = weight_grad_init(model, trace);
  const auto rows1 = weight_grad_step(model, trace, 1, rows0);
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j) {
      const double want = (k == j ? 2.0 : 0.0) - 1.0;
      CHECK(near_abs(rows1.dlogp_dpi[static_cast<std::size_t>(k) * 2 + j], want, 1e-12));
    }
  CHECK(near_abs(rows1.dx_dpi[0], 0.0, 1e-12));
  CHECK(rows1.dx_dpi[0] == rows1.dx_dpi[1]);
}

TEST_CASE("single component: weight freedom dies after normalization") {
  const MixtureModel model({1.0}, {{Family::gaussian, {0.0, 0.0}, {1.0, 1.0}}});
  const auto trace = responsibilities_forward(model, std::vector<double>{0.5, -0.2});
  const auto rows0 = weight_grad_init(model, trace);
  CHECK(rows0.dlogp_dpi[0] == 1.0);
  const auto rows1 = weight_grad_step(model, trace, 1, rows0);
  CHECK(rows1.dlogp_dpi[0] == 0.0);
  CHECK(rows1.dx_dpi[0] == 0.0);
}

TEST_CASE("two-dimensional recursion against the frozen oracle") {
  // Independent reference: implicit differentiation of the numerically
  // solved quantile transform, cross-checked by raw finite differences.
  const MixtureModel model = two_gaussians_2d();
  const auto trace = responsibilities_forward(model, std::vector<double>{1.0, 0.0});
  const auto rows0 = weight_grad_init(model, trace);
  CHECK(near_rel(rows0.dx_dpi[0], -4.3152048329807648, 1e-12));
  CHECK(near_rel(rows0.dx_dpi[1], -2.2078308598717262, 1e-12));

  const auto rows1 = weight_grad_step(model, trace, 1, rows0);
  CHECK(near_rel(rows1.dlogp_dpi[0], 9.3632337714867528, 1e-10));
  CHECK(near_rel(rows1.dlogp_dpi[1], 2.1277077841330594, 1e-10));
  CHECK(near_rel(rows1.dlogp_dpi[2], -1.2671758944747771, 1e-10));
  CHECK(near_rel(rows1.dlogp_dpi[3], -0.28795393561039317, 1e-10));
  CHECK(near_rel(rows1.dx_dpi[0], -3.1490036307030942, 1e-10));
  CHECK(near_rel(rows1.dx_dpi[1], -0.7155817851855627, 1e-10));
}

TEST_CASE("step validates its inputs") {
  const MixtureModel model = two_gaussians_2d();
  const auto trace = responsibilities_forward(model, std::vector<double>{0.5, 0.5});
  auto rows = weight_grad_init(model, trace);
  CHECK_THROWS_AS(weight_grad_step(model, trace, 0, rows), InvalidInputError);
  CHECK_THROWS_AS(weight_grad_step(model, trace, 2, rows), InvalidInputError);
  rows.dx_dpi[0] = std::nan("");
  CHECK_THROWS_AS(weight_grad_step(model, trace, 1, rows), InvalidInputError);
}

TEST_CASE("responsibility-weighted dlogp rows sum to zero past d=0") {
  Philox rng(811, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const int k_count = 2 + static_cast<int>(rng.next_double() * 4);
    const int dim = 2 + static_cast<int>(rng.next_double() * 5);
    const Family fam = trial % 2 == 0 ? Family::gaussian : Family::logistic;
    const MixtureModel model = testsupport::random_model(rng, k_count, dim, fam);
    std::vector<double> x(dim);
    for (double& v : x) v = -3.5 + 7.0 * rng.next_double();
    const auto trace = responsibilities_forward(model, x);
    const auto grad = weight_gradient_recursion(model, trace, /*keep_dlogp=*/true);
    for (int d = 1; d < dim; ++d)
      for (int j = 0; j < k_count; ++j) {
        double weighted = 0.0;
        for (int k = 0; k < k_count; ++k)
          weighted += trace.resp_at(d, k) *
                      grad.dlogp_dpi[(static_cast<std::size_t>(d) * k_count + k) * k_count + j];
        CHECK(near_abs(weighted, 0.0, 1e-8));
      }
  }
}

TEST_CASE("per-sample gradient basics") {
  const MixtureModel model = two_gaussians_1d();
  // zero loss gradient annihilates everything
  const auto zeros = per_sample_weight_grad(model, std::vector<double>{0.3},
                                            std::vector<double>{0.0});
  CHECK(zeros == std::vector<double>{0.0, 0.0});

  // D=1, g(x)=x reduces to the initial condition
  const auto grad = per_sample_weight_grad(model, std::vector<double>{0.0},
                                           std::vector<double>{1.0});
  CHECK(near_abs(grad[0], -3.4770518117036942, 1e-12));
  CHECK(near_abs(grad[1], -0.6556795424187986, 1e-12));

  CHECK_THROWS_AS(per_sample_weight_grad(model, std::vector<double>{0.0},
                                         std::vector<double>{std::nan("")}),
                  InvalidInputError);
}

TEST_CASE("identical components give j-independent per-sample gradients") {
  // K=2 runs bit-identical arithmetic for both j; for K>=3 the reduction
  // over components associates differently per j, so equality holds to
  // machine precision instead.
  const MixtureModel pair = identical_components_model(2, 4);
  const MixtureModel quad = identical_components_model(4, 4);
  Philox rng(812, 0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(4), lg(4);
    for (int d = 0; d < 4; ++d) {
      x[d] = -2.0 + 4.0 * rng.next_double();
      lg[d] = -1.0 + 2.0 * rng.next_double();
    }
    const auto g2 = per_sample_weight_grad(pair, x, lg);
    CHECK(g2[0] == g2[1]);
    const auto g4 = per_sample_weight_grad(quad, x, lg);
    for (int j = 1; j < 4; ++j) CHECK(near_rel(g4[j], g4[0], 1e-12, 1e-13));
  }
}

TEST_CASE("permuting components permutes the per-sample gradient") {
  ComponentParams a{Family::gaussian, {-1.0, 0.3}, {1.0, 0.9}};
  ComponentParams b{Family::gaussian, {0.8, -0.6}, {1.2, 1.1}};
  ComponentParams c{Family::gaussian, {0.1, 1.4}, {0.7, 1.3}};
  const MixtureModel model({0.2, 0.5, 0.3}, {a, b, c});
  const MixtureModel permuted({0.3, 0.2, 0.5}, {c, a, b});
  const std::vector<double> x{0.4, -0.8};
  const std::vector<double> lg{1.0, -0.5};
  const auto g1 = per_sample_weight_grad(model, x, lg);
  const auto g2 = per_sample_weight_grad(permuted, x, lg);
  // permutation: component i of `model` is component (i+1)%3 of `permuted`
  CHECK(near_rel(g1[0], g2[1], 1e-12));
  CHECK(near_rel(g1[1], g2[2], 1e-12));
  CHECK(near_rel(g1[2], g2[0], 1e-12));
}

TEST_CASE("estimator: identical components have zero logit gradient") {
  const MixtureModel model = identical_components_model(4, 2);
  const auto report = estimate_weight_grad(model, Loss::quadratic(), 20000, 991);
  const auto& logit = report.block(kBlockWeightsLogit);
  for (int j = 0; j < 4; ++j) {
    // Exactly zero per sample up to roundoff, not just in expectation.
    CHECK(near_abs(logit.mean[j], 0.0, 1e-12));
    CHECK(std::fabs(logit.mean[j]) <= 3.0 * logit.std_error[j] + 1e-12);
  }
  // Raw derivatives are equal across j, so they survive in the raw block.
  const auto& raw = report.block(kBlockWeightsRaw);
  for (int j = 1; j < 4; ++j) CHECK(near_rel(raw.mean[j], raw.mean[0], 1e-12, 1e-13));
}

TEST_CASE("estimator matches the closed-form benchmark gradient in logit space") {
  // E[x] over the two-Gaussian benchmark: raw gradient along the simplex is
  // (-1, +1), i.e. (-0.5, +0.5) after the softmax pullback.
  const MixtureModel model = benchmark_model();
  const auto report = estimate_weight_grad(model, Loss::linear(), 100000, 2718);
  const auto& logit = report.block(kBlockWeightsLogit);
  CHECK(std::fabs(logit.mean[0] - (-0.5)) <= 3.0 * logit.std_error[0]);
  CHECK(std::fabs(logit.mean[1] - 0.5) <= 3.0 * logit.std_error[1]);
  // The raw block's simplex-tangential part carries the same information.
  const auto& raw = report.block(kBlockWeightsRaw);
  const double tangential = 0.5 * (raw.mean[1] - raw.mean[0]);
  CHECK(near_abs(tangential, 1.0, 3.0 * logit.std_error[1] * 2.0));
  CHECK(report.n_samples == 100000);
  CHECK(report.degenerate_samples == 0);
}

TEST_CASE("single-component models have exactly zero logit gradient") {
  // K=1 leaves no weight freedom: the softmax pullback annihilates the
  // whole raw derivative, sample by sample.
  const MixtureModel model({1.0}, {{Family::gaussian, {0.7, -0.2}, {1.0, 1.4}}});
  const auto report = estimate_weight_grad(model, Loss::quadratic(), 5000, 446);
  const auto& logit = report.block(kBlockWeightsLogit);
  CHECK(logit.mean[0] == 0.0);
  CHECK(logit.std_error[0] == 0.0);
}

TEST_CASE("permuting components permutes the estimated gradient") {
  ComponentParams a{Family::gaussian, {-1.2}, {0.9}};
  ComponentParams b{Family::gaussian, {0.7}, {1.3}};
  const MixtureModel model({0.35, 0.65}, {a, b});
  const MixtureModel permuted({0.65, 0.35}, {b, a});
  const auto r1 = estimate_weight_grad(model, Loss::quadratic(), 100000, 4242);
  const auto r2 = estimate_weight_grad(permuted, Loss::quadratic(), 100000, 2424);
  const auto& l1 = r1.block(kBlockWeightsLogit);
  const auto& l2 = r2.block(kBlockWeightsLogit);
  for (int j = 0; j < 2; ++j) {
    const double se = std::sqrt(l1.std_error[j] * l1.std_error[j] +
                                l2.std_error[1 - j] * l2.std_error[1 - j]);
    CHECK(std::fabs(l1.mean[j] - l2.mean[1 - j]) <= 3.0 * se);
  }
}

TEST_CASE("estimator is deterministic and worker-count invariant") {
  const MixtureModel model = benchmark_model();
  const auto r1 = estimate_weight_grad(model, Loss::quadratic(), 30000, 5150);
  const auto r2 = estimate_weight_grad(model, Loss::quadratic(), 30000, 5150);
  const auto r4 = estimate_weight_grad(model, Loss::quadratic(), 30000, 5150, 4);
  for (const char* name : {kBlockWeightsRaw, kBlockWeightsLogit}) {
    CHECK(r1.block(name).mean == r2.block(name).mean);
    CHECK(r1.block(name).mean == r4.block(name).mean);
    CHECK(r1.block(name).variance == r4.block(name).variance);
  }
}

}  // TEST_SUITE
