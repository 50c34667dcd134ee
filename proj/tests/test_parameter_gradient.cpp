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
#include "mixgrad/parameter_gradient.hpp"
#include "mixgrad/verification.hpp"
#include "support.hpp"

using namespace mixgrad;
using testsupport::near_abs;
using testsupport::near_rel;

namespace {

// The fixed two-component, two-dimensional model whose derivative paths
// were frozen from an independent implicit-differentiation reference.
MixtureModel frozen_model() {
  ComponentParams a{Family::gaussian, {-1.0, 0.5}, {0.8, 1.3}};
  ComponentParams b{Family::gaussian, {1.0, -0.7}, {1.1, 0.9}};
  return MixtureModel({0.3, 0.7}, {a, b});
}

}  // namespace

TEST_SUITE("parameter_gradient") {

TEST_CASE("selector labels and validation") {
  const MixtureModel model = frozen_model();
  CHECK(ParameterSelector::weight(1).label() == "pi[1]");
  CHECK(ParameterSelector::location(0, 1).label() == "mu[0,1]");
  CHECK(ParameterSelector::scale(1, 0).label() == "sigma[1,0]");
  CHECK(all_parameter_selectors(model).size() == 2 + 4 + 4);
  CHECK_THROWS_AS(validate_selector(model, ParameterSelector::weight(2)), InvalidInputError);
  CHECK_THROWS_AS(validate_selector(model, ParameterSelector::location(0, 2)), InvalidInputError);
}

TEST_CASE("location shift of a single component moves the sample one-for-one") {
  const MixtureModel model = testsupport::gaussian1d(0.4, 1.7);
  const auto trace = responsibilities_forward(model, std::vector<double>{1.9});
  CHECK(pathwise_dx_dtheta_exact(model, trace, 0, ParameterSelector::location(0, 0)) == 1.0);
}

TEST_CASE("scale derivative of a single Gaussian is the standardized residual") {
  const MixtureModel model = testsupport::gaussian1d(0.5, 2.0);
  const auto trace = responsibilities_forward(model, std::vector<double>{3.1});
  const double got = pathwise_dx_dtheta_exact(model, trace, 0, ParameterSelector::scale(0, 0));
  CHECK(near_rel(got, (3.1 - 0.5) / 2.0, 1e-12));
}

TEST_CASE("two-component location derivative closed form") {
  ComponentParams a{Family::gaussian, {-1.0}, {1.0}};
  ComponentParams b{Family::gaussian, {1.0}, {1.0}};
  const MixtureModel model({0.5, 0.5}, {a, b});
  const auto trace = responsibilities_forward(model, std::vector<double>{0.0});
  const double got = pathwise_dx_dtheta_exact(model, trace, 0, ParameterSelector::location(0, 0));
  CHECK(near_rel(got, 0.5, 1e-12));
}

TEST_CASE("derivatives vanish for dimensions before the parameter's own") {
  const MixtureModel model = frozen_model();
  const auto trace = responsibilities_forward(model, std::vector<double>{0.2, -0.3});
  CHECK(pathwise_dx_dtheta_exact(model, trace, 0, ParameterSelector::location(0, 1)) == 0.0);
  CHECK(pathwise_dx_dtheta_exact(model, trace, 0, ParameterSelector::scale(1, 1)) == 0.0);
}

TEST_CASE("derivative paths match the frozen implicit-differentiation values") {
  const MixtureModel model = frozen_model();
  const UniformDraw draw = uniform_draw_from({0.3721, 0.8444});
  const auto x = sample_quantile_transform(model, draw);
  CHECK(near_abs(x[0], -0.09944450075261069, 1e-9));
  CHECK(near_abs(x[1], 0.8890137188606488, 1e-9));

  const auto trace = responsibilities_forward(model, x);
  const auto mu00 = pathwise_dx_dtheta_path(model, trace, ParameterSelector::location(0, 0));
  CHECK(near_abs(mu00[0], 0.340078837, 1e-7));
  CHECK(near_abs(mu00[1], 0.296152222, 1e-7));
  const auto sg00 = pathwise_dx_dtheta_path(model, trace, ParameterSelector::scale(0, 0));
  CHECK(near_abs(sg00[0], 0.382824834, 1e-7));
  CHECK(near_abs(sg00[1], -0.264108495, 1e-7));
  const auto mu01 = pathwise_dx_dtheta_path(model, trace, ParameterSelector::location(0, 1));
  CHECK(mu01[0] == 0.0);
  CHECK(near_abs(mu01[1], 0.618498444, 1e-7));
  const auto sg11 = pathwise_dx_dtheta_path(model, trace, ParameterSelector::scale(1, 1));
  CHECK(sg11[0] == 0.0);
  CHECK(near_abs(sg11[1], 0.673568007, 1e-7));
  const auto mu10 = pathwise_dx_dtheta_path(model, trace, ParameterSelector::location(1, 0));
  CHECK(near_abs(mu10[0], 0.659921163, 1e-7));
  CHECK(near_abs(mu10[1], -0.296152222, 1e-7));
}

TEST_CASE("paths agree with common-random-number finite differences") {
  Philox rng(221, 0);
  for (int trial = 0; trial < 6; ++trial) {
    const Family fam = trial % 2 == 0 ? Family::gaussian : Family::logistic;
    const MixtureModel model = testsupport::random_model(rng, 3, 3, fam);
    const UniformDraw draw = make_uniform_draw(3, rng);
    const auto x = sample_quantile_transform(model, draw);
    const auto trace = responsibilities_forward(model, x);
    for (const auto& sel : all_location_selectors(model)) {
      const auto analytic = pathwise_dx_dtheta_path(model, trace, sel);
      const auto fd = fd_pathwise(model, draw, sel);
      for (int d = 0; d < 3; ++d) CHECK(near_rel(analytic[d], fd[d], 1e-4, 1e-8));
    }
    for (const auto& sel : all_scale_selectors(model)) {
      const auto analytic = pathwise_dx_dtheta_path(model, trace, sel);
      const auto fd = fd_pathwise(model, draw, sel);
      const double sigma = model.sigma(sel.component, sel.dimension);
      for (int d = 0; d < 3; ++d) CHECK(near_rel(sigma * analytic[d], fd[d], 1e-4, 1e-8));
    }
  }
}

TEST_CASE("reparam component gradients: basics and finite differences") {
  const MixtureModel single = testsupport::gaussian1d(0.0, 1.0);
  const auto trace1 = responsibilities_forward(single, std::vector<double>{0.8});
  const auto unit = reparam_component_grads(single, trace1, std::vector<double>{1.0});
  CHECK(unit.dloss_dmu[0] == 1.0);

  const auto zero = reparam_component_grads(single, trace1, std::vector<double>{0.0});
  CHECK(zero.dloss_dmu[0] == 0.0);
  CHECK(zero.dloss_dsigma[0] == 0.0);

  const MixtureModel model = frozen_model();
  const UniformDraw draw = uniform_draw_from({0.61, 0.27});
  const auto x = sample_quantile_transform(model, draw);
  const auto trace = responsibilities_forward(model, x);
  const std::vector<double> lg{1.3, -0.4};
  const auto grads = reparam_component_grads(model, trace, lg);
  for (int k = 0; k < 2; ++k)
    for (int dd = 0; dd < 2; ++dd) {
      const auto mu_fd = fd_pathwise(model, draw, ParameterSelector::location(k, dd));
      const auto sg_fd = fd_pathwise(model, draw, ParameterSelector::scale(k, dd));
      double want_mu = 0.0, want_logsg = 0.0;
      for (int d = 0; d < 2; ++d) {
        want_mu += lg[d] * mu_fd[d];
        want_logsg += lg[d] * sg_fd[d];
      }
      CHECK(near_rel(grads.dloss_dmu[k * 2 + dd], want_mu, 1e-4, 1e-8));
      const double sigma = model.sigma(k, dd);
      CHECK(near_rel(sigma * grads.dloss_dsigma[k * 2 + dd], want_logsg, 1e-4, 1e-8));
    }
}

TEST_CASE("mc partial integral: unused component has zero integrand") {
  ComponentParams a{Family::gaussian, {-1.0}, {1.0}};
  ComponentParams b{Family::gaussian, {1.0}, {1.0}};
  const MixtureModel model({0.5, 0.5}, {a, b});
  ForwardTrace trace = responsibilities_forward(model, std::vector<double>{0.4});
  // Force a conditional that never selects component 0.
  trace.resp[0] = 0.0;
  trace.resp[1] = 1.0;
  Philox rng(17, 0);
  const auto est = mc_partial_integral(model, trace, 0, ParameterSelector::location(0, 0), 1000, rng);
  CHECK(est.value == 0.0);
  CHECK(est.std_error == 0.0);
}

TEST_CASE("mc partial integral reproduces the closed form") {
  const MixtureModel model = testsupport::gaussian1d(0.0, 1.0);
  const auto trace = responsibilities_forward(model, std::vector<double>{0.0});
  Philox rng(18, 0);
  const auto est =
      mc_partial_integral(model, trace, 0, ParameterSelector::location(0, 0), 100000, rng);
  // Integral of d pdf/d mu up to 0 equals -pdf(0).
  CHECK(std::fabs(est.value - (-0.3989422804014327)) <= 3.0 * est.std_error);
  CHECK(est.std_error > 0.0);
  CHECK(near_abs(est.acceptance_rate, 0.5, 0.02));
}

TEST_CASE("mc partial integral is consistent with the exact derivative") {
  ComponentParams a{Family::gaussian, {-0.5}, {0.9}};
  ComponentParams b{Family::gaussian, {1.1}, {1.4}};
  const MixtureModel model({0.35, 0.65}, {a, b});
  const auto trace = responsibilities_forward(model, std::vector<double>{0.6});
  Philox rng(19, 0);
  for (const auto& sel : {ParameterSelector::location(0, 0), ParameterSelector::scale(1, 0)}) {
    const auto est = mc_partial_integral(model, trace, 0, sel, 200000, rng);
    const double exact = pathwise_dx_dtheta_exact(model, trace, 0, sel);
    const double fd = trace.cond_pdf[0];
    CHECK(std::fabs(-est.value / fd - exact) <= 3.0 * est.std_error / fd);
  }
}

TEST_CASE("mc partial integral validates the selector/dimension pairing") {
  const MixtureModel model = frozen_model();
  const auto trace = responsibilities_forward(model, std::vector<double>{0.1, 0.2});
  Philox rng(20, 0);
  CHECK_THROWS_AS(
      mc_partial_integral(model, trace, 1, ParameterSelector::weight(0), 100, rng),
      InvalidInputError);
  CHECK_THROWS_AS(
      mc_partial_integral(model, trace, 1, ParameterSelector::location(0, 0), 100, rng),
      InvalidInputError);
  // Weights at dimension 0 are fine: the integrand is the component share.
  const auto est = mc_partial_integral(model, trace, 0, ParameterSelector::weight(0), 5000, rng);
  const double exact0 = -trace.cdf_at(0, 0) / trace.cond_pdf[0];
  CHECK(std::fabs(-est.value / trace.cond_pdf[0] - exact0) <=
        3.0 * est.std_error / trace.cond_pdf[0] + 1e-12);
}

TEST_CASE("estimate_loss_grad: exact location gradient has zero variance") {
  const MixtureModel model = testsupport::gaussian1d(0.0, 1.0);
  const std::vector<ParameterSelector> sels{ParameterSelector::location(0, 0)};
  const auto report = estimate_loss_grad(model, Loss::linear(), sels, 500, 33);
  CHECK(report.block(kBlockLocations).mean[0] == 1.0);
  CHECK(report.block(kBlockLocations).std_error[0] == 0.0);
}

TEST_CASE("estimate_loss_grad: log-scale gradient of E[x^2] is 2 sigma^2") {
  const MixtureModel model = testsupport::gaussian1d(0.0, 1.0);
  const std::vector<ParameterSelector> sels{ParameterSelector::scale(0, 0)};
  const auto report = estimate_loss_grad(model, Loss::quadratic(), sels, 100000, 34);
  const auto& block = report.block(kBlockLogScales);
  CHECK(std::fabs(block.mean[0] - 2.0) <= 3.0 * block.std_error[0]);
}

TEST_CASE("estimate_loss_grad rejects an empty selector set") {
  const MixtureModel model = testsupport::gaussian1d(0.0, 1.0);
  CHECK_THROWS_AS(
      estimate_loss_grad(model, Loss::linear(), std::vector<ParameterSelector>{}, 100, 1),
      InvalidInputError);
}

TEST_CASE("estimate_loss_grad is deterministic across reruns and workers") {
  const MixtureModel model = frozen_model();
  const auto sels = all_parameter_selectors(model);
  const auto r1 = estimate_loss_grad(model, Loss::quadratic(), sels, 20000, 777);
  const auto r2 = estimate_loss_grad(model, Loss::quadratic(), sels, 20000, 777);
  const auto r3 = estimate_loss_grad(model, Loss::quadratic(), sels, 20000, 777, 3);
  for (std::size_t b = 0; b < r1.blocks.size(); ++b) {
    CHECK(r1.blocks[b].mean == r2.blocks[b].mean);
    CHECK(r1.blocks[b].mean == r3.blocks[b].mean);
  }
}

}  // TEST_SUITE
