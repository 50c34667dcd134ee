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
#include "mixgrad/forward_trace.hpp"
#include "support.hpp"

using namespace mixgrad;
using testsupport::near_abs;
using testsupport::near_rel;
using testsupport::random_model;

namespace {

// Direct-space responsibility recursion, used as the reference for the
// log-space implementation on well-conditioned inputs.
std::vector<double> responsibilities_direct(const MixtureModel& model,
                                            const std::vector<double>& x) {
  const int k_count = model.num_components();
  const int dim = model.dimension();
  std::vector<double> resp(static_cast<std::size_t>(dim) * k_count);
  std::vector<double> p = model.weights();
  for (int d = 0; d < dim; ++d) {
    for (int k = 0; k < k_count; ++k) resp[static_cast<std::size_t>(d) * k_count + k] = p[k];
    double cond = 0.0;
    std::vector<double> pdf(k_count);
    for (int k = 0; k < k_count; ++k) {
      pdf[k] = family_pdf(model.component_family(k), model.mu(k, d), model.sigma(k, d), x[d]);
      cond += p[k] * pdf[k];
    }
    for (int k = 0; k < k_count; ++k) p[k] = p[k] * pdf[k] / cond;
  }
  return resp;
}

}  // namespace

TEST_SUITE("forward_trace") {

TEST_CASE("component_eval closed forms") {
  const MixtureModel std_normal = testsupport::gaussian1d(0.0, 1.0);
  auto at0 = component_eval(std_normal, 0, 0, 0.0);
  CHECK(near_abs(at0.pdf, 0.3989422804014327, 1e-12));
  CHECK(at0.cdf == 0.5);
  CHECK(at0.dlogpdf_dx == 0.0);

  auto at1 = component_eval(std_normal, 0, 0, 1.0);
  CHECK(near_abs(at1.pdf, 0.2419707245191434, 1e-12));
  CHECK(near_abs(at1.cdf, 0.8413447460685429, 1e-12));
  CHECK(near_abs(at1.dlogpdf_dx, -1.0, 1e-15));

  const MixtureModel logistic({1.0}, {{Family::logistic, {0.0}, {1.0}}});
  auto l0 = component_eval(logistic, 0, 0, 0.0);
  CHECK(near_abs(l0.pdf, 0.25, 1e-15));
  CHECK(near_abs(l0.cdf, 0.5, 1e-15));
  CHECK(near_abs(l0.dlogpdf_dx, 0.0, 1e-15));

  CHECK_THROWS_AS(component_eval(std_normal, 1, 0, 0.0), InvalidInputError);
  CHECK_THROWS_AS(component_eval(std_normal, 0, 1, 0.0), InvalidInputError);
  CHECK_THROWS_AS(component_eval(std_normal, 0, 0, std::nan("")), InvalidInputError);
}

TEST_CASE("single component has unit responsibilities") {
  const MixtureModel model = testsupport::gaussian1d(0.7, 1.3);
  ComponentParams comp{Family::gaussian, {0.7, -0.2, 1.4}, {1.3, 0.9, 1.0}};
  const MixtureModel model3({1.0}, {comp});
  const auto trace = responsibilities_forward(model3, std::vector<double>{0.0, 1.0, -2.0});
  for (int d = 0; d < 3; ++d) CHECK(trace.resp_at(d, 0) == 1.0);
}

TEST_CASE("identical components keep responsibilities at the weights") {
  ComponentParams comp{Family::gaussian, {0.4, -1.0}, {1.2, 0.8}};
  const MixtureModel model({0.3, 0.7}, {comp, comp});
  const auto trace = responsibilities_forward(model, std::vector<double>{0.9, -1.7});
  for (int d = 0; d < 2; ++d) {
    CHECK(near_abs(trace.resp_at(d, 0), 0.3, 1e-14));
    CHECK(near_abs(trace.resp_at(d, 1), 0.7, 1e-14));
  }
}

TEST_CASE("two-component two-dimensional posterior") {
  ComponentParams c1{Family::gaussian, {-1.0, -1.0}, {1.0, 1.0}};
  ComponentParams c2{Family::gaussian, {1.0, 1.0}, {1.0, 1.0}};
  const MixtureModel model({0.5, 0.5}, {c1, c2});
  const auto trace = responsibilities_forward(model, std::vector<double>{1.0, 0.0});
  CHECK(trace.resp_at(0, 0) == 0.5);  // first row is the weights, exactly
  CHECK(trace.resp_at(0, 1) == 0.5);
  CHECK(near_abs(trace.resp_at(1, 0), 0.11920292202211756, 1e-12));
  CHECK(near_abs(trace.resp_at(1, 1), 0.88079707797788243, 1e-12));
}

TEST_CASE("rows stay on the simplex and factorization matches") {
  Philox rng(303, 0);
  for (int trial = 0; trial < 60; ++trial) {
    const int k_count = 1 + static_cast<int>(rng.next_double() * 5);
    const int dim = 1 + static_cast<int>(rng.next_double() * 6);
    const Family fam = trial % 2 == 0 ? Family::gaussian : Family::logistic;
    const MixtureModel model = random_model(rng, k_count, dim, fam);
    std::vector<double> x(dim);
    for (double& v : x) v = -4.0 + 8.0 * rng.next_double();

    const auto trace = responsibilities_forward(model, x);
    double log_prod = 0.0;
    for (int d = 0; d < dim; ++d) {
      double row_sum = 0.0;
      double mix = 0.0;
      for (int k = 0; k < k_count; ++k) {
        row_sum += trace.resp_at(d, k);
        mix += trace.resp_at(d, k) * trace.pdf_at(d, k);
      }
      CHECK(near_abs(row_sum, 1.0, 1e-9));
      CHECK(near_rel(mix, trace.cond_pdf[d], 1e-9));
      log_prod += trace.log_cond_pdf[d];
    }
    CHECK(near_rel(joint_pdf(model, x), std::exp(log_prod), 1e-9));
  }
}

TEST_CASE("log-space recursion agrees with direct space when well conditioned") {
  Philox rng(304, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const MixtureModel model = random_model(rng, 3, 4, Family::gaussian);
    std::vector<double> x(4);
    // keep |x - mu| within ~5 sigma of some component
    for (int d = 0; d < 4; ++d) x[d] = model.mu(trial % 3, d) + 2.0 * (rng.next_double() - 0.5);
    const auto trace = responsibilities_forward(model, x);
    const auto direct = responsibilities_direct(model, x);
    for (std::size_t i = 0; i < direct.size(); ++i)
      CHECK(near_rel(trace.resp[i], direct[i], 1e-7));
  }
}

TEST_CASE("joint_pdf closed forms") {
  const MixtureModel single = testsupport::gaussian1d(0.0, 1.0);
  CHECK(near_abs(joint_pdf(single, std::vector<double>{0.0}), 0.3989422804014327, 1e-12));

  ComponentParams comp{Family::gaussian, {0.0}, {1.0}};
  const MixtureModel twin({0.5, 0.5}, {comp, comp});
  CHECK(near_rel(joint_pdf(twin, std::vector<double>{0.4}),
                 joint_pdf(single, std::vector<double>{0.4}), 1e-12));

  ComponentParams a{Family::gaussian, {-1.0}, {1.0}};
  ComponentParams b{Family::gaussian, {1.0}, {1.0}};
  const MixtureModel pair({0.5, 0.5}, {a, b});
  CHECK(near_abs(joint_pdf(pair, std::vector<double>{0.0}), 0.2419707245191434, 1e-12));
}

TEST_CASE("joint_pdf is independent of weights for identical components") {
  ComponentParams comp{Family::logistic, {0.2, -0.4}, {1.0, 1.4}};
  const MixtureModel m1({0.2, 0.8}, {comp, comp});
  const MixtureModel m2({0.6, 0.4}, {comp, comp});
  const std::vector<double> x{0.3, 1.9};
  CHECK(near_rel(joint_pdf(m1, x), joint_pdf(m2, x), 1e-12));
}

TEST_CASE("conditional density underflow names the dimension") {
  const MixtureModel model({1.0}, {{Family::gaussian, {0.0, 0.0}, {1.0, 1.0}}});
  try {
    responsibilities_forward(model, std::vector<double>{0.0, 60.0});
    FAIL("expected DegenerateSampleError");
  } catch (const DegenerateSampleError& e) {
    CHECK(e.dimension() == 1);
    CHECK(e.log_density() < -690.0);
  }
}

}  // TEST_SUITE
