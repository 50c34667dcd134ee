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

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mixgrad/estimator.hpp"
#include "mixgrad/losses.hpp"
#include "mixgrad/mixture_model.hpp"
#include "mixgrad/parameter_gradient.hpp"
#include "mixgrad/sampling.hpp"

namespace mixgrad {

// Independent oracles. These deliberately share no code with the analytic
// recursions beyond plain density evaluation: finite differences go through
// the numeric quantile transform, quadrature integrates the density
// directly, and the score-function estimator never differentiates a sample.

/// Central finite difference of the quantile-transform sample with respect
/// to one parameter, holding the uniforms fixed (common random numbers).
/// The perturbation is applied in unconstrained coordinates: logits for
/// weights, mu for locations, log(sigma) for scales. Returns d x_d / d coord
/// for every dimension.
std::vector<double> fd_pathwise(const MixtureModel& model, const UniformDraw& draw,
                                const ParameterSelector& sel, double eps = 1e-5);

/// Adaptive Gauss-Kronrod quadrature of E[g(x)] for D <= 2, to the given
/// absolute tolerance. Throws AccuracyFailureError with the achieved bound
/// if the subdivision budget runs out.
double quadrature_expectation(const MixtureModel& model,
                              const std::function<double(std::span<const double>)>& g,
                              double abs_tol = 1e-9);
double quadrature_expectation(const MixtureModel& model, const Loss& loss, double abs_tol = 1e-9);

/// Central finite differences of quadrature_expectation in unconstrained
/// coordinates (logit / mu / log sigma), one value per selector. The
/// deterministic reference for unbiasedness checks on D <= 2 models.
std::vector<double> quadrature_fd_grad(const MixtureModel& model, const Loss& loss,
                                       std::span<const ParameterSelector> selectors,
                                       double eps = 1e-5, double abs_tol = 1e-9);

/// Likelihood-ratio (score-function) gradient estimator
///   E[(g(x) - b) * dlog f(x)/dtheta]
/// with a leave-one-out constant baseline b per batch (unbiased; pure
/// variance reduction). Blocks and coordinates mirror estimate_loss_grad,
/// so the two unbiased estimators are directly comparable.
EstimatorReport score_function_grad(const MixtureModel& model, const Loss& loss,
                                    std::span<const ParameterSelector> selectors, std::int64_t n,
                                    std::uint64_t seed, int workers = 1, bool use_baseline = true);

/// Per-coordinate z-scores of estimate A against reference B.
/// z = |mean_a - ref_b| / sqrt(se_a^2 + se_b^2); a zero combined standard
/// error yields z = 0 on exact agreement and infinity otherwise.
struct ComparisonReport {
  std::string name;
  std::vector<std::string> labels;
  std::vector<double> mean_a;
  std::vector<double> se_a;
  std::vector<double> ref_b;
  std::vector<double> se_b;
  std::vector<double> z;
  double z_threshold = 3.0;
  int failures = 0;              // coordinates with |z| > threshold
  int max_failures_allowed = 0;  // false-positive budget
  bool pass = false;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  double epsilon = 0;  // finite-difference step behind ref_b, when one exists
};

ComparisonReport compare(std::string name, std::vector<std::string> labels,
                         std::span<const double> mean_a, std::span<const double> se_a,
                         std::span<const double> ref_b, std::span<const double> se_b,
                         double z_threshold = 3.0, int max_failures_allowed = 0);

// ---------------------------------------------------------------------------
// Zoo-wide check harnesses shared by the CLI `check` command and the
// acceptance suite.

/// Analytic-vs-finite-difference agreement over n_draws fixed uniform draws
/// and every parameter of the model. A coordinate passes when
///   |analytic - fd| <= abs_floor + rel_tol * max(|analytic|, |fd|).
struct FdCheckResult {
  std::string model_name;
  int n_draws = 0;
  std::int64_t coords_checked = 0;
  double max_rel_err = 0;                   // max over coords above the floor
  std::vector<double> per_dim_max_rel_err;  // error drift across dimensions
  bool pass = false;
};

FdCheckResult fd_check_model(const MixtureModel& model, const std::string& name, int n_draws,
                             std::uint64_t seed, double eps = 1e-5, double rel_tol = 1e-4,
                             double abs_floor = 1e-8);

struct CheckOptions {
  std::int64_t n = 200000;        // Monte-Carlo budget per estimator run
  int n_draws = 100;              // fixed draws for the fd check
  double z_threshold = 3.0;
  std::uint64_t seed = 20260808;
  double fd_eps = 1e-5;
  double fd_rel_tol = 1e-4;
  double fd_abs_floor = 1e-8;
  double quad_abs_tol = 1e-9;     // quadrature tolerance behind the FD oracle
  int workers = 1;
  // Test hook: flip the sign of the first analytic coordinate before
  // comparing, to prove the detector actually fires.
  bool inject_sign_error = false;
};

struct NamedModel {
  std::string name;
  MixtureModel model;
};

struct NamedLoss {
  std::string name;
  Loss loss;
};

/// The loss trio used by the cross-checks: the first coordinate alone, the
/// squared norm, and a per-dimension cubic that breaks every symmetry.
std::vector<NamedLoss> standard_check_losses(int dimension);

std::vector<FdCheckResult> run_fd_checks(std::span<const NamedModel> models,
                                         const CheckOptions& opts);

/// Pathwise estimates vs quadrature finite differences of E[g] for the
/// standard losses; D <= 2 models only. One ComparisonReport per
/// (model, loss), with a 1-in-100 false-positive budget per report.
std::vector<ComparisonReport> run_quadrature_checks(std::span<const NamedModel> models,
                                                    const CheckOptions& opts);

/// Pathwise vs score-function estimates on every model under the cubic
/// loss (both unbiased, so their means must agree within combined standard
/// errors).
std::vector<ComparisonReport> run_score_checks(std::span<const NamedModel> models,
                                               const CheckOptions& opts);

}  // namespace mixgrad
