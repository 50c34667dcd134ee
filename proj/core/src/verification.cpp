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
#include "mixgrad/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "mixgrad/errors.hpp"
#include "mixgrad/forward_trace.hpp"
#include "mixgrad/philox.hpp"
#include "mixgrad/weight_gradient.hpp"

namespace mixgrad {

// ---------------------------------------------------------------------------
// Common-random-number finite differences.

namespace {

MixtureModel perturbed_model(const MixtureModel& model, const ParameterSelector& sel,
                             double delta) {
  switch (sel.kind) {
    case ParameterSelector::Kind::weight: {
      std::vector<double> logits = model.logits();
      logits[sel.component] += delta;
      return MixtureModel::from_logits(std::move(logits), model.components());
    }
    case ParameterSelector::Kind::location:
      return model.with_mu(sel.component, sel.dimension,
                           model.mu(sel.component, sel.dimension) + delta);
    case ParameterSelector::Kind::scale:
      return model.with_sigma(sel.component, sel.dimension,
                              model.sigma(sel.component, sel.dimension) * std::exp(delta));
  }
  throw InvalidInputError("unknown parameter selector kind");
}

}  // namespace

std::vector<double> fd_pathwise(const MixtureModel& model, const UniformDraw& draw,
                                const ParameterSelector& sel, double eps) {
  validate_selector(model, sel);
  if (!(eps >= 1e-8 && eps <= 1e-3))
    throw InvalidInputError("fd_pathwise: eps must lie in [1e-8, 1e-3]");
  const MixtureModel plus = perturbed_model(model, sel, eps);
  const MixtureModel minus = perturbed_model(model, sel, -eps);
  const std::vector<double> x_plus = sample_quantile_transform(plus, draw);
  const std::vector<double> x_minus = sample_quantile_transform(minus, draw);
  std::vector<double> out(model.dimension());
  for (int d = 0; d < model.dimension(); ++d) out[d] = (x_plus[d] - x_minus[d]) / (2.0 * eps);
  return out;
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature.

namespace {

// 15-point Kronrod rule with embedded 7-point Gauss rule.
constexpr double kGk15Nodes[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                                  0.741531185599394, 0.586087235467691, 0.405845151377397,
                                  0.207784955007898, 0.0};
constexpr double kGk15WeightsK[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                                     0.140653259715525, 0.169004726639267, 0.190350578064785,
                                     0.204432940075298, 0.209482141084728};
constexpr double kGk15WeightsG[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                                     0.417959183673469};

struct Segment {
  double a, b, integral, error;
};

template <typename F>
Segment gk15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_center = f(center);
  double kronrod = kGk15WeightsK[7] * f_center;
  double gauss = kGk15WeightsG[3] * f_center;
  for (int i = 0; i < 7; ++i) {
    const double offset = half * kGk15Nodes[i];
    const double f_sum = f(center - offset) + f(center + offset);
    kronrod += kGk15WeightsK[i] * f_sum;
    if (i % 2 == 1) gauss += kGk15WeightsG[i / 2] * f_sum;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::fabs(kronrod - gauss)};
}

template <typename F>
double adaptive_quadrature(const F& f, double a, double b, double abs_tol, int max_segments) {
  std::vector<Segment> segments;
  segments.reserve(64);
  segments.push_back(gk15(f, a, b));

  double total_error = segments[0].error;
  while (total_error > abs_tol) {
    if (static_cast<int>(segments.size()) >= max_segments)
      throw AccuracyFailureError(total_error);
    std::size_t worst = 0;
    for (std::size_t i = 1; i < segments.size(); ++i)
      if (segments[i].error > segments[worst].error) worst = i;
    const Segment seg = segments[worst];
    const double mid = 0.5 * (seg.a + seg.b);
    const Segment left = gk15(f, seg.a, mid);
    const Segment right = gk15(f, mid, seg.b);
    segments[worst] = left;
    segments.push_back(right);
    total_error += left.error + right.error - seg.error;
  }

  double integral = 0.0;
  for (const Segment& seg : segments) integral += seg.integral;
  return integral;
}

// Integration half-width per component: Gaussian tails are gone at 10
// sigma, logistic tails need ~35 scales for the same 1e-9 guarantee.
double tail_half_width(Family family) { return family == Family::gaussian ? 10.0 : 35.0; }

void integration_box(const MixtureModel& model, int d, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < model.num_components(); ++k) {
    const double width = tail_half_width(model.component_family(k)) * model.sigma(k, d);
    lo = std::min(lo, model.mu(k, d) - width);
    hi = std::max(hi, model.mu(k, d) + width);
  }
}

}  // namespace

double quadrature_expectation(const MixtureModel& model,
                              const std::function<double(std::span<const double>)>& g,
                              double abs_tol) {
  const int dim = model.dimension();
  if (dim > 2)
    throw InvalidInputError("quadrature_expectation supports D <= 2; use the score-function "
                            "cross-check for higher dimensions");
  const int k_count = model.num_components();

  if (dim == 1) {
    double lo, hi;
    integration_box(model, 0, lo, hi);
    auto integrand = [&](double x) {
      double pdf = 0.0;
      for (int k = 0; k < k_count; ++k)
        pdf += model.weights()[k] *
               family_pdf(model.component_family(k), model.mu(k, 0), model.sigma(k, 0), x);
      const double xs[1] = {x};
      return pdf * g(std::span<const double>(xs, 1));
    };
    return adaptive_quadrature(integrand, lo, hi, abs_tol, 4000);
  }

  double lo0, hi0, lo1, hi1;
  integration_box(model, 0, lo0, hi0);
  integration_box(model, 1, lo1, hi1);
  const double inner_tol = std::max(abs_tol * 1e-3, 1e-13);
  auto outer_integrand = [&](double x0) {
    auto inner_integrand = [&](double x1) {
      double pdf = 0.0;
      for (int k = 0; k < k_count; ++k)
        pdf += model.weights()[k] *
               family_pdf(model.component_family(k), model.mu(k, 0), model.sigma(k, 0), x0) *
               family_pdf(model.component_family(k), model.mu(k, 1), model.sigma(k, 1), x1);
      const double xs[2] = {x0, x1};
      return pdf * g(std::span<const double>(xs, 2));
    };
    return adaptive_quadrature(inner_integrand, lo1, hi1, inner_tol, 2000);
  };
  return adaptive_quadrature(outer_integrand, lo0, hi0, abs_tol, 4000);
}

double quadrature_expectation(const MixtureModel& model, const Loss& loss, double abs_tol) {
  return quadrature_expectation(
      model, [&](std::span<const double> x) { return loss.value(x); }, abs_tol);
}

std::vector<double> quadrature_fd_grad(const MixtureModel& model, const Loss& loss,
                                       std::span<const ParameterSelector> selectors, double eps,
                                       double abs_tol) {
  std::vector<double> out;
  out.reserve(selectors.size());
  for (const ParameterSelector& sel : selectors) {
    validate_selector(model, sel);
    const double e_plus = quadrature_expectation(perturbed_model(model, sel, eps), loss, abs_tol);
    const double e_minus = quadrature_expectation(perturbed_model(model, sel, -eps), loss, abs_tol);
    out.push_back((e_plus - e_minus) / (2.0 * eps));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Score-function estimator.

EstimatorReport score_function_grad(const MixtureModel& model, const Loss& loss,
                                    std::span<const ParameterSelector> selectors, std::int64_t n,
                                    std::uint64_t seed, int workers, bool use_baseline) {
  if (selectors.empty()) throw InvalidInputError("score_function_grad: empty selector set");
  for (const ParameterSelector& sel : selectors) validate_selector(model, sel);

  const int k_count = model.num_components();
  const int dim = model.dimension();

  std::vector<int> weight_js;
  std::vector<ParameterSelector> comps;
  for (const ParameterSelector& sel : selectors) {
    if (sel.kind == ParameterSelector::Kind::weight)
      weight_js.push_back(sel.component);
    else
      comps.push_back(sel);
  }
  const std::size_t n_coords = 2 * weight_js.size() + comps.size();

  const auto start = std::chrono::steady_clock::now();
  auto make_batch_fn = [&]() -> detail::BatchFn {
    return [&](std::int64_t batch, std::int64_t quota, detail::BatchAccum& accum) {
      Philox rng(seed, static_cast<std::uint64_t>(batch) + 1);
      std::vector<double> x(dim), log_r(k_count), r(k_count);
      // Leave-one-out baseline needs the whole batch's loss values first.
      std::vector<double> g_values(quota);
      std::vector<double> scores(static_cast<std::size_t>(quota) * n_coords);
      std::vector<double> values(n_coords);

      for (std::int64_t i = 0; i < quota; ++i) {
        sample_ancestral_into(model, rng, x);
        g_values[i] = loss.value(x);
        if (!std::isfinite(g_values[i]))
          throw InvalidLossError("score_function_grad: loss returned a non-finite value");

        // Joint responsibilities r_k = w_k prod_d f_kd(x_d) / f(x).
        double max_term = -HUGE_VAL;
        for (int k = 0; k < k_count; ++k) {
          double lt = std::log(model.weights()[k]);
          for (int d = 0; d < dim; ++d)
            lt += family_log_pdf(model.component_family(k), model.mu(k, d), model.sigma(k, d),
                                 x[d]);
          log_r[k] = lt;
          max_term = std::max(max_term, lt);
        }
        double sum = 0.0;
        for (int k = 0; k < k_count; ++k) sum += std::exp(log_r[k] - max_term);
        const double log_f = max_term + std::log(sum);
        for (int k = 0; k < k_count; ++k) r[k] = std::exp(log_r[k] - log_f);

        double* row = scores.data() + static_cast<std::size_t>(i) * n_coords;
        std::size_t idx = 0;
        for (int j : weight_js) row[idx++] = r[j] / model.weights()[j];
        for (int j : weight_js) row[idx++] = r[j] - model.weights()[j];
        for (const ParameterSelector& sel : comps) {
          const Family fam = model.component_family(sel.component);
          const double mu = model.mu(sel.component, sel.dimension);
          const double sigma = model.sigma(sel.component, sel.dimension);
          const double xv = x[sel.dimension];
          double s = sel.kind == ParameterSelector::Kind::location
                         ? family_dlogpdf_dmu(fam, mu, sigma, xv)
                         : sigma * family_dlogpdf_dsigma(fam, mu, sigma, xv);
          row[idx++] = r[sel.component] * s;
        }
      }

      double g_sum = 0.0;
      for (double g : g_values) g_sum += g;
      for (std::int64_t i = 0; i < quota; ++i) {
        double baseline = 0.0;
        if (use_baseline && quota > 1)
          baseline = (g_sum - g_values[i]) / static_cast<double>(quota - 1);
        const double centered = g_values[i] - baseline;
        const double* row = scores.data() + static_cast<std::size_t>(i) * n_coords;
        for (std::size_t c = 0; c < n_coords; ++c) values[c] = centered * row[c];
        accum.add(values);
      }
    };
  };

  const detail::EstimateResult result = detail::run_batched(n, workers, n_coords, make_batch_fn);

  EstimatorReport report;
  report.method = "score";
  report.n_samples = n;
  report.seed = seed;
  report.workers = workers;

  std::size_t idx = 0;
  if (!weight_js.empty()) {
    CoordinateBlock raw{kBlockWeightsRaw, {}, {}, {}, {}};
    CoordinateBlock logit{kBlockWeightsLogit, {}, {}, {}, {}};
    for (int j : weight_js) {
      raw.labels.push_back("pi[" + std::to_string(j) + "]");
      raw.mean.push_back(result.mean[idx]);
      raw.variance.push_back(result.variance[idx]);
      raw.std_error.push_back(result.std_error[idx]);
      ++idx;
    }
    for (int j : weight_js) {
      logit.labels.push_back("logit[" + std::to_string(j) + "]");
      logit.mean.push_back(result.mean[idx]);
      logit.variance.push_back(result.variance[idx]);
      logit.std_error.push_back(result.std_error[idx]);
      ++idx;
    }
    report.blocks.push_back(std::move(raw));
    report.blocks.push_back(std::move(logit));
  }
  CoordinateBlock locations{kBlockLocations, {}, {}, {}, {}};
  CoordinateBlock scales{kBlockLogScales, {}, {}, {}, {}};
  for (const ParameterSelector& sel : comps) {
    CoordinateBlock& block = sel.kind == ParameterSelector::Kind::location ? locations : scales;
    const std::string label =
        (sel.kind == ParameterSelector::Kind::location ? "mu[" : "log_sigma[") +
        std::to_string(sel.component) + "," + std::to_string(sel.dimension) + "]";
    block.labels.push_back(label);
    block.mean.push_back(result.mean[idx]);
    block.variance.push_back(result.variance[idx]);
    block.std_error.push_back(result.std_error[idx]);
    ++idx;
  }
  if (!locations.labels.empty()) report.blocks.push_back(std::move(locations));
  if (!scales.labels.empty()) report.blocks.push_back(std::move(scales));
  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// ---------------------------------------------------------------------------
// Comparison.

ComparisonReport compare(std::string name, std::vector<std::string> labels,
                         std::span<const double> mean_a, std::span<const double> se_a,
                         std::span<const double> ref_b, std::span<const double> se_b,
                         double z_threshold, int max_failures_allowed) {
  const std::size_t n = mean_a.size();
  if (se_a.size() != n || ref_b.size() != n || se_b.size() != n ||
      (!labels.empty() && labels.size() != n))
    throw InvalidInputError("compare: shape mismatch between estimate and reference");

  ComparisonReport report;
  report.name = std::move(name);
  report.labels = std::move(labels);
  report.mean_a.assign(mean_a.begin(), mean_a.end());
  report.se_a.assign(se_a.begin(), se_a.end());
  report.ref_b.assign(ref_b.begin(), ref_b.end());
  report.se_b.assign(se_b.begin(), se_b.end());
  report.z_threshold = z_threshold;
  report.max_failures_allowed = max_failures_allowed;
  report.z.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = std::fabs(mean_a[i] - ref_b[i]);
    const double denom = std::sqrt(se_a[i] * se_a[i] + se_b[i] * se_b[i]);
    if (denom == 0.0)
      report.z[i] = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    else
      report.z[i] = diff / denom;
    if (report.z[i] > z_threshold) ++report.failures;
  }
  report.pass = report.failures <= max_failures_allowed;
  return report;
}

// ---------------------------------------------------------------------------
// Zoo-wide harnesses.

FdCheckResult fd_check_model(const MixtureModel& model, const std::string& name, int n_draws,
                             std::uint64_t seed, double eps, double rel_tol, double abs_floor) {
  FdCheckResult result;
  result.model_name = name;
  result.n_draws = n_draws;
  result.per_dim_max_rel_err.assign(model.dimension(), 0.0);
  result.pass = true;

  const int dim = model.dimension();
  const int k_count = model.num_components();
  const std::vector<ParameterSelector> locations = all_location_selectors(model);
  const std::vector<ParameterSelector> scales = all_scale_selectors(model);

  for (int i = 0; i < n_draws; ++i) {
    Philox rng(seed, static_cast<std::uint64_t>(i));
    const UniformDraw draw = make_uniform_draw(dim, rng);
    const std::vector<double> x = sample_quantile_transform(model, draw);
    const ForwardTrace trace = responsibilities_forward(model, x);

    auto check_coord = [&](int d, double analytic, double fd) {
      const double scale = std::max(std::fabs(analytic), std::fabs(fd));
      const double excess = std::fabs(analytic - fd) - (abs_floor + rel_tol * scale);
      if (excess > 0.0) result.pass = false;
      if (scale > 10.0 * abs_floor) {
        const double rel = std::fabs(analytic - fd) / scale;
        result.max_rel_err = std::max(result.max_rel_err, rel);
        result.per_dim_max_rel_err[d] = std::max(result.per_dim_max_rel_err[d], rel);
      }
      ++result.coords_checked;
    };

    // Weights, compared in logit coordinates (the raw free-coordinate
    // derivatives are pulled back through the softmax per dimension).
    const WeightGradient wg = weight_gradient_recursion(model, trace);
    std::vector<std::vector<double>> logit_rows(dim);
    for (int d = 0; d < dim; ++d) {
      std::span<const double> raw_row(wg.dx_dpi.data() + static_cast<std::size_t>(d) * k_count,
                                      static_cast<std::size_t>(k_count));
      logit_rows[d] = softmax_backward(model.logits(), raw_row);
    }
    for (int j = 0; j < k_count; ++j) {
      const std::vector<double> fd = fd_pathwise(model, draw, ParameterSelector::weight(j), eps);
      for (int d = 0; d < dim; ++d) check_coord(d, logit_rows[d][j], fd[d]);
    }

    for (const ParameterSelector& sel : locations) {
      const std::vector<double> analytic = pathwise_dx_dtheta_path(model, trace, sel);
      const std::vector<double> fd = fd_pathwise(model, draw, sel, eps);
      for (int d = 0; d < dim; ++d) check_coord(d, analytic[d], fd[d]);
    }
    for (const ParameterSelector& sel : scales) {
      const std::vector<double> analytic = pathwise_dx_dtheta_path(model, trace, sel);
      const std::vector<double> fd = fd_pathwise(model, draw, sel, eps);
      const double sigma = model.sigma(sel.component, sel.dimension);
      for (int d = 0; d < dim; ++d) check_coord(d, sigma * analytic[d], fd[d]);
    }
  }
  return result;
}

std::vector<FdCheckResult> run_fd_checks(std::span<const NamedModel> models,
                                         const CheckOptions& opts) {
  std::vector<FdCheckResult> results;
  results.reserve(models.size());
  std::uint64_t model_index = 0;
  for (const NamedModel& entry : models) {
    results.push_back(fd_check_model(entry.model, entry.name, opts.n_draws,
                                     opts.seed + 0x1000 * ++model_index, opts.fd_eps,
                                     opts.fd_rel_tol, opts.fd_abs_floor));
  }
  return results;
}

namespace {

// Coordinates shared by the pathwise and score reports, in comparison order:
// weight gradients in logit coordinates, then locations, then log-scales.
struct FlatCoords {
  std::vector<std::string> labels;
  std::vector<double> mean;
  std::vector<double> se;
};

FlatCoords flatten_comparable(const EstimatorReport& report) {
  FlatCoords flat;
  for (const char* name : {kBlockWeightsLogit, kBlockLocations, kBlockLogScales}) {
    if (!report.has_block(name)) continue;
    const CoordinateBlock& block = report.block(name);
    flat.labels.insert(flat.labels.end(), block.labels.begin(), block.labels.end());
    flat.mean.insert(flat.mean.end(), block.mean.begin(), block.mean.end());
    flat.se.insert(flat.se.end(), block.std_error.begin(), block.std_error.end());
  }
  return flat;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return base ^ (0x9E3779B97F4A7C15ull * (index + 1));
}

}  // namespace

std::vector<NamedLoss> standard_check_losses(int dimension) {
  std::vector<std::vector<double>> x1_coeffs(dimension, std::vector<double>{0.0});
  x1_coeffs[0] = {1.0};
  std::vector<std::vector<double>> cubic_coeffs;
  for (int d = 0; d < dimension; ++d)
    cubic_coeffs.push_back({0.5 + 0.1 * d, -0.25, 0.1 - 0.01 * d});
  return {{"x1", Loss::polynomial(std::move(x1_coeffs))},
          {"quadratic", Loss::quadratic()},
          {"poly3", Loss::polynomial(std::move(cubic_coeffs))}};
}

std::vector<ComparisonReport> run_quadrature_checks(std::span<const NamedModel> models,
                                                    const CheckOptions& opts) {
  std::vector<ComparisonReport> reports;
  std::uint64_t run_index = 0;
  for (const NamedModel& entry : models) {
    if (entry.model.dimension() > 2) continue;
    const std::vector<ParameterSelector> selectors = all_parameter_selectors(entry.model);
    for (const NamedLoss& named : standard_check_losses(entry.model.dimension())) {
      const std::uint64_t run_seed = derive_seed(opts.seed, ++run_index);
      const EstimatorReport pathwise =
          estimate_loss_grad(entry.model, named.loss, selectors, opts.n, run_seed, opts.workers);
      const FlatCoords flat = flatten_comparable(pathwise);

      // Reference order must match: weights first, then locations, scales.
      const std::vector<double> refs =
          quadrature_fd_grad(entry.model, named.loss, selectors, opts.fd_eps, opts.quad_abs_tol);
      // The oracle is deterministic but not exact: each E[g] is integrated
      // to quad_abs_tol, so the difference quotient carries this bound.
      const std::vector<double> ref_se(refs.size(), opts.quad_abs_tol / (2.0 * opts.fd_eps));

      std::vector<double> mean_a = flat.mean;
      if (opts.inject_sign_error && !mean_a.empty()) mean_a[0] = -mean_a[0];

      // Reports are strict here; the 1-in-100 false-positive budget is
      // applied by callers across the whole run.
      ComparisonReport report =
          compare(entry.name + "/" + named.name + " pathwise-vs-quadrature", flat.labels, mean_a,
                  flat.se, refs, ref_se, opts.z_threshold, 0);
      report.n_samples = opts.n;
      report.seed = run_seed;
      report.epsilon = opts.fd_eps;
      reports.push_back(std::move(report));
    }
  }
  return reports;
}

std::vector<ComparisonReport> run_score_checks(std::span<const NamedModel> models,
                                               const CheckOptions& opts) {
  std::vector<ComparisonReport> reports;
  reports.reserve(models.size());
  std::uint64_t run_index = 0;
  bool first = true;
  for (const NamedModel& entry : models) {
    const std::vector<ParameterSelector> selectors = all_parameter_selectors(entry.model);
    const NamedLoss named = standard_check_losses(entry.model.dimension()).back();
    const std::uint64_t run_seed = derive_seed(opts.seed, 0xABC000 + ++run_index);
    // Same seed for both: the estimators then consume identical sample
    // streams, and the independent-SE z-score is conservative.
    const EstimatorReport pathwise =
        estimate_loss_grad(entry.model, named.loss, selectors, opts.n, run_seed, opts.workers);
    const EstimatorReport score =
        score_function_grad(entry.model, named.loss, selectors, opts.n, run_seed, opts.workers);

    FlatCoords flat_a = flatten_comparable(pathwise);
    const FlatCoords flat_b = flatten_comparable(score);
    if (opts.inject_sign_error && first && !flat_a.mean.empty()) {
      flat_a.mean[0] = -flat_a.mean[0];
      first = false;
    }
    ComparisonReport report = compare(entry.name + "/" + named.name + " pathwise-vs-score",
                                      flat_a.labels, flat_a.mean, flat_a.se, flat_b.mean,
                                      flat_b.se, opts.z_threshold, 0);
    report.n_samples = opts.n;
    report.seed = run_seed;
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace mixgrad
