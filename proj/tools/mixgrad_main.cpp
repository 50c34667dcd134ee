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

// mixgrad CLI: estimate | check | variance-sweep | sample.
// Exit codes: 0 success, 1 failed checks, 2 invalid input or config,
// 3 degenerate-sample rate abort.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixgrad/errors.hpp"
#include "mixgrad/estimator.hpp"
#include "mixgrad/losses.hpp"
#include "mixgrad/mixture_model.hpp"
#include "mixgrad/model_zoo.hpp"
#include "mixgrad/parameter_gradient.hpp"
#include "mixgrad/philox.hpp"
#include "mixgrad/sampling.hpp"
#include "mixgrad/verification.hpp"
#include "mixgrad/weight_gradient.hpp"

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mixgrad::InvalidInputError("cannot open file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw mixgrad::InvalidInputError("cannot write file: " + path);
  out << content;
  if (!content.empty() && content.back() != '\n') out << "\n";
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Experiment config.

struct EstimateConfig {
  mixgrad::MixtureModel model;
  mixgrad::Loss loss;
  std::string estimator = "pathwise";  // pathwise | score | both
  std::vector<mixgrad::ParameterSelector> selectors = {};
  std::int64_t n = 100000;
  std::int64_t n_inner = 10000;
  std::uint64_t seed = 0;
  bool seed_generated = false;
  int workers = 1;
  std::string output = {};
  std::string format = "json";
};

mixgrad::Loss parse_loss(const json& j) {
  if (j.is_string()) return mixgrad::Loss::from_id(j.get<std::string>());
  if (j.is_object()) {
    const std::string id = j.at("id").get<std::string>();
    std::vector<std::vector<double>> coeffs;
    if (j.contains("coeffs")) coeffs = j["coeffs"].get<std::vector<std::vector<double>>>();
    return mixgrad::Loss::from_id(id, std::move(coeffs));
  }
  throw mixgrad::InvalidInputError("config: \"loss\" must be a string id or an object");
}

std::vector<mixgrad::ParameterSelector> parse_theta(const json& j,
                                                    const mixgrad::MixtureModel& model) {
  using mixgrad::ParameterSelector;
  if (j.is_null()) return mixgrad::all_parameter_selectors(model);
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "all") return mixgrad::all_parameter_selectors(model);
    if (s == "weights") return mixgrad::all_weight_selectors(model);
    if (s == "locations") return mixgrad::all_location_selectors(model);
    if (s == "scales") return mixgrad::all_scale_selectors(model);
    throw mixgrad::InvalidInputError("config: unknown theta group \"" + s + "\"");
  }
  if (!j.is_array()) throw mixgrad::InvalidInputError("config: \"theta\" must be string or array");
  std::vector<ParameterSelector> out;
  for (const json& item : j) {
    if (item.is_string()) {
      for (const auto& sel : parse_theta(item, model)) out.push_back(sel);
      continue;
    }
    const std::string kind = item.at("kind").get<std::string>();
    if (kind == "weight") {
      out.push_back(ParameterSelector::weight(item.at("j").get<int>()));
    } else if (kind == "location") {
      out.push_back(ParameterSelector::location(item.at("k").get<int>(), item.at("d").get<int>()));
    } else if (kind == "scale") {
      out.push_back(ParameterSelector::scale(item.at("k").get<int>(), item.at("d").get<int>()));
    } else {
      throw mixgrad::InvalidInputError("config: unknown selector kind \"" + kind + "\"");
    }
  }
  if (out.empty()) throw mixgrad::InvalidInputError("config: empty theta set");
  for (const auto& sel : out) mixgrad::validate_selector(model, sel);
  return out;
}

EstimateConfig parse_estimate_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw mixgrad::InvalidInputError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw mixgrad::InvalidInputError("config must be a JSON object");

  std::optional<mixgrad::MixtureModel> model;
  if (j.contains("model"))
    model = mixgrad::MixtureModel::from_json_text(j["model"].dump());
  else if (j.contains("model_path"))
    model = mixgrad::MixtureModel::from_json_text(read_file(j["model_path"].get<std::string>()));
  else
    throw mixgrad::InvalidInputError("config: need \"model\" or \"model_path\"");

  if (!j.contains("loss")) throw mixgrad::InvalidInputError("config: missing \"loss\"");

  EstimateConfig cfg{.model = std::move(*model), .loss = parse_loss(j["loss"])};
  cfg.selectors = parse_theta(j.contains("theta") ? j["theta"] : json(), cfg.model);

  if (j.contains("estimator")) cfg.estimator = j["estimator"].get<std::string>();
  if (cfg.estimator != "pathwise" && cfg.estimator != "score" && cfg.estimator != "both")
    throw mixgrad::InvalidInputError("config: estimator must be pathwise, score or both");

  if (j.contains("n")) cfg.n = j["n"].get<std::int64_t>();
  if (cfg.n < 1) throw mixgrad::InvalidInputError("config: need n >= 1");
  if (j.contains("n_inner")) cfg.n_inner = j["n_inner"].get<std::int64_t>();
  if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
  if (j.contains("output")) cfg.output = j["output"].get<std::string>();
  if (j.contains("format")) cfg.format = j["format"].get<std::string>();
  if (cfg.format != "json" && cfg.format != "csv")
    throw mixgrad::InvalidInputError("config: format must be json or csv");

  if (j.contains("seed")) {
    cfg.seed = j["seed"].get<std::uint64_t>();
  } else {
    cfg.seed = std::random_device{}();
    cfg.seed_generated = true;
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// JSON emitters.

json block_to_json(const mixgrad::CoordinateBlock& block) {
  return {{"labels", block.labels},
          {"mean", block.mean},
          {"variance", block.variance},
          {"std_error", block.std_error}};
}

json report_to_json(const mixgrad::EstimatorReport& report) {
  json blocks = json::object();
  for (const auto& block : report.blocks) blocks[block.name] = block_to_json(block);
  return {{"method", report.method},
          {"n", report.n_samples},
          {"seed", report.seed},
          {"workers", report.workers},
          {"degenerate_samples", report.degenerate_samples},
          {"wall_time_sec", report.wall_time_sec},
          {"blocks", blocks}};
}

json comparison_to_json(const mixgrad::ComparisonReport& report) {
  return {{"name", report.name},
          {"labels", report.labels},
          {"mean_a", report.mean_a},
          {"se_a", report.se_a},
          {"ref_b", report.ref_b},
          {"se_b", report.se_b},
          {"z", report.z},
          {"z_threshold", report.z_threshold},
          {"failures", report.failures},
          {"max_failures_allowed", report.max_failures_allowed},
          {"n", report.n_samples},
          {"seed", report.seed},
          {"epsilon", report.epsilon},
          {"pass", report.pass}};
}

json fd_result_to_json(const mixgrad::FdCheckResult& result) {
  return {{"model", result.model_name},
          {"n_draws", result.n_draws},
          {"coords_checked", result.coords_checked},
          {"max_rel_err", result.max_rel_err},
          {"per_dim_max_rel_err", result.per_dim_max_rel_err},
          {"pass", result.pass}};
}

// Shared comparable coordinates of a report (logit weights, locations,
// log-scales), used for the both-estimators comparison.
void flatten_report(const mixgrad::EstimatorReport& report, std::vector<std::string>& labels,
                    std::vector<double>& mean, std::vector<double>& se) {
  for (const char* name :
       {mixgrad::kBlockWeightsLogit, mixgrad::kBlockLocations, mixgrad::kBlockLogScales}) {
    if (!report.has_block(name)) continue;
    const auto& block = report.block(name);
    labels.insert(labels.end(), block.labels.begin(), block.labels.end());
    mean.insert(mean.end(), block.mean.begin(), block.mean.end());
    se.insert(se.end(), block.std_error.begin(), block.std_error.end());
  }
}

std::string report_csv(const std::vector<const mixgrad::EstimatorReport*>& reports) {
  std::ostringstream out;
  out << "estimator,block,label,mean,variance,std_error\n";
  for (const auto* report : reports)
    for (const auto& block : report->blocks)
      for (std::size_t i = 0; i < block.labels.size(); ++i)
        out << report->method << ',' << block.name << ',' << block.labels[i] << ','
            << fmt17(block.mean[i]) << ',' << fmt17(block.variance[i]) << ','
            << fmt17(block.std_error[i]) << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Subcommands.

int cmd_estimate(const EstimateConfig& cfg, const std::string& trace_out, int trace_samples) {
  std::optional<mixgrad::EstimatorReport> pathwise;
  std::optional<mixgrad::EstimatorReport> score;
  if (cfg.estimator == "pathwise" || cfg.estimator == "both")
    pathwise = mixgrad::estimate_loss_grad(cfg.model, cfg.loss, cfg.selectors, cfg.n, cfg.seed,
                                           cfg.workers);
  if (cfg.estimator == "score" || cfg.estimator == "both")
    score = mixgrad::score_function_grad(cfg.model, cfg.loss, cfg.selectors, cfg.n, cfg.seed,
                                         cfg.workers);

  // Echo on stderr so stdout stays a clean report when no -o is given.
  std::cerr << "seed " << cfg.seed << (cfg.seed_generated ? " (generated)" : "") << "\n";

  if (!trace_out.empty()) {
    json samples = json::array();
    mixgrad::Philox rng(cfg.seed, 1);  // first batch stream, same as the estimators
    mixgrad::ForwardTrace trace;
    for (int i = 0; i < trace_samples; ++i) {
      const std::vector<double> x = mixgrad::sample_ancestral(cfg.model, rng);
      mixgrad::responsibilities_forward_into(cfg.model, x, trace);
      const mixgrad::WeightGradient wg =
          mixgrad::weight_gradient_recursion(cfg.model, trace, /*keep_dlogp=*/true);
      const int k_count = cfg.model.num_components();
      json resp = json::array(), dx = json::array(), dlogp = json::array();
      for (int d = 0; d < cfg.model.dimension(); ++d) {
        resp.push_back(std::vector<double>(trace.resp_row(d).begin(), trace.resp_row(d).end()));
        dx.push_back(std::vector<double>(
            wg.dx_dpi.begin() + static_cast<std::size_t>(d) * k_count,
            wg.dx_dpi.begin() + static_cast<std::size_t>(d + 1) * k_count));
        json rows = json::array();
        for (int k = 0; k < k_count; ++k) {
          const std::size_t base = (static_cast<std::size_t>(d) * k_count + k) * k_count;
          rows.push_back(std::vector<double>(wg.dlogp_dpi.begin() + base,
                                             wg.dlogp_dpi.begin() + base + k_count));
        }
        dlogp.push_back(std::move(rows));
      }
      samples.push_back({{"x", x},
                         {"responsibilities", resp},
                         {"dx_dpi", dx},
                         {"dlogp_dpi", dlogp}});
    }
    write_output(trace_out, json{{"samples", samples}}.dump(2));
  }

  if (cfg.format == "csv") {
    std::vector<const mixgrad::EstimatorReport*> reports;
    if (pathwise) reports.push_back(&*pathwise);
    if (score) reports.push_back(&*score);
    write_output(cfg.output, report_csv(reports));
    return 0;
  }

  json doc;
  doc["command"] = "estimate";
  doc["model"] = json::parse(cfg.model.to_json_text());
  json loss_j;
  loss_j["id"] = cfg.loss.id();
  if (!cfg.loss.coefficients().empty()) loss_j["coeffs"] = cfg.loss.coefficients();
  doc["loss"] = loss_j;
  doc["n"] = cfg.n;
  doc["seed"] = cfg.seed;
  doc["workers"] = cfg.workers;
  json estimators = json::object();
  if (pathwise) estimators["pathwise"] = report_to_json(*pathwise);
  if (score) estimators["score"] = report_to_json(*score);
  doc["estimators"] = estimators;
  if (pathwise && score) {
    std::vector<std::string> labels;
    std::vector<double> mean_a, se_a, mean_b, se_b;
    flatten_report(*pathwise, labels, mean_a, se_a);
    std::vector<std::string> labels_b;
    flatten_report(*score, labels_b, mean_b, se_b);
    doc["comparison"] = comparison_to_json(
        mixgrad::compare("pathwise-vs-score", labels, mean_a, se_a, mean_b, se_b));
  }
  write_output(cfg.output, doc.dump(2));
  return 0;
}

int cmd_check(const std::string& zoo_dir, const std::string& filter, const std::string& checks,
              const mixgrad::CheckOptions& opts, const std::string& output) {
  const std::vector<mixgrad::NamedModel> zoo = mixgrad::load_zoo(zoo_dir, filter);
  if (zoo.empty()) throw mixgrad::InvalidInputError("check: no zoo models match \"" + filter + "\"");

  const bool do_fd = checks.find("fd") != std::string::npos;
  const bool do_quad = checks.find("quadrature") != std::string::npos;
  const bool do_score = checks.find("score") != std::string::npos;
  if (!do_fd && !do_quad && !do_score)
    throw mixgrad::InvalidInputError("check: no known check in \"" + checks + "\"");

  bool all_pass = true;
  json doc;
  doc["command"] = "check";
  doc["zoo"] = zoo_dir;
  doc["n"] = opts.n;
  doc["n_draws"] = opts.n_draws;
  doc["z_threshold"] = opts.z_threshold;
  doc["seed"] = opts.seed;

  if (do_fd) {
    const auto results = mixgrad::run_fd_checks(zoo, opts);
    json arr = json::array();
    for (const auto& r : results) {
      arr.push_back(fd_result_to_json(r));
      std::cout << (r.pass ? "PASS" : "FAIL") << "  fd          " << r.model_name
                << "  max_rel_err=" << r.max_rel_err << "\n";
      all_pass = all_pass && r.pass;
    }
    doc["fd"] = arr;
  }
  if (do_quad) {
    const auto results = mixgrad::run_quadrature_checks(zoo, opts);
    json arr = json::array();
    // One coordinate in a hundred may exceed the z threshold across the
    // whole quadrature run (expected false positives of a 3-sigma test).
    std::size_t coords = 0, failures = 0;
    for (const auto& r : results) {
      arr.push_back(comparison_to_json(r));
      coords += r.labels.size();
      failures += static_cast<std::size_t>(r.failures);
      std::cout << (r.failures == 0 ? "PASS" : "WARN") << "  quadrature  " << r.name
                << "  failures=" << r.failures << "/" << r.labels.size() << "\n";
    }
    const bool quad_pass = failures * 100 <= coords;
    std::cout << (quad_pass ? "PASS" : "FAIL") << "  quadrature overall: " << failures << "/"
              << coords << " coords beyond z threshold\n";
    all_pass = all_pass && quad_pass;
    doc["quadrature"] = arr;
    doc["quadrature_failures"] = failures;
    doc["quadrature_coords"] = coords;
  }
  if (do_score) {
    const auto results = mixgrad::run_score_checks(zoo, opts);
    json arr = json::array();
    for (const auto& r : results) {
      arr.push_back(comparison_to_json(r));
      std::cout << (r.pass ? "PASS" : "FAIL") << "  score       " << r.name
                << "  failures=" << r.failures << "/" << r.labels.size() << "\n";
      all_pass = all_pass && r.pass;
    }
    doc["score"] = arr;
  }
  doc["pass"] = all_pass;
  if (!output.empty()) write_output(output, doc.dump(2));
  std::cout << (all_pass ? "PASS" : "FAIL") << "  overall\n";
  return all_pass ? 0 : 1;
}

int cmd_variance_sweep(const EstimateConfig& cfg, const std::vector<std::int64_t>& n_list) {
  if (n_list.empty()) throw mixgrad::InvalidInputError("variance-sweep: empty N list");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1])
      throw mixgrad::InvalidInputError("variance-sweep: N list must be ascending");

  std::ostringstream out;
  out << "estimator,label,n,mean,std_error\n";
  for (std::int64_t n : n_list) {
    const auto pathwise =
        mixgrad::estimate_loss_grad(cfg.model, cfg.loss, cfg.selectors, n, cfg.seed, cfg.workers);
    const auto score =
        mixgrad::score_function_grad(cfg.model, cfg.loss, cfg.selectors, n, cfg.seed, cfg.workers);
    for (const auto* report : {&pathwise, &score}) {
      std::vector<std::string> labels;
      std::vector<double> mean, se;
      flatten_report(*report, labels, mean, se);
      for (std::size_t i = 0; i < labels.size(); ++i)
        out << report->method << ',' << labels[i] << ',' << n << ',' << fmt17(mean[i]) << ','
            << fmt17(se[i]) << "\n";
    }
  }
  write_output(cfg.output, out.str());
  return 0;
}

int cmd_sample(const std::string& model_path, std::int64_t n, const std::string& sampler,
               std::uint64_t seed, const std::string& output) {
  const mixgrad::MixtureModel model = mixgrad::MixtureModel::from_json_text(read_file(model_path));
  if (n < 1) throw mixgrad::InvalidInputError("sample: need n >= 1");
  if (sampler != "ancestral" && sampler != "quantile")
    throw mixgrad::InvalidInputError("sample: sampler must be ancestral or quantile");

  std::ostringstream out;
  mixgrad::Philox rng(seed, 1);
  for (std::int64_t i = 0; i < n; ++i) {
    std::vector<double> x;
    if (sampler == "ancestral") {
      x = mixgrad::sample_ancestral(model, rng);
    } else {
      const mixgrad::UniformDraw draw = mixgrad::make_uniform_draw(model.dimension(), rng);
      x = mixgrad::sample_quantile_transform(model, draw);
    }
    for (int d = 0; d < model.dimension(); ++d) out << (d ? "," : "") << fmt17(x[d]);
    out << "\n";
  }
  write_output(output, out.str());
  std::cerr << "seed " << seed << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pathwise gradient estimation through mixture densities"};
  app.require_subcommand(1);

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Run gradient estimators from a config");
  std::string est_config_path;
  std::string est_output, est_format, est_trace_out;
  int est_trace_samples = 1;
  std::int64_t est_seed = -1;
  int est_workers = 0;
  estimate->add_option("-c,--config", est_config_path, "Experiment config JSON")->required();
  estimate->add_option("--seed", est_seed, "Override config seed");
  estimate->add_option("--workers", est_workers, "Override config worker count");
  estimate->add_option("-o,--output", est_output, "Report path (default: config, else stdout)");
  estimate->add_option("--format", est_format, "json or csv (overrides config)");
  estimate->add_option("--trace-out", est_trace_out, "Write per-sample trace JSON here");
  estimate->add_option("--trace-samples", est_trace_samples, "Trace sample count");

  // check
  auto* check = app.add_subcommand("check", "Run zoo-wide verification oracles");
  std::string chk_zoo = "zoo", chk_models, chk_checks = "fd,quadrature,score", chk_output;
  mixgrad::CheckOptions chk_opts;
  check->add_option("--zoo", chk_zoo, "Zoo directory");
  check->add_option("--models", chk_models, "Comma-separated name substrings");
  check->add_option("--checks", chk_checks, "Subset of fd,quadrature,score");
  check->add_option("--n", chk_opts.n, "Monte-Carlo budget per estimator run");
  check->add_option("--n-draws", chk_opts.n_draws, "Fixed draws for the fd check");
  check->add_option("--z", chk_opts.z_threshold, "z-score threshold");
  check->add_option("--seed", chk_opts.seed, "Seed");
  check->add_option("--workers", chk_opts.workers, "Worker threads");
  check->add_option("-o,--output", chk_output, "Aggregated report JSON path");
  check->add_flag("--inject-sign-error", chk_opts.inject_sign_error,
                  "Corrupt one analytic sign (detector smoke test)")
      ->group("");  // hidden

  // variance-sweep
  auto* sweep = app.add_subcommand("variance-sweep", "SE vs N for both estimators");
  std::string swp_config_path, swp_output, swp_n_list = "100,10000,1000000";
  std::int64_t swp_seed = -1;
  int swp_workers = 0;
  sweep->add_option("-c,--config", swp_config_path, "Experiment config JSON")->required();
  sweep->add_option("--n-list", swp_n_list, "Comma-separated ascending sample counts");
  sweep->add_option("--seed", swp_seed, "Override config seed");
  sweep->add_option("--workers", swp_workers, "Override config worker count");
  sweep->add_option("-o,--output", swp_output, "CSV path (default stdout)");

  // sample
  auto* sample = app.add_subcommand("sample", "Draw samples to CSV");
  std::string smp_model, smp_sampler = "ancestral", smp_output;
  std::int64_t smp_n = 1000;
  std::uint64_t smp_seed = 0;
  bool smp_seed_given = false;
  sample->add_option("--model", smp_model, "Model JSON path")->required();
  sample->add_option("-n,--n", smp_n, "Sample count");
  sample->add_option("--sampler", smp_sampler, "ancestral or quantile");
  sample->add_option("--seed", smp_seed, "Seed")->each([&](const std::string&) {
    smp_seed_given = true;
  });
  sample->add_option("-o,--output", smp_output, "CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (estimate->parsed()) {
      EstimateConfig cfg = parse_estimate_config(read_file(est_config_path));
      if (est_seed >= 0) {
        cfg.seed = static_cast<std::uint64_t>(est_seed);
        cfg.seed_generated = false;
      }
      if (est_workers > 0) cfg.workers = est_workers;
      if (!est_output.empty()) cfg.output = est_output;
      if (!est_format.empty()) cfg.format = est_format;
      if (cfg.format != "json" && cfg.format != "csv")
        throw mixgrad::InvalidInputError("format must be json or csv");
      return cmd_estimate(cfg, est_trace_out, est_trace_samples);
    }
    if (check->parsed()) return cmd_check(chk_zoo, chk_models, chk_checks, chk_opts, chk_output);
    if (sweep->parsed()) {
      EstimateConfig cfg = parse_estimate_config(read_file(swp_config_path));
      if (swp_seed >= 0) cfg.seed = static_cast<std::uint64_t>(swp_seed);
      if (swp_workers > 0) cfg.workers = swp_workers;
      if (!swp_output.empty()) cfg.output = swp_output;
      std::vector<std::int64_t> n_list;
      std::stringstream ss(swp_n_list);
      std::string token;
      while (std::getline(ss, token, ',')) n_list.push_back(std::stoll(token));
      return cmd_variance_sweep(cfg, n_list);
    }
    if (sample->parsed()) {
      if (!smp_seed_given) smp_seed = std::random_device{}();
      return cmd_sample(smp_model, smp_n, smp_sampler, smp_seed, smp_output);
    }
  } catch (const mixgrad::DegenerateRateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const mixgrad::InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mixgrad::InvalidLossError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mixgrad::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
