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

#include <span>
#include <vector>

#include "mixgrad/mixture_model.hpp"

namespace mixgrad {

/// Everything the gradient recursions need at a sample x: the posterior
/// responsibilities p[d][k] of each component given the prefix x_{<d}, the
/// conditional mixture densities f_d(x_d | x_{<d}), and the component
/// pdf/cdf/dlogpdf evaluations at each coordinate.
///
/// Responsibilities evolve by
///   p[0][k] = weight_k
///   p[d][k] = p[d-1][k] * comp_pdf[d-1][k] / cond_pdf[d-1]
/// computed in log space; each row lies on the simplex.
struct ForwardTrace {
  int num_components = 0;
  int dimension = 0;
  std::vector<double> x;                // D
  std::vector<double> resp;             // D x K, row-major
  std::vector<double> cond_pdf;         // D
  std::vector<double> log_cond_pdf;     // D
  std::vector<double> comp_pdf;         // D x K
  std::vector<double> comp_cdf;         // D x K
  std::vector<double> comp_dlogpdf_dx;  // D x K

  double resp_at(int d, int k) const { return resp[static_cast<std::size_t>(d) * num_components + k]; }
  double pdf_at(int d, int k) const { return comp_pdf[static_cast<std::size_t>(d) * num_components + k]; }
  double cdf_at(int d, int k) const { return comp_cdf[static_cast<std::size_t>(d) * num_components + k]; }
  double dlogpdf_dx_at(int d, int k) const {
    return comp_dlogpdf_dx[static_cast<std::size_t>(d) * num_components + k];
  }
  std::span<const double> resp_row(int d) const {
    return {resp.data() + static_cast<std::size_t>(d) * num_components,
            static_cast<std::size_t>(num_components)};
  }
};

/// pdf, cdf and dlogpdf/dx of component k's dimension-d marginal at x.
struct ComponentEval {
  double pdf = 0;
  double cdf = 0;
  double dlogpdf_dx = 0;
};

ComponentEval component_eval(const MixtureModel& model, int k, int d, double x);

/// Runs the responsibility recursion at x and records the full trace.
/// Throws DegenerateSampleError (naming the dimension) if a conditional
/// density underflows below kDensityFloor.
ForwardTrace responsibilities_forward(const MixtureModel& model, std::span<const double> x);

/// Same, reusing the trace's storage; the hot path for estimators.
void responsibilities_forward_into(const MixtureModel& model, std::span<const double> x,
                                   ForwardTrace& trace);

/// Mixture density sum_k weight_k * prod_d f_kd(x_d). Equals the product of
/// the trace's conditional densities.
double joint_pdf(const MixtureModel& model, std::span<const double> x);

}  // namespace mixgrad
