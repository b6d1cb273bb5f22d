/*
 Copyright 2026 The sampled-nmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef SNMPC_COMPLEXITY_HPP
#define SNMPC_COMPLEXITY_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "snmpc/core.hpp"

namespace snmpc {

struct SolveResult;

/// Unit costs of the operation-count model.
struct CostModel {
  double c1 = 1.0; ///< one plant step plus its feasibility test
  double c2 = 1.0; ///< one full cost evaluation
  std::string units = "ops";

  void validate() const;
};

struct ComplexityReport {
  double serial_exact = 0.0;  ///< c1 sum (N-j) n_j + c2 sum n_j
  double serial_bound = 0.0;  ///< n c1 N(N+1)/2 + c2 N n
  double full_parallel = 0.0; ///< c1 N(N+1)/2 + c2 N, one lane per sample
  double p_parallel = 0.0;    ///< ceil(n/p) (c1 N(N+1)/2 + c2 N)
  std::uint64_t measured_f_evals = 0;
  std::uint64_t measured_cost_evals = 0;
};

/// sum_j (N - j) n_j
std::uint64_t predicted_f_evals(std::span<const std::size_t> samples_per_step);
/// sum_j n_j
std::uint64_t predicted_cost_evals(std::span<const std::size_t> samples_per_step);

/// Serial operation count of one sweep; N is the length of the list.
double predicted_serial(std::span<const std::size_t> samples_per_step, const CostModel &model);

/// Bounds for n_j <= max_samples. serial_exact is filled with the uniform
/// n_j = max_samples count; measured fields are left at zero.
ComplexityReport predicted_bounds(std::size_t max_samples, std::size_t horizon,
                                  const CostModel &model, std::size_t lanes);

struct ComplexityComparison {
  double f_ratio = 0.0;    ///< measured / predicted plant steps (1 when both are 0)
  double cost_ratio = 0.0; ///< measured / predicted cost evaluations
  double measured_ops = 0.0;
  double bound_ratio = 0.0; ///< measured_ops / serial_bound
  bool violation = false;   ///< pruning off and counters differ from the exact sums
  std::string note;
};

ComplexityComparison compare(const SolveResult &measured,
                             std::span<const std::size_t> samples_per_step,
                             const ComplexityReport &predicted, const CostModel &model,
                             bool pruning);

/// Wall-clock medians of c1 and c2 (seconds) over `repeats` evaluations at
/// the equilibrium of `problem`.
CostModel calibrate_cost_model(const Problem &problem, std::size_t repeats = 1000);

} // namespace snmpc

#endif // SNMPC_COMPLEXITY_HPP
