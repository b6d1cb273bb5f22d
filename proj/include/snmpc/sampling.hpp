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

#ifndef SNMPC_SAMPLING_HPP
#define SNMPC_SAMPLING_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "snmpc/core.hpp"

namespace snmpc {

enum class SamplerScheme { Grid, Random, Halton };

std::string to_string(SamplerScheme scheme);
/// Throws ConfigError on unknown names.
SamplerScheme parse_sampler_scheme(const std::string &name);

/// Power-law warp that concentrates samples around an anchor input.
///
/// Each unit coordinate t in [0,1) is mapped to s = 2t - 1, warped to
/// sign(s)|s|^exponent and stretched towards the box face on its side of
/// the anchor. exponent = 1 leaves the distribution unchanged.
struct DensityWarp {
  double exponent = 1.0;
  InputVec anchor;
};

struct SamplerConfig {
  SamplerScheme scheme = SamplerScheme::Halton;
  std::uint64_t seed = 0;
  std::uint64_t skip = 0;
  std::optional<DensityWarp> warp;
};

struct SamplerState {
  SamplerConfig config;
  std::uint64_t counter = 0;

  SamplerState() = default;
  explicit SamplerState(SamplerConfig cfg) : config(std::move(cfg)) {}
};

/// Base-`base` radical inverse (van der Corput) of `index`.
double radical_inverse(std::uint64_t index, std::uint32_t base);

/// The first `count` primes.
std::vector<std::uint32_t> first_primes(std::size_t count);

/// Point `index` (1-based) of the Halton sequence in [0,1)^dim.
Eigen::VectorXd halton_point(std::uint64_t index, Eigen::Index dim);

/// Uniform double in [0,1) derived from (seed, counter) alone.
double counter_uniform(std::uint64_t seed, std::uint64_t counter);

/// Draws `count` inputs from `box` and advances state.counter by `count`.
std::vector<InputVec> draw_samples(SamplerState &state, const BoxSet &box, std::size_t count);

} // namespace snmpc

#endif // SNMPC_SAMPLING_HPP
