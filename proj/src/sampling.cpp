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

#include "snmpc/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace snmpc {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30u)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27u)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31u);
}

double unit_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11u) * 0x1.0p-53;
}

// Affine map of t in [0,1] onto [lo, hi]; clamped so rounding never leaves the box.
double to_interval(double t, double lo, double hi) {
  return std::clamp(lo + t * (hi - lo), lo, hi);
}

double warp_coordinate(double t, double lo, double hi, const DensityWarp &warp, Eigen::Index d) {
  const double anchor = std::clamp(warp.anchor[d], lo, hi);
  const double s = 2.0 * t - 1.0;
  const double w = std::copysign(std::pow(std::fabs(s), warp.exponent), s);
  const double v = w >= 0.0 ? anchor + w * (hi - anchor) : anchor + w * (anchor - lo);
  return std::clamp(v, lo, hi);
}

// Unit-cube coordinates for sample `offset` of the current draw.
Eigen::VectorXd unit_point(const SamplerState &state, std::uint64_t offset, Eigen::Index dim) {
  const std::uint64_t index = state.counter + offset;
  switch (state.config.scheme) {
  case SamplerScheme::Halton:
    return halton_point(state.config.skip + index + 1, dim);
  case SamplerScheme::Random: {
    Eigen::VectorXd t(dim);
    for (Eigen::Index d = 0; d < dim; ++d) {
      t[d] = counter_uniform(state.config.seed,
                             index * static_cast<std::uint64_t>(dim) + static_cast<std::uint64_t>(d));
    }
    return t;
  }
  case SamplerScheme::Grid:
    break;
  }
  throw ContractViolation("unit_point: grid scheme has no unit-cube stream");
}

std::vector<InputVec> grid_samples(const BoxSet &box, std::size_t count) {
  const Eigen::Index dim = box.dim();
  std::size_t levels = 1;
  auto total = [&](std::size_t l) {
    double p = 1.0;
    for (Eigen::Index d = 0; d < dim; ++d) {
      p *= static_cast<double>(l);
    }
    return p;
  };
  while (total(levels) < static_cast<double>(count)) {
    ++levels;
  }
  auto level_value = [&](std::size_t level, Eigen::Index d) {
    if (levels == 1) {
      return 0.5 * (box.lower[d] + box.upper[d]);
    }
    if (level + 1 == levels) {
      return box.upper[d];
    }
    const double step = (box.upper[d] - box.lower[d]) / static_cast<double>(levels - 1);
    return box.lower[d] + static_cast<double>(level) * step;
  };
  std::vector<InputVec> out;
  out.reserve(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    InputVec u(dim);
    // Row-major: the last coordinate varies fastest.
    std::size_t rem = idx;
    for (Eigen::Index d = dim - 1; d >= 0; --d) {
      u[d] = level_value(rem % levels, d);
      rem /= levels;
    }
    out.push_back(std::move(u));
  }
  return out;
}

} // namespace

std::string to_string(SamplerScheme scheme) {
  switch (scheme) {
  case SamplerScheme::Grid:
    return "grid";
  case SamplerScheme::Random:
    return "random";
  case SamplerScheme::Halton:
    return "halton";
  }
  return "unknown";
}

SamplerScheme parse_sampler_scheme(const std::string &name) {
  if (name == "grid") {
    return SamplerScheme::Grid;
  }
  if (name == "random") {
    return SamplerScheme::Random;
  }
  if (name == "halton") {
    return SamplerScheme::Halton;
  }
  throw ConfigError("unknown sampler scheme '" + name + "' (expected grid, random or halton)");
}

double radical_inverse(std::uint64_t index, std::uint32_t base) {
  const double inv_base = 1.0 / static_cast<double>(base);
  double scale = inv_base;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * scale;
    index /= base;
    scale *= inv_base;
  }
  return result;
}

std::vector<std::uint32_t> first_primes(std::size_t count) {
  std::vector<std::uint32_t> primes;
  for (std::uint32_t c = 2; primes.size() < count; ++c) {
    const bool prime = std::none_of(primes.begin(), primes.end(), [c](std::uint32_t p) {
      return p * p <= c && c % p == 0;
    });
    if (prime) {
      primes.push_back(c);
    }
  }
  return primes;
}

Eigen::VectorXd halton_point(std::uint64_t index, Eigen::Index dim) {
  const auto bases = first_primes(static_cast<std::size_t>(dim));
  Eigen::VectorXd p(dim);
  for (Eigen::Index d = 0; d < dim; ++d) {
    p[d] = radical_inverse(index, bases[static_cast<std::size_t>(d)]);
  }
  return p;
}

double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  return unit_from_bits(splitmix64(splitmix64(seed) ^ splitmix64(counter + 0x632be59bd9b4e019ull)));
}

std::vector<InputVec> draw_samples(SamplerState &state, const BoxSet &box, std::size_t count) {
  box.validate();
  if (!box.bounded()) {
    throw ContractViolation("draw_samples: input box must be bounded in every coordinate");
  }
  const auto &warp = state.config.warp;
  if (warp && warp->anchor.size() != box.dim()) {
    throw ContractViolation("draw_samples: warp anchor dimension differs from the box");
  }

  std::vector<InputVec> out;
  if (state.config.scheme == SamplerScheme::Grid) {
    out = grid_samples(box, count);
  } else {
    out.reserve(count);
    for (std::size_t q = 0; q < count; ++q) {
      const Eigen::VectorXd t = unit_point(state, q, box.dim());
      InputVec u(box.dim());
      for (Eigen::Index d = 0; d < box.dim(); ++d) {
        u[d] = warp ? warp_coordinate(t[d], box.lower[d], box.upper[d], *warp, d)
                    : to_interval(t[d], box.lower[d], box.upper[d]);
      }
      out.push_back(std::move(u));
    }
  }
  state.counter += count;
  return out;
}

} // namespace snmpc
