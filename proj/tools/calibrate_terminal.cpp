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

// Offline calibration of the buck-boost terminal level: the largest level
// of {x | (x-x_e)'P(x-x_e) <= level} whose boundary keeps the terminal law
// inside the input box, inside the state box, and maps back into the set.

#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "snmpc/models.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Calibrate the buck-boost terminal set level"};
  std::size_t points = 10000;
  int bisections = 40;
  app.add_option("--points", points, "boundary points checked per level")->check(CLI::PositiveNumber);
  app.add_option("--bisections", bisections, "bisection steps inside the admissible decade");
  CLI11_PARSE(app, argc, argv);

  const snmpc::models::BuckBoostParams params;
  const double level =
      snmpc::models::calibrate_buck_boost_terminal_level(params, points, bisections);
  std::printf("{\"plant\": \"buck_boost\", \"boundary_points\": %zu, \"terminal_level\": %.17g}\n",
              points, level);
  return level > 0.0 ? 0 : 1;
}
