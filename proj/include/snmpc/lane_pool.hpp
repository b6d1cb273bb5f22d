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

#ifndef SNMPC_LANE_POOL_HPP
#define SNMPC_LANE_POOL_HPP

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace snmpc {

/// Fixed set of worker threads executing index-parallel loops.
///
/// run() blocks until every index has been processed; the calling thread
/// takes part as lane 0. Indices are handed out in static contiguous
/// chunks, one per lane. The first exception thrown by `body` on any lane
/// is rethrown from run().
class LanePool {
public:
  explicit LanePool(std::size_t lanes);
  ~LanePool();

  LanePool(const LanePool &) = delete;
  LanePool &operator=(const LanePool &) = delete;

  std::size_t lanes() const { return workers_.size() + 1; }

  void run(std::size_t count, const std::function<void(std::size_t)> &body);

private:
  void worker_loop(std::size_t lane);
  void run_chunk(std::size_t lane);

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t)> *body_ = nullptr;
  std::size_t count_ = 0;
  std::size_t generation_ = 0;
  std::size_t pending_ = 0;
  bool stopping_ = false;
  std::exception_ptr error_;
};

} // namespace snmpc

#endif // SNMPC_LANE_POOL_HPP
