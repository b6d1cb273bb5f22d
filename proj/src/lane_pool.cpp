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

#include "snmpc/lane_pool.hpp"

#include <algorithm>
#include <utility>

namespace snmpc {

LanePool::LanePool(std::size_t lanes) {
  const std::size_t extra = lanes > 1 ? lanes - 1 : 0;
  workers_.reserve(extra);
  for (std::size_t lane = 1; lane <= extra; ++lane) {
    workers_.emplace_back([this, lane] { worker_loop(lane); });
  }
}

LanePool::~LanePool() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  start_cv_.notify_all();
  for (auto &w : workers_) {
    w.join();
  }
}

void LanePool::run_chunk(std::size_t lane) {
  const std::size_t n = lanes();
  const std::size_t per = (count_ + n - 1) / n;
  const std::size_t begin = std::min(count_, lane * per);
  const std::size_t end = std::min(count_, begin + per);
  try {
    for (std::size_t i = begin; i < end; ++i) {
      (*body_)(i);
    }
  } catch (...) {
    std::lock_guard lock(mutex_);
    if (!error_) {
      error_ = std::current_exception();
    }
  }
}

void LanePool::run(std::size_t count, const std::function<void(std::size_t)> &body) {
  if (workers_.empty() || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      body(i);
    }
    return;
  }
  {
    std::lock_guard lock(mutex_);
    body_ = &body;
    count_ = count;
    pending_ = workers_.size();
    ++generation_;
  }
  start_cv_.notify_all();
  run_chunk(0);
  std::unique_lock lock(mutex_);
  done_cv_.wait(lock, [this] { return pending_ == 0; });
  body_ = nullptr;
  if (error_) {
    std::rethrow_exception(std::exchange(error_, nullptr));
  }
}

void LanePool::worker_loop(std::size_t lane) {
  std::size_t seen = 0;
  for (;;) {
    {
      std::unique_lock lock(mutex_);
      start_cv_.wait(lock, [&] { return stopping_ || generation_ != seen; });
      if (stopping_) {
        return;
      }
      seen = generation_;
    }
    run_chunk(lane);
    {
      std::lock_guard lock(mutex_);
      --pending_;
    }
    done_cv_.notify_one();
  }
}

} // namespace snmpc
