// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#include "lupin/event_loop.h"

#include <cassert>

namespace lupin {

EventLoop::TaskId EventLoop::ScheduleAt(int64_t time_ms, Task task) {
  assert(time_ms >= now_ && "events may not be scheduled in the past");
  Key key{time_ms, next_seq_++};
  queue_.emplace(key, std::move(task));
  by_id_.emplace(key.seq, key);
  return key.seq;
}

EventLoop::TaskId EventLoop::ScheduleAfter(int64_t delay_ms, Task task) {
  return ScheduleAt(now_ + delay_ms, std::move(task));
}

void EventLoop::Cancel(TaskId id) {
  auto it = by_id_.find(id);
  if (it == by_id_.end())
    return;
  queue_.erase(it->second);
  by_id_.erase(it);
}

bool EventLoop::RunOne() {
  if (queue_.empty())
    return false;
  auto it = queue_.begin();
  Task task = std::move(it->second);
  now_ = it->first.time;
  by_id_.erase(it->first.seq);
  queue_.erase(it);
  task();
  return true;
}

void EventLoop::RunUntilIdle() {
  while (RunOne()) {
  }
}

}  // namespace lupin
