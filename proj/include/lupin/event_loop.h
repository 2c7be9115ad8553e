// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#ifndef LUPIN_EVENT_LOOP_H_
#define LUPIN_EVENT_LOOP_H_

#include <cstdint>
#include <functional>
#include <map>
#include <utility>

namespace lupin {

// Single-threaded discrete-event scheduler over an integer millisecond
// clock. Events at equal times run in insertion order.
class EventLoop {
 public:
  using Task = std::function<void()>;
  using TaskId = uint64_t;

  int64_t now() const { return now_; }

  TaskId ScheduleAt(int64_t time_ms, Task task);
  TaskId ScheduleAfter(int64_t delay_ms, Task task);
  void Cancel(TaskId id);

  // Runs the earliest pending event; advances the clock to its time.
  // Returns false when the queue is empty (clock unchanged).
  bool RunOne();
  void RunUntilIdle();

  bool idle() const { return queue_.empty(); }

 private:
  struct Key {
    int64_t time;
    uint64_t seq;
    bool operator<(const Key& other) const {
      return time != other.time ? time < other.time : seq < other.seq;
    }
  };

  int64_t now_ = 0;
  uint64_t next_seq_ = 0;
  std::map<Key, Task> queue_;
  std::map<TaskId, Key> by_id_;
};

}  // namespace lupin

#endif  // LUPIN_EVENT_LOOP_H_
