// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "mare/dataset.hpp"
#include "mare/executor.hpp"
#include <json.hpp>

namespace mare {

struct Worker {
  int id = 0;
  int slots = 1;
};

/// A "local cluster": workers are slot groups within this process, identified
/// so a future multi-host transport can adopt the same contract.
struct WorkerPool {
  std::vector<Worker> workers;

  static WorkerPool local(int num_workers, int slots_per_worker) {
    WorkerPool pool;
    for (int i = 0; i < num_workers; ++i)
      pool.workers.push_back({i, slots_per_worker});
    return pool;
  }
  int total_slots() const {
    int n = 0;
    for (const auto& w : workers) n += w.slots;
    return n;
  }
  int size() const { return static_cast<int>(workers.size()); }
};

/// Round-robin affinity for partitions that lack one; assigned affinities are
/// preserved untouched.
Dataset assign_affinity(const Dataset& ds, const WorkerPool& pool);

struct LevelTask {
  ContainerTask task;
  int affinity = 0;      // worker id
  int partition_id = 0;  // for failure reports
};

struct LevelStats {
  std::vector<int> high_water;  // per worker: max tasks observed concurrently
  int retries = 0;
};

/// Runs one level of tasks with per-worker concurrency capped at that
/// worker's slot count; a failed task is retried `retries` times before its
/// outcome is returned as-is. Outcomes come back in task order. Levels are
/// barriers: this returns only after every task finished.
std::vector<TaskOutcome> run_level(const std::vector<LevelTask>& tasks,
                                   const WorkerPool& pool, Backend& backend,
                                   int retries = 1,
                                   LevelStats* stats = nullptr);

struct LedgerEntry {
  std::string op;                  // map | reduce | repartition_by | ingest
  int tasks = 0;
  uint64_t bytes_materialized = 0; // bytes written to input mounts
  uint64_t bytes_shuffled = 0;     // bytes of records whose placement changed
  int merge_events = 0;
  double wall_s = 0;
};

/// Per-operation shuffle/metrics accounting for a pipeline run. Entries are
/// appended in operation order and never reset implicitly.
class ShuffleLedger {
 public:
  void add(LedgerEntry entry);
  std::vector<LedgerEntry> entries() const;
  nlohmann::json to_json() const;
  std::string to_table() const;

 private:
  mutable std::mutex mu_;
  std::vector<LedgerEntry> entries_;
};

}  // namespace mare
