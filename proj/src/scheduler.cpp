// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#include "mare/scheduler.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <sstream>
#include <thread>

#include "mare/errors.hpp"

namespace mare {
namespace {

// Counting slot gate with a high-water mark of concurrently held slots.
class SlotGate {
 public:
  explicit SlotGate(int slots) : free_(slots) {}

  void acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return free_ > 0; });
    --free_;
    ++running_;
    high_water_ = std::max(high_water_, running_);
  }
  void release() {
    {
      std::lock_guard lock(mu_);
      ++free_;
      --running_;
    }
    cv_.notify_one();
  }
  int high_water() const {
    std::lock_guard lock(mu_);
    return high_water_;
  }

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  int free_;
  int running_ = 0;
  int high_water_ = 0;
};

}  // namespace

Dataset assign_affinity(const Dataset& ds, const WorkerPool& pool) {
  if (pool.workers.empty()) throw ConfigError("worker pool is empty");
  Dataset out = ds;
  int next = 0;
  for (auto& p : out.partitions) {
    if (p.affinity == kUnassignedAffinity)
      p.affinity = pool.workers[next++ % pool.workers.size()].id;
  }
  return out;
}

std::vector<TaskOutcome> run_level(const std::vector<LevelTask>& tasks,
                                   const WorkerPool& pool, Backend& backend,
                                   int retries, LevelStats* stats) {
  if (pool.workers.empty()) throw ConfigError("worker pool is empty");

  std::vector<std::unique_ptr<SlotGate>> gates;
  std::vector<int> worker_index(1, 0);
  {
    int max_id = 0;
    for (const auto& w : pool.workers) max_id = std::max(max_id, w.id);
    worker_index.assign(max_id + 1, -1);
    for (size_t i = 0; i < pool.workers.size(); ++i) {
      gates.push_back(std::make_unique<SlotGate>(pool.workers[i].slots));
      worker_index[pool.workers[i].id] = static_cast<int>(i);
    }
  }

  std::vector<TaskOutcome> outcomes(tasks.size());
  std::atomic<int> total_retries{0};
  std::vector<std::thread> threads;
  threads.reserve(tasks.size());
  for (size_t i = 0; i < tasks.size(); ++i) {
    threads.emplace_back([&, i] {
      int wid = tasks[i].affinity;
      if (wid < 0 || wid >= static_cast<int>(worker_index.size()) ||
          worker_index[wid] < 0)
        wid = pool.workers[i % pool.workers.size()].id;
      SlotGate& gate = *gates[worker_index[wid]];
      gate.acquire();
      TaskOutcome outcome = backend.run(tasks[i].task);
      for (int attempt = 0; attempt < retries && !outcome.ok(); ++attempt) {
        total_retries.fetch_add(1);
        outcome = backend.run(tasks[i].task);
      }
      gate.release();
      outcomes[i] = std::move(outcome);
    });
  }
  for (auto& t : threads) t.join();

  if (stats) {
    stats->high_water.clear();
    for (const auto& g : gates) stats->high_water.push_back(g->high_water());
    stats->retries = total_retries.load();
  }
  return outcomes;
}

void ShuffleLedger::add(LedgerEntry entry) {
  std::lock_guard lock(mu_);
  entries_.push_back(std::move(entry));
}

std::vector<LedgerEntry> ShuffleLedger::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

nlohmann::json ShuffleLedger::to_json() const {
  nlohmann::json ops = nlohmann::json::array();
  LedgerEntry total{"total", 0, 0, 0, 0, 0};
  for (const auto& e : entries()) {
    ops.push_back({{"op", e.op},
                   {"tasks", e.tasks},
                   {"bytes_materialized", e.bytes_materialized},
                   {"bytes_shuffled", e.bytes_shuffled},
                   {"merge_events", e.merge_events},
                   {"wall_s", e.wall_s}});
    total.tasks += e.tasks;
    total.bytes_materialized += e.bytes_materialized;
    total.bytes_shuffled += e.bytes_shuffled;
    total.merge_events += e.merge_events;
    total.wall_s += e.wall_s;
  }
  return {{"operations", ops},
          {"totals",
           {{"tasks", total.tasks},
            {"bytes_materialized", total.bytes_materialized},
            {"bytes_shuffled", total.bytes_shuffled},
            {"merge_events", total.merge_events},
            {"wall_s", total.wall_s}}}};
}

std::string ShuffleLedger::to_table() const {
  if (entries().empty()) return {};
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-16s %8s %16s %14s %7s %9s\n", "op",
                "tasks", "bytes_to_mounts", "bytes_shuffled", "merges",
                "wall_s");
  out << line;
  LedgerEntry total{"total", 0, 0, 0, 0, 0};
  for (const auto& e : entries()) {
    std::snprintf(line, sizeof(line), "%-16s %8d %16llu %14llu %7d %9.3f\n",
                  e.op.c_str(), e.tasks,
                  static_cast<unsigned long long>(e.bytes_materialized),
                  static_cast<unsigned long long>(e.bytes_shuffled),
                  e.merge_events, e.wall_s);
    out << line;
    total.tasks += e.tasks;
    total.bytes_materialized += e.bytes_materialized;
    total.bytes_shuffled += e.bytes_shuffled;
    total.merge_events += e.merge_events;
    total.wall_s += e.wall_s;
  }
  std::snprintf(line, sizeof(line), "%-16s %8d %16llu %14llu %7d %9.3f\n",
                "total", total.tasks,
                static_cast<unsigned long long>(total.bytes_materialized),
                static_cast<unsigned long long>(total.bytes_shuffled),
                total.merge_events, total.wall_s);
  out << line;
  return out.str();
}

}  // namespace mare
