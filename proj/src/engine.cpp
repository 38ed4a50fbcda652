// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#include "mare/engine.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "mare/errors.hpp"
#include "mare/hash.hpp"

namespace fs = std::filesystem;

namespace mare {
namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::vector<int> reduce_schedule(int p0, int depth_k) {
  if (depth_k < 1) throw ConfigError("reduce depth_k must be >= 1");
  std::vector<int> schedule;
  if (p0 <= 1) return schedule;
  int prev = p0;
  for (int i = 1; i <= depth_k; ++i) {
    double exponent = static_cast<double>(depth_k - i) / depth_k;
    int target = static_cast<int>(
        std::ceil(std::pow(static_cast<double>(p0), exponent) - 1e-9));
    target = std::max(1, std::min(target, prev - 1));
    schedule.push_back(target);
    prev = target;
    if (target == 1) break;  // tree is closed; later levels would be no-ops
  }
  if (schedule.empty() || schedule.back() != 1) schedule.push_back(1);
  return schedule;
}

Dataset Engine::run_stage(const Dataset& ds, const StageSpec& stage,
                          const char* op_name, uint64_t* bytes_materialized) {
  if (stage.input_mp.container_path == stage.output_mp.container_path)
    throw ConfigError("input and output mount points must differ");

  struct TaskCtx {
    std::unique_ptr<ScopedTaskDir> dir;
    fs::path out_host;
  };
  std::vector<TaskCtx> ctxs(ds.partitions.size());
  std::vector<LevelTask> tasks;
  tasks.reserve(ds.partitions.size());

  uint64_t materialized = 0;
  for (size_t i = 0; i < ds.partitions.size(); ++i) {
    const Partition& p = ds.partitions[i];
    ctxs[i].dir = std::make_unique<ScopedTaskDir>(temp_);
    fs::path in_host =
        materialize(p, stage.input_mp, ctxs[i].dir->path(), temp_.backing());
    ctxs[i].out_host = prepare_output(stage.output_mp, ctxs[i].dir->path());
    materialized += p.byte_count();

    ContainerTask task;
    task.image = stage.image;
    task.command = stage.command;
    task.binds = {{in_host, stage.input_mp.container_path, true},
                  {ctxs[i].out_host, stage.output_mp.container_path, false}};
    task.timeout_s = task_timeout_s_;
    tasks.push_back({std::move(task), p.affinity, p.id});
  }
  if (bytes_materialized) *bytes_materialized += materialized;

  auto outcomes = run_level(tasks, pool_, backend_, retries_);
  for (size_t i = 0; i < outcomes.size(); ++i) {
    const TaskOutcome& o = outcomes[i];
    if (!o.ok()) {
      std::string what =
          std::string(op_name) + " task failed on partition " +
          std::to_string(tasks[i].partition_id) +
          (o.timed_out() ? " (timeout)"
                         : " (exit " + std::to_string(*o.exit_code) + ")");
      throw TaskError(what, /*stage_index=*/-1, tasks[i].partition_id,
                      stderr_tail(o));
    }
  }

  Dataset out;
  out.partitions.reserve(ds.partitions.size());
  for (size_t i = 0; i < ds.partitions.size(); ++i) {
    Partition p;
    p.id = ds.partitions[i].id;
    p.affinity = ds.partitions[i].affinity;
    p.records = collect_output(stage.output_mp, ctxs[i].out_host,
                               [](const std::string& msg) {
                                 std::fprintf(stderr, "warning: %s\n",
                                              msg.c_str());
                               });
    out.partitions.push_back(std::move(p));
  }
  return out;
}

Dataset Engine::map(const Dataset& ds, const StageSpec& stage) {
  if (ds.partitions.empty()) throw ConfigError("map over empty dataset");
  double start = now_s();
  uint64_t materialized = 0;
  Dataset out = run_stage(ds, stage, "map", &materialized);
  out.origin = Origin::map;
  ledger_.add({"map", static_cast<int>(ds.partitions.size()), materialized,
               /*bytes_shuffled=*/0, /*merge_events=*/0, now_s() - start});
  return out;
}

Dataset Engine::reduce(const Dataset& ds, const StageSpec& stage,
                       ReduceConfig cfg) {
  if (cfg.depth_k < 1) throw ConfigError("reduce depth_k must be >= 1");
  if (ds.partitions.empty()) throw ConfigError("reduce over empty dataset");

  double start = now_s();
  uint64_t materialized = 0;
  uint64_t shuffled = 0;
  int merge_events = 0;
  int tasks_run = 0;

  Dataset current = ds;
  auto schedule = reduce_schedule(static_cast<int>(ds.partitions.size()),
                                  cfg.depth_k);
  for (int target : schedule) {
    // Aggregate every partition in place, then merge down to `target`.
    current = run_stage(current, stage, "reduce", &materialized);
    tasks_run += static_cast<int>(current.partitions.size());

    Dataset merged;
    merged.partitions.resize(target);
    for (int t = 0; t < target; ++t) {
      merged.partitions[t].id = t;
      merged.partitions[t].affinity = current.partitions[t].affinity;
    }
    for (const auto& src : current.partitions) {
      int t = src.id % target;
      Partition& dst = merged.partitions[t];
      if (src.affinity != dst.affinity) shuffled += src.byte_count();
      dst.records.insert(dst.records.end(), src.records.begin(),
                         src.records.end());
    }
    ++merge_events;
    current = std::move(merged);
  }

  // Closing aggregation over the single remaining partition.
  current = run_stage(current, stage, "reduce", &materialized);
  tasks_run += static_cast<int>(current.partitions.size());
  current.origin = Origin::reduce;
  ledger_.add({"reduce", tasks_run, materialized, shuffled, merge_events,
               now_s() - start});
  return current;
}

Dataset Engine::repartition_by(const Dataset& ds, const KeyFunction& key,
                               int num_partitions) {
  if (num_partitions < 1) throw ConfigError("num_partitions must be >= 1");
  double start = now_s();

  Dataset out;
  out.origin = Origin::repartition;
  out.partitions.resize(num_partitions);
  for (int i = 0; i < num_partitions; ++i) out.partitions[i].id = i;
  out = assign_affinity(out, pool_);

  // Bucket per target partition: keys keep first-appearance order and records
  // with equal keys keep source order, so equal keys end up contiguous.
  struct Buckets {
    std::vector<std::string> key_order;
    std::map<std::string, std::vector<Record>> by_key;
  };
  std::vector<Buckets> buckets(num_partitions);

  uint64_t shuffled = 0;
  uint64_t record_index = 0;
  for (const auto& src : ds.partitions) {
    for (const auto& r : src.records) {
      std::string k;
      try {
        k = key(r);
      } catch (const std::exception& e) {
        throw ConfigError("key function failed on record " +
                          std::to_string(record_index) + ": " + e.what());
      }
      int t = key_partition(k, num_partitions);
      if (t != src.id) shuffled += r.size();
      auto& b = buckets[t];
      auto [it, inserted] = b.by_key.try_emplace(k);
      if (inserted) b.key_order.push_back(k);
      it->second.push_back(r);
      ++record_index;
    }
  }
  for (int t = 0; t < num_partitions; ++t) {
    for (const auto& k : buckets[t].key_order) {
      auto& recs = buckets[t].by_key[k];
      out.partitions[t].records.insert(
          out.partitions[t].records.end(),
          std::make_move_iterator(recs.begin()),
          std::make_move_iterator(recs.end()));
    }
  }

  ledger_.add({"repartition_by", 0, 0, shuffled, /*merge_events=*/1,
               now_s() - start});
  return out;
}

std::vector<Record> collect(const Dataset& ds) {
  std::vector<Record> out;
  out.reserve(ds.record_count());
  for (const auto& p : ds.partitions)
    out.insert(out.end(), p.records.begin(), p.records.end());
  return out;
}

void save_text(const Dataset& ds, const Separator& sep, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const auto& p : ds.partitions) {
    std::string text = join_text(p, sep);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void save_binary(const Dataset& ds, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string());
  size_t index = 0;
  for (const auto& p : ds.partitions) {
    for (const auto& r : p.records) {
      char name[32];
      std::snprintf(name, sizeof(name), "part-%05zu", index++);
      std::ofstream out(dir / name, std::ios::binary);
      if (!out) throw IoError("cannot write " + (dir / name).string());
      out.write(r.data(), static_cast<std::streamsize>(r.size()));
    }
  }
}

}  // namespace mare
