// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "mare/dataset.hpp"
#include "mare/executor.hpp"
#include "mare/mountpoint.hpp"
#include "mare/scheduler.hpp"

namespace mare {

/// One container transformation: where the partition appears, where results
/// are harvested, and what runs in between.
struct StageSpec {
  MountPoint input_mp;
  MountPoint output_mp;
  std::string image;
  std::string command;

  bool operator==(const StageSpec&) const = default;
};

struct ReduceConfig {
  int depth_k = 2;
};

/// Deterministic record -> key mapping for keyed repartitioning.
using KeyFunction = std::function<std::string(const Record&)>;

/// Partition counts for each tree-reduce level: a geometric schedule
/// P_i = max(1, ceil(P0^((K-i)/K))), clamped to strictly decrease while the
/// count is above one. Returns P1..PK; empty when p0 == 1.
std::vector<int> reduce_schedule(int p0, int depth_k);

/// Composes the three primitives over dataset, mountpoint and executor.
/// Per-partition tasks within a level run concurrently up to the pool's
/// slots; levels are barriers. Datasets are immutable; every primitive
/// returns a new one.
class Engine {
 public:
  Engine(Backend& backend, TempSpace& temp, WorkerPool pool,
         ShuffleLedger& ledger, int retries = 1, double task_timeout_s = 0)
      : backend_(backend),
        temp_(temp),
        pool_(std::move(pool)),
        ledger_(ledger),
        retries_(retries),
        task_timeout_s_(task_timeout_s) {}

  /// One container run per partition; partition count and affinities are
  /// preserved, nothing is shuffled.
  Dataset map(const Dataset& ds, const StageSpec& stage);

  /// Tree aggregation: at each of K levels every partition is aggregated by a
  /// container run, then partitions merge round-robin down the schedule until
  /// one remains; a final aggregation run closes the tree. The command must be
  /// associative, commutative and size-reducing (documented contract).
  Dataset reduce(const Dataset& ds, const StageSpec& stage,
                 ReduceConfig cfg = {});

  /// Records with equal keys land in the same of num_partitions partitions,
  /// chosen by the stable 64-bit key hash; equal-key records stay contiguous
  /// in source order.
  Dataset repartition_by(const Dataset& ds, const KeyFunction& key,
                         int num_partitions);

  const WorkerPool& pool() const { return pool_; }

 private:
  // Runs one container per partition and collects output records,
  // preserving ids and affinities. Shared by map and reduce levels.
  Dataset run_stage(const Dataset& ds, const StageSpec& stage,
                    const char* op_name, uint64_t* bytes_materialized);

  Backend& backend_;
  TempSpace& temp_;
  WorkerPool pool_;
  ShuffleLedger& ledger_;
  int retries_;
  double task_timeout_s_;
};

/// Records in partition-id order.
std::vector<Record> collect(const Dataset& ds);

/// join_text of all partitions, concatenated, written to `path`.
void save_text(const Dataset& ds, const Separator& sep,
               const std::filesystem::path& path);

/// One file per record (part-00000, ...) under `dir`.
void save_binary(const Dataset& ds, const std::filesystem::path& dir);

}  // namespace mare
