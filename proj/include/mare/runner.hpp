// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "mare/executor.hpp"
#include "mare/pipeline.hpp"
#include "mare/scheduler.hpp"

namespace mare {

struct RunOptions {
  BackendMode backend = BackendMode::auto_select;
  int workers = 1;
  int slots_per_worker = 4;
  std::filesystem::path temp_root;  // empty: system temp
  TempBacking temp_backing = TempBacking::disk;
  bool keep_temp = false;
  double task_timeout_s = 0;
  int retries = 1;
  // Benchmark-only: keep this fraction of ingested records (1.0 = all).
  double fraction = 1.0;
};

struct RunReport {
  nlohmann::json ledger;
  double ingest_s = 0;
  double execute_s = 0;  // stages only, ingestion excluded
  double total_s = 0;
  uint64_t output_records = 0;
};

/// Executes a validated pipeline end to end: ingest, stages in order, sink,
/// ledger. Failures surface as the usual error classes; a TaskError carries
/// the failing stage index and partition id.
RunReport run_pipeline(const PipelineSpec& spec, const RunOptions& opts);

}  // namespace mare
