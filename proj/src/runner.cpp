// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#include "mare/runner.hpp"

#include <chrono>

#include "mare/errors.hpp"
#include "mare/ingest.hpp"

namespace fs = std::filesystem;

namespace mare {
namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

RunReport run_pipeline(const PipelineSpec& spec, const RunOptions& opts) {
  const double start = now_s();

  WorkerPool pool = WorkerPool::local(opts.workers, opts.slots_per_worker);
  fs::path temp_root = opts.temp_root.empty()
                           ? fs::temp_directory_path() / "mare-run"
                           : opts.temp_root;
  TempSpace temp(temp_root, opts.temp_backing, opts.keep_temp);
  ShuffleLedger ledger;
  auto backend = make_backend({opts.backend, pool.total_slots(),
                               "if-not-present", opts.task_timeout_s});
  Engine engine(*backend, temp, pool, ledger, opts.retries,
                opts.task_timeout_s);

  Source src;
  src.kind = spec.source_kind;
  src.location = spec.source_location;
  src.separator = spec.source_separator;
  if (src.kind == SourceKind::object_prefix) {
    // Prefix form: <store-root>::<prefix>
    auto split = spec.source_location.find("::");
    if (split == std::string::npos)
      throw ValidationError(
          {"object_prefix location must be '<store-root>::<prefix>'"});
    src.store = std::make_shared<DirObjectStore>(
        spec.source_location.substr(0, split));
    src.location = spec.source_location.substr(split + 2);
  }

  const int partitions =
      spec.source_partitions.value_or(pool.total_slots());
  Dataset ds = ingest(src, partitions);
  if (opts.fraction < 1.0)
    ds = take_fraction(ds, opts.fraction, partitions);
  ds = assign_affinity(ds, pool);

  RunReport report;
  report.ingest_s = now_s() - start;

  const double stages_start = now_s();
  for (size_t i = 0; i < spec.stages.size(); ++i) {
    const PipelineStage& st = spec.stages[i];
    try {
      switch (st.op) {
        case StageOp::map:
          ds = engine.map(ds, st.stage);
          break;
        case StageOp::reduce:
          ds = engine.reduce(ds, st.stage, {st.depth_k});
          break;
        case StageOp::repartition_by:
          ds = engine.repartition_by(ds, st.key.compile(), st.num_partitions);
          break;
      }
    } catch (TaskError& e) {
      e.set_stage_index(static_cast<int>(i));
      throw;
    }
  }
  report.execute_s = now_s() - stages_start;

  if (spec.sink.kind == SinkSpec::Kind::text)
    save_text(ds, spec.sink.separator, spec.sink.path);
  else
    save_binary(ds, spec.sink.path);

  report.output_records = ds.record_count();
  report.ledger = ledger.to_json();
  report.total_s = now_s() - start;
  return report;
}

}  // namespace mare
