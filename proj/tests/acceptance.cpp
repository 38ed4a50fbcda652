// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one pass/fail line per criterion. Exit is nonzero when
// any criterion fails; explicit skips (unavailable container engine, too few
// hardware cores for the scaling measurement) do not fail the run.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mare/bench.hpp"
#include "mare/engine.hpp"
#include "mare/errors.hpp"
#include "mare/hash.hpp"
#include "mare/ingest.hpp"
#include "mare/mountpoint.hpp"
#include "mare/pipeline.hpp"
#include "mare/runner.hpp"
#include "mare/scheduler.hpp"

using namespace mare;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Check {
  bool passed = true;
  bool skipped = false;
  std::string detail;
};

#define REQUIRE_EQ(a, b)                                                     \
  do {                                                                       \
    if (!((a) == (b))) {                                                     \
      std::ostringstream os;                                                 \
      os << "expected " << #a << " == " << #b << " (line " << __LINE__       \
         << ")";                                                             \
      return Check{false, false, os.str()};                                  \
    }                                                                        \
  } while (0)

#define REQUIRE_TRUE(cond)                                                   \
  do {                                                                       \
    if (!(cond)) {                                                           \
      return Check{false, false,                                             \
                   std::string("failed: ") + #cond + " (line " +             \
                       std::to_string(__LINE__) + ")"};                      \
    }                                                                        \
  } while (0)

fs::path work_dir() {
  static fs::path dir = [] {
    auto d = fs::temp_directory_path() / "mare-acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

PipelineSpec gc_spec(const fs::path& corpus, const fs::path& sink,
                     int partitions, int depth_k = 2) {
  PipelineSpec spec;
  spec.source_kind = SourceKind::text_file;
  spec.source_location = corpus.string();
  spec.source_partitions = partitions;
  PipelineStage map_stage;
  map_stage.op = StageOp::map;
  map_stage.stage = {MountPoint::text("/dna"), MountPoint::text("/count"),
                     "ubuntu", "grep -o '[GC]' /dna | wc -l > /count"};
  spec.stages.push_back(map_stage);
  PipelineStage reduce_stage;
  reduce_stage.op = StageOp::reduce;
  reduce_stage.stage = {MountPoint::text("/counts"), MountPoint::text("/sum"),
                       "ubuntu", "awk '{s+=$1} END {print s}' /counts > /sum"};
  reduce_stage.depth_k = depth_k;
  spec.stages.push_back(reduce_stage);
  spec.sink = {SinkSpec::Kind::text, sink.string(), {"\n"}};
  return spec;
}

const fs::path& big_dna_dir() {
  static fs::path dir = [] {
    fs::path d = work_dir() / "dna64";
    generate_corpus({CorpusKind::dna, 64u << 20, 7}, d);
    return d;
  }();
  return dir;
}

// --- criterion 1 -----------------------------------------------------------

Check gc_pipeline_correctness() {
  fs::path dir = big_dna_dir();
  fs::path corpus = corpus_file(CorpusKind::dna, dir);
  json manifest = json::parse(slurp(dir / "manifest.json"));
  uint64_t expected = manifest["stats"]["gc_count"].get<uint64_t>();

  // Independent second-pass scan.
  {
    std::string bytes = slurp(corpus);
    uint64_t gc = 0;
    for (char c : bytes) gc += (c == 'G' || c == 'C');
    REQUIRE_EQ(gc, expected);
  }

  RunOptions opts;
  opts.backend = BackendMode::subprocess;
  opts.workers = 1;
  opts.slots_per_worker = 4;
  opts.temp_root = work_dir() / "c1-temp";
  double start = now_s();
  run_pipeline(gc_spec(corpus, dir / "gc.txt", 4), opts);
  double elapsed = now_s() - start;

  REQUIRE_EQ(slurp(dir / "gc.txt"), std::to_string(expected) + "\n");
  REQUIRE_TRUE(elapsed < 120.0);
  return {true, false,
          "count " + std::to_string(expected) + ", " +
              std::to_string(elapsed).substr(0, 5) + "s"};
}

// --- criterion 2 -----------------------------------------------------------

Check reduce_oracle_equivalence() {
  TempSpace temp(work_dir() / "c2-temp");
  WorkerPool pool = WorkerPool::local(1, 4);
  SubprocessBackend backend;
  StageSpec sum_stage = {MountPoint::text("/counts"), MountPoint::text("/sum"),
                         "ubuntu",
                         "awk '{s+=$1} END {print s+0}' /counts > /sum"};
  StageSpec max_stage = {MountPoint::text("/nums"), MountPoint::text("/max"),
                         "ubuntu",
                         "awk 'NR==1||$1>m{m=$1} END {print m+0}' /nums > /max"};

  std::mt19937_64 rng(2024);
  int combos = 0;
  for (int p0 : {1, 2, 3, 4, 8, 16}) {
    Dataset ds;
    for (int i = 0; i < p0; ++i) {
      Partition part{i, {}, -1};
      size_t n = 1 + rng() % 5;
      for (size_t j = 0; j < n; ++j)
        part.records.push_back(std::to_string(rng() % 10000));
      ds.partitions.push_back(std::move(part));
    }
    long long sum_oracle = 0, max_oracle = 0;
    for (const auto& r : collect(ds)) {
      long long v = std::stoll(r);
      sum_oracle += v;
      max_oracle = std::max(max_oracle, v);
    }
    for (int k = 1; k <= 4; ++k) {
      ShuffleLedger ledger;
      Engine engine(backend, temp, pool, ledger);
      Dataset sum = engine.reduce(ds, sum_stage, {k});
      REQUIRE_EQ(sum.partitions.size(), 1u);
      REQUIRE_EQ(std::stoll(sum.partitions[0].records.at(0)), sum_oracle);
      Dataset mx = engine.reduce(ds, max_stage, {k});
      REQUIRE_EQ(std::stoll(mx.partitions[0].records.at(0)), max_oracle);
      ++combos;
    }
  }
  REQUIRE_EQ(combos, 24);
  return {true, false, "24/24 combinations exact (sum and max)"};
}

// --- criterion 3 -----------------------------------------------------------

Check shuffle_invariants() {
  fs::path dir = work_dir() / "c3";
  generate_corpus({CorpusKind::numbers, 1, 13, 64}, dir);
  for (int k : {2, 3}) {
    PipelineSpec spec;
    spec.source_kind = SourceKind::text_file;
    spec.source_location = corpus_file(CorpusKind::numbers, dir).string();
    spec.source_partitions = 8;
    PipelineStage map_stage;
    map_stage.op = StageOp::map;
    map_stage.stage = {MountPoint::text("/in"), MountPoint::text("/out"),
                       "ubuntu", "cat /in > /out"};
    spec.stages.push_back(map_stage);
    PipelineStage reduce_stage;
    reduce_stage.op = StageOp::reduce;
    reduce_stage.stage = {MountPoint::text("/nums"), MountPoint::text("/sum"),
                         "ubuntu",
                         "awk '{s+=$1} END {print s+0}' /nums > /sum"};
    reduce_stage.depth_k = k;
    spec.stages.push_back(reduce_stage);
    spec.sink = {SinkSpec::Kind::text,
                 (dir / ("sum-k" + std::to_string(k) + ".txt")).string(),
                 {"\n"}};

    RunOptions opts;
    opts.backend = BackendMode::subprocess;
    opts.workers = 2;
    opts.slots_per_worker = 2;
    opts.temp_root = dir / "temp";
    RunReport report = run_pipeline(spec, opts);

    const json& ops = report.ledger["operations"];
    REQUIRE_EQ(ops.size(), 2u);
    REQUIRE_EQ(ops[0]["op"].get<std::string>(), "map");
    REQUIRE_EQ(ops[0]["bytes_shuffled"].get<uint64_t>(), 0u);
    REQUIRE_EQ(ops[1]["op"].get<std::string>(), "reduce");
    REQUIRE_EQ(ops[1]["merge_events"].get<int>(), k);
    REQUIRE_EQ(slurp(dir / ("sum-k" + std::to_string(k) + ".txt")),
               std::to_string(64ull * 65 / 2) + "\n");
  }
  return {true, false, "map shuffle bytes 0; merge events K for K in {2,3}"};
}

// --- criterion 4 -----------------------------------------------------------

Check sdf_splitting() {
  fs::path dir = work_dir() / "c4";
  generate_corpus({CorpusKind::sdf_like, 1, 99, 10000}, dir);
  fs::path file = corpus_file(CorpusKind::sdf_like, dir);
  std::string original = slurp(file);
  const Separator sep{"\n$$$$\n"};

  Dataset ds = split_text(original, sep, 8);
  REQUIRE_EQ(ds.record_count(), 10000u);
  REQUIRE_EQ(ds.partition_count(), 8u);
  for (const auto& p : ds.partitions)
    for (const auto& r : p.records)
      REQUIRE_TRUE(r.find(sep.bytes) == std::string::npos);

  // materialize -> collect_output round-trips byte-exactly.
  TempSpace temp(dir / "temp");
  MountPoint mp = MountPoint::text("/in.sdf", sep);
  for (const auto& p : ds.partitions) {
    ScopedTaskDir task(temp);
    auto records = collect_output(mp, materialize(p, mp, task.path()));
    REQUIRE_TRUE(records == p.records);
  }

  std::string joined;
  for (const auto& p : ds.partitions) joined += join_text(p, sep);
  REQUIRE_TRUE(joined == original);
  return {true, false, "10000 records, 8 partitions, byte-exact round trip"};
}

// --- criterion 5 -----------------------------------------------------------

Check key_colocation() {
  std::vector<std::string> keys;
  for (int i = 1; i <= 22; ++i) keys.push_back("chr" + std::to_string(i));
  keys.push_back("chrX");

  // Frozen expected assignments for num_partitions=8, computed with an
  // independent implementation of the same published hash constants.
  const std::vector<int> frozen = {7, 2, 5, 0, 3, 6, 1, 4, 7, 5, 2, 7,
                                   4, 1, 6, 3, 0, 5, 2, 6, 1, 0, 4};
  for (size_t i = 0; i < keys.size(); ++i)
    REQUIRE_EQ(key_partition(keys[i], 8), frozen[i]);

  std::mt19937_64 rng(55);
  std::vector<Record> records;
  for (int i = 0; i < 100000; ++i)
    records.push_back(keys[rng() % keys.size()] + "\tread-" +
                      std::to_string(i));
  Dataset ds = from_records(records, 4);
  auto key = [](const Record& r) { return r.substr(0, r.find('\t')); };

  TempSpace temp(work_dir() / "c5-temp");
  SubprocessBackend backend;
  WorkerPool pool = WorkerPool::local(1, 4);
  std::vector<Dataset> runs;
  for (int run = 0; run < 3; ++run) {
    ShuffleLedger ledger;
    Engine engine(backend, temp, pool, ledger);
    runs.push_back(engine.repartition_by(ds, key, 8));
  }
  for (int run = 1; run < 3; ++run)
    for (int p = 0; p < 8; ++p)
      REQUIRE_TRUE(runs[run].partitions[p].records ==
                   runs[0].partitions[p].records);

  // No key spans two partitions.
  for (const auto& k : keys) {
    int holding = 0;
    for (const auto& p : runs[0].partitions) {
      bool holds = false;
      for (const auto& r : p.records)
        if (r.compare(0, k.size() + 1, k + "\t") == 0) {
          holds = true;
          break;
        }
      holding += holds;
    }
    REQUIRE_EQ(holding, 1);
  }
  REQUIRE_EQ(runs[0].record_count(), 100000u);
  return {true, false,
          "23 keys confined to single partitions; 3 runs identical; "
          "assignments match the frozen cross-implementation table"};
}

// --- criterion 6 -----------------------------------------------------------

Check backend_equivalence() {
  auto probe = probe_backend({});
  if (!probe.container_available)
    return {true, true,
            "no container engine present; subprocess-vs-container comparison "
            "not run on this machine"};

  fs::path dir = work_dir() / "c6";
  generate_corpus({CorpusKind::dna, 1u << 20, 7}, dir);
  fs::path corpus = corpus_file(CorpusKind::dna, dir);

  RunOptions sub;
  sub.backend = BackendMode::subprocess;
  sub.slots_per_worker = 2;
  sub.temp_root = dir / "temp-sub";
  run_pipeline(gc_spec(corpus, dir / "out-sub.txt", 2), sub);

  RunOptions con = sub;
  con.backend = BackendMode::container;
  con.temp_root = dir / "temp-con";
  run_pipeline(gc_spec(corpus, dir / "out-con.txt", 2), con);

  REQUIRE_TRUE(slurp(dir / "out-sub.txt") == slurp(dir / "out-con.txt"));
  return {true, false, "byte-identical GC output across backends"};
}

// --- criterion 7 -----------------------------------------------------------

Check wse_harness() {
  // Formula check against hand-computed values, 6 decimal places.
  std::vector<BenchPoint> injected = {{1.0 / 16, 1, 100.0, 40.0},
                                      {1.0 / 4, 4, 105.0, 11.0},
                                      {1.0, 16, 110.0, 3.0}};
  auto wse = weak_scaling_efficiency(injected);
  auto speedup = ingestion_speedup(injected);
  REQUIRE_TRUE(std::abs(wse[0] - 1.0) < 1e-6);
  REQUIRE_TRUE(std::abs(wse[1] - 0.952381) < 1e-6);
  REQUIRE_TRUE(std::abs(wse[2] - 0.909091) < 1e-6);
  REQUIRE_TRUE(std::abs(speedup[1] - 3.636364) < 1e-6);
  REQUIRE_TRUE(std::abs(speedup[2] - 13.333333) < 1e-6);

  // Real execution of the GC pipeline at {1/4, 1/2, 1} on {1, 2, 4} slots.
  fs::path dir = big_dna_dir();
  PipelineSpec spec = gc_spec(corpus_file(CorpusKind::dna, dir),
                              work_dir() / "c7-out.txt", 4);
  spec.source_partitions.reset();  // pool slots decide
  RunOptions opts;
  opts.backend = BackendMode::subprocess;
  opts.temp_root = work_dir() / "c7-temp";
  BenchResult result = run_bench(spec, opts, {0.25, 0.5, 1.0}, {1, 2, 4});
  double measured = result.wse.back();
  char buf[128];
  std::snprintf(buf, sizeof(buf), "formulas exact; measured WSE(4)=%.3f",
                measured);

  unsigned cores = std::thread::hardware_concurrency();
  if (cores < 4) {
    std::snprintf(buf, sizeof(buf),
                  "formulas exact to 1e-6; WSE threshold needs a 4-core "
                  "machine, this one has %u (measured WSE(4)=%.3f)",
                  cores, measured);
    return {true, true, buf};
  }
  REQUIRE_TRUE(measured >= 0.7);
  return {true, false, buf};
}

// --- criterion 8 -----------------------------------------------------------

Check failure_semantics() {
  fs::path dir = work_dir() / "c8";
  fs::create_directories(dir);

  // 16 equal-length lines over 4 partitions; POISON lands in partition 2.
  {
    std::ofstream out(dir / "input.txt");
    for (int i = 0; i < 16; ++i) out << (i == 9 ? "POISON" : "AAAAAA") << "\n";
  }
  fs::path attempts = dir / "attempts.log";

  PipelineSpec spec;
  spec.source_kind = SourceKind::text_file;
  spec.source_location = (dir / "input.txt").string();
  spec.source_partitions = 4;
  PipelineStage ok_stage;
  ok_stage.op = StageOp::map;
  ok_stage.stage = {MountPoint::text("/in"), MountPoint::text("/out"),
                    "ubuntu", "cat /in > /out"};
  spec.stages.push_back(ok_stage);
  PipelineStage bad_stage;
  bad_stage.op = StageOp::map;
  bad_stage.stage = {MountPoint::text("/in"), MountPoint::text("/out"),
                     "ubuntu",
                     "if grep -q POISON /in; then echo attempt >> " +
                         attempts.string() +
                         "; echo poisoned-partition >&2; exit 5; fi; "
                         "cat /in > /out"};
  spec.stages.push_back(bad_stage);
  spec.sink = {SinkSpec::Kind::text, (dir / "never.txt").string(), {"\n"}};

  fs::path pipeline_file = dir / "pipeline.json";
  {
    std::ofstream out(pipeline_file);
    out << emit_pipeline(spec).dump(2);
  }

  fs::path temp_root = dir / "temp";
  fs::path report_path = dir / "report.json";
  std::string cmd = std::string(MARE_CLI_PATH) +
                    " --executor subprocess --slots 4 --temp-root " +
                    temp_root.string() + " --report " + report_path.string() +
                    " run " + pipeline_file.string() + " > " +
                    (dir / "stdout.log").string() + " 2> " +
                    (dir / "stderr.log").string();
  int status = std::system(cmd.c_str());
  REQUIRE_TRUE(WIFEXITED(status));
  REQUIRE_EQ(WEXITSTATUS(status), 3);

  json report = json::parse(slurp(report_path));
  REQUIRE_EQ(report["status"].get<std::string>(), "task_failure");
  REQUIRE_EQ(report["stage_index"].get<int>(), 1);
  REQUIRE_EQ(report["partition_id"].get<int>(), 2);
  REQUIRE_TRUE(report["stderr_tail"].get<std::string>().find(
                   "poisoned-partition") != std::string::npos);

  // Exactly one retry: the poisoned command ran twice.
  std::string log = slurp(attempts);
  REQUIRE_EQ(std::count(log.begin(), log.end(), '\n'), 2);

  // Temp space empty afterward.
  REQUIRE_TRUE(fs::exists(temp_root));
  REQUIRE_TRUE(fs::is_empty(temp_root));
  return {true, false,
          "exit 3; report names stage 1 / partition 2; one retry; temp empty"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1 GC pipeline correctness", gc_pipeline_correctness},
      {"2 reduce/oracle equivalence", reduce_oracle_equivalence},
      {"3 shuffle invariants", shuffle_invariants},
      {"4 SDF splitting", sdf_splitting},
      {"5 key co-location", key_colocation},
      {"6 backend equivalence", backend_equivalence},
      {"7 WSE harness", wse_harness},
      {"8 failure semantics", failure_semantics},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    Check result;
    try {
      result = c.run();
    } catch (const std::exception& e) {
      result = {false, false, std::string("exception: ") + e.what()};
    }
    const char* tag = result.skipped ? "SKIP" : (result.passed ? "PASS" : "FAIL");
    std::printf("[%s] criterion %s: %s\n", tag, c.name, result.detail.c_str());
    failures += !result.passed;
  }
  fs::remove_all(work_dir());
  return failures == 0 ? 0 : 1;
}
