// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#include "mare/bench.hpp"

#include <cstdio>
#include <sstream>

#include "mare/errors.hpp"

namespace mare {

std::vector<double> weak_scaling_efficiency(
    const std::vector<BenchPoint>& points) {
  std::vector<double> wse;
  if (points.empty()) return wse;
  const double base = points.front().wall_s;
  for (const auto& p : points) wse.push_back(base / p.wall_s);
  return wse;
}

std::vector<double> ingestion_speedup(const std::vector<BenchPoint>& points) {
  std::vector<double> speedup;
  if (points.empty()) return speedup;
  const double base = points.front().ingest_s;
  for (const auto& p : points) speedup.push_back(base / p.ingest_s);
  return speedup;
}

std::string BenchResult::to_csv() const {
  std::ostringstream out;
  out << "fraction,slots,wall_s,wse,ingest_s,speedup\n";
  for (size_t i = 0; i < points.size(); ++i) {
    char line[160];
    std::snprintf(line, sizeof(line), "%.6f,%d,%.6f,%.6f,%.6f,%.6f\n",
                  points[i].fraction, points[i].slots, points[i].wall_s,
                  wse[i], points[i].ingest_s, speedup[i]);
    out << line;
  }
  return out.str();
}

std::string BenchResult::to_table() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%10s %6s %10s %8s %10s %8s\n", "fraction",
                "slots", "wall_s", "wse", "ingest_s", "speedup");
  out << line;
  for (size_t i = 0; i < points.size(); ++i) {
    std::snprintf(line, sizeof(line), "%10.4f %6d %10.3f %8.3f %10.3f %8.3f\n",
                  points[i].fraction, points[i].slots, points[i].wall_s,
                  wse[i], points[i].ingest_s, speedup[i]);
    out << line;
  }
  return out.str();
}

BenchResult run_bench(const PipelineSpec& spec, const RunOptions& base_opts,
                      const std::vector<double>& fractions,
                      const std::vector<int>& pools) {
  if (fractions.size() != pools.size() || fractions.empty())
    throw ValidationError(
        {"bench: fractions and pools must be non-empty lists of equal length"});

  BenchResult result;
  for (size_t i = 0; i < fractions.size(); ++i) {
    RunOptions opts = base_opts;
    opts.workers = 1;
    opts.slots_per_worker = pools[i];
    opts.fraction = fractions[i];
    RunReport report = run_pipeline(spec, opts);
    result.points.push_back(
        {fractions[i], pools[i], report.execute_s, report.ingest_s});
  }
  result.wse = weak_scaling_efficiency(result.points);
  result.speedup = ingestion_speedup(result.points);
  return result;
}

}  // namespace mare
