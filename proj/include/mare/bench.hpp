// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "mare/pipeline.hpp"
#include "mare/runner.hpp"

namespace mare {

/// One (data fraction, pool size) configuration of a weak-scaling run.
struct BenchPoint {
  double fraction = 1.0;
  int slots = 1;
  double wall_s = 0;    // stage execution time
  double ingest_s = 0;  // ingestion time
};

/// WSE(i) = T(points[0]) / T(points[i]); points[0] is the smallest
/// (fraction, pool) pair and defines the baseline. 1.0 is ideal.
std::vector<double> weak_scaling_efficiency(const std::vector<BenchPoint>& points);

/// speedup(i) = T_ingest(points[0]) / T_ingest(points[i]); the baseline is
/// the smallest pool.
std::vector<double> ingestion_speedup(const std::vector<BenchPoint>& points);

struct BenchResult {
  std::vector<BenchPoint> points;
  std::vector<double> wse;
  std::vector<double> speedup;

  std::string to_csv() const;
  std::string to_table() const;
};

/// Runs the pipeline once per paired (fraction, pool-slots) configuration and
/// derives WSE plus ingestion speedup. Fractions and pools must pair up
/// one-to-one; both lists ordered smallest first.
BenchResult run_bench(const PipelineSpec& spec, const RunOptions& base_opts,
                      const std::vector<double>& fractions,
                      const std::vector<int>& pools);

}  // namespace mare
