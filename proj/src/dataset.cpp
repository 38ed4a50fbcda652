// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#include "mare/dataset.hpp"

#include <cmath>
#include <cstdlib>

#include "mare/errors.hpp"

namespace mare {
namespace {

std::vector<Record> split_records(const std::string& stream,
                                  const std::string& sep) {
  std::vector<Record> records;
  size_t pos = 0;
  while (pos <= stream.size()) {
    size_t hit = stream.find(sep, pos);
    if (hit == std::string::npos) {
      // Trailing segment: a record only if non-empty.
      if (pos < stream.size()) records.emplace_back(stream.substr(pos));
      break;
    }
    records.emplace_back(stream.substr(pos, hit - pos));
    pos = hit + sep.size();
  }
  return records;
}

// Cut points at the record boundary nearest each ideal byte offset.
// prefix[i] = bytes of records[0..i). Ties go to the later boundary.
std::vector<size_t> balanced_cuts(const std::vector<uint64_t>& prefix,
                                  size_t n_records, int parts) {
  std::vector<size_t> cuts;  // record index where each partition ends
  const double total = static_cast<double>(prefix[n_records]);
  size_t lo = 0;
  for (int i = 1; i < parts; ++i) {
    const double ideal = total * i / parts;
    size_t best = lo;
    double best_dist = std::abs(static_cast<double>(prefix[lo]) - ideal);
    for (size_t j = lo; j <= n_records; ++j) {
      double d = std::abs(static_cast<double>(prefix[j]) - ideal);
      if (d <= best_dist) {
        best_dist = d;
        best = j;
      }
      if (prefix[j] >= ideal) break;
    }
    cuts.push_back(best);
    lo = best;
  }
  cuts.push_back(n_records);
  return cuts;
}

}  // namespace

Dataset split_text(const std::string& stream, const Separator& sep,
                   int target_partitions) {
  if (sep.bytes.empty()) throw ConfigError("record separator must be non-empty");
  if (target_partitions < 1)
    throw ConfigError("target_partitions must be >= 1");

  std::vector<Record> records = split_records(stream, sep.bytes);

  Dataset ds;
  ds.origin = Origin::ingested;
  if (records.empty()) {
    ds.partitions.push_back(Partition{0, {}, kUnassignedAffinity});
    return ds;
  }

  std::vector<uint64_t> prefix(records.size() + 1, 0);
  for (size_t i = 0; i < records.size(); ++i)
    prefix[i + 1] = prefix[i] + records[i].size();

  auto cuts = balanced_cuts(prefix, records.size(), target_partitions);
  size_t begin = 0;
  for (size_t end : cuts) {
    if (end == begin) continue;  // never emit empty middle partitions
    Partition p;
    p.id = static_cast<int>(ds.partitions.size());
    p.records.assign(records.begin() + begin, records.begin() + end);
    ds.partitions.push_back(std::move(p));
    begin = end;
  }
  return ds;
}

std::string join_text(const Partition& partition, const Separator& sep) {
  if (partition.records.empty()) return {};
  std::string out;
  size_t total = 0;
  for (const auto& r : partition.records) total += r.size() + sep.bytes.size();
  out.reserve(total);
  for (const auto& r : partition.records) {
    out += r;
    out += sep.bytes;
  }
  return out;
}

Partition concat(const std::vector<Partition>& partitions) {
  Partition out;
  for (const auto& p : partitions)
    out.records.insert(out.records.end(), p.records.begin(), p.records.end());
  return out;
}

Dataset from_records(std::vector<Record> records, int partitions) {
  if (partitions < 1) throw ConfigError("partitions must be >= 1");
  Dataset ds;
  const size_t n = records.size();
  const size_t per = (n + partitions - 1) / partitions;
  size_t begin = 0;
  for (int i = 0; i < partitions && begin < n; ++i) {
    size_t end = std::min(n, begin + std::max<size_t>(per, 1));
    Partition p;
    p.id = static_cast<int>(ds.partitions.size());
    p.records.assign(std::make_move_iterator(records.begin() + begin),
                     std::make_move_iterator(records.begin() + end));
    ds.partitions.push_back(std::move(p));
    begin = end;
  }
  if (ds.partitions.empty())
    ds.partitions.push_back(Partition{0, {}, kUnassignedAffinity});
  return ds;
}

}  // namespace mare
