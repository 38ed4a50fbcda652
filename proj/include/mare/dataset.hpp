// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mare {

/// Opaque byte payload. Records never contain their separator and are never
/// split across partitions.
using Record = std::string;

/// Non-empty byte sequence used verbatim as a record delimiter.
struct Separator {
  std::string bytes = "\n";

  Separator() = default;
  Separator(std::string b) : bytes(std::move(b)) {}  // NOLINT(google-explicit-constructor)
  Separator(const char* b) : bytes(b) {}             // NOLINT(google-explicit-constructor)

  bool operator==(const Separator&) const = default;
};

constexpr int kUnassignedAffinity = -1;

/// Ordered run of records with an identity and a worker affinity.
struct Partition {
  int id = 0;
  std::vector<Record> records;
  int affinity = kUnassignedAffinity;

  uint64_t byte_count() const {
    uint64_t n = 0;
    for (const auto& r : records) n += r.size();
    return n;
  }
  bool operator==(const Partition&) const = default;
};

enum class Origin { ingested, map, reduce, repartition };

/// Immutable list of partitions; ids are always a gapless 0..P-1 sequence.
struct Dataset {
  std::vector<Partition> partitions;
  Origin origin = Origin::ingested;

  size_t partition_count() const { return partitions.size(); }
  uint64_t record_count() const {
    uint64_t n = 0;
    for (const auto& p : partitions) n += p.records.size();
    return n;
  }
  uint64_t byte_count() const {
    uint64_t n = 0;
    for (const auto& p : partitions) n += p.byte_count();
    return n;
  }
};

/// Splits a byte stream into separator-delimited records and distributes them
/// into at most target_partitions contiguous partitions balanced by byte
/// count (cuts land at the record boundary nearest each ideal byte offset).
/// A trailing segment after the final separator becomes a record only if
/// non-empty. An empty stream yields one empty partition.
/// Throws ConfigError for an empty separator or target_partitions < 1.
Dataset split_text(const std::string& stream, const Separator& sep,
                   int target_partitions);

/// Inverse of split_text for one partition: records joined by sep with one
/// trailing sep appended. An empty partition yields empty output.
std::string join_text(const Partition& partition, const Separator& sep);

/// Single partition holding all records in input order.
Partition concat(const std::vector<Partition>& partitions);

/// Rebuilds a dataset from a flat record list, cut into `partitions`
/// contiguous, size-balanced (by record count) pieces.
Dataset from_records(std::vector<Record> records, int partitions);

}  // namespace mare
