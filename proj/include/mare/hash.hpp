// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

namespace mare {

/// FNV-1a, 64 bit. Fixed constants, byte-at-a-time: the same key bytes map to
/// the same value on every platform and in every run, which is what keyed
/// repartitioning relies on for reproducible placement.
constexpr uint64_t hash64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Partition id for a key: hash64 modulo the partition count, always in
/// [0, num_partitions).
constexpr int key_partition(std::string_view key, int num_partitions) {
  return static_cast<int>(hash64(key) % static_cast<uint64_t>(num_partitions));
}

}  // namespace mare
