// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "mare/dataset.hpp"
#include <json.hpp>

namespace mare {

/// Minimal object-store seam: ordered listing plus byte retrieval. Shipped
/// implementation is directory-backed; S3-style clients are an extension
/// point behind the same two calls.
class ObjectStore {
 public:
  virtual ~ObjectStore() = default;
  virtual std::vector<std::string> list(const std::string& prefix) = 0;
  virtual std::string get(const std::string& name) = 0;
};

/// Objects are files under a root directory; a prefix is a subpath. Listing
/// is recursive and lexicographic by object name.
class DirObjectStore : public ObjectStore {
 public:
  explicit DirObjectStore(std::filesystem::path root) : root_(std::move(root)) {}
  std::vector<std::string> list(const std::string& prefix) override;
  std::string get(const std::string& name) override;

 private:
  std::filesystem::path root_;
};

enum class SourceKind { text_file, text_dir, binary_dir, object_prefix };

struct Source {
  SourceKind kind = SourceKind::text_file;
  std::string location;  // path, or prefix for object_prefix
  Separator separator = {"\n"};
  std::shared_ptr<ObjectStore> store;  // object_prefix only
};

/// Loads a source into a dataset. Text sources are read (multi-file: in
/// lexicographic name order, with a separator guaranteed between file
/// boundaries) and split; binary_dir takes one record per file, round-robin
/// into partitions.
Dataset ingest(const Source& src, int target_partitions);

/// First ceil(fraction * record_count) records, re-cut into the same number
/// of partitions. Deterministic for a given fraction.
Dataset take_fraction(const Dataset& ds, double fraction, int partitions);

enum class CorpusKind { dna, sdf_like, numbers };

struct CorpusSpec {
  CorpusKind kind = CorpusKind::dna;
  uint64_t size_bytes = 1 << 20;
  uint64_t seed = 0;
  uint64_t record_count = 0;  // sdf_like/numbers: exact count override
};

struct CorpusManifest {
  std::string kind;
  uint64_t seed = 0;
  uint64_t size_bytes = 0;  // actual bytes written
  nlohmann::json stats;

  nlohmann::json to_json() const;
};

/// Writes a deterministic pseudo-random corpus file plus manifest.json under
/// out_dir. Ground-truth statistics are computed during generation: GC count
/// for dna, record count for sdf_like, sum for numbers.
CorpusManifest generate_corpus(const CorpusSpec& spec,
                               const std::filesystem::path& out_dir);

/// The corpus file path a given kind writes under out_dir.
std::filesystem::path corpus_file(CorpusKind kind,
                                  const std::filesystem::path& out_dir);

}  // namespace mare
