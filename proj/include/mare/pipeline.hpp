// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mare/dataset.hpp"
#include "mare/engine.hpp"
#include "mare/ingest.hpp"
#include <json.hpp>

namespace mare {

/// Declarative key extraction; the library API keeps arbitrary KeyFunctions,
/// the pipeline file is restricted to these three rules.
struct KeyRule {
  enum class Kind { field_delimited, prefix_bytes, regex_capture };
  Kind kind = Kind::field_delimited;
  std::string delimiter = "\t";  // field_delimited
  int field = 0;                 // field_delimited, zero-based
  int prefix = 0;                // prefix_bytes
  std::string pattern;           // regex_capture, first capture group

  KeyFunction compile() const;

  // Only the fields the kind uses participate; the rest is scratch space.
  bool operator==(const KeyRule& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
      case Kind::field_delimited:
        return delimiter == o.delimiter && field == o.field;
      case Kind::prefix_bytes:
        return prefix == o.prefix;
      case Kind::regex_capture:
        return pattern == o.pattern;
    }
    return false;
  }
};

enum class StageOp { map, reduce, repartition_by };

struct PipelineStage {
  StageOp op = StageOp::map;
  StageSpec stage;        // map/reduce
  int depth_k = 2;        // reduce
  KeyRule key;            // repartition_by
  int num_partitions = 1; // repartition_by
};

struct SinkSpec {
  enum class Kind { text, binary };
  Kind kind = Kind::text;
  std::string path;
  Separator separator = {"\n"};
};

/// The declarative equivalent of a driver program: source, ordered stages,
/// sink. Canonical on-disk form is a versioned JSON document.
struct PipelineSpec {
  int version = 1;
  SourceKind source_kind = SourceKind::text_file;
  std::string source_location;
  Separator source_separator = {"\n"};
  std::optional<int> source_partitions;  // default: pool total slots
  std::vector<PipelineStage> stages;
  SinkSpec sink;
};

/// Parses and validates a pipeline document. Throws ValidationError carrying
/// every validation error found (with JSON-path context), not just the first.
PipelineSpec parse_pipeline(const std::filesystem::path& file);
PipelineSpec parse_pipeline_json(const nlohmann::json& doc,
                                 const std::string& origin);

/// Canonical serializer; parse(emit(spec)) == spec for all valid specs.
nlohmann::json emit_pipeline(const PipelineSpec& spec);

bool operator==(const PipelineStage& a, const PipelineStage& b);
bool operator==(const PipelineSpec& a, const PipelineSpec& b);

}  // namespace mare
