// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#include "mare/pipeline.hpp"

#include <fstream>
#include <regex>

#include "mare/errors.hpp"

namespace mare {
namespace {

using nlohmann::json;

class Validator {
 public:
  void error(const std::string& where, const std::string& what) {
    errors_.push_back(where + ": " + what);
  }
  void finish() {
    if (!errors_.empty()) throw ValidationError(std::move(errors_));
  }
  bool ok() const { return errors_.empty(); }

 private:
  std::vector<std::string> errors_;
};

std::string require_string(const json& obj, const char* field,
                           const std::string& where, Validator& v,
                           const std::string& fallback = {}) {
  if (!obj.contains(field)) {
    v.error(where, std::string("missing field '") + field + "'");
    return fallback;
  }
  if (!obj[field].is_string()) {
    v.error(where, std::string("field '") + field + "' must be a string");
    return fallback;
  }
  return obj[field].get<std::string>();
}

MountPoint parse_mount(const json& obj, const std::string& where,
                       Validator& v) {
  MountPoint mp;
  std::string kind = require_string(obj, "kind", where, v, "text");
  if (kind == "text") {
    mp.kind = MountKind::TextFile;
  } else if (kind == "binary") {
    mp.kind = MountKind::BinaryFiles;
  } else {
    v.error(where, "unknown mount kind '" + kind + "' (text|binary)");
  }
  mp.container_path = require_string(obj, "path", where, v);
  if (!mp.container_path.empty() && mp.container_path[0] != '/')
    v.error(where, "mount path must be absolute: '" + mp.container_path + "'");
  if (obj.contains("separator")) {
    if (!obj["separator"].is_string() ||
        obj["separator"].get<std::string>().empty())
      v.error(where, "separator must be a non-empty string");
    else
      mp.separator = Separator(obj["separator"].get<std::string>());
  }
  return mp;
}

json emit_mount(const MountPoint& mp) {
  json out = {{"kind", mp.kind == MountKind::TextFile ? "text" : "binary"},
              {"path", mp.container_path}};
  if (mp.kind == MountKind::TextFile) out["separator"] = mp.separator.bytes;
  return out;
}

KeyRule parse_key(const json& obj, const std::string& where, Validator& v) {
  KeyRule rule;
  std::string kind = require_string(obj, "kind", where, v);
  if (kind == "field_delimited") {
    rule.kind = KeyRule::Kind::field_delimited;
    rule.delimiter = require_string(obj, "delimiter", where, v, "\t");
    if (rule.delimiter.empty()) v.error(where, "delimiter must be non-empty");
    if (!obj.contains("field") || !obj["field"].is_number_integer() ||
        obj["field"].get<int>() < 0)
      v.error(where, "field must be a non-negative integer");
    else
      rule.field = obj["field"].get<int>();
  } else if (kind == "prefix_bytes") {
    rule.kind = KeyRule::Kind::prefix_bytes;
    if (!obj.contains("prefix") || !obj["prefix"].is_number_integer() ||
        obj["prefix"].get<int>() < 1)
      v.error(where, "prefix must be a positive integer");
    else
      rule.prefix = obj["prefix"].get<int>();
  } else if (kind == "regex_capture") {
    rule.kind = KeyRule::Kind::regex_capture;
    rule.pattern = require_string(obj, "pattern", where, v);
    try {
      std::regex re(rule.pattern);
    } catch (const std::regex_error& e) {
      v.error(where, "invalid regex: " + std::string(e.what()));
    }
  } else if (!kind.empty()) {
    v.error(where, "unknown key rule kind '" + kind +
                       "' (field_delimited|prefix_bytes|regex_capture)");
  }
  return rule;
}

json emit_key(const KeyRule& rule) {
  switch (rule.kind) {
    case KeyRule::Kind::field_delimited:
      return {{"kind", "field_delimited"},
              {"delimiter", rule.delimiter},
              {"field", rule.field}};
    case KeyRule::Kind::prefix_bytes:
      return {{"kind", "prefix_bytes"}, {"prefix", rule.prefix}};
    case KeyRule::Kind::regex_capture:
      return {{"kind", "regex_capture"}, {"pattern", rule.pattern}};
  }
  return {};
}

SourceKind parse_source_kind(const std::string& kind, const std::string& where,
                             Validator& v) {
  if (kind == "text_file") return SourceKind::text_file;
  if (kind == "text_dir") return SourceKind::text_dir;
  if (kind == "binary_dir") return SourceKind::binary_dir;
  if (kind == "object_prefix") return SourceKind::object_prefix;
  if (!kind.empty())
    v.error(where, "unknown source kind '" + kind +
                       "' (text_file|text_dir|binary_dir|object_prefix)");
  return SourceKind::text_file;
}

const char* source_kind_name(SourceKind kind) {
  switch (kind) {
    case SourceKind::text_file: return "text_file";
    case SourceKind::text_dir: return "text_dir";
    case SourceKind::binary_dir: return "binary_dir";
    case SourceKind::object_prefix: return "object_prefix";
  }
  return "text_file";
}

}  // namespace

KeyFunction KeyRule::compile() const {
  switch (kind) {
    case Kind::field_delimited: {
      std::string delim = delimiter;
      int index = field;
      return [delim, index](const Record& r) -> std::string {
        size_t begin = 0;
        for (int i = 0; i < index; ++i) {
          size_t hit = r.find(delim, begin);
          if (hit == std::string::npos)
            throw std::runtime_error("record has fewer than " +
                                     std::to_string(index + 1) + " fields");
          begin = hit + delim.size();
        }
        size_t end = r.find(delim, begin);
        return r.substr(begin, end == std::string::npos ? end : end - begin);
      };
    }
    case Kind::prefix_bytes: {
      size_t n = static_cast<size_t>(prefix);
      return [n](const Record& r) { return r.substr(0, n); };
    }
    case Kind::regex_capture: {
      auto re = std::make_shared<std::regex>(pattern);
      return [re](const Record& r) -> std::string {
        std::smatch m;
        if (!std::regex_search(r, m, *re) || m.size() < 2)
          throw std::runtime_error("regex did not capture a key");
        return m[1].str();
      };
    }
  }
  throw ConfigError("unconfigured key rule");
}

PipelineSpec parse_pipeline_json(const json& doc, const std::string& origin) {
  Validator v;
  PipelineSpec spec;

  if (!doc.is_object()) {
    v.error(origin, "pipeline document must be a JSON object");
    v.finish();
  }
  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != 1)
    v.error(origin + "/version", "expected version 1");

  if (!doc.contains("source") || !doc["source"].is_object()) {
    v.error(origin + "/source", "missing source object");
  } else {
    const json& src = doc["source"];
    const std::string where = origin + "/source";
    spec.source_kind =
        parse_source_kind(require_string(src, "kind", where, v), where, v);
    spec.source_location = require_string(src, "location", where, v);
    if (src.contains("separator")) {
      if (!src["separator"].is_string() ||
          src["separator"].get<std::string>().empty())
        v.error(where, "separator must be a non-empty string");
      else
        spec.source_separator = Separator(src["separator"].get<std::string>());
    }
    if (src.contains("partitions")) {
      if (!src["partitions"].is_number_integer() ||
          src["partitions"].get<int>() < 1)
        v.error(where, "partitions must be a positive integer");
      else
        spec.source_partitions = src["partitions"].get<int>();
    }
  }

  if (!doc.contains("stages") || !doc["stages"].is_array() ||
      doc["stages"].empty()) {
    v.error(origin + "/stages", "at least one stage is required");
  } else {
    for (size_t i = 0; i < doc["stages"].size(); ++i) {
      const json& s = doc["stages"][i];
      const std::string where = origin + "/stages[" + std::to_string(i) + "]";
      PipelineStage stage;
      std::string op = require_string(s, "op", where, v);
      if (op == "map" || op == "reduce") {
        stage.op = op == "map" ? StageOp::map : StageOp::reduce;
        if (s.contains("input"))
          stage.stage.input_mp = parse_mount(s["input"], where + "/input", v);
        else
          v.error(where, "missing field 'input'");
        if (s.contains("output"))
          stage.stage.output_mp = parse_mount(s["output"], where + "/output", v);
        else
          v.error(where, "missing field 'output'");
        stage.stage.image = require_string(s, "image", where, v);
        if (stage.stage.image.empty())
          v.error(where, "image must be a non-empty string");
        stage.stage.command = require_string(s, "command", where, v);
        if (!stage.stage.input_mp.container_path.empty() &&
            stage.stage.input_mp.container_path ==
                stage.stage.output_mp.container_path)
          v.error(where, "duplicate mount path '" +
                             stage.stage.input_mp.container_path +
                             "' for input and output");
        if (op == "reduce") {
          if (s.contains("depth_k")) {
            if (!s["depth_k"].is_number_integer() ||
                s["depth_k"].get<int>() < 1)
              v.error(where, "depth_k must be a positive integer");
            else
              stage.depth_k = s["depth_k"].get<int>();
          }
        }
      } else if (op == "repartition_by") {
        stage.op = StageOp::repartition_by;
        if (s.contains("key"))
          stage.key = parse_key(s["key"], where + "/key", v);
        else
          v.error(where, "missing field 'key'");
        if (!s.contains("num_partitions") ||
            !s["num_partitions"].is_number_integer() ||
            s["num_partitions"].get<int>() < 1)
          v.error(where, "num_partitions must be a positive integer");
        else
          stage.num_partitions = s["num_partitions"].get<int>();
      } else if (!op.empty()) {
        v.error(where, "unknown op '" + op + "' (map|reduce|repartition_by)");
      }
      spec.stages.push_back(std::move(stage));
    }
  }

  if (!doc.contains("sink") || !doc["sink"].is_object()) {
    v.error(origin + "/sink", "missing sink object");
  } else {
    const json& sink = doc["sink"];
    const std::string where = origin + "/sink";
    std::string kind = require_string(sink, "kind", where, v, "text");
    if (kind == "text")
      spec.sink.kind = SinkSpec::Kind::text;
    else if (kind == "binary")
      spec.sink.kind = SinkSpec::Kind::binary;
    else
      v.error(where, "unknown sink kind '" + kind + "' (text|binary)");
    spec.sink.path = require_string(sink, "path", where, v);
    if (sink.contains("separator")) {
      if (!sink["separator"].is_string() ||
          sink["separator"].get<std::string>().empty())
        v.error(where, "separator must be a non-empty string");
      else
        spec.sink.separator = Separator(sink["separator"].get<std::string>());
    }
  }

  v.finish();
  return spec;
}

PipelineSpec parse_pipeline(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read pipeline file " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError({file.string() + ": " + e.what()});
  }
  return parse_pipeline_json(doc, file.filename().string());
}

json emit_pipeline(const PipelineSpec& spec) {
  json doc;
  doc["version"] = spec.version;
  doc["source"] = {{"kind", source_kind_name(spec.source_kind)},
                   {"location", spec.source_location},
                   {"separator", spec.source_separator.bytes}};
  if (spec.source_partitions)
    doc["source"]["partitions"] = *spec.source_partitions;
  doc["stages"] = json::array();
  for (const auto& s : spec.stages) {
    json stage;
    switch (s.op) {
      case StageOp::map:
      case StageOp::reduce:
        stage["op"] = s.op == StageOp::map ? "map" : "reduce";
        stage["input"] = emit_mount(s.stage.input_mp);
        stage["output"] = emit_mount(s.stage.output_mp);
        stage["image"] = s.stage.image;
        stage["command"] = s.stage.command;
        if (s.op == StageOp::reduce) stage["depth_k"] = s.depth_k;
        break;
      case StageOp::repartition_by:
        stage["op"] = "repartition_by";
        stage["key"] = emit_key(s.key);
        stage["num_partitions"] = s.num_partitions;
        break;
    }
    doc["stages"].push_back(std::move(stage));
  }
  doc["sink"] = {{"kind", spec.sink.kind == SinkSpec::Kind::text ? "text"
                                                                 : "binary"},
                 {"path", spec.sink.path}};
  if (spec.sink.kind == SinkSpec::Kind::text)
    doc["sink"]["separator"] = spec.sink.separator.bytes;
  return doc;
}

bool operator==(const PipelineStage& a, const PipelineStage& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case StageOp::map:
      return a.stage == b.stage;
    case StageOp::reduce:
      return a.stage == b.stage && a.depth_k == b.depth_k;
    case StageOp::repartition_by:
      return a.key == b.key && a.num_partitions == b.num_partitions;
  }
  return false;
}

bool operator==(const PipelineSpec& a, const PipelineSpec& b) {
  return a.version == b.version && a.source_kind == b.source_kind &&
         a.source_location == b.source_location &&
         a.source_separator == b.source_separator &&
         a.source_partitions == b.source_partitions && a.stages == b.stages &&
         a.sink.kind == b.sink.kind && a.sink.path == b.sink.path &&
         (a.sink.kind == SinkSpec::Kind::binary ||
          a.sink.separator == b.sink.separator);
}

}  // namespace mare
