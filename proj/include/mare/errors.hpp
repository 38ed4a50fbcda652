// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mare {

// Exit-code classes used by the CLI. Disjoint by construction.
enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 2,
  kTaskFailure = 3,
  kIoFailure = 4,
};

/// Bad configuration (empty separator, depth_k < 1, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Pipeline-file validation failure; carries every error found, not just the first.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errs) {
    std::string out;
    for (const auto& e : errs) {
      if (!out.empty()) out += "\n";
      out += e;
    }
    return out;
  }
  std::vector<std::string> errors_;
};

/// A container task failed (nonzero exit or timeout) after its retries.
class TaskError : public std::runtime_error {
 public:
  TaskError(const std::string& what, int stage_index, int partition_id,
            std::string stderr_tail)
      : std::runtime_error(what),
        stage_index_(stage_index),
        partition_id_(partition_id),
        stderr_tail_(std::move(stderr_tail)) {}
  int stage_index() const { return stage_index_; }
  int partition_id() const { return partition_id_; }
  const std::string& stderr_tail() const { return stderr_tail_; }
  void set_stage_index(int i) { stage_index_ = i; }

 private:
  int stage_index_;
  int partition_id_;
  std::string stderr_tail_;
};

/// The execution environment is broken (engine unreachable, image not pullable).
/// Distinct from TaskError: the command never got a fair chance to run.
class EnvironmentError : public std::runtime_error {
 public:
  explicit EnvironmentError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem/object-store failure, with path context in the message.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mare
