// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace mare {

struct Bind {
  std::filesystem::path host;
  std::string container;  // absolute path inside the container
  bool read_only = false;
};

/// One unit of external execution: a shell command from an image, run against
/// bound mounts. The image is ignored by the subprocess backend.
struct ContainerTask {
  std::string image;
  std::string command;
  std::vector<Bind> binds;
  std::vector<std::pair<std::string, std::string>> env;
  double timeout_s = 0;  // 0 = no timeout
  std::optional<int> cpu_limit;
};

struct TaskOutcome {
  std::optional<int> exit_code;  // absent iff killed by timeout
  std::string stdout_bytes;
  std::string stderr_bytes;
  double wall_s = 0;

  bool timed_out() const { return !exit_code.has_value(); }
  bool ok() const { return exit_code && *exit_code == 0; }
};

/// Last 8 KiB of a task's stderr, for failure reports.
std::string stderr_tail(const TaskOutcome& outcome);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual TaskOutcome run(const ContainerTask& task) = 0;
  virtual std::string name() const = 0;
};

/// Runs the command directly under `sh -c`, with every declared container
/// path textually substituted by its host path (longest container path
/// first). Daemon-free; requires mount paths to appear verbatim in commands.
class SubprocessBackend : public Backend {
 public:
  TaskOutcome run(const ContainerTask& task) override;
  std::string name() const override { return "subprocess"; }

  static std::string substitute_paths(const std::string& command,
                                      const std::vector<Bind>& binds);
};

/// Drives the container engine through its CLI: `docker run --rm -v ... image
/// sh -c command`. Image pulls follow an if-not-present policy with a shared
/// presence cache.
class DockerBackend : public Backend {
 public:
  explicit DockerBackend(std::string cli = "docker") : cli_(std::move(cli)) {}
  TaskOutcome run(const ContainerTask& task) override;
  std::string name() const override { return "container"; }

 private:
  void ensure_image(const std::string& image);
  std::string cli_;
  std::mutex mu_;
  std::unordered_set<std::string> present_;
};

enum class BackendMode { auto_select, container, subprocess };

struct ExecutorConfig {
  BackendMode backend = BackendMode::auto_select;
  int slots = 1;
  std::string pull_policy = "if-not-present";
  double timeout_s = 0;
};

struct BackendProbe {
  bool container_available = false;
  bool subprocess_available = true;
  std::string selected;  // "container" or "subprocess"
};

/// Reports which backends are reachable and which one the config selects.
/// Never mutates state; an unreachable engine is a report value, not an error.
BackendProbe probe_backend(const ExecutorConfig& cfg = {});

/// Builds the backend the probe selects. Throws EnvironmentError when a
/// container backend is demanded but the engine is unreachable.
std::unique_ptr<Backend> make_backend(const ExecutorConfig& cfg = {});

/// Low-level spawn of argv with full stdout/stderr capture and a kill-on-
/// timeout deadline. Used by both backends; exposed for tests.
TaskOutcome run_argv(const std::vector<std::string>& argv,
                     const std::vector<std::pair<std::string, std::string>>& env,
                     double timeout_s);

}  // namespace mare
