// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "mare/dataset.hpp"

namespace mare {

enum class MountKind { TextFile, BinaryFiles };

/// How a partition appears inside a container: one delimited text file, or a
/// directory with one file per record.
struct MountPoint {
  MountKind kind = MountKind::TextFile;
  std::string container_path;     // absolute
  Separator separator = {"\n"};   // TextFile only

  static MountPoint text(std::string path, Separator sep = {"\n"}) {
    return {MountKind::TextFile, std::move(path), std::move(sep)};
  }
  static MountPoint binary(std::string path) {
    return {MountKind::BinaryFiles, std::move(path), {"\n"}};
  }
  bool operator==(const MountPoint&) const = default;
};

enum class TempBacking { memory_fs, disk };

/// Hands out fresh per-task directories under a configured root. The root is
/// asserted by the operator to be memory-backed (or not); the engine never
/// mounts filesystems itself.
class TempSpace {
 public:
  TempSpace(std::filesystem::path root, TempBacking backing = TempBacking::disk,
            bool keep_temp = false);

  /// Fresh, empty, uniquely named task directory. Thread-safe.
  std::filesystem::path make_task_dir();

  /// Deletes the task directory and its contents, unless keep_temp is set.
  void release_task_dir(const std::filesystem::path& dir);

  const std::filesystem::path& root() const { return root_; }
  TempBacking backing() const { return backing_; }
  bool keep_temp() const { return keep_temp_; }

 private:
  std::filesystem::path root_;
  TempBacking backing_;
  bool keep_temp_;
  std::mutex mu_;
  uint64_t next_ = 0;
};

/// RAII wrapper so a task directory is released on every exit path.
class ScopedTaskDir {
 public:
  explicit ScopedTaskDir(TempSpace& ts) : ts_(ts), dir_(ts.make_task_dir()) {}
  ~ScopedTaskDir() { ts_.release_task_dir(dir_); }
  ScopedTaskDir(const ScopedTaskDir&) = delete;
  ScopedTaskDir& operator=(const ScopedTaskDir&) = delete;
  const std::filesystem::path& path() const { return dir_; }

 private:
  TempSpace& ts_;
  std::filesystem::path dir_;
};

/// Writes the partition into the task directory in the mount point's shape and
/// returns the host path to bind to mp.container_path. TextFile: one file with
/// join_text contents. BinaryFiles: a directory of part-00000, part-00001, ...
/// in record order. A write failure on a memory-backed TempSpace raises an
/// error telling the operator to fall back to a disk-backed temp_root.
std::filesystem::path materialize(const Partition& partition,
                                  const MountPoint& mp,
                                  const std::filesystem::path& task_dir,
                                  TempBacking backing = TempBacking::disk);

/// Creates the (empty) host-side target for an output mount and returns its
/// path: an empty directory for BinaryFiles, a reserved file path (not
/// created) for TextFile.
std::filesystem::path prepare_output(const MountPoint& mp,
                                     const std::filesystem::path& task_dir);

/// Reads container output back into records. TextFile: split on the mount's
/// separator. BinaryFiles: one record per regular file at depth 1, in
/// lexicographic filename order. A missing path yields zero records and calls
/// `warn`; a kind mismatch (dir where a file was declared, or vice versa)
/// throws IoError.
std::vector<Record> collect_output(
    const MountPoint& mp, const std::filesystem::path& host_path,
    const std::function<void(const std::string&)>& warn = {});

}  // namespace mare
