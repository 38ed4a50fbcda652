// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#include "mare/mountpoint.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "mare/errors.hpp"

namespace fs = std::filesystem;

namespace mare {
namespace {

void write_file(const fs::path& path, const std::string& bytes,
                TempBacking backing) {
  std::ofstream out(path, std::ios::binary);
  if (out) out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    if (backing == TempBacking::memory_fs && errno == ENOSPC)
      throw IoError("out of space in memory-backed temp space writing " +
                    path.string() +
                    "; configure a disk-backed temp_root and retry");
    throw IoError("cannot write " + path.string() + ": " +
                  std::strerror(errno));
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return bytes;
}

// Host-side name for a mount, unique per container path within a task dir.
std::string mount_name(const MountPoint& mp) {
  std::string name = "mnt";
  for (char c : mp.container_path) name += (c == '/') ? '_' : c;
  return name;
}

std::string part_name(size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "part-%05zu", index);
  return buf;
}

}  // namespace

TempSpace::TempSpace(fs::path root, TempBacking backing, bool keep_temp)
    : root_(std::move(root)), backing_(backing), keep_temp_(keep_temp) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw IoError("cannot create temp root " + root_.string());
}

fs::path TempSpace::make_task_dir() {
  uint64_t id;
  {
    std::lock_guard lock(mu_);
    id = next_++;
  }
  fs::path dir = root_ / ("task-" + std::to_string(id));
  std::error_code ec;
  fs::create_directory(dir, ec);
  if (ec) throw IoError("cannot create task dir " + dir.string());
  return dir;
}

void TempSpace::release_task_dir(const fs::path& dir) {
  if (keep_temp_) return;
  std::error_code ec;
  fs::remove_all(dir, ec);  // best effort on teardown
}

fs::path materialize(const Partition& partition, const MountPoint& mp,
                     const fs::path& task_dir, TempBacking backing) {
  fs::path host = task_dir / mount_name(mp);
  if (mp.kind == MountKind::TextFile) {
    write_file(host, join_text(partition, mp.separator), backing);
  } else {
    std::error_code ec;
    fs::create_directory(host, ec);
    if (ec) throw IoError("cannot create mount dir " + host.string());
    for (size_t i = 0; i < partition.records.size(); ++i)
      write_file(host / part_name(i), partition.records[i], backing);
  }
  return host;
}

fs::path prepare_output(const MountPoint& mp, const fs::path& task_dir) {
  fs::path host = task_dir / mount_name(mp);
  if (mp.kind == MountKind::BinaryFiles) {
    std::error_code ec;
    fs::create_directory(host, ec);
    if (ec) throw IoError("cannot create output mount dir " + host.string());
  }
  return host;
}

std::vector<Record> collect_output(
    const MountPoint& mp, const fs::path& host_path,
    const std::function<void(const std::string&)>& warn) {
  if (!fs::exists(host_path)) {
    if (warn)
      warn("output mount " + mp.container_path + " produced nothing (" +
           host_path.string() + " missing)");
    return {};
  }
  if (mp.kind == MountKind::TextFile) {
    if (fs::is_directory(host_path))
      throw IoError("output mount " + mp.container_path +
                    " declared TextFile but a directory was produced");
    return split_text(read_file(host_path), mp.separator, 1)
        .partitions.front()
        .records;
  }
  if (!fs::is_directory(host_path))
    throw IoError("output mount " + mp.container_path +
                  " declared BinaryFiles but a regular file was produced");
  // Depth-1 regular files only; subdirectories are out of contract.
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(host_path))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  std::vector<Record> records;
  records.reserve(files.size());
  for (const auto& f : files) records.push_back(read_file(f));
  return records;
}

}  // namespace mare
