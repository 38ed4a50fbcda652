// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <thread>

#include "mare/errors.hpp"
#include "mare/mountpoint.hpp"

using namespace mare;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void spit(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

fs::path test_root() {
  auto root = fs::temp_directory_path() / "mare-mp-test";
  fs::remove_all(root);
  return root;
}

}  // namespace

TEST_CASE("materialize TextFile writes joined records") {
  TempSpace ts(test_root());
  ScopedTaskDir dir(ts);
  Partition p{0, {"A", "B"}, -1};
  fs::path host = materialize(p, MountPoint::text("/dna"), dir.path());
  CHECK(slurp(host) == "A\nB\n");
}

TEST_CASE("materialize BinaryFiles writes one ordered file per record") {
  TempSpace ts(test_root());
  ScopedTaskDir dir(ts);
  Partition p{0, {"one", "two", "three"}, -1};
  fs::path host = materialize(p, MountPoint::binary("/out"), dir.path());
  CHECK(fs::is_directory(host));
  CHECK(slurp(host / "part-00000") == "one");
  CHECK(slurp(host / "part-00001") == "two");
  CHECK(slurp(host / "part-00002") == "three");
}

TEST_CASE("materialize SDF text keeps the terminator count") {
  TempSpace ts(test_root());
  ScopedTaskDir dir(ts);
  Partition p{0, {"mol1\nX", "mol2\nY"}, -1};
  fs::path host =
      materialize(p, MountPoint::text("/in.sdf", "\n$$$$\n"), dir.path());
  std::string text = slurp(host);
  int count = 0;
  size_t pos = 0;
  while ((pos = text.find("\n$$$$\n", pos)) != std::string::npos) {
    ++count;
    pos += 6;
  }
  CHECK(count == 2);
}

TEST_CASE("collect_output TextFile splits on the mount separator") {
  TempSpace ts(test_root());
  ScopedTaskDir dir(ts);
  fs::path file = dir.path() / "count";
  spit(file, "7\n");
  CHECK(collect_output(MountPoint::text("/count"), file) ==
        std::vector<Record>{"7"});
  spit(file, "");
  CHECK(collect_output(MountPoint::text("/count"), file).empty());
}

TEST_CASE("collect_output BinaryFiles reads lexicographic order") {
  TempSpace ts(test_root());
  ScopedTaskDir dir(ts);
  fs::path out = dir.path() / "out";
  fs::create_directory(out);
  spit(out / "b.vcf.gz", "BBB");
  spit(out / "a.vcf.gz", "AAA");
  auto records = collect_output(MountPoint::binary("/out"), out);
  CHECK(records == std::vector<Record>{"AAA", "BBB"});
}

TEST_CASE("collect_output missing path warns and yields nothing") {
  TempSpace ts(test_root());
  ScopedTaskDir dir(ts);
  bool warned = false;
  auto records = collect_output(MountPoint::text("/gone"),
                                dir.path() / "missing",
                                [&](const std::string&) { warned = true; });
  CHECK(records.empty());
  CHECK(warned);
}

TEST_CASE("collect_output kind mismatch is an error") {
  TempSpace ts(test_root());
  ScopedTaskDir dir(ts);
  fs::path d = dir.path() / "thing";
  fs::create_directory(d);
  CHECK_THROWS_AS(collect_output(MountPoint::text("/thing"), d), IoError);
  fs::path f = dir.path() / "plain";
  spit(f, "x");
  CHECK_THROWS_AS(collect_output(MountPoint::binary("/plain"), f), IoError);
}

TEST_CASE("materialize then collect_output is the identity, both kinds") {
  TempSpace ts(test_root());
  std::vector<Record> records = {"alpha", "", "gamma\nwith newline", "delta"};
  Partition p{0, records, -1};
  {
    ScopedTaskDir dir(ts);
    auto mp = MountPoint::binary("/bin");
    CHECK(collect_output(mp, materialize(p, mp, dir.path())) == records);
  }
  {
    // TextFile identity holds for records free of the separator.
    ScopedTaskDir dir(ts);
    Partition q{0, {"alpha", "beta", "gamma"}, -1};
    auto mp = MountPoint::text("/txt", "|");
    CHECK(collect_output(mp, materialize(q, mp, dir.path())) == q.records);
  }
}

TEST_CASE("task directories are disjoint and cleaned up") {
  auto root = test_root();
  TempSpace ts(root);
  std::vector<fs::path> dirs;
  {
    ScopedTaskDir a(ts), b(ts);
    CHECK(a.path() != b.path());
    CHECK(fs::exists(a.path()));
    dirs = {a.path(), b.path()};
    spit(a.path() / "junk", "x");
  }
  CHECK(!fs::exists(dirs[0]));
  CHECK(!fs::exists(dirs[1]));
}

TEST_CASE("concurrent task dir allocation never collides") {
  TempSpace ts(test_root());
  std::vector<std::thread> threads;
  std::vector<fs::path> paths(64);
  for (int i = 0; i < 64; ++i)
    threads.emplace_back([&, i] { paths[i] = ts.make_task_dir(); });
  for (auto& t : threads) t.join();
  std::sort(paths.begin(), paths.end());
  CHECK(std::adjacent_find(paths.begin(), paths.end()) == paths.end());
}

TEST_CASE("keep_temp preserves task directories") {
  auto root = test_root();
  fs::path kept;
  {
    TempSpace ts(root, TempBacking::disk, /*keep_temp=*/true);
    ScopedTaskDir dir(ts);
    kept = dir.path();
    spit(kept / "debugme", "x");
  }
  CHECK(fs::exists(kept / "debugme"));
  fs::remove_all(root);
}
