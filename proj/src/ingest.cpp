// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#include "mare/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>

#include "mare/engine.hpp"
#include "mare/errors.hpp"

namespace fs = std::filesystem;

namespace mare {
namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

std::vector<fs::path> sorted_files(const fs::path& dir) {
  if (!fs::is_directory(dir))
    throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  return files;
}

// Concatenate text pieces, guaranteeing a separator at each boundary so
// records never glue across files.
std::string join_pieces(const std::vector<std::string>& pieces,
                        const Separator& sep) {
  std::string all;
  for (const auto& piece : pieces) {
    if (piece.empty()) continue;
    all += piece;
    if (all.size() < sep.bytes.size() ||
        all.compare(all.size() - sep.bytes.size(), sep.bytes.size(),
                    sep.bytes) != 0)
      all += sep.bytes;
  }
  return all;
}

}  // namespace

std::vector<std::string> DirObjectStore::list(const std::string& prefix) {
  std::vector<std::string> names;
  fs::path base = root_;
  if (!fs::exists(base)) throw IoError("object store root missing: " + base.string());
  for (const auto& entry : fs::recursive_directory_iterator(base)) {
    if (!entry.is_regular_file()) continue;
    std::string name = fs::relative(entry.path(), base).generic_string();
    if (name.rfind(prefix, 0) == 0) names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::string DirObjectStore::get(const std::string& name) {
  return read_file(root_ / name);
}

Dataset ingest(const Source& src, int target_partitions) {
  if (target_partitions < 1)
    throw ConfigError("target_partitions must be >= 1");

  switch (src.kind) {
    case SourceKind::text_file:
      return split_text(read_file(src.location), src.separator,
                        target_partitions);

    case SourceKind::text_dir: {
      std::vector<std::string> pieces;
      for (const auto& f : sorted_files(src.location))
        pieces.push_back(read_file(f));
      if (pieces.empty())
        std::fprintf(stderr, "warning: no files under %s\n",
                     src.location.c_str());
      return split_text(join_pieces(pieces, src.separator), src.separator,
                        target_partitions);
    }

    case SourceKind::binary_dir: {
      Dataset ds;
      ds.partitions.resize(target_partitions);
      for (int i = 0; i < target_partitions; ++i) ds.partitions[i].id = i;
      auto files = sorted_files(src.location);
      for (size_t i = 0; i < files.size(); ++i)
        ds.partitions[i % target_partitions].records.push_back(
            read_file(files[i]));
      return ds;
    }

    case SourceKind::object_prefix: {
      if (!src.store) throw ConfigError("object_prefix source needs a store");
      auto names = src.store->list(src.location);
      if (names.empty())
        std::fprintf(stderr, "warning: no objects under prefix %s\n",
                     src.location.c_str());
      std::vector<std::string> pieces;
      for (const auto& n : names) pieces.push_back(src.store->get(n));
      return split_text(join_pieces(pieces, src.separator), src.separator,
                        target_partitions);
    }
  }
  throw ConfigError("unknown source kind");
}

Dataset take_fraction(const Dataset& ds, double fraction, int partitions) {
  if (fraction <= 0 || fraction > 1)
    throw ConfigError("fraction must be in (0, 1]");
  auto records = collect(ds);
  auto keep = static_cast<size_t>(
      std::ceil(fraction * static_cast<double>(records.size())));
  records.resize(std::min(records.size(), keep));
  return from_records(std::move(records), partitions);
}

nlohmann::json CorpusManifest::to_json() const {
  return {{"kind", kind}, {"seed", seed}, {"size", size_bytes}, {"stats", stats}};
}

fs::path corpus_file(CorpusKind kind, const fs::path& out_dir) {
  switch (kind) {
    case CorpusKind::dna:
      return out_dir / "corpus.dna.txt";
    case CorpusKind::sdf_like:
      return out_dir / "corpus.sdf";
    case CorpusKind::numbers:
      return out_dir / "corpus.numbers.txt";
  }
  throw ConfigError("unknown corpus kind");
}

CorpusManifest generate_corpus(const CorpusSpec& spec, const fs::path& out_dir) {
  if (spec.size_bytes < 1) throw ConfigError("size_bytes must be >= 1");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string());

  fs::path file = corpus_file(spec.kind, out_dir);
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());

  std::mt19937_64 rng(spec.seed);
  CorpusManifest manifest;
  manifest.seed = spec.seed;
  uint64_t written = 0;

  switch (spec.kind) {
    case CorpusKind::dna: {
      manifest.kind = "dna";
      static constexpr char kBases[] = {'A', 'C', 'G', 'T'};
      uint64_t gc = 0, lines = 0;
      std::string line(81, '\n');
      while (written < spec.size_bytes) {
        for (int i = 0; i < 80; ++i) {
          char b = kBases[rng() & 3];
          if (b == 'G' || b == 'C') ++gc;
          line[i] = b;
        }
        out.write(line.data(), 81);
        written += 81;
        ++lines;
      }
      manifest.stats = {{"gc_count", gc}, {"line_count", lines}};
      break;
    }
    case CorpusKind::sdf_like: {
      manifest.kind = "sdf_like";
      const std::string sep = "\n$$$$\n";
      uint64_t count = 0;
      auto want_more = [&] {
        if (spec.record_count > 0) return count < spec.record_count;
        return written < spec.size_bytes;
      };
      while (want_more()) {
        char header[64];
        std::snprintf(header, sizeof(header), "MOL%08llu",
                      static_cast<unsigned long long>(count));
        double score = static_cast<double>(rng() % 1000000) / 1000.0;
        char body[128];
        std::snprintf(body, sizeof(body),
                      "%s\n  synthetic\n\n> <score>\n%.3f", header, score);
        out.write(body, static_cast<std::streamsize>(std::strlen(body)));
        out.write(sep.data(), static_cast<std::streamsize>(sep.size()));
        written += std::strlen(body) + sep.size();
        ++count;
      }
      manifest.stats = {{"record_count", count}};
      break;
    }
    case CorpusKind::numbers: {
      manifest.kind = "numbers";
      // 1..n, deterministically shuffled; the sum is the arithmetic series.
      uint64_t n = spec.record_count;
      if (n == 0) n = std::max<uint64_t>(1, spec.size_bytes / 8);
      std::vector<uint64_t> values(n);
      for (uint64_t i = 0; i < n; ++i) values[i] = i + 1;
      std::shuffle(values.begin(), values.end(), rng);
      uint64_t sum = 0;
      for (uint64_t v : values) {
        std::string line = std::to_string(v) + "\n";
        out.write(line.data(), static_cast<std::streamsize>(line.size()));
        written += line.size();
        sum += v;
      }
      manifest.stats = {{"sum", sum}, {"count", n}};
      break;
    }
  }
  out.close();
  manifest.size_bytes = written;

  std::ofstream mf(out_dir / "manifest.json");
  mf << manifest.to_json().dump(2) << "\n";
  if (!mf) throw IoError("cannot write manifest under " + out_dir.string());
  return manifest;
}

}  // namespace mare
