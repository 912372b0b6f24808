// Copyright (c) 2026 fdbench contributors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "fdb/harness.hpp"

namespace fs = std::filesystem;

namespace fdb {
namespace {

constexpr const char* kCsvHeader = "identity_id,probe_path,reference_path";

bool has_image_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

void check_entries(const std::vector<ManifestEntry>& entries) {
  std::set<std::string> seen;
  for (const ManifestEntry& e : entries) {
    if (e.identity_id.empty()) {
      throw ValidationError("manifest row with empty identity id");
    }
    if (!seen.insert(e.identity_id).second) {
      throw ValidationError("duplicate identity id '" + e.identity_id + "'");
    }
    if (e.probe_path == e.reference_path) {
      throw ValidationError("identity '" + e.identity_id +
                            "' uses the same file for probe and reference");
    }
    for (const fs::path* p : {&e.probe_path, &e.reference_path}) {
      if (!fs::is_regular_file(*p)) {
        throw ValidationError("missing image file " + p->string());
      }
    }
  }
}

}  // namespace

DatasetManifest read_manifest_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  // Relative paths resolve against the manifest's own directory so fixtures
  // stay relocatable.
  const fs::path base = path.has_parent_path() ? path.parent_path() : ".";

  DatasetManifest m;
  m.root = base;
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("manifest " + path.string() + " is empty");
  }
  if (line != kCsvHeader) {
    throw ValidationError("manifest header must be '" +
                          std::string(kCsvHeader) + "'");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string id, probe, reference;
    if (!std::getline(row, id, ',') || !std::getline(row, probe, ',') ||
        !std::getline(row, reference)) {
      throw ValidationError("manifest line " + std::to_string(lineno) +
                            " needs 3 comma-separated fields");
    }
    const auto resolve = [&base](const std::string& p) {
      fs::path fp(p);
      return fp.is_absolute() ? fp : base / fp;
    };
    m.entries.push_back({id, resolve(probe), resolve(reference)});
  }
  check_entries(m.entries);
  if (m.entries.empty()) {
    throw EmptyDataset("manifest " + path.string() + " lists no identities");
  }
  return m;
}

void write_manifest_csv(const DatasetManifest& manifest,
                        const fs::path& out_path) {
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest " + out_path.string());
  const fs::path base =
      out_path.has_parent_path() ? out_path.parent_path() : ".";
  out << kCsvHeader << "\n";
  for (const ManifestEntry& e : manifest.entries) {
    std::error_code ec;
    fs::path probe = fs::relative(e.probe_path, base, ec);
    if (ec || probe.empty()) probe = e.probe_path;
    fs::path reference = fs::relative(e.reference_path, base, ec);
    if (ec || reference.empty()) reference = e.reference_path;
    out << e.identity_id << "," << probe.generic_string() << ","
        << reference.generic_string() << "\n";
  }
  if (!out.flush()) throw IoError("write failed for " + out_path.string());
}

DatasetManifest ingest_dataset(const fs::path& root,
                               const std::optional<fs::path>& manifest) {
  if (manifest.has_value()) return read_manifest_csv(*manifest);
  if (!fs::is_directory(root)) {
    throw IoError("dataset root " + root.string() + " is not a directory");
  }

  std::vector<fs::path> persons;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) persons.push_back(entry.path());
  }
  std::sort(persons.begin(), persons.end());

  DatasetManifest m;
  m.root = root;
  for (const fs::path& dir : persons) {
    std::vector<fs::path> images;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && has_image_extension(entry.path())) {
        images.push_back(entry.path());
      }
    }
    if (images.size() < 2) {
      ++m.skipped;
      continue;
    }
    // Lexicographic pairing: first file enrolls, second probes.
    std::sort(images.begin(), images.end());
    m.entries.push_back({dir.filename().string(), images[1], images[0]});
  }
  check_entries(m.entries);
  if (m.entries.empty()) {
    throw EmptyDataset("no identity directory under " + root.string() +
                       " has two images");
  }
  return m;
}

}  // namespace fdb
