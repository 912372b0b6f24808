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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdb/degrade.hpp"
#include "fdb/evalcore.hpp"
#include "fdb/rng.hpp"

namespace fdb {

struct ManifestEntry {
  std::string identity_id;
  std::filesystem::path probe_path;
  std::filesystem::path reference_path;
  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;
  // Identities skipped during auto-pairing for having fewer than two images.
  int skipped = 0;
};

struct BackendConfig {
  // "identity" or a command template with {in} and {out}.
  std::string enhance_cmd = "identity";
  // "mock" or a command template with {in} printing a JSON number array.
  std::string embed_cmd = "mock";
  int embed_dim = 512;
  double timeout_s = 30.0;
};

enum class ParamsMode { sampled, sweep };
enum class Protocol { identify, verify };

struct ExperimentConfig {
  std::filesystem::path manifest;  // manifest CSV, or a dataset root
  Seed master_seed = 0;
  double threshold = 0.75;
  std::vector<DegradationKind> kinds;  // empty means all eight
  ParamsMode params_mode = ParamsMode::sampled;
  Protocol protocol = Protocol::identify;
  BackendConfig backends;
  std::filesystem::path output_dir = "out";
};

// Explicit manifest wins; otherwise person-per-directory auto-pairing
// (lexicographic first image = reference, second = probe). No usable
// identities -> EmptyDataset. Manifest rows with probe == reference ->
// ValidationError.
DatasetManifest ingest_dataset(const std::filesystem::path& root,
                               const std::optional<std::filesystem::path>&
                                   manifest = std::nullopt);

void write_manifest_csv(const DatasetManifest& manifest,
                        const std::filesystem::path& out_path);
DatasetManifest read_manifest_csv(const std::filesystem::path& path);

// "identity" copies the file byte-for-byte; command backends must exit 0 and
// write a decodable image of unchanged dimensions to {out}. Failures ->
// BackendError / BackendTimeout.
std::filesystem::path enhance(const std::filesystem::path& image_path,
                              const BackendConfig& backend,
                              const std::filesystem::path& out_path);

// "mock" embeds deterministically: luminance, bicubic 16x16, flatten,
// subtract mean, unit norm (flat image -> DegenerateInput). Command backends
// must print a JSON array of embed_dim finite reals.
EmbeddingVector embed(const std::filesystem::path& image_path,
                      const BackendConfig& backend);

struct RunStats {
  std::size_t planned = 0;
  std::size_t completed = 0;  // includes error trials
  std::size_t resumed = 0;    // found already present in trials.jsonl
  std::size_t errors = 0;
};

// Executes identity x kind, appending degraded- then enhanced-condition
// records to output_dir/trials.jsonl as each pair completes. Records carry a
// `condition_key`; keys already present are skipped, making interrupted runs
// resumable. Byte-identical across reruns with identity/mock backends.
RunStats run_experiment(const ExperimentConfig& config);

std::vector<TrialRecord> read_trials(const std::filesystem::path& path);

// report.md (both summary tables), table1.csv, table2.csv, plotdata.csv.
// Every figure is recomputed from the trials. Empty trials -> EmptyDataset.
void write_report(const std::filesystem::path& trials_path,
                  const std::filesystem::path& out_dir, Seed seed = 7,
                  int bootstrap_iterations = 1000);

// Key=value or JSON config file; unknown keys -> ValidationError. The
// FDB_MASTER_SEED environment variable overrides master_seed.
ExperimentConfig load_config(const std::filesystem::path& path);
void apply_env_overrides(ExperimentConfig& config);

nlohmann::json trial_to_json(const TrialRecord& trial);
TrialRecord trial_from_json(const nlohmann::json& j);

namespace detail {

struct CommandResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string stdout_text;
  std::string stderr_excerpt;
};

// Runs `command` via /bin/sh -c in its own process group, killing the group
// on timeout. Capture caps keep runaway backends from exhausting memory.
CommandResult run_command(const std::string& command, double timeout_s,
                          std::size_t max_capture = 1 << 20);

// Substitutes every {in} / {out}; single-quotes the paths for the shell.
std::string substitute_template(const std::string& templ,
                                const std::filesystem::path& in,
                                const std::optional<std::filesystem::path>&
                                    out = std::nullopt);

}  // namespace detail

}  // namespace fdb
