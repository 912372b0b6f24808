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

#include <atomic>
#include <exception>
#include <fstream>
#include <set>

#include "fdb/codec.hpp"
#include "fdb/harness.hpp"

namespace fs = std::filesystem;

namespace fdb {
namespace {

struct PlanItem {
  std::size_t entry = 0;  // manifest row
  DegradationKind kind = DegradationKind::None;
  int spec_index = 0;     // position within the (identity, kind) group
  DegradationSpec spec;
  std::string key_degraded;
  std::string key_enhanced;
};

std::string image_id(const fs::path& image, const fs::path& root) {
  std::error_code ec;
  const fs::path rel = fs::relative(image, root, ec);
  if (ec || rel.empty()) return image.filename().generic_string();
  return rel.generic_string();
}

// Sweep mode walks each kind's published severity grid; parameters without
// a grid come from one seeded draw per grid point so the sweep stays
// replayable.
std::vector<DegradationSpec> sweep_specs(DegradationKind kind, Seed seed) {
  std::vector<DegradationSpec> specs;
  const auto push = [&specs, kind](auto params) {
    DegradationSpec s;
    s.kind = kind;
    s.params = std::move(params);
    specs.push_back(std::move(s));
  };
  switch (kind) {
    case DegradationKind::MultiGenJpeg:
      for (int k : grids::kJpegCycles) {
        for (int q : grids::kJpegQualities) {
          push(MultiGenJpegParams{
              k, std::vector<int>(static_cast<std::size_t>(k), q)});
        }
      }
      break;
    case DegradationKind::DownUpScale:
      for (int f : grids::kScaleFactors) push(DownUpScaleParams{f});
      break;
    case DegradationKind::GaussianBlur:
      for (double s : grids::kBlurSigmas) push(GaussianBlurParams{s});
      break;
    case DegradationKind::MotionBlur: {
      std::uint64_t i = 0;
      for (int l : grids::kMotionLengths) {
        push(MotionBlurParams{l, unit_at(seed, i++) * 180.0});
      }
      break;
    }
    case DegradationKind::SaltPepper:
      for (double p : grids::kNoiseDensities) push(SaltPepperParams{p});
      break;
    case DegradationKind::ChannelClip:
      for (int d : grids::kClipDeltas) push(ChannelClipParams{{d, d, d}});
      break;
    case DegradationKind::ScreenRecapture:
      push(ScreenRecaptureParams{});
      break;
    case DegradationKind::None:
      push(NoneParams{});
      break;
  }
  return specs;
}

// condition_key alone is unique in sampled mode; sweep mode appends the
// spec so grid points stay individually resumable.
std::string resume_key(const TrialRecord& t, ParamsMode mode) {
  std::string key = t.condition_key();
  if (mode == ParamsMode::sweep) key += "|" + spec_to_json(t.spec).dump();
  return key;
}

// Reads completed records. An interrupted run can leave a torn or missing
// final newline; the file is truncated back to the last whole record so the
// rerun reproduces a fresh run byte for byte.
std::vector<TrialRecord> load_resumable(const fs::path& path) {
  std::vector<TrialRecord> records;
  std::ifstream in(path, std::ios::binary);
  if (!in) return records;
  std::string line;
  std::streamoff good_end = 0;
  bool torn = false;
  while (std::getline(in, line)) {
    const bool has_newline = !in.eof();
    bool parsed = false;
    if (!line.empty()) {
      try {
        records.push_back(trial_from_json(nlohmann::json::parse(line)));
        parsed = true;
      } catch (const std::exception&) {
        parsed = false;
      }
    }
    if (!parsed || !has_newline) {
      torn = true;
      break;
    }
    good_end = in.tellg();
  }
  in.close();
  if (torn) {
    fs::resize_file(path, static_cast<std::uintmax_t>(good_end));
  }
  return records;
}

void decide(TrialRecord& t, const EmbeddingVector& emb,
            const std::map<std::string, EmbeddingVector>& gallery,
            double threshold, Protocol protocol) {
  if (protocol == Protocol::identify) {
    auto [pred, sim] = identify(emb, gallery, threshold);
    t.similarity = sim;
    t.predicted_identity = pred;
    t.accepted = pred.has_value();
    t.correct = t.accepted && *pred == t.identity_id;
  } else {
    const double sim = cosine_similarity(emb, gallery.at(t.identity_id));
    t.similarity = sim;
    t.accepted = sim >= threshold;
    t.predicted_identity =
        t.accepted ? std::optional<std::string>(t.identity_id) : std::nullopt;
    t.correct = t.accepted;
  }
}

}  // namespace

RunStats run_experiment(const ExperimentConfig& config) {
  if (config.manifest.empty()) {
    throw ValidationError("config needs a manifest path");
  }
  if (!(config.threshold >= -1.0 && config.threshold <= 1.0)) {
    throw ValidationError("threshold must be in [-1,1]");
  }
  if (!(config.backends.timeout_s > 0.0)) {
    throw ValidationError("timeout_s must be > 0");
  }

  const DatasetManifest m =
      fs::is_directory(config.manifest)
          ? ingest_dataset(config.manifest, std::nullopt)
          : read_manifest_csv(config.manifest);

  const std::vector<DegradationKind> kinds =
      config.kinds.empty()
          ? std::vector<DegradationKind>(kAllKinds.begin(), kAllKinds.end())
          : config.kinds;

  const fs::path out_dir = config.output_dir;
  const fs::path work_dir = out_dir / "work";
  fs::create_directories(work_dir);
  const fs::path trials_path = out_dir / "trials.jsonl";

  // Preflight: exercise both backends once so a misconfigured command fails
  // the run immediately instead of producing a file full of error records.
  {
    const fs::path scratch = work_dir / "preflight.png";
    enhance(m.entries.front().reference_path, config.backends, scratch);
    (void)embed(scratch, config.backends);
  }

  // Gallery: every reference is enrolled, embedded once per run.
  std::map<std::string, EmbeddingVector> gallery;
  for (const ManifestEntry& e : m.entries) {
    gallery[e.identity_id] = embed(e.reference_path, config.backends);
  }
  {
    nlohmann::json g{{"embed_cmd", config.backends.embed_cmd},
                     {"embed_dim", config.backends.embed_dim},
                     {"embeddings", nlohmann::json::object()}};
    for (const auto& [id, emb] : gallery) g["embeddings"][id] = emb;
    std::ofstream gf(out_dir / "gallery.json", std::ios::trunc);
    gf << g.dump(2) << "\n";
  }

  // The full plan is laid out up front; records are emitted in plan order,
  // which is what makes reruns byte-identical.
  std::vector<PlanItem> plan;
  for (std::size_t ei = 0; ei < m.entries.size(); ++ei) {
    const ManifestEntry& e = m.entries[ei];
    for (DegradationKind kind : kinds) {
      const Seed seed =
          derive_seed(config.master_seed, e.identity_id, kind_label(kind));
      std::vector<DegradationSpec> specs;
      if (config.params_mode == ParamsMode::sampled) {
        if (kind == DegradationKind::None) {
          DegradationSpec s;
          s.kind = DegradationKind::None;
          specs.push_back(s);
        } else {
          specs.push_back(sample_spec(kind, seed));
        }
      } else {
        specs = sweep_specs(kind, seed);
      }
      for (std::size_t si = 0; si < specs.size(); ++si) {
        PlanItem item;
        item.entry = ei;
        item.kind = kind;
        item.spec_index = static_cast<int>(si);
        item.spec = specs[si];
        TrialRecord probe;
        probe.identity_id = e.identity_id;
        probe.spec = item.spec;
        probe.condition = Condition::degraded;
        item.key_degraded = resume_key(probe, config.params_mode);
        probe.condition = Condition::enhanced;
        item.key_enhanced = resume_key(probe, config.params_mode);
        plan.push_back(std::move(item));
      }
    }
  }

  RunStats stats;
  stats.planned = plan.size() * 2;

  std::set<std::string> done;
  for (const TrialRecord& t : load_resumable(trials_path)) {
    done.insert(resume_key(t, config.params_mode));
  }

  std::ofstream out(trials_path, std::ios::app | std::ios::binary);
  if (!out) throw IoError("cannot append to " + trials_path.string());

  std::exception_ptr first_error;
  std::atomic<bool> cancelled{false};
  const long long n_items = static_cast<long long>(plan.size());

#pragma omp parallel for ordered schedule(dynamic, 1)
  for (long long pi = 0; pi < n_items; ++pi) {
    const PlanItem& item = plan[static_cast<std::size_t>(pi)];
    const ManifestEntry& e = m.entries[item.entry];
    const bool skip_degraded = done.count(item.key_degraded) > 0;
    const bool skip_enhanced = done.count(item.key_enhanced) > 0;
    const bool skip_all = skip_degraded && skip_enhanced;
    bool computed = false;

    TrialRecord d, en;
    if (!skip_all && !cancelled.load(std::memory_order_acquire)) {
      try {
        d.identity_id = en.identity_id = e.identity_id;
        d.probe_image_id = en.probe_image_id = image_id(e.probe_path, m.root);
        d.reference_image_id = en.reference_image_id =
            image_id(e.reference_path, m.root);
        d.spec = en.spec = item.spec;
        d.condition = Condition::degraded;
        en.condition = Condition::enhanced;

        const Seed seed = derive_seed(config.master_seed, e.identity_id,
                                      kind_label(item.kind));
        const std::string stem = e.identity_id + "__" +
                                 kind_label(item.kind) + "__" +
                                 std::to_string(item.spec_index);
        const fs::path degraded_path = work_dir / (stem + "__degraded.png");
        const fs::path enhanced_path = work_dir / (stem + "__enhanced.png");

        const ImageBuffer probe = load_image(e.probe_path);
        const ImageBuffer degraded = apply(probe, item.spec, seed);
        save_image(degraded, degraded_path, ImageFormat::png);

        try {
          decide(d, embed(degraded_path, config.backends), gallery,
                 config.threshold, config.protocol);
        } catch (const BackendError& ex) {
          d.error = ex.what();
        } catch (const DegenerateInput& ex) {
          d.error = ex.what();
        }

        try {
          // The enhancement backend receives the persisted degraded image,
          // the same file a real restoration model would see.
          enhance(degraded_path, config.backends, enhanced_path);
          decide(en, embed(enhanced_path, config.backends), gallery,
                 config.threshold, config.protocol);
        } catch (const BackendError& ex) {
          en.error = ex.what();
        } catch (const DegenerateInput& ex) {
          en.error = ex.what();
        }
        computed = true;
      } catch (...) {
#pragma omp critical(runner_error)
        if (!first_error) first_error = std::current_exception();
        cancelled.store(true, std::memory_order_release);
      }
    }

// Every iteration passes through the ordered region, even with nothing to
// write; skipping it would stall the successors.
#pragma omp ordered
    {
      if (skip_degraded) ++stats.resumed;
      if (skip_enhanced) ++stats.resumed;
      if (computed) {
        if (!skip_degraded) {
          out << trial_to_json(d).dump() << "\n";
          ++stats.completed;
          if (d.error) ++stats.errors;
        }
        if (!skip_enhanced) {
          out << trial_to_json(en).dump() << "\n";
          ++stats.completed;
          if (en.error) ++stats.errors;
        }
        out.flush();
      }
    }
  }

  if (first_error) std::rethrow_exception(first_error);
  if (!out.flush()) throw IoError("write failed for " + trials_path.string());
  return stats;
}

}  // namespace fdb
