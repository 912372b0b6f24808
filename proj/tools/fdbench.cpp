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
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdb/codec.hpp"
#include "fdb/convolve.hpp"
#include "fdb/degrade.hpp"
#include "fdb/diffmath.hpp"
#include "fdb/evalcore.hpp"
#include "fdb/harness.hpp"
#include "fdb/resample.hpp"
#include "fdb/synth.hpp"

namespace fs = std::filesystem;

namespace {

// Exit codes: 0 ok, 1 validation failure, 2 backend failure.
constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitBackend = 2;

fdb::ImageFormat format_for(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") return fdb::ImageFormat::png;
  if (ext == ".jpg" || ext == ".jpeg") return fdb::ImageFormat::jpeg;
  throw fdb::InvalidParam("unsupported output extension: " + ext);
}

std::vector<fdb::DegradationKind> parse_kinds_flag(const std::string& text) {
  std::vector<fdb::DegradationKind> kinds;
  if (text == "all") {
    kinds.assign(fdb::kAllKinds.begin(), fdb::kAllKinds.end());
    return kinds;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) kinds.push_back(fdb::kind_from_label(item));
  }
  if (kinds.empty()) throw fdb::ValidationError("empty kinds list");
  return kinds;
}

int cmd_ingest(const fs::path& root, const std::optional<fs::path>& manifest,
               const std::optional<fs::path>& out) {
  const fdb::DatasetManifest ds = fdb::ingest_dataset(root, manifest);
  if (out) fdb::write_manifest_csv(ds, *out);
  std::cout << "identities: " << ds.entries.size()
            << "  skipped: " << ds.skipped << "\n";
  if (out) std::cout << "manifest written to " << out->string() << "\n";
  return kExitOk;
}

struct DegradeArgs {
  fs::path in, out;
  std::string kind_label;
  std::string spec_json;
  fdb::Seed seed = 0;
  int cycles = 0;
  std::vector<int> qualities;
  int factor = 0;
  double sigma = 0.0;
  int length = 0;
  double angle = 0.0;
  double p = -1.0;
  std::vector<int> deltas;
  fdb::ScreenRecaptureParams recap;
};

fdb::DegradationSpec spec_from_args(const DegradeArgs& a) {
  if (!a.spec_json.empty()) {
    return fdb::spec_from_json(nlohmann::json::parse(a.spec_json));
  }
  if (a.kind_label.empty()) {
    throw fdb::ValidationError("either --kind or --spec is required");
  }
  fdb::DegradationSpec spec;
  spec.kind = fdb::kind_from_label(a.kind_label);
  switch (spec.kind) {
    case fdb::DegradationKind::MultiGenJpeg: {
      fdb::MultiGenJpegParams p;
      p.qualities = a.qualities;
      p.cycles = a.cycles > 0 ? a.cycles : static_cast<int>(a.qualities.size());
      spec.params = p;
      break;
    }
    case fdb::DegradationKind::DownUpScale:
      spec.params = fdb::DownUpScaleParams{a.factor};
      break;
    case fdb::DegradationKind::GaussianBlur:
      spec.params = fdb::GaussianBlurParams{a.sigma};
      break;
    case fdb::DegradationKind::MotionBlur:
      spec.params = fdb::MotionBlurParams{a.length, a.angle};
      break;
    case fdb::DegradationKind::SaltPepper:
      spec.params = fdb::SaltPepperParams{a.p};
      break;
    case fdb::DegradationKind::ChannelClip: {
      if (a.deltas.size() != 3) {
        throw fdb::InvalidParam("--deltas needs exactly three values");
      }
      spec.params =
          fdb::ChannelClipParams{{a.deltas[0], a.deltas[1], a.deltas[2]}};
      break;
    }
    case fdb::DegradationKind::ScreenRecapture:
      spec.params = a.recap;
      break;
    case fdb::DegradationKind::None:
      spec.params = fdb::NoneParams{};
      break;
  }
  return spec;
}

int cmd_degrade(const DegradeArgs& args) {
  const fdb::DegradationSpec spec = spec_from_args(args);
  const fdb::ImageBuffer in = fdb::load_image(args.in);
  const fdb::ImageBuffer out = fdb::apply(in, spec, args.seed);
  const fdb::ImageFormat fmt = format_for(args.out);
  fdb::save_image(out, args.out, fmt,
                  fmt == fdb::ImageFormat::jpeg ? 92 : 0);
  std::cout << "applied " << fdb::spec_to_json(spec).dump() << " -> "
            << args.out.string() << "\n";
  return kExitOk;
}

int cmd_run(const fdb::ExperimentConfig& config) {
  const fdb::RunStats stats = fdb::run_experiment(config);
  std::cout << "planned: " << stats.planned
            << "  completed: " << stats.completed
            << "  resumed: " << stats.resumed << "  errors: " << stats.errors
            << "\n";
  fdb::write_report(config.output_dir / "trials.jsonl", config.output_dir);
  std::cout << "report written to "
            << (config.output_dir / "report.md").string() << "\n";
  return kExitOk;
}

int cmd_report(const fs::path& trials, const fs::path& out, fdb::Seed seed,
               int iterations) {
  fdb::write_report(trials, out, seed, iterations);
  std::cout << "report written to " << (out / "report.md").string() << "\n";
  return kExitOk;
}

// Score file: one `label,score` per line, label in {genuine, impostor}.
int cmd_roc(const fs::path& scores_path, const std::optional<fs::path>& out) {
  std::ifstream in(scores_path);
  if (!in) throw fdb::IoError("cannot open " + scores_path.string());
  std::vector<double> genuine, impostor;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw fdb::ValidationError("line " + std::to_string(lineno) +
                                 ": expected label,score");
    }
    const std::string label = line.substr(0, comma);
    double score = 0.0;
    try {
      score = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw fdb::ValidationError("line " + std::to_string(lineno) +
                                 ": bad score");
    }
    if (label == "genuine") {
      genuine.push_back(score);
    } else if (label == "impostor") {
      impostor.push_back(score);
    } else {
      throw fdb::ValidationError("line " + std::to_string(lineno) +
                                 ": unknown label " + label);
    }
  }
  const std::vector<fdb::RocPoint> points = fdb::roc_points(genuine, impostor);
  const double threshold = fdb::select_threshold(points);
  std::cout << "genuine: " << genuine.size()
            << "  impostor: " << impostor.size()
            << "  points: " << points.size() << "\n";
  std::cout << "selected threshold (Youden's J): " << threshold << "\n";
  if (out) {
    std::ofstream os(*out);
    if (!os) throw fdb::IoError("cannot write " + out->string());
    os << "threshold,tpr,fpr\n";
    for (const auto& p : points) {
      os << p.threshold << "," << p.tpr << "," << p.fpr << "\n";
    }
    std::cout << "curve written to " << out->string() << "\n";
  }
  return kExitOk;
}

int cmd_selftest() {
  int failures = 0;
  const auto check = [&failures](const char* name, bool ok,
                                 const std::string& detail = "") {
    if (ok) {
      std::cout << "ok   " << name << "\n";
    } else {
      ++failures;
      std::cout << "FAIL " << name << (detail.empty() ? "" : ": " + detail)
                << "\n";
    }
  };

  namespace dm = fdb::diffmath;
  const dm::LatentShape ls = dm::latent_shape(512, 512);
  check("latent shape 512x512 -> 16x64x64",
        ls.channels == 16 && ls.height == 64 && ls.width == 64);

  {
    dm::Matrix w0(2, 2);
    w0.data = {1, 2, 3, 4};
    dm::Matrix a(1, 2);
    a.data = {5, 6};
    dm::Matrix b(2, 1);
    b.data = {7, 8};
    const dm::Matrix merged = dm::lora_merge(w0, b, a, 0.0);
    check("lora merge alpha=0 is identity", merged == w0);
  }

  {
    const std::vector<double> out = dm::cfg_combine({1.0}, {0.5}, 2.8);
    check("cfg combine [1.0],[0.5],w=2.8 -> [2.4]",
          out.size() == 1 && std::abs(out[0] - 2.4) < 1e-12);
  }

  {
    const std::vector<int> ts = dm::ddim_timesteps(1000, 20);
    check("ddim schedule 1000/20 spans 999..49 stride 50",
          ts.size() == 20 && ts.front() == 999 && ts.back() == 49 &&
              ts[1] == 949);
  }

  const fdb::ImageBuffer face = fdb::synth::make_face(42, 0, 96, 96);
  {
    bool ok = fdb::salt_pepper(face, 0.0, 7) == face;
    ok = ok && fdb::channel_clip(face, {0, 0, 0}) == face;
    ok = ok && fdb::down_up_scale(face, 1) == face;
    ok = ok && fdb::motion_blur(face, 1, 30.0) == face;
    fdb::DegradationSpec none;
    ok = ok && fdb::apply(face, none, 7) == face;
    check("identity family is bit-identical", ok);
  }

  {
    const fdb::DegradationSpec spec = fdb::sample_spec(
        fdb::DegradationKind::ScreenRecapture, 11);
    const bool ok =
        fdb::apply(face, spec, 11) == fdb::apply(face, spec, 11);
    check("operators deterministic under fixed seed", ok);
  }

  {
    // Mid-gray canvas: every replacement changes the pixel, so the changed
    // fraction is the replacement fraction.
    const fdb::ImageBuffer gray = fdb::ImageBuffer::filled(128, 128,
                                                           {128, 128, 128});
    const double p = 0.02;
    const fdb::ImageBuffer noisy = fdb::salt_pepper(gray, p, 99);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < gray.pixel_count(); ++i) {
      if (noisy.pixels[i * 3] != 128) ++changed;
    }
    const double n = static_cast<double>(gray.pixel_count());
    const double sigma = std::sqrt(n * p * (1.0 - p));
    const double lo = n * p - 5.0 * sigma;
    const double hi = n * p + 5.0 * sigma;
    check("salt-pepper fraction within 5 sigma",
          changed >= lo && changed <= hi,
          "changed=" + std::to_string(changed));
  }

  {
    const fdb::ImageBuffer gray = fdb::ImageBuffer::filled(64, 64,
                                                           {77, 77, 77});
    const bool ok = fdb::gaussian_blur(gray, 4.5) == gray &&
                    fdb::motion_blur(gray, 16, 45.0) == gray;
    check("blur kernels preserve constant images", ok);
  }

  {
    const fdb::EmbeddingVector a = {1.0, 2.0, 3.0};
    bool ok = std::abs(fdb::cosine_similarity(a, a) - 1.0) < 1e-12;
    std::map<std::string, fdb::EmbeddingVector> gallery = {
        {"alice", {1.0, 0.0}}, {"bob", {0.0, 1.0}}};
    const auto [who, sim] = fdb::identify({0.9, 0.1}, gallery, 0.5);
    ok = ok && who.has_value() && *who == "alice" && sim > 0.9;
    check("cosine and identification oracle", ok);
  }

  if (failures == 0) {
    std::cout << "selftest: all checks passed\n";
    return kExitOk;
  }
  std::cout << "selftest: " << failures << " check(s) failed\n";
  return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fdbench: seeded degradation and recognition benchmark"};
  app.require_subcommand(1);

  // ingest
  fs::path ingest_root;
  std::optional<fs::path> ingest_manifest, ingest_out;
  auto* ingest = app.add_subcommand(
      "ingest", "Validate a dataset layout or manifest");
  ingest->add_option("root", ingest_root, "dataset root directory")
      ->required();
  ingest->add_option("--manifest", ingest_manifest, "explicit manifest CSV");
  ingest->add_option("--out", ingest_out, "write the normalized manifest");

  // degrade
  DegradeArgs d;
  auto* degrade = app.add_subcommand(
      "degrade", "Apply one degradation to a single image");
  degrade->add_option("in", d.in, "input image")->required();
  degrade->add_option("out", d.out, "output image (.png/.jpg)")->required();
  degrade->add_option("--kind", d.kind_label, "degradation kind label");
  degrade->add_option("--spec", d.spec_json, "full spec as inline JSON");
  degrade->add_option("--seed", d.seed, "seed for stochastic stages");
  degrade->add_option("--cycles", d.cycles, "jpeg generations");
  degrade->add_option("--qualities", d.qualities, "jpeg quality per cycle")
      ->delimiter(',');
  degrade->add_option("--factor", d.factor, "down/up scale factor");
  degrade->add_option("--sigma", d.sigma, "gaussian sigma");
  degrade->add_option("--length", d.length, "motion blur length, px");
  degrade->add_option("--angle", d.angle, "motion blur angle, degrees");
  degrade->add_option("--p", d.p, "salt-pepper density");
  degrade->add_option("--deltas", d.deltas, "three channel deltas")
      ->delimiter(',');
  degrade->add_option("--grid-period", d.recap.grid_period);
  degrade->add_option("--moire-freq", d.recap.moire_freq);
  degrade->add_option("--moire-amp", d.recap.moire_amp);
  degrade->add_option("--reflect-strength", d.recap.reflect_strength);
  degrade->add_option("--recapture-quality", d.recap.recapture_quality);

  // run: every config key is overridable by a same-named flag.
  fs::path run_config_path;
  std::string run_manifest, run_kinds, run_params_mode, run_protocol;
  std::string run_enhance_cmd, run_embed_cmd, run_output_dir;
  std::uint64_t run_master_seed = 0;
  double run_threshold = 0.0, run_timeout_s = 0.0;
  int run_embed_dim = 0;
  auto* run = app.add_subcommand("run", "Run the full experiment");
  auto* run_config_opt =
      run->add_option("--config", run_config_path, "config file");
  auto* o_manifest = run->add_option("--manifest", run_manifest);
  auto* o_seed = run->add_option("--master_seed", run_master_seed);
  auto* o_threshold = run->add_option("--threshold", run_threshold);
  auto* o_kinds = run->add_option("--kinds", run_kinds,
                                  "comma list of kind labels, or 'all'");
  auto* o_pmode = run->add_option("--params_mode", run_params_mode,
                                  "sampled|sweep");
  auto* o_protocol = run->add_option("--protocol", run_protocol,
                                     "identify|verify");
  auto* o_enhance = run->add_option("--enhance_cmd", run_enhance_cmd);
  auto* o_embed = run->add_option("--embed_cmd", run_embed_cmd);
  auto* o_dim = run->add_option("--embed_dim", run_embed_dim);
  auto* o_timeout = run->add_option("--timeout_s", run_timeout_s);
  auto* o_outdir = run->add_option("--output_dir", run_output_dir);

  // report
  fs::path report_trials, report_out;
  std::uint64_t report_seed = 7;
  int report_iterations = 1000;
  auto* report = app.add_subcommand(
      "report", "Regenerate report files from a trials log");
  report->add_option("--trials", report_trials, "trials.jsonl")->required();
  report->add_option("--out", report_out, "output directory")->required();
  report->add_option("--seed", report_seed, "bootstrap seed");
  report->add_option("--iterations", report_iterations,
                     "bootstrap iterations");

  // roc
  fs::path roc_scores;
  std::optional<fs::path> roc_out;
  auto* roc = app.add_subcommand(
      "roc", "Select a threshold from a label,score file");
  roc->add_option("scores", roc_scores, "lines of genuine|impostor,score")
      ->required();
  roc->add_option("--out", roc_out, "write threshold,tpr,fpr CSV");

  auto* selftest = app.add_subcommand(
      "selftest", "Run the built-in invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return kExitValidation;
  }

  try {
    if (ingest->parsed()) {
      return cmd_ingest(ingest_root, ingest_manifest, ingest_out);
    }
    if (degrade->parsed()) return cmd_degrade(d);
    if (run->parsed()) {
      fdb::ExperimentConfig config;
      if (*run_config_opt) config = fdb::load_config(run_config_path);
      if (*o_manifest) config.manifest = run_manifest;
      if (*o_seed) config.master_seed = run_master_seed;
      if (*o_threshold) config.threshold = run_threshold;
      if (*o_kinds) config.kinds = parse_kinds_flag(run_kinds);
      if (*o_pmode) {
        if (run_params_mode == "sampled") {
          config.params_mode = fdb::ParamsMode::sampled;
        } else if (run_params_mode == "sweep") {
          config.params_mode = fdb::ParamsMode::sweep;
        } else {
          throw fdb::ValidationError("params_mode must be sampled or sweep");
        }
      }
      if (*o_protocol) {
        if (run_protocol == "identify") {
          config.protocol = fdb::Protocol::identify;
        } else if (run_protocol == "verify") {
          config.protocol = fdb::Protocol::verify;
        } else {
          throw fdb::ValidationError("protocol must be identify or verify");
        }
      }
      if (*o_enhance) config.backends.enhance_cmd = run_enhance_cmd;
      if (*o_embed) config.backends.embed_cmd = run_embed_cmd;
      if (*o_dim) config.backends.embed_dim = run_embed_dim;
      if (*o_timeout) config.backends.timeout_s = run_timeout_s;
      if (*o_outdir) config.output_dir = run_output_dir;
      fdb::apply_env_overrides(config);
      return cmd_run(config);
    }
    if (report->parsed()) {
      return cmd_report(report_trials, report_out, report_seed,
                        report_iterations);
    }
    if (roc->parsed()) return cmd_roc(roc_scores, roc_out);
    if (selftest->parsed()) return cmd_selftest();
  } catch (const fdb::BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const fdb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
