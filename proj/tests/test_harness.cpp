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

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "fdb/codec.hpp"
#include "fdb/errors.hpp"
#include "fdb/harness.hpp"
#include "fdb/synth.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_png(const fs::path& p, int w, int h,
               std::array<std::uint8_t, 3> rgb) {
  fdb::save_image(fdb::ImageBuffer::filled(w, h, rgb), p,
                  fdb::ImageFormat::png);
}

// root/person/{a_ref,b_probe}.png with distinct flat colors. Flat images
// suit manifest tests; embedding tests use synth faces instead.
void add_person(const fs::path& root, const std::string& name,
                std::uint8_t shade) {
  fs::create_directories(root / name);
  write_png(root / name / "a_ref.png", 32, 32, {shade, 0, 0});
  write_png(root / name / "b_probe.png", 32, 32, {0, shade, 0});
}

}  // namespace

TEST_CASE("substitute_template quotes paths for the shell") {
  const std::string cmd = fdb::detail::substitute_template(
      "run {in} --out {out} --again {in}", "/tmp/a b.png",
      fs::path("/tmp/out.png"));
  CHECK(cmd == "run '/tmp/a b.png' --out '/tmp/out.png' --again '/tmp/a b.png'");

  const std::string quoted = fdb::detail::substitute_template(
      "cat {in}", "/tmp/it's.png", std::nullopt);
  CHECK(quoted == "cat '/tmp/it'\\''s.png'");

  const std::string no_out =
      fdb::detail::substitute_template("cat {in} {out}", "/a", std::nullopt);
  CHECK(no_out == "cat '/a' {out}");
}

TEST_CASE("run_command captures output, exit codes and timeouts") {
  const auto echo = fdb::detail::run_command("echo hello", 5.0);
  CHECK(echo.exit_code == 0);
  CHECK(echo.stdout_text == "hello\n");
  CHECK_FALSE(echo.timed_out);

  const auto failing =
      fdb::detail::run_command("echo oops >&2; exit 3", 5.0);
  CHECK(failing.exit_code == 3);
  CHECK(failing.stderr_excerpt == "oops\n");

  const auto slow = fdb::detail::run_command("sleep 5", 0.2);
  CHECK(slow.timed_out);

  const auto capped = fdb::detail::run_command(
      "head -c 100000 /dev/zero | tr '\\0' 'x'", 5.0, 1024);
  CHECK(capped.exit_code == 0);
  CHECK(capped.stdout_text.size() == 1024);
}

TEST_CASE("ingest auto-pairs person directories") {
  oracle::TempDir tmp;
  const fs::path root = tmp.path() / "data";
  add_person(root, "person_01", 100);
  add_person(root, "person_02", 150);
  fs::create_directories(root / "person_03");
  write_png(root / "person_03" / "only.png", 32, 32, {9, 9, 9});
  write_text(root / "person_03" / "notes.txt", "not an image");

  const fdb::DatasetManifest m = fdb::ingest_dataset(root);
  REQUIRE(m.entries.size() == 2);
  CHECK(m.skipped == 1);
  CHECK(m.entries[0].identity_id == "person_01");
  CHECK(m.entries[1].identity_id == "person_02");
  // Lexicographic rule: first image enrolls, second probes.
  CHECK(m.entries[0].reference_path.filename() == "a_ref.png");
  CHECK(m.entries[0].probe_path.filename() == "b_probe.png");

  SUBCASE("missing root and empty datasets") {
    CHECK_THROWS_AS(fdb::ingest_dataset(tmp.path() / "nope"), fdb::IoError);
    const fs::path empty = tmp.path() / "empty";
    fs::create_directories(empty / "person_solo");
    write_png(empty / "person_solo" / "one.png", 32, 32, {1, 2, 3});
    CHECK_THROWS_AS(fdb::ingest_dataset(empty), fdb::EmptyDataset);
  }
}

TEST_CASE("manifest CSV round-trips") {
  oracle::TempDir tmp;
  const fs::path root = tmp.path() / "data";
  add_person(root, "person_01", 100);
  add_person(root, "person_02", 150);
  const fdb::DatasetManifest m = fdb::ingest_dataset(root);

  const fs::path csv = tmp.path() / "manifest.csv";
  fdb::write_manifest_csv(m, csv);
  const std::string text = read_bytes(csv);
  CHECK(text.rfind("identity_id,probe_path,reference_path\n", 0) == 0);

  const fdb::DatasetManifest back = fdb::read_manifest_csv(csv);
  REQUIRE(back.entries.size() == m.entries.size());
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    CHECK(back.entries[i].identity_id == m.entries[i].identity_id);
    CHECK(fs::weakly_canonical(back.entries[i].probe_path) ==
          fs::weakly_canonical(m.entries[i].probe_path));
    CHECK(fs::weakly_canonical(back.entries[i].reference_path) ==
          fs::weakly_canonical(m.entries[i].reference_path));
  }
}

TEST_CASE("manifest CSV rejects malformed and inconsistent rows") {
  oracle::TempDir tmp;
  const fs::path root = tmp.path();
  write_png(root / "x.png", 32, 32, {1, 1, 1});
  write_png(root / "y.png", 32, 32, {2, 2, 2});
  const std::string header = "identity_id,probe_path,reference_path\n";

  const auto expect = [&root](const std::string& body, const char* name) {
    const fs::path p = root / name;
    write_text(p, body);
    return p;
  };

  CHECK_THROWS_AS(fdb::read_manifest_csv(root / "missing.csv"), fdb::IoError);
  CHECK_THROWS_AS(
      fdb::read_manifest_csv(expect("id,probe,ref\np,x.png,y.png\n", "h.csv")),
      fdb::ValidationError);
  CHECK_THROWS_AS(fdb::read_manifest_csv(expect("", "empty.csv")),
                  fdb::ValidationError);
  CHECK_THROWS_AS(fdb::read_manifest_csv(expect(header, "noid.csv")),
                  fdb::EmptyDataset);
  CHECK_THROWS_AS(
      fdb::read_manifest_csv(expect(header + "p,x.png\n", "fields.csv")),
      fdb::ValidationError);
  CHECK_THROWS_AS(
      fdb::read_manifest_csv(expect(header + "p,x.png,x.png\n", "same.csv")),
      fdb::ValidationError);
  CHECK_THROWS_AS(
      fdb::read_manifest_csv(expect(
          header + "p,x.png,y.png\np,y.png,x.png\n", "dup.csv")),
      fdb::ValidationError);
  CHECK_THROWS_AS(
      fdb::read_manifest_csv(expect(header + ",x.png,y.png\n", "anon.csv")),
      fdb::ValidationError);
  CHECK_THROWS_AS(
      fdb::read_manifest_csv(expect(header + "p,gone.png,y.png\n", "gone.csv")),
      fdb::ValidationError);
}

TEST_CASE("config files parse both syntaxes and reject unknown keys") {
  oracle::TempDir tmp;
  const fs::path root = tmp.path() / "data";
  add_person(root, "person_01", 100);
  const fdb::DatasetManifest m = fdb::ingest_dataset(root);
  fdb::write_manifest_csv(m, tmp.path() / "manifest.csv");

  SUBCASE("key=value") {
    const fs::path cfg = tmp.path() / "run.cfg";
    write_text(cfg,
               "# comment\n"
               "manifest = manifest.csv\n"
               "master_seed = 99\n"
               "threshold = 0.5\n"
               "kinds = gaussian_blur, none\n"
               "params_mode = sweep\n"
               "protocol = verify\n"
               "enhance_cmd = identity\n"
               "embed_cmd = mock\n"
               "embed_dim = 128\n"
               "timeout_s = 12.5\n"
               "output_dir = out\n");
    const fdb::ExperimentConfig c = fdb::load_config(cfg);
    CHECK(c.manifest == tmp.path() / "manifest.csv");
    CHECK(c.master_seed == 99);
    CHECK(c.threshold == doctest::Approx(0.5));
    REQUIRE(c.kinds.size() == 2);
    CHECK(c.kinds[0] == fdb::DegradationKind::GaussianBlur);
    CHECK(c.kinds[1] == fdb::DegradationKind::None);
    CHECK(c.params_mode == fdb::ParamsMode::sweep);
    CHECK(c.protocol == fdb::Protocol::verify);
    CHECK(c.backends.embed_dim == 128);
    CHECK(c.backends.timeout_s == doctest::Approx(12.5));
    CHECK(c.output_dir == tmp.path() / "out");
  }
  SUBCASE("JSON") {
    const fs::path cfg = tmp.path() / "run.json";
    write_text(cfg,
               "{\"manifest\": \"manifest.csv\", \"master_seed\": 7,"
               " \"kinds\": [\"salt_pepper\"], \"threshold\": 0.25}");
    const fdb::ExperimentConfig c = fdb::load_config(cfg);
    CHECK(c.master_seed == 7);
    CHECK(c.threshold == doctest::Approx(0.25));
    REQUIRE(c.kinds.size() == 1);
    CHECK(c.kinds[0] == fdb::DegradationKind::SaltPepper);
  }
  SUBCASE("kinds = all expands to the full set") {
    const fs::path cfg = tmp.path() / "all.cfg";
    write_text(cfg, "manifest = manifest.csv\nkinds = all\n");
    CHECK(fdb::load_config(cfg).kinds.size() == 8);
  }
  SUBCASE("rejections") {
    const auto bad = [&tmp](const std::string& body) {
      const fs::path p = tmp.path() / "bad.cfg";
      write_text(p, body);
      return p;
    };
    CHECK_THROWS_AS(fdb::load_config(tmp.path() / "missing.cfg"),
                    fdb::IoError);
    CHECK_THROWS_AS(fdb::load_config(bad("manifest = m.csv\ncolour = red\n")),
                    fdb::ValidationError);
    CHECK_THROWS_AS(fdb::load_config(bad("threshold = 0.5\n")),
                    fdb::ValidationError);  // no manifest
    CHECK_THROWS_AS(
        fdb::load_config(bad("manifest = m.csv\nthreshold = 1.5\n")),
        fdb::ValidationError);
    CHECK_THROWS_AS(
        fdb::load_config(bad("manifest = m.csv\nmaster_seed = twelve\n")),
        fdb::ValidationError);
    CHECK_THROWS_AS(fdb::load_config(bad("manifest = m.csv\nno equals\n")),
                    fdb::ValidationError);
    CHECK_THROWS_AS(fdb::load_config(bad("{\"manifest\": }")),
                    fdb::ValidationError);
    CHECK_THROWS_AS(
        fdb::load_config(bad("manifest = m.csv\nkinds = sepia\n")),
        fdb::InvalidParam);
  }
  SUBCASE("FDB_MASTER_SEED wins over the file") {
    const fs::path cfg = tmp.path() / "env.cfg";
    write_text(cfg, "manifest = manifest.csv\nmaster_seed = 1\n");
    fdb::ExperimentConfig c = fdb::load_config(cfg);
    setenv("FDB_MASTER_SEED", "424242", 1);
    fdb::apply_env_overrides(c);
    unsetenv("FDB_MASTER_SEED");
    CHECK(c.master_seed == 424242);

    setenv("FDB_MASTER_SEED", "not-a-seed", 1);
    CHECK_THROWS_AS(fdb::apply_env_overrides(c), fdb::ValidationError);
    unsetenv("FDB_MASTER_SEED");
  }
}

TEST_CASE("trial records round-trip through JSON") {
  fdb::TrialRecord t;
  t.identity_id = "person_03";
  t.probe_image_id = "person_03/b_probe.png";
  t.reference_image_id = "person_03/a_ref.png";
  t.condition = fdb::Condition::enhanced;
  t.spec = fdb::sample_spec(fdb::DegradationKind::MotionBlur, 555);
  t.similarity = 0.8125;
  t.predicted_identity = "person_03";
  t.accepted = true;
  t.correct = true;

  const fdb::TrialRecord back = fdb::trial_from_json(fdb::trial_to_json(t));
  CHECK(back.identity_id == t.identity_id);
  CHECK(back.probe_image_id == t.probe_image_id);
  CHECK(back.reference_image_id == t.reference_image_id);
  CHECK(back.condition == t.condition);
  CHECK(back.spec == t.spec);
  CHECK(back.similarity == t.similarity);
  CHECK(back.predicted_identity == t.predicted_identity);
  CHECK(back.accepted == t.accepted);
  CHECK(back.correct == t.correct);
  CHECK_FALSE(back.error.has_value());

  SUBCASE("rejection and error fields survive") {
    t.correct = false;
    t.accepted = false;
    t.predicted_identity = std::nullopt;
    t.error = "embed backend exited 9";
    const fdb::TrialRecord e = fdb::trial_from_json(fdb::trial_to_json(t));
    CHECK_FALSE(e.predicted_identity.has_value());
    REQUIRE(e.error.has_value());
    CHECK(*e.error == "embed backend exited 9");
  }
  SUBCASE("inconsistent records are rejected") {
    nlohmann::json j = fdb::trial_to_json(t);
    j["accepted"] = false;  // correct without acceptance
    CHECK_THROWS_AS(fdb::trial_from_json(j), fdb::ValidationError);
    nlohmann::json j2 = fdb::trial_to_json(t);
    j2["predicted_identity"] = "person_99";
    CHECK_THROWS_AS(fdb::trial_from_json(j2), fdb::ValidationError);
    nlohmann::json j3 = fdb::trial_to_json(t);
    j3.erase("similarity");
    CHECK_THROWS_AS(fdb::trial_from_json(j3), fdb::ValidationError);
  }
  SUBCASE("read_trials tolerates blank lines only") {
    oracle::TempDir tmp;
    const fs::path p = tmp.path() / "trials.jsonl";
    t.correct = false;
    t.accepted = false;
    t.predicted_identity = std::nullopt;
    write_text(p, fdb::trial_to_json(t).dump() + "\n\n" +
                      fdb::trial_to_json(t).dump() + "\n");
    CHECK(fdb::read_trials(p).size() == 2);
    write_text(p, "not json\n");
    CHECK_THROWS_AS(fdb::read_trials(p), fdb::ValidationError);
    CHECK_THROWS_AS(fdb::read_trials(tmp.path() / "gone.jsonl"),
                    fdb::IoError);
  }
}

TEST_CASE("enhance backends") {
  oracle::TempDir tmp;
  const fs::path in = tmp.path() / "in.png";
  fdb::save_image(fdb::synth::make_face(77, 0, 64, 64), in,
                  fdb::ImageFormat::png);
  const fs::path out = tmp.path() / "out.png";
  fdb::BackendConfig backend;
  backend.timeout_s = 5.0;

  SUBCASE("identity copies the file byte for byte") {
    fdb::enhance(in, backend, out);
    CHECK(read_bytes(out) == read_bytes(in));
  }
  SUBCASE("command backend with cp behaves like identity") {
    backend.enhance_cmd = "cp {in} {out}";
    fdb::enhance(in, backend, out);
    CHECK(read_bytes(out) == read_bytes(in));
  }
  SUBCASE("nonzero exit") {
    backend.enhance_cmd = "false {in} {out}";
    CHECK_THROWS_AS(fdb::enhance(in, backend, out), fdb::BackendError);
  }
  SUBCASE("timeout kills the backend") {
    backend.enhance_cmd = "cp {in} {out} && sleep 5";
    backend.timeout_s = 0.2;
    CHECK_THROWS_AS(fdb::enhance(in, backend, out), fdb::BackendTimeout);
  }
  SUBCASE("no output file") {
    backend.enhance_cmd = "true {in} {out}";
    CHECK_THROWS_AS(fdb::enhance(in, backend, out), fdb::BackendError);
  }
  SUBCASE("undecodable output") {
    backend.enhance_cmd = "cat {in} > /dev/null && echo junk > {out}";
    CHECK_THROWS_AS(fdb::enhance(in, backend, out), fdb::BackendError);
  }
  SUBCASE("stale output does not satisfy a failing backend") {
    write_png(out, 64, 64, {5, 5, 5});
    backend.enhance_cmd = "false {in} {out}";
    CHECK_THROWS_AS(fdb::enhance(in, backend, out), fdb::BackendError);
  }
  SUBCASE("dimension change is rejected") {
    const fs::path wrong = tmp.path() / "wrong.png";
    write_png(wrong, 32, 32, {8, 8, 8});
    backend.enhance_cmd =
        "true {in} && cp '" + wrong.string() + "' {out}";
    CHECK_THROWS_AS(fdb::enhance(in, backend, out), fdb::BackendError);
  }
  SUBCASE("template must mention both placeholders") {
    backend.enhance_cmd = "upscale --fast";
    CHECK_THROWS_AS(fdb::enhance(in, backend, out), fdb::ValidationError);
    backend.enhance_cmd = "upscale {in}";
    CHECK_THROWS_AS(fdb::enhance(in, backend, out), fdb::ValidationError);
  }
  SUBCASE("missing input") {
    CHECK_THROWS_AS(fdb::enhance(tmp.path() / "gone.png", backend, out),
                    fdb::IoError);
  }
}

TEST_CASE("embed backends") {
  oracle::TempDir tmp;
  const fs::path face = tmp.path() / "face.png";
  fdb::save_image(fdb::synth::make_face(77, 0, 64, 64), face,
                  fdb::ImageFormat::png);
  fdb::BackendConfig backend;
  backend.timeout_s = 5.0;

  SUBCASE("mock is unit-norm and deterministic") {
    const fdb::EmbeddingVector v = fdb::embed(face, backend);
    REQUIRE(v.size() == 256);
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fdb::embed(face, backend) == v);

    const fs::path copy = tmp.path() / "copy.png";
    fs::copy_file(face, copy);
    CHECK(fdb::cosine_similarity(fdb::embed(copy, backend), v) ==
          doctest::Approx(1.0));

    const fs::path other = tmp.path() / "other.png";
    fdb::save_image(fdb::synth::make_face(1234, 0, 64, 64), other,
                    fdb::ImageFormat::png);
    CHECK(fdb::cosine_similarity(fdb::embed(other, backend), v) < 0.999);
  }
  SUBCASE("flat image has no direction") {
    const fs::path flat = tmp.path() / "flat.png";
    write_png(flat, 32, 32, {128, 128, 128});
    CHECK_THROWS_AS(fdb::embed(flat, backend), fdb::DegenerateInput);
  }
  SUBCASE("command backend parses a JSON array") {
    backend.embed_cmd = "cat {in} > /dev/null && echo '[1, 2, 2.5, -1]'";
    backend.embed_dim = 4;
    const fdb::EmbeddingVector v = fdb::embed(face, backend);
    CHECK(v == fdb::EmbeddingVector{1.0, 2.0, 2.5, -1.0});
  }
  SUBCASE("command backend failures") {
    backend.embed_dim = 4;
    backend.embed_cmd = "true {in} && echo '[1, 2, 3]'";
    CHECK_THROWS_AS(fdb::embed(face, backend), fdb::BackendError);
    backend.embed_cmd = "true {in} && echo 'not json'";
    CHECK_THROWS_AS(fdb::embed(face, backend), fdb::BackendError);
    backend.embed_cmd = "true {in} && echo '[1, 2, \"x\", 4]'";
    CHECK_THROWS_AS(fdb::embed(face, backend), fdb::BackendError);
    backend.embed_cmd = "true {in} && echo '{\"v\": 1}'";
    CHECK_THROWS_AS(fdb::embed(face, backend), fdb::BackendError);
    backend.embed_cmd = "exit 7 # {in}";
    CHECK_THROWS_AS(fdb::embed(face, backend), fdb::BackendError);
    backend.embed_cmd = "sleep 5 # {in}";
    backend.timeout_s = 0.2;
    CHECK_THROWS_AS(fdb::embed(face, backend), fdb::BackendTimeout);
    backend.timeout_s = 5.0;
    backend.embed_cmd = "echo '[1,2,3,4]'";  // no {in}
    CHECK_THROWS_AS(fdb::embed(face, backend), fdb::ValidationError);
  }
}

TEST_CASE("run_experiment end to end with identity and mock backends") {
  oracle::TempDir tmp;
  const fs::path root = tmp.path() / "faces";
  fdb::synth::write_fixture(root, 3, 21, 64, 64);

  fdb::ExperimentConfig config;
  config.manifest = root;
  config.master_seed = 5;
  config.threshold = 0.5;
  config.kinds = {fdb::DegradationKind::GaussianBlur,
                  fdb::DegradationKind::None};
  config.output_dir = tmp.path() / "out";

  const fdb::RunStats stats = fdb::run_experiment(config);
  CHECK(stats.planned == 12);  // 3 identities x 2 kinds x 2 conditions
  CHECK(stats.completed == 12);
  CHECK(stats.resumed == 0);
  CHECK(stats.errors == 0);

  const fs::path trials_path = config.output_dir / "trials.jsonl";
  const std::vector<fdb::TrialRecord> trials = fdb::read_trials(trials_path);
  REQUIRE(trials.size() == 12);
  CHECK(fs::is_regular_file(config.output_dir / "gallery.json"));

  // Identity enhancement sees the identical degraded file, so each pair of
  // records must agree exactly.
  for (std::size_t i = 0; i < trials.size(); i += 2) {
    CHECK(trials[i].condition == fdb::Condition::degraded);
    CHECK(trials[i + 1].condition == fdb::Condition::enhanced);
    CHECK(trials[i].identity_id == trials[i + 1].identity_id);
    CHECK(trials[i].spec == trials[i + 1].spec);
    CHECK(trials[i].similarity == trials[i + 1].similarity);
    CHECK(trials[i].correct == trials[i + 1].correct);
  }

  const std::string first_bytes = read_bytes(trials_path);

  SUBCASE("reruns are byte-identical") {
    fs::remove_all(config.output_dir);
    const fdb::RunStats again = fdb::run_experiment(config);
    CHECK(again.completed == 12);
    CHECK(read_bytes(trials_path) == first_bytes);
  }
  SUBCASE("a torn tail is truncated and the run resumes") {
    // Keep the first 5 whole records, then simulate a crash mid-write.
    std::size_t offset = 0;
    for (int n = 0; n < 5; ++n) offset = first_bytes.find('\n', offset) + 1;
    write_text(trials_path,
               first_bytes.substr(0, offset) + "{\"identity_id\": \"per");
    const fdb::RunStats resumed = fdb::run_experiment(config);
    CHECK(resumed.planned == 12);
    CHECK(resumed.resumed == 5);
    CHECK(resumed.completed == 7);
    CHECK(read_bytes(trials_path) == first_bytes);
  }
  SUBCASE("a complete run resumes to a no-op") {
    const fdb::RunStats resumed = fdb::run_experiment(config);
    CHECK(resumed.resumed == 12);
    CHECK(resumed.completed == 0);
    CHECK(read_bytes(trials_path) == first_bytes);
  }
  SUBCASE("sweep mode enumerates the sigma grid") {
    fdb::ExperimentConfig sweep = config;
    sweep.kinds = {fdb::DegradationKind::GaussianBlur};
    sweep.params_mode = fdb::ParamsMode::sweep;
    sweep.output_dir = tmp.path() / "sweep_out";
    const fdb::RunStats s = fdb::run_experiment(sweep);
    CHECK(s.planned == 30);  // 3 identities x 5 sigmas x 2 conditions
    CHECK(s.completed == 30);
    const auto sweep_trials =
        fdb::read_trials(sweep.output_dir / "trials.jsonl");
    CHECK(sweep_trials.size() == 30);
  }
  SUBCASE("a misconfigured backend fails preflight before any trial") {
    fdb::ExperimentConfig broken = config;
    broken.backends.enhance_cmd = "false {in} {out}";
    broken.output_dir = tmp.path() / "broken_out";
    CHECK_THROWS_AS(fdb::run_experiment(broken), fdb::BackendError);
    CHECK_FALSE(fs::exists(broken.output_dir / "trials.jsonl"));
  }
}

TEST_CASE("verify protocol scores probe against own reference only") {
  oracle::TempDir tmp;
  const fs::path root = tmp.path() / "faces";
  fdb::synth::write_fixture(root, 2, 31, 64, 64);

  fdb::ExperimentConfig config;
  config.manifest = root;
  config.master_seed = 9;
  config.threshold = 0.5;
  config.kinds = {fdb::DegradationKind::None};
  config.protocol = fdb::Protocol::verify;
  config.output_dir = tmp.path() / "out";

  const fdb::RunStats stats = fdb::run_experiment(config);
  CHECK(stats.completed == 4);
  for (const fdb::TrialRecord& t : fdb::read_trials(config.output_dir /
                                                    "trials.jsonl")) {
    if (t.accepted) {
      REQUIRE(t.predicted_identity.has_value());
      CHECK(*t.predicted_identity == t.identity_id);
      CHECK(t.correct);
    }
  }
}

TEST_CASE("write_report renders tables from the trials file") {
  oracle::TempDir tmp;
  const fs::path root = tmp.path() / "faces";
  fdb::synth::write_fixture(root, 3, 21, 64, 64);

  fdb::ExperimentConfig config;
  config.manifest = root;
  config.master_seed = 5;
  config.threshold = 0.5;
  config.kinds = {fdb::DegradationKind::GaussianBlur,
                  fdb::DegradationKind::None};
  config.output_dir = tmp.path() / "out";
  fdb::run_experiment(config);

  const fs::path report_dir = tmp.path() / "report";
  fdb::write_report(config.output_dir / "trials.jsonl", report_dir, 7, 200);
  CHECK(fs::is_regular_file(report_dir / "report.md"));
  CHECK(fs::is_regular_file(report_dir / "table1.csv"));
  CHECK(fs::is_regular_file(report_dir / "table2.csv"));
  CHECK(fs::is_regular_file(report_dir / "plotdata.csv"));

  const std::string md = read_bytes(report_dir / "report.md");
  CHECK(md.find("gaussian_blur") != std::string::npos);
  CHECK(md.find("accuracy") != std::string::npos);
  const std::string t2 = read_bytes(report_dir / "table2.csv");
  CHECK(t2.find("gaussian_blur") != std::string::npos);
  CHECK(t2.find("overall") != std::string::npos);

  SUBCASE("empty trials file") {
    const fs::path empty = tmp.path() / "none.jsonl";
    write_text(empty, "");
    CHECK_THROWS_AS(fdb::write_report(empty, tmp.path() / "r2"),
                    fdb::EmptyDataset);
  }
}
