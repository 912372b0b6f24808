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

// Writes a deterministic synthetic-face dataset in the person-per-directory
// layout the harness auto-pairs (a_ref.png = reference, b_probe.png = probe).

#include <iostream>

#include <CLI11.hpp>

#include "fdb/errors.hpp"
#include "fdb/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mkfaces: generate a synthetic identity fixture"};
  std::filesystem::path out = "fixture";
  int identities = 10;
  std::uint64_t seed = 7;
  int width = 128, height = 128;
  app.add_option("--out", out, "output root directory");
  app.add_option("--identities", identities, "number of identities");
  app.add_option("--seed", seed, "fixture seed");
  app.add_option("--width", width);
  app.add_option("--height", height);
  CLI11_PARSE(app, argc, argv);

  try {
    fdb::synth::write_fixture(out, identities, seed, width, height);
  } catch (const fdb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << "wrote " << identities << " identities to " << out.string()
            << "\n";
  return 0;
}
