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

#include "fdb/image.hpp"
#include "fdb/rng.hpp"

namespace fdb::synth {

// Deterministic synthetic "face": skin-tone gradient, eyes, nose, mouth,
// with seeded geometry jitter so identities are mutually distinguishable by
// the mock embedder. `variant` perturbs pose/lighting within an identity.
ImageBuffer make_face(Seed identity_seed, int variant, int width = 128,
                      int height = 128);

// Person-per-directory fixture: root/person_NN/{a_ref.png,b_probe.png}.
void write_fixture(const std::filesystem::path& root, int identities,
                   Seed seed, int width = 128, int height = 128);

}  // namespace fdb::synth
