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

#include "fdb/harness.hpp"

namespace fs = std::filesystem;

namespace fdb {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

Seed parse_seed(const std::string& v) {
  try {
    std::size_t pos = 0;
    const Seed s = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return s;
  } catch (const std::exception&) {
    throw ValidationError("master_seed must be an unsigned integer, got '" +
                          v + "'");
  }
}

std::vector<DegradationKind> parse_kinds(const std::string& v) {
  std::vector<DegradationKind> kinds;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (item == "all") {
      return {kAllKinds.begin(), kAllKinds.end()};
    }
    kinds.push_back(kind_from_label(item));
  }
  if (kinds.empty()) throw ValidationError("kinds must not be empty");
  return kinds;
}

void set_key(ExperimentConfig& c, const std::string& key,
             const std::string& value, const fs::path& base) {
  const auto resolve = [&base](const std::string& p) {
    fs::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  if (key == "manifest") {
    c.manifest = resolve(value);
  } else if (key == "master_seed") {
    c.master_seed = parse_seed(value);
  } else if (key == "threshold") {
    try {
      c.threshold = std::stod(value);
    } catch (const std::exception&) {
      throw ValidationError("threshold must be a number, got '" + value + "'");
    }
  } else if (key == "kinds") {
    c.kinds = parse_kinds(value);
  } else if (key == "params_mode") {
    if (value == "sampled") {
      c.params_mode = ParamsMode::sampled;
    } else if (value == "sweep") {
      c.params_mode = ParamsMode::sweep;
    } else {
      throw ValidationError("params_mode must be sampled or sweep");
    }
  } else if (key == "protocol") {
    if (value == "identify") {
      c.protocol = Protocol::identify;
    } else if (value == "verify") {
      c.protocol = Protocol::verify;
    } else {
      throw ValidationError("protocol must be identify or verify");
    }
  } else if (key == "enhance_cmd") {
    c.backends.enhance_cmd = value;
  } else if (key == "embed_cmd") {
    c.backends.embed_cmd = value;
  } else if (key == "embed_dim") {
    try {
      c.backends.embed_dim = std::stoi(value);
    } catch (const std::exception&) {
      throw ValidationError("embed_dim must be an integer");
    }
  } else if (key == "timeout_s") {
    try {
      c.backends.timeout_s = std::stod(value);
    } catch (const std::exception&) {
      throw ValidationError("timeout_s must be a number");
    }
  } else if (key == "output_dir") {
    c.output_dir = resolve(value);
  } else {
    throw ValidationError("unknown config key '" + key + "'");
  }
}

void check(const ExperimentConfig& c) {
  if (c.manifest.empty()) throw ValidationError("config needs a manifest");
  if (!(c.threshold >= -1.0 && c.threshold <= 1.0)) {
    throw ValidationError("threshold must be in [-1,1]");
  }
  if (c.backends.embed_dim < 1) {
    throw ValidationError("embed_dim must be >= 1");
  }
  if (!(c.backends.timeout_s > 0.0)) {
    throw ValidationError("timeout_s must be > 0");
  }
}

}  // namespace

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const fs::path base = path.has_parent_path() ? path.parent_path() : ".";

  ExperimentConfig c;
  const std::string trimmed = trim(text);
  if (!trimmed.empty() && trimmed.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("config JSON malformed: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) {
      std::string v;
      if (value.is_string()) {
        v = value.get<std::string>();
      } else if (value.is_array()) {
        // kinds may arrive as a JSON list of labels.
        std::string joined;
        for (const auto& item : value) {
          if (!joined.empty()) joined += ",";
          joined += item.get<std::string>();
        }
        v = joined;
      } else {
        v = value.dump();
      }
      set_key(c, key, v, base);
    }
  } else {
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
      ++lineno;
      line = trim(line);
      if (line.empty() || line.front() == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ValidationError("config line " + std::to_string(lineno) +
                              " is not key=value");
      }
      set_key(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), base);
    }
  }
  check(c);
  return c;
}

void apply_env_overrides(ExperimentConfig& config) {
  if (const char* env = std::getenv("FDB_MASTER_SEED")) {
    config.master_seed = parse_seed(env);
  }
}

}  // namespace fdb
