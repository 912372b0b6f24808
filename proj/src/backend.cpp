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

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstring>

#include "fdb/codec.hpp"
#include "fdb/harness.hpp"
#include "fdb/resample.hpp"

namespace fs = std::filesystem;

namespace fdb {
namespace detail {
namespace {

std::string shell_quote(const fs::path& p) {
  std::string s = p.string();
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += "'";
  return out;
}

void replace_all(std::string& s, const std::string& from,
                 const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace

std::string substitute_template(const std::string& templ, const fs::path& in,
                                const std::optional<fs::path>& out) {
  std::string cmd = templ;
  replace_all(cmd, "{in}", shell_quote(in));
  if (out.has_value()) replace_all(cmd, "{out}", shell_quote(*out));
  return cmd;
}

CommandResult run_command(const std::string& command, double timeout_s,
                          std::size_t max_capture) {
  int out_pipe[2];
  int err_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0) {
    throw BackendError("pipe() failed: " + std::string(std::strerror(errno)));
  }

  const pid_t pid = fork();
  if (pid < 0) {
    throw BackendError("fork() failed: " + std::string(std::strerror(errno)));
  }
  if (pid == 0) {
    // Child: own process group so a timeout can kill the whole tree.
    setpgid(0, 0);
    const int devnull = open("/dev/null", O_RDONLY);
    if (devnull >= 0) dup2(devnull, STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(),
          static_cast<char*>(nullptr));
    _exit(127);
  }

  setpgid(pid, pid);  // Also from the parent; whichever runs first wins.
  close(out_pipe[1]);
  close(err_pipe[1]);

  CommandResult result;
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(timeout_s);
  struct pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
  std::string* const sinks[2] = {&result.stdout_text, &result.stderr_excerpt};
  int open_fds = 2;
  char buf[4096];
  bool deadline_hit = false;

  while (open_fds > 0) {
    const auto remaining = deadline - std::chrono::steady_clock::now();
    const int ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(remaining)
            .count());
    if (ms <= 0) {
      deadline_hit = true;
      break;
    }
    const int rc = poll(fds, 2, ms);
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (rc == 0) {
      deadline_hit = true;
      break;
    }
    for (int i = 0; i < 2; ++i) {
      if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP))) continue;
      const ssize_t n = read(fds[i].fd, buf, sizeof(buf));
      if (n > 0) {
        // Keep draining past the cap so the child never blocks on a full
        // pipe; just stop recording.
        if (sinks[i]->size() < max_capture) {
          sinks[i]->append(buf,
                           std::min<std::size_t>(static_cast<std::size_t>(n),
                                                 max_capture -
                                                     sinks[i]->size()));
        }
      } else {
        close(fds[i].fd);
        fds[i].fd = -1;
        --open_fds;
      }
    }
  }

  int status = 0;
  while (true) {
    const pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0) {
      status = 0;
      break;
    }
    if (deadline_hit || std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      result.timed_out = true;
      break;
    }
    usleep(2000);
  }

  for (int i = 0; i < 2; ++i) {
    if (fds[i].fd >= 0) {
      // Drain whatever arrived before the kill.
      ssize_t n;
      while ((n = read(fds[i].fd, buf, sizeof(buf))) > 0) {
        if (sinks[i]->size() < max_capture) {
          sinks[i]->append(buf,
                           std::min<std::size_t>(static_cast<std::size_t>(n),
                                                 max_capture -
                                                     sinks[i]->size()));
        }
      }
      close(fds[i].fd);
    }
  }

  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.exit_code = 128 + WTERMSIG(status);
  }
  return result;
}

}  // namespace detail

namespace {

std::string excerpt(const std::string& s, std::size_t n = 300) {
  std::string e = s.substr(0, n);
  // Control characters would garble the jsonl error field display.
  for (char& c : e) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  }
  return e;
}

void require_placeholders(const std::string& templ, bool needs_out) {
  if (templ.find("{in}") == std::string::npos) {
    throw ValidationError("backend template is missing {in}: " + templ);
  }
  if (needs_out && templ.find("{out}") == std::string::npos) {
    throw ValidationError("backend template is missing {out}: " + templ);
  }
}

}  // namespace

fs::path enhance(const fs::path& image_path, const BackendConfig& backend,
                 const fs::path& out_path) {
  if (!fs::is_regular_file(image_path)) {
    throw IoError("enhance input missing: " + image_path.string());
  }
  if (backend.enhance_cmd == "identity") {
    fs::copy_file(image_path, out_path, fs::copy_options::overwrite_existing);
    return out_path;
  }
  require_placeholders(backend.enhance_cmd, true);
  std::error_code ec;
  fs::remove(out_path, ec);  // A stale file must not pass for fresh output.
  const std::string cmd =
      detail::substitute_template(backend.enhance_cmd, image_path, out_path);
  const detail::CommandResult r =
      detail::run_command(cmd, backend.timeout_s);
  if (r.timed_out) {
    throw BackendTimeout("enhance backend exceeded " +
                         std::to_string(backend.timeout_s) + "s: " + cmd);
  }
  if (r.exit_code != 0) {
    throw BackendError("enhance backend exited " +
                       std::to_string(r.exit_code) + ": " +
                       excerpt(r.stderr_excerpt));
  }
  if (!fs::is_regular_file(out_path)) {
    throw BackendError("enhance backend produced no output file");
  }
  ImageBuffer in_img, out_img;
  try {
    in_img = load_image(image_path);
    out_img = load_image(out_path);
  } catch (const DecodeError& e) {
    throw BackendError(std::string("enhance output undecodable: ") + e.what());
  }
  if (!out_img.same_dims(in_img)) {
    throw BackendError("enhance backend changed dimensions from " +
                       std::to_string(in_img.width) + "x" +
                       std::to_string(in_img.height) + " to " +
                       std::to_string(out_img.width) + "x" +
                       std::to_string(out_img.height));
  }
  return out_path;
}

EmbeddingVector embed(const fs::path& image_path,
                      const BackendConfig& backend) {
  if (backend.embed_cmd == "mock") {
    const ImageBuffer img = load_image(image_path);
    // Luminance (Rec. 601), pooled to 16x16, centered, unit norm. Crude but
    // fully deterministic, which is what the harness tests need.
    ImageBuffer gray;
    gray.width = img.width;
    gray.height = img.height;
    gray.pixels.resize(img.pixels.size());
    for (std::size_t p = 0; p < img.pixel_count(); ++p) {
      const std::size_t base = p * ImageBuffer::kChannels;
      const double y = 0.299 * img.pixels[base] +
                       0.587 * img.pixels[base + 1] +
                       0.114 * img.pixels[base + 2];
      const std::uint8_t q = quantize_sample(y);
      gray.pixels[base] = q;
      gray.pixels[base + 1] = q;
      gray.pixels[base + 2] = q;
    }
    const ImageBuffer small = resize_bicubic(gray, 16, 16);
    EmbeddingVector v(256);
    double mean = 0.0;
    for (int i = 0; i < 256; ++i) {
      v[static_cast<std::size_t>(i)] =
          small.pixels[static_cast<std::size_t>(i) * ImageBuffer::kChannels];
      mean += v[static_cast<std::size_t>(i)];
    }
    mean /= 256.0;
    double norm2 = 0.0;
    for (double& x : v) {
      x -= mean;
      norm2 += x * x;
    }
    if (norm2 == 0.0) {
      throw DegenerateInput("mock embedding of a constant image");
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
    return v;
  }

  require_placeholders(backend.embed_cmd, false);
  const std::string cmd =
      detail::substitute_template(backend.embed_cmd, image_path, std::nullopt);
  const detail::CommandResult r =
      detail::run_command(cmd, backend.timeout_s);
  if (r.timed_out) {
    throw BackendTimeout("embed backend exceeded " +
                         std::to_string(backend.timeout_s) + "s: " + cmd);
  }
  if (r.exit_code != 0) {
    throw BackendError("embed backend exited " + std::to_string(r.exit_code) +
                       ": " + excerpt(r.stderr_excerpt));
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(r.stdout_text);
  } catch (const nlohmann::json::exception&) {
    throw BackendError("embed backend printed malformed JSON: " +
                       excerpt(r.stdout_text));
  }
  if (!j.is_array() || j.size() != static_cast<std::size_t>(backend.embed_dim)) {
    throw BackendError("embed backend must print a JSON array of length " +
                       std::to_string(backend.embed_dim));
  }
  EmbeddingVector v;
  v.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) {
      throw BackendError("embed backend array holds a non-number");
    }
    const double d = x.get<double>();
    if (!std::isfinite(d)) {
      throw BackendError("embed backend array holds a non-finite value");
    }
    v.push_back(d);
  }
  return v;
}

}  // namespace fdb
