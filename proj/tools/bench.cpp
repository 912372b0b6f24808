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

// Times the OpenMP kernels against their serial fdb::ref twins and checks
// that both produce bitwise-identical output.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdb/convolve.hpp"
#include "fdb/degrade.hpp"
#include "fdb/evalcore.hpp"
#include "fdb/resample.hpp"
#include "fdb/synth.hpp"

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  // One untimed warm-up settles the OpenMP thread pool.
  fn();
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() /
         reps;
}

void report(const std::string& name, double serial_ms, double parallel_ms,
            bool identical) {
  std::printf("%-28s %10.2f ms %10.2f ms %8.2fx  %s\n", name.c_str(),
              serial_ms, parallel_ms, serial_ms / parallel_ms,
              identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bench: serial reference vs OpenMP kernels"};
  bool quick = false;
  int size = 1024;
  app.add_flag("--quick", quick, "small inputs, single rep");
  app.add_option("--size", size, "square test image side");
  CLI11_PARSE(app, argc, argv);

  if (quick) size = 256;
  const int reps = quick ? 1 : 3;
  const fdb::ImageBuffer img = fdb::synth::make_face(2026, 0, size, size);

  std::printf("%-28s %13s %13s %9s  %s\n", "kernel", "serial", "parallel",
              "speedup", "parity");

  {
    fdb::ImageBuffer out_s, out_p;
    const double ts =
        time_ms([&] { out_s = fdb::ref::gaussian_blur(img, 4.5); }, reps);
    const double tp =
        time_ms([&] { out_p = fdb::gaussian_blur(img, 4.5); }, reps);
    report("gaussian_blur sigma=4.5", ts, tp, out_s == out_p);
  }

  {
    const fdb::Kernel2D k = fdb::motion_line_kernel(20, 30.0);
    fdb::ImageBuffer out_s, out_p;
    const double ts =
        time_ms([&] { out_s = fdb::ref::convolve2d(img, k); }, reps);
    const double tp = time_ms([&] { out_p = fdb::convolve2d(img, k); }, reps);
    report("convolve2d motion L=20", ts, tp, out_s == out_p);
  }

  {
    const int w = std::max(1, size / 5), h = std::max(1, size / 5);
    fdb::ImageBuffer out_s, out_p;
    const double ts = time_ms(
        [&] {
          out_s = fdb::ref::resize_bicubic(fdb::ref::resize_bicubic(img, w, h),
                                           size, size);
        },
        reps);
    const double tp = time_ms(
        [&] {
          out_p = fdb::resize_bicubic(fdb::resize_bicubic(img, w, h), size,
                                      size);
        },
        reps);
    report("bicubic down+up f=5", ts, tp, out_s == out_p);
  }

  {
    fdb::ImageBuffer out_s, out_p;
    const double ts =
        time_ms([&] { out_s = fdb::ref::salt_pepper(img, 0.02, 7); }, reps);
    const double tp =
        time_ms([&] { out_p = fdb::salt_pepper(img, 0.02, 7); }, reps);
    report("salt_pepper p=0.02", ts, tp, out_s == out_p);
  }

  {
    // Bootstrap on synthetic trials; the usual hot spot of report runs.
    std::vector<fdb::TrialRecord> trials(quick ? 400 : 4000);
    for (std::size_t i = 0; i < trials.size(); ++i) {
      trials[i].identity_id = "id" + std::to_string(i);
      trials[i].accepted = (i % 3) != 0;
      trials[i].correct = (i % 3) == 1;
      if (trials[i].correct) trials[i].accepted = true;
    }
    const int iters = quick ? 200 : 2000;
    fdb::CiBounds b_s, b_p;
    const double ts = time_ms(
        [&] {
          b_s = fdb::ref::bootstrap_ci(trials, fdb::MetricKind::accuracy,
                                       iters, 0.95, 7);
        },
        reps);
    const double tp = time_ms(
        [&] {
          b_p = fdb::bootstrap_ci(trials, fdb::MetricKind::accuracy, iters,
                                  0.95, 7);
        },
        reps);
    report("bootstrap_ci", ts, tp, b_s == b_p);
  }

  return 0;
}
