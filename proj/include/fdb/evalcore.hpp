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

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdb/degrade.hpp"
#include "fdb/rng.hpp"

namespace fdb {

using EmbeddingVector = std::vector<double>;

enum class Condition { degraded, enhanced, original };

std::string condition_label(Condition c);
Condition condition_from_label(const std::string& label);

struct TrialRecord {
  std::string identity_id;
  std::string probe_image_id;
  std::string reference_image_id;
  Condition condition = Condition::degraded;
  DegradationSpec spec;
  double similarity = 0.0;
  std::optional<std::string> predicted_identity;
  bool accepted = false;
  bool correct = false;
  // Set when a backend failed; error trials are excluded from metrics.
  std::optional<std::string> error;

  // "identity|kind|condition", the resume key.
  std::string condition_key() const;
};

struct CiBounds {
  double low = 0.0;
  double high = 0.0;
  bool operator==(const CiBounds&) const = default;
};

enum class MetricKind { accuracy, precision, recall, f1 };

inline constexpr std::array<MetricKind, 4> kAllMetrics = {
    MetricKind::accuracy, MetricKind::precision, MetricKind::recall,
    MetricKind::f1};

std::string metric_label(MetricKind m);

struct MetricsSummary {
  std::size_t n = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Filled by summarize_with_ci; compute_metrics leaves it empty.
  std::map<MetricKind, CiBounds> ci;
  std::optional<double> cohens_d;
};

struct RocPoint {
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  bool operator==(const RocPoint&) const = default;
};

// dot(a,b)/(|a||b|), clamped to [-1,1]. Zero vector -> DegenerateInput,
// dim mismatch -> ShapeError.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

// Closed-set identification with rejection. Returns the argmax-similarity
// identity iff the max similarity >= threshold, else nullopt; ties go to the
// lexicographically smallest id. Empty gallery -> InvalidParam.
std::pair<std::optional<std::string>, double> identify(
    const EmbeddingVector& probe,
    const std::map<std::string, EmbeddingVector>& gallery, double threshold);

// One point per distinct observed score plus +inf/-inf sentinels, thresholds
// strictly decreasing. TPR = fraction of genuine >= t, FPR likewise for
// impostor. Empty input -> InvalidParam.
std::vector<RocPoint> roc_points(const std::vector<double>& genuine,
                                 const std::vector<double>& impostor);

// Threshold maximizing Youden's J = TPR - FPR; ties broken toward the larger
// threshold. Fully overlapping distributions make every J zero, so the +inf
// sentinel wins and the caller gets a reject-everything threshold. Empty
// input -> InvalidParam.
double select_threshold(const std::vector<RocPoint>& points);

// Harmonic mean; 0 if both inputs are 0.
double f1_score(double precision, double recall);

// TP = correct, FP = accepted and wrong, rejected = not accepted.
// accuracy = recall = TP/n (closed-set: every probe's mate is enrolled);
// precision = TP/(TP+FP), 1.0 when nothing was accepted. Error trials must
// be filtered out by the caller. Empty input -> InvalidParam.
MetricsSummary compute_metrics(const std::vector<TrialRecord>& trials);

// Percentile bootstrap: resample n trials with replacement `iterations`
// times, take empirical (1-level)/2 and 1-(1-level)/2 quantiles (linear
// interpolation). Deterministic in seed; iteration i draws from
// hash_at(seed, i) so the parallel and serial paths are identical.
CiBounds bootstrap_ci(const std::vector<TrialRecord>& trials,
                      MetricKind metric, int iterations = 1000,
                      double level = 0.95, Seed seed = 0);

// (mean_a - mean_b) / pooled sample sd. Group size < 2 -> InvalidParam,
// zero pooled variance -> DegenerateInput.
double cohens_d(const std::vector<double>& group_a,
                const std::vector<double>& group_b);

// compute_metrics plus bootstrapped CIs for all four metrics and Cohen's d
// over correctness indicators of degraded vs enhanced trials (nullopt when
// either group is too small or has zero pooled variance).
MetricsSummary summarize_with_ci(const std::vector<TrialRecord>& trials,
                                 int iterations, double level, Seed seed);

// Unweighted mean of per-kind F1 over kinds present in `trials`.
double macro_f1(const std::vector<TrialRecord>& trials);

struct KindRow {
  DegradationKind kind = DegradationKind::None;
  double baseline_pct = 0.0;  // accuracy among degraded trials, 1 dp
  double enhanced_pct = 0.0;  // accuracy among enhanced trials, 1 dp
  double gain_pp = 0.0;       // difference of the rounded columns
  std::size_t baseline_n = 0;
  std::size_t enhanced_n = 0;
};

struct KindTable {
  std::vector<KindRow> rows;  // canonical kind order, zero-trial kinds absent
  // Unweighted means of the rounded row columns (not re-rounded).
  double overall_baseline_pct = 0.0;
  double overall_enhanced_pct = 0.0;
  double overall_gain_pp = 0.0;
  std::vector<std::string> warnings;  // one per omitted kind
};

// Per-kind accuracy split by condition, percentages rounded to one decimal
// before differencing so the table is internally consistent at the printed
// precision. Trials with errors are skipped; original-condition trials count
// toward the None row.
KindTable per_degradation_table(const std::vector<TrialRecord>& trials);

// {n, accuracy, precision, recall, f1, ci: {metric: [low, high]}, cohens_d}.
nlohmann::json metrics_to_json(const MetricsSummary& summary);

namespace ref {
// Serial twin of bootstrap_ci; bitwise-identical results.
CiBounds bootstrap_ci(const std::vector<TrialRecord>& trials,
                      MetricKind metric, int iterations = 1000,
                      double level = 0.95, Seed seed = 0);
}  // namespace ref

}  // namespace fdb
