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

#include "fdb/evalcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace fdb {
namespace {

struct Counts {
  std::size_t n = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t accepted = 0;
};

void tally(const TrialRecord& t, Counts& c) {
  ++c.n;
  if (t.correct) ++c.tp;
  if (t.accepted) ++c.accepted;
  if (t.accepted && !t.correct) ++c.fp;
}

double metric_from_counts(const Counts& c, MetricKind m) {
  const double n = static_cast<double>(c.n);
  const double accuracy = static_cast<double>(c.tp) / n;
  switch (m) {
    case MetricKind::accuracy:
    case MetricKind::recall:
      return accuracy;
    case MetricKind::precision:
      // No acceptances: vacuous precision 1.0 (F1 still collapses via
      // recall).
      return c.accepted == 0
                 ? 1.0
                 : static_cast<double>(c.tp) / (c.tp + c.fp);
    case MetricKind::f1: {
      const double p = metric_from_counts(c, MetricKind::precision);
      return f1_score(p, accuracy);
    }
  }
  return 0.0;
}

// Type-7 quantile: linear interpolation between order statistics.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// One bootstrap replicate. The iteration index selects an independent
// substream, so any execution order gives the same stats vector.
double bootstrap_iteration(const std::vector<TrialRecord>& trials,
                           MetricKind metric, Seed seed, int iteration) {
  SplitMix64 rng(hash_at(seed, static_cast<std::uint64_t>(iteration)));
  Counts c;
  const std::size_t n = trials.size();
  for (std::size_t j = 0; j < n; ++j) {
    tally(trials[static_cast<std::size_t>(rng.next_below(n))], c);
  }
  return metric_from_counts(c, metric);
}

CiBounds percentile_bounds(std::vector<double>& stats, double level) {
  std::sort(stats.begin(), stats.end());
  const double alpha = (1.0 - level) / 2.0;
  return CiBounds{quantile_sorted(stats, alpha),
                  quantile_sorted(stats, 1.0 - alpha)};
}

void check_bootstrap_args(const std::vector<TrialRecord>& trials,
                          int iterations, double level) {
  if (trials.empty()) throw InvalidParam("bootstrap needs trials");
  if (iterations < 100) throw InvalidParam("bootstrap needs >= 100 iterations");
  if (!(level > 0.0 && level < 1.0)) {
    throw InvalidParam("level must be in (0,1)");
  }
}

}  // namespace

std::string condition_label(Condition c) {
  switch (c) {
    case Condition::degraded: return "degraded";
    case Condition::enhanced: return "enhanced";
    case Condition::original: return "original";
  }
  return "degraded";
}

Condition condition_from_label(const std::string& label) {
  if (label == "degraded") return Condition::degraded;
  if (label == "enhanced") return Condition::enhanced;
  if (label == "original") return Condition::original;
  throw InvalidParam("unknown condition '" + label + "'");
}

std::string TrialRecord::condition_key() const {
  return identity_id + "|" + kind_label(spec.kind) + "|" +
         condition_label(condition);
}

std::string metric_label(MetricKind m) {
  switch (m) {
    case MetricKind::accuracy: return "accuracy";
    case MetricKind::precision: return "precision";
    case MetricKind::recall: return "recall";
    case MetricKind::f1: return "f1";
  }
  return "accuracy";
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.size() != b.size()) {
    throw ShapeError("embedding dims differ: " + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()));
  }
  if (a.empty()) throw ShapeError("empty embeddings");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw DegenerateInput("cosine similarity of a zero vector");
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::pair<std::optional<std::string>, double> identify(
    const EmbeddingVector& probe,
    const std::map<std::string, EmbeddingVector>& gallery, double threshold) {
  if (gallery.empty()) throw InvalidParam("gallery is empty");
  std::string best_id;
  double best = -std::numeric_limits<double>::infinity();
  // std::map iterates ids ascending, so keeping the first maximum implements
  // the lexicographic tie rule.
  for (const auto& [id, emb] : gallery) {
    const double s = cosine_similarity(probe, emb);
    if (s > best) {
      best = s;
      best_id = id;
    }
  }
  if (best >= threshold) return {best_id, best};
  return {std::nullopt, best};
}

std::vector<RocPoint> roc_points(const std::vector<double>& genuine,
                                 const std::vector<double>& impostor) {
  if (genuine.empty() || impostor.empty()) {
    throw InvalidParam("roc needs nonempty genuine and impostor scores");
  }
  std::vector<double> g = genuine, i = impostor;
  std::sort(g.begin(), g.end());
  std::sort(i.begin(), i.end());
  std::set<double, std::greater<double>> thresholds(genuine.begin(),
                                                    genuine.end());
  thresholds.insert(impostor.begin(), impostor.end());

  const auto frac_ge = [](const std::vector<double>& sorted, double t) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
    return static_cast<double>(sorted.end() - it) /
           static_cast<double>(sorted.size());
  };

  std::vector<RocPoint> points;
  points.reserve(thresholds.size() + 2);
  points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  for (double t : thresholds) {
    points.push_back({t, frac_ge(g, t), frac_ge(i, t)});
  }
  points.push_back({-std::numeric_limits<double>::infinity(), 1.0, 1.0});
  return points;
}

double select_threshold(const std::vector<RocPoint>& points) {
  if (points.empty()) throw InvalidParam("no roc points");
  double best_j = -std::numeric_limits<double>::infinity();
  double best_t = 0.0;
  // Points arrive in decreasing threshold order; requiring a margin of
  // improvement keeps the larger threshold on ties. The margin also covers
  // ties between exact rational J values (k/n counts) that rounding pulls
  // apart by a few ulps, e.g. 1 - 1/3 vs 2/3 - 0.
  constexpr double kTieEps = 1e-12;
  for (const RocPoint& p : points) {
    const double j = p.tpr - p.fpr;
    if (j > best_j + kTieEps) {
      best_j = j;
      best_t = p.threshold;
    }
  }
  return best_t;
}

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s == 0.0 ? 0.0 : 2.0 * precision * recall / s;
}

MetricsSummary compute_metrics(const std::vector<TrialRecord>& trials) {
  if (trials.empty()) throw InvalidParam("compute_metrics needs trials");
  Counts c;
  for (const TrialRecord& t : trials) tally(t, c);
  MetricsSummary s;
  s.n = c.n;
  s.accuracy = metric_from_counts(c, MetricKind::accuracy);
  s.precision = metric_from_counts(c, MetricKind::precision);
  s.recall = metric_from_counts(c, MetricKind::recall);
  s.f1 = metric_from_counts(c, MetricKind::f1);
  return s;
}

CiBounds bootstrap_ci(const std::vector<TrialRecord>& trials,
                      MetricKind metric, int iterations, double level,
                      Seed seed) {
  check_bootstrap_args(trials, iterations, level);
  std::vector<double> stats(static_cast<std::size_t>(iterations));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < iterations; ++i) {
    stats[static_cast<std::size_t>(i)] =
        bootstrap_iteration(trials, metric, seed, i);
  }
  return percentile_bounds(stats, level);
}

namespace ref {

CiBounds bootstrap_ci(const std::vector<TrialRecord>& trials,
                      MetricKind metric, int iterations, double level,
                      Seed seed) {
  check_bootstrap_args(trials, iterations, level);
  std::vector<double> stats(static_cast<std::size_t>(iterations));
  for (int i = 0; i < iterations; ++i) {
    stats[static_cast<std::size_t>(i)] =
        bootstrap_iteration(trials, metric, seed, i);
  }
  return percentile_bounds(stats, level);
}

}  // namespace ref

double cohens_d(const std::vector<double>& group_a,
                const std::vector<double>& group_b) {
  if (group_a.size() < 2 || group_b.size() < 2) {
    throw InvalidParam("cohens_d needs >= 2 samples per group");
  }
  const auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const auto ss = [](const std::vector<double>& v, double m) {
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s;
  };
  const double ma = mean(group_a);
  const double mb = mean(group_b);
  const double na = static_cast<double>(group_a.size());
  const double nb = static_cast<double>(group_b.size());
  const double pooled_var =
      (ss(group_a, ma) + ss(group_b, mb)) / (na + nb - 2.0);
  if (pooled_var <= 0.0) {
    throw DegenerateInput("zero pooled variance");
  }
  return (ma - mb) / std::sqrt(pooled_var);
}

MetricsSummary summarize_with_ci(const std::vector<TrialRecord>& trials,
                                 int iterations, double level, Seed seed) {
  MetricsSummary s = compute_metrics(trials);
  for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
    s.ci[kAllMetrics[m]] =
        bootstrap_ci(trials, kAllMetrics[m], iterations, level,
                     hash_at(seed, m));
  }
  std::vector<double> degraded, enhanced;
  for (const TrialRecord& t : trials) {
    if (t.condition == Condition::degraded) {
      degraded.push_back(t.correct ? 1.0 : 0.0);
    } else if (t.condition == Condition::enhanced) {
      enhanced.push_back(t.correct ? 1.0 : 0.0);
    }
  }
  if (enhanced.size() >= 2 && degraded.size() >= 2) {
    try {
      s.cohens_d = cohens_d(enhanced, degraded);
    } catch (const DegenerateInput&) {
      s.cohens_d = std::nullopt;
    }
  }
  return s;
}

double macro_f1(const std::vector<TrialRecord>& trials) {
  if (trials.empty()) throw InvalidParam("macro_f1 needs trials");
  double sum = 0.0;
  int kinds = 0;
  for (DegradationKind kind : kAllKinds) {
    std::vector<TrialRecord> subset;
    for (const TrialRecord& t : trials) {
      if (t.spec.kind == kind) subset.push_back(t);
    }
    if (subset.empty()) continue;
    sum += compute_metrics(subset).f1;
    ++kinds;
  }
  return sum / kinds;
}

KindTable per_degradation_table(const std::vector<TrialRecord>& trials) {
  const auto round1 = [](double v) {
    return static_cast<double>(std::llround(v * 10.0)) / 10.0;
  };
  KindTable table;
  double base_sum = 0.0;
  double enh_sum = 0.0;
  for (DegradationKind kind : kAllKinds) {
    Counts base, enh;
    for (const TrialRecord& t : trials) {
      if (t.spec.kind != kind || t.error.has_value()) continue;
      // The original condition only appears on control records; it reads as
      // a baseline measurement.
      if (t.condition == Condition::enhanced) {
        tally(t, enh);
      } else {
        tally(t, base);
      }
    }
    if (base.n == 0 || enh.n == 0) {
      table.warnings.push_back("kind " + kind_label(kind) +
                               " has no paired trials; row omitted");
      continue;
    }
    KindRow row;
    row.kind = kind;
    row.baseline_pct = round1(100.0 * metric_from_counts(base,
                                                         MetricKind::accuracy));
    row.enhanced_pct = round1(100.0 * metric_from_counts(enh,
                                                         MetricKind::accuracy));
    // Differencing the rounded columns keeps the printed table consistent
    // with itself.
    row.gain_pp = row.enhanced_pct - row.baseline_pct;
    row.baseline_n = base.n;
    row.enhanced_n = enh.n;
    table.rows.push_back(row);
    base_sum += row.baseline_pct;
    enh_sum += row.enhanced_pct;
  }
  if (table.rows.empty()) throw InvalidParam("no kinds with paired trials");
  const double k = static_cast<double>(table.rows.size());
  table.overall_baseline_pct = base_sum / k;
  table.overall_enhanced_pct = enh_sum / k;
  table.overall_gain_pp =
      table.overall_enhanced_pct - table.overall_baseline_pct;
  return table;
}

nlohmann::json metrics_to_json(const MetricsSummary& summary) {
  nlohmann::json ci = nlohmann::json::object();
  for (const auto& [metric, bounds] : summary.ci) {
    ci[metric_label(metric)] = {bounds.low, bounds.high};
  }
  nlohmann::json j{{"n", summary.n},
                   {"accuracy", summary.accuracy},
                   {"precision", summary.precision},
                   {"recall", summary.recall},
                   {"f1", summary.f1},
                   {"ci", ci}};
  if (summary.cohens_d.has_value()) {
    j["cohens_d"] = *summary.cohens_d;
  } else {
    j["cohens_d"] = nullptr;
  }
  return j;
}

}  // namespace fdb
