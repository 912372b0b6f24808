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

#include <cstdio>
#include <fstream>

#include "fdb/harness.hpp"

namespace fs = std::filesystem;

namespace fdb {
namespace {

std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string ci_str(const MetricsSummary& s, MetricKind m) {
  const auto it = s.ci.find(m);
  if (it == s.ci.end()) return "-";
  return "[" + fmt(it->second.low, 3) + ", " + fmt(it->second.high, 3) + "]";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw IoError("write failed for " + path.string());
}

}  // namespace

void write_report(const fs::path& trials_path, const fs::path& out_dir,
                  Seed seed, int bootstrap_iterations) {
  const std::vector<TrialRecord> all = read_trials(trials_path);
  if (all.empty()) throw EmptyDataset("no trials in " + trials_path.string());

  std::vector<TrialRecord> valid;
  for (const TrialRecord& t : all) {
    if (!t.error.has_value()) valid.push_back(t);
  }
  const std::size_t error_count = all.size() - valid.size();
  if (valid.empty()) {
    throw EmptyDataset("every trial carries a backend error");
  }

  fs::create_directories(out_dir);

  const std::array<Condition, 3> conditions = {
      Condition::degraded, Condition::enhanced, Condition::original};
  std::map<Condition, std::vector<TrialRecord>> by_condition;
  for (const TrialRecord& t : valid) by_condition[t.condition].push_back(t);

  std::map<Condition, MetricsSummary> summaries;
  std::map<Condition, double> macro;
  std::size_t ci = 0;
  for (Condition c : conditions) {
    const auto it = by_condition.find(c);
    if (it == by_condition.end()) continue;
    summaries[c] = summarize_with_ci(it->second, bootstrap_iterations, 0.95,
                                     hash_at(seed, 100 + ci));
    macro[c] = macro_f1(it->second);
    ++ci;
  }

  std::optional<double> effect;
  {
    std::vector<double> deg, enh;
    for (const TrialRecord& t : valid) {
      if (t.condition == Condition::degraded) {
        deg.push_back(t.correct ? 1.0 : 0.0);
      } else if (t.condition == Condition::enhanced) {
        enh.push_back(t.correct ? 1.0 : 0.0);
      }
    }
    if (deg.size() >= 2 && enh.size() >= 2) {
      try {
        effect = cohens_d(enh, deg);
      } catch (const DegenerateInput&) {
        effect = std::nullopt;
      }
    }
  }

  const KindTable table = per_degradation_table(valid);

  // report.md
  std::string md;
  md += "# Recognition evaluation report\n\n";
  md += "All figures below are recomputed from `" +
        trials_path.filename().string() + "`; nothing is hardcoded.\n\n";
  md += "Assumption: gallery references are pristine. Only probes are "
        "degraded and enhanced; enrolled reference images never pass "
        "through either pipeline.\n\n";
  md += "Trials: " + std::to_string(all.size()) + " total, " +
        std::to_string(valid.size()) + " usable, " +
        std::to_string(error_count) +
        " backend-error records excluded from all figures.\n\n";

  md += "## Summary by condition\n\n";
  md += "| Condition | n | Accuracy (%) | Accuracy 95% CI | Precision | "
        "Recall | F1 (micro) | F1 (macro) |\n";
  md += "|---|---|---|---|---|---|---|---|\n";
  for (Condition c : conditions) {
    const auto it = summaries.find(c);
    if (it == summaries.end()) continue;
    const MetricsSummary& s = it->second;
    md += "| " + condition_label(c) + " | " + std::to_string(s.n) + " | " +
          fmt(100.0 * s.accuracy, 1) + " | " + ci_str(s, MetricKind::accuracy) +
          " | " + fmt(s.precision, 3) + " | " + fmt(s.recall, 3) + " | " +
          fmt(s.f1, 3) + " | " + fmt(macro[c], 3) + " |\n";
  }
  md += "\n";
  if (effect.has_value()) {
    md += "Cohen's d (enhanced vs degraded correctness indicators): " +
          fmt(*effect, 2) + "\n\n";
  }
  md += "Micro-F1 is the harmonic mean of pooled precision and recall; "
        "macro-F1 is the unweighted mean of per-kind F1. The two diverge "
        "whenever per-kind performance is heterogeneous, so both are "
        "reported.\n\n";

  md += "## Performance by degradation kind\n\n";
  md += "| Kind | Baseline acc (%) | Enhanced acc (%) | Gain (pp) | Trials "
        "(base/enh) |\n";
  md += "|---|---|---|---|---|\n";
  for (const KindRow& row : table.rows) {
    const std::string name = row.kind == DegradationKind::None
                                 ? "none (original control)"
                                 : kind_label(row.kind);
    md += "| " + name + " | " + fmt(row.baseline_pct, 1) + " | " +
          fmt(row.enhanced_pct, 1) + " | " + fmt(row.gain_pp, 1) + " | " +
          std::to_string(row.baseline_n) + "/" +
          std::to_string(row.enhanced_n) + " |\n";
  }
  md += "| overall average | " + fmt(table.overall_baseline_pct, 1) + " | " +
        fmt(table.overall_enhanced_pct, 1) + " | " +
        fmt(table.overall_gain_pp, 1) + " | |\n\n";
  md += "The overall row is the unweighted mean of the per-kind rows: each "
        "kind counts once regardless of its trial count, and the mean is "
        "taken over the one-decimal row values. Exact values before final "
        "rounding: baseline " + fmt(table.overall_baseline_pct, 2) +
        ", enhanced " + fmt(table.overall_enhanced_pct, 2) +
        ". Pooled accuracy, which weights kinds by trial count, appears in "
        "the summary table above and generally differs from this unweighted "
        "average.\n";
  for (const std::string& w : table.warnings) {
    md += "\nNote: " + w + ".";
  }
  md += "\n";
  write_text(out_dir / "report.md", md);

  // table1.csv
  std::string t1 =
      "condition,n,accuracy,precision,recall,f1_micro,f1_macro,"
      "accuracy_ci_low,accuracy_ci_high\n";
  for (Condition c : conditions) {
    const auto it = summaries.find(c);
    if (it == summaries.end()) continue;
    const MetricsSummary& s = it->second;
    const CiBounds acc_ci = s.ci.at(MetricKind::accuracy);
    t1 += condition_label(c) + "," + std::to_string(s.n) + "," +
          fmt(s.accuracy, 6) + "," + fmt(s.precision, 6) + "," +
          fmt(s.recall, 6) + "," + fmt(s.f1, 6) + "," + fmt(macro[c], 6) +
          "," + fmt(acc_ci.low, 6) + "," + fmt(acc_ci.high, 6) + "\n";
  }
  write_text(out_dir / "table1.csv", t1);

  // table2.csv
  std::string t2 =
      "kind,baseline_accuracy_pct,enhanced_accuracy_pct,gain_pp,"
      "baseline_n,enhanced_n\n";
  for (const KindRow& row : table.rows) {
    t2 += kind_label(row.kind) + "," + fmt(row.baseline_pct, 1) + "," +
          fmt(row.enhanced_pct, 1) + "," + fmt(row.gain_pp, 1) + "," +
          std::to_string(row.baseline_n) + "," +
          std::to_string(row.enhanced_n) + "\n";
  }
  t2 += "overall_average," + fmt(table.overall_baseline_pct, 2) + "," +
        fmt(table.overall_enhanced_pct, 2) + "," +
        fmt(table.overall_gain_pp, 2) + ",,\n";
  write_text(out_dir / "table2.csv", t2);

  // plotdata.csv
  std::string pd = "kind,baseline,enhanced,gain\n";
  for (const KindRow& row : table.rows) {
    pd += kind_label(row.kind) + "," + fmt(row.baseline_pct, 1) + "," +
          fmt(row.enhanced_pct, 1) + "," + fmt(row.gain_pp, 1) + "\n";
  }
  write_text(out_dir / "plotdata.csv", pd);

  // metrics.json
  nlohmann::json mj{{"conditions", nlohmann::json::object()},
                    {"errors_excluded", error_count}};
  for (const auto& [c, s] : summaries) {
    nlohmann::json cj = metrics_to_json(s);
    cj["f1_macro"] = macro[c];
    mj["conditions"][condition_label(c)] = cj;
  }
  mj["cohens_d"] = effect.has_value() ? nlohmann::json(*effect)
                                      : nlohmann::json(nullptr);
  write_text(out_dir / "metrics.json", mj.dump(2) + "\n");
}

}  // namespace fdb
