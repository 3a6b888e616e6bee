#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "adthresh/evaluation.hpp"
#include "adthresh/gallery_io.hpp"
#include "adthresh/optimizer.hpp"

namespace adthresh {

enum class IdentityOrder { input, seeded_shuffle };

struct RunOptions {
  AdaptConfig config;
  std::vector<double> fixed_thresholds{0.3, 0.5, 0.7};
  IdentityOrder order = IdentityOrder::input;
  std::uint64_t seed = 0;
  bool per_step_roc = false;
  std::size_t roc_points = 1001;
};

struct ExperimentRow {
  std::size_t step = 0;  // identities in the gallery
  std::string threshold_kind;  // "adaptive" or "fixed@<value>"
  double lambda = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  std::optional<double> auc;

  bool operator==(const ExperimentRow&) const = default;
};

inline constexpr const char* kAdaptiveKind = "adaptive";
std::string fixed_kind_label(double threshold);

/// Identity labels in order of first appearance, optionally shuffled with a
/// seeded Fisher-Yates pass.
std::vector<std::string> identity_order(const EmbeddingFile& source, IdentityOrder order,
                                        std::uint64_t seed);

/// Grows a gallery one identity at a time starting from two, adapting after
/// every addition and scoring the adaptive threshold and each fixed threshold
/// on the current distributions. Emits (identities - 1) × (1 + fixed) rows.
///
/// Until the Gaussian stage has produced a first state (two identities give a
/// single cross sample), the adaptive threshold comes straight from the
/// optimizer. Later skips keep the previous state, as an online deployment
/// would. The final step always carries the ROC AUC; every step does with
/// per_step_roc.
std::vector<ExperimentRow> run_incremental(const EmbeddingFile& source, const RunOptions& options);

struct KindSummary {
  std::string threshold_kind;
  std::size_t steps = 0;
  double mean_accuracy_pct = 0.0;  // mean over steps
  std::optional<double> auc;       // final-step ROC
  double f1_ge_0_8_pct = 0.0;
  double final_fpr = 0.0;          // operating point on the final ROC
  double final_tpr = 0.0;
  // (adaptive - this) / this × 100 on mean accuracy; absent for the adaptive
  // kind itself or without an adaptive kind.
  std::optional<double> relative_accuracy_gain_pct;

  bool operator==(const KindSummary&) const = default;
};

struct SummaryReport {
  std::vector<KindSummary> kinds;  // first-appearance order
  std::string accuracy_aggregation = "mean_over_steps";
  std::string auc_source = "final_step_roc";

  const KindSummary* find(std::string_view kind) const;
};

/// Throws invalid_argument on empty input.
SummaryReport summarize(const std::vector<ExperimentRow>& rows, double f1_target = 0.8);

std::string rows_to_csv(const std::vector<ExperimentRow>& rows);
std::string rows_to_json(const std::vector<ExperimentRow>& rows);
std::vector<ExperimentRow> parse_rows_csv(const std::string& text);
std::vector<ExperimentRow> parse_rows_json(const std::string& text);

std::string summary_to_json(const SummaryReport& report);
std::string summary_to_csv(const SummaryReport& report);
SummaryReport parse_summary_json(const std::string& text);

void export_rows(const std::vector<ExperimentRow>& rows, const std::filesystem::path& path,
                 FileFormat format);
void export_summary(const SummaryReport& report, const std::filesystem::path& path,
                    FileFormat format);

/// ThresholdState as a flat JSON object keyed by field name.
std::string state_to_json(const ThresholdState& state);
ThresholdState parse_state_json(const std::string& text);

/// Overlays the keys present in a JSON object (AdaptConfig field names) onto
/// `base`. Unknown keys are rejected.
AdaptConfig parse_config_json(const std::string& text, AdaptConfig base = {});

/// `lambda,fpr,tpr` rows (anchors print as inf / -inf) and a trailing
/// `# auc=<value>` line.
std::string roc_to_csv(const RocCurve& curve);
RocCurve roc_export(const SimilarityDistributions& dist, const AdaptConfig& config,
                    const std::filesystem::path& path, std::size_t num_points = 1001);

}  // namespace adthresh
