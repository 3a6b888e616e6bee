#include "adthresh/harness.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include <json.hpp>

#include "adthresh/error.hpp"
#include "adthresh/real_format.hpp"
#include "adthresh/synth.hpp"
#include "csv.hpp"

namespace adthresh {

using json = nlohmann::json;

std::string fixed_kind_label(double threshold) {
  return "fixed@" + format_real_short(threshold);
}

std::vector<std::string> identity_order(const EmbeddingFile& source, IdentityOrder order,
                                        std::uint64_t seed) {
  std::vector<std::string> labels;
  std::unordered_set<std::string> seen;
  for (const auto& e : source.embeddings) {
    if (seen.insert(e.identity).second) labels.push_back(e.identity);
  }
  if (order == IdentityOrder::seeded_shuffle && labels.size() > 1) {
    NormalStream rng(seed);
    for (std::size_t i = labels.size() - 1; i > 0; --i) {
      std::swap(labels[i], labels[rng.below(i + 1)]);
    }
  }
  return labels;
}

namespace {

ExperimentRow score_row(const SimilarityDistributions& dist, std::size_t step,
                        std::string kind, double lambda, const AdaptConfig& config) {
  const auto m = metrics_at(dist, lambda, config.epsilon, config.tpr_denominator);
  ExperimentRow row;
  row.step = step;
  row.threshold_kind = std::move(kind);
  row.lambda = lambda;
  row.precision = m.precision;
  row.recall = m.recall;
  row.f1 = m.f1;
  row.accuracy = m.accuracy;
  row.tpr = m.tpr;
  row.fpr = m.fpr;
  return row;
}

}  // namespace

std::vector<ExperimentRow> run_incremental(const EmbeddingFile& source, const RunOptions& options) {
  options.config.validate();
  const auto labels = identity_order(source, options.order, options.seed);
  if (labels.size() < 2) {
    throw Error(ErrorCode::insufficient_identities,
                "incremental run needs at least 2 identities, source has " +
                    std::to_string(labels.size()));
  }

  std::map<std::string, std::vector<const Embedding*>, std::less<>> by_identity;
  for (const auto& e : source.embeddings) by_identity[e.identity].push_back(&e);
  if (by_identity[labels[0]].size() < 2 && by_identity[labels[1]].size() < 2) {
    throw Error(ErrorCode::insufficient_samples,
                "one of the first two identities needs at least 2 embeddings");
  }

  Gallery gallery(source.dimension);
  std::optional<ThresholdState> state;
  std::vector<ExperimentRow> rows;
  rows.reserve((labels.size() - 1) * (1 + options.fixed_thresholds.size()));

  for (std::size_t idx = 0; idx < labels.size(); ++idx) {
    for (const Embedding* e : by_identity[labels[idx]]) gallery.insert(*e);
    if (idx == 0) continue;

    const std::size_t step = gallery.identity_count();
    const auto dist = build_distributions(gallery);
    auto outcome = adapt_distributions(dist, state, options.config);
    gallery.mark_adapted();
    if (outcome.state) {
      state = outcome.state;
    } else {
      // No Gaussian state yet: bootstrap from the optimizer alone.
      const auto opt = optimize_f1(dist, options.config);
      ThresholdState boot;
      boot.lambda_current = boot.lambda_old = opt.lambda;
      boot.f1_current = boot.f1_old = opt.f1;
      boot.provenance = Provenance::optimized;
      boot.gallery_version = dist.gallery_version;
      boot.tau = options.config.tau;
      state = boot;
    }

    const std::size_t first = rows.size();
    rows.push_back(score_row(dist, step, kAdaptiveKind, state->lambda_current, options.config));
    for (double fixed : options.fixed_thresholds) {
      rows.push_back(score_row(dist, step, fixed_kind_label(fixed), fixed, options.config));
    }

    const bool last = idx + 1 == labels.size();
    if (options.per_step_roc || last) {
      const double auc =
          roc_sweep(dist, options.roc_points, options.config.epsilon, options.config.tpr_denominator)
              .auc;
      for (std::size_t r = first; r < rows.size(); ++r) rows[r].auc = auc;
    }
  }
  return rows;
}

const KindSummary* SummaryReport::find(std::string_view kind) const {
  for (const auto& k : kinds) {
    if (k.threshold_kind == kind) return &k;
  }
  return nullptr;
}

SummaryReport summarize(const std::vector<ExperimentRow>& rows, double f1_target) {
  if (rows.empty()) throw Error(ErrorCode::invalid_argument, "cannot summarize zero rows");

  struct Acc {
    std::size_t steps = 0;
    double accuracy_sum = 0.0;
    std::size_t f1_hits = 0;
    const ExperimentRow* last = nullptr;
  };
  std::vector<std::string> order;
  std::map<std::string, Acc, std::less<>> acc;
  for (const auto& row : rows) {
    auto [it, inserted] = acc.try_emplace(row.threshold_kind);
    if (inserted) order.push_back(row.threshold_kind);
    auto& a = it->second;
    ++a.steps;
    a.accuracy_sum += row.accuracy;
    if (row.f1 >= f1_target) ++a.f1_hits;
    if (a.last == nullptr || row.step >= a.last->step) a.last = &row;
  }

  SummaryReport report;
  for (const auto& kind : order) {
    const auto& a = acc.at(kind);
    KindSummary s;
    s.threshold_kind = kind;
    s.steps = a.steps;
    s.mean_accuracy_pct = 100.0 * a.accuracy_sum / static_cast<double>(a.steps);
    s.f1_ge_0_8_pct = 100.0 * static_cast<double>(a.f1_hits) / static_cast<double>(a.steps);
    s.auc = a.last->auc;
    s.final_fpr = a.last->fpr;
    s.final_tpr = a.last->tpr;
    report.kinds.push_back(std::move(s));
  }
  if (const auto* adaptive = report.find(kAdaptiveKind)) {
    const double adaptive_acc = adaptive->mean_accuracy_pct;
    for (auto& k : report.kinds) {
      if (k.threshold_kind == kAdaptiveKind || k.mean_accuracy_pct == 0.0) continue;
      k.relative_accuracy_gain_pct =
          (adaptive_acc - k.mean_accuracy_pct) / k.mean_accuracy_pct * 100.0;
    }
  }
  return report;
}

namespace {

const char* const kRowHeader = "step,threshold_kind,lambda,precision,recall,f1,accuracy,tpr,fpr,auc";

std::string optional_real(const std::optional<double>& v, const char* absent) {
  return v ? format_real(*v) : std::string(absent);
}

double field_real(const std::string& text, std::size_t line) {
  auto v = parse_real(text);
  if (!v) {
    throw Error(ErrorCode::malformed_file,
                "line " + std::to_string(line) + ": '" + text + "' is not a number");
  }
  return *v;
}

}  // namespace

std::string rows_to_csv(const std::vector<ExperimentRow>& rows) {
  std::string out = kRowHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.step) + ',' + csv::escape(r.threshold_kind) + ',' +
           format_real(r.lambda) + ',' + format_real(r.precision) + ',' + format_real(r.recall) +
           ',' + format_real(r.f1) + ',' + format_real(r.accuracy) + ',' + format_real(r.tpr) +
           ',' + format_real(r.fpr) + ',' + optional_real(r.auc, "") + '\n';
  }
  return out;
}

std::string rows_to_json(const std::vector<ExperimentRow>& rows) {
  std::string out = "[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += i == 0 ? "\n" : ",\n";
    out += "  {\"step\": " + std::to_string(r.step) +
           ", \"threshold_kind\": " + json(r.threshold_kind).dump() +
           ", \"lambda\": " + format_real(r.lambda) +
           ", \"precision\": " + format_real(r.precision) +
           ", \"recall\": " + format_real(r.recall) + ", \"f1\": " + format_real(r.f1) +
           ", \"accuracy\": " + format_real(r.accuracy) + ", \"tpr\": " + format_real(r.tpr) +
           ", \"fpr\": " + format_real(r.fpr) + ", \"auc\": " + optional_real(r.auc, "null") +
           "}";
  }
  out += rows.empty() ? "]\n" : "\n]\n";
  return out;
}

std::vector<ExperimentRow> parse_rows_csv(const std::string& text) {
  const auto records = csv::parse(text);
  if (records.empty()) throw Error(ErrorCode::malformed_file, "missing header");
  const auto header = csv::parse(kRowHeader).front();
  if (records.front() != header) {
    throw Error(ErrorCode::malformed_file, "unexpected experiment row header");
  }
  std::vector<ExperimentRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    if (f.size() != header.size()) {
      throw Error(ErrorCode::malformed_file, "line " + std::to_string(i + 1) + ": wrong field count");
    }
    ExperimentRow r;
    r.step = static_cast<std::size_t>(field_real(f[0], i + 1));
    r.threshold_kind = f[1];
    r.lambda = field_real(f[2], i + 1);
    r.precision = field_real(f[3], i + 1);
    r.recall = field_real(f[4], i + 1);
    r.f1 = field_real(f[5], i + 1);
    r.accuracy = field_real(f[6], i + 1);
    r.tpr = field_real(f[7], i + 1);
    r.fpr = field_real(f[8], i + 1);
    if (!f[9].empty()) r.auc = field_real(f[9], i + 1);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ExperimentRow> parse_rows_json(const std::string& text) {
  std::vector<ExperimentRow> rows;
  try {
    for (const auto& item : json::parse(text)) {
      ExperimentRow r;
      r.step = item.at("step").get<std::size_t>();
      r.threshold_kind = item.at("threshold_kind").get<std::string>();
      r.lambda = item.at("lambda").get<double>();
      r.precision = item.at("precision").get<double>();
      r.recall = item.at("recall").get<double>();
      r.f1 = item.at("f1").get<double>();
      r.accuracy = item.at("accuracy").get<double>();
      r.tpr = item.at("tpr").get<double>();
      r.fpr = item.at("fpr").get<double>();
      if (!item.at("auc").is_null()) r.auc = item.at("auc").get<double>();
      rows.push_back(std::move(r));
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::malformed_file, ex.what());
  }
  return rows;
}

std::string summary_to_json(const SummaryReport& report) {
  std::string out = "{\n  \"accuracy_aggregation\": " + json(report.accuracy_aggregation).dump() +
                    ",\n  \"auc_source\": " + json(report.auc_source).dump() +
                    ",\n  \"kinds\": [";
  for (std::size_t i = 0; i < report.kinds.size(); ++i) {
    const auto& k = report.kinds[i];
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"threshold_kind\": " + json(k.threshold_kind).dump() +
           ", \"steps\": " + std::to_string(k.steps) +
           ", \"mean_accuracy_pct\": " + format_real(k.mean_accuracy_pct) +
           ", \"auc\": " + optional_real(k.auc, "null") +
           ", \"f1_ge_0_8_pct\": " + format_real(k.f1_ge_0_8_pct) +
           ", \"final_fpr\": " + format_real(k.final_fpr) +
           ", \"final_tpr\": " + format_real(k.final_tpr) +
           ", \"relative_accuracy_gain_pct\": " + optional_real(k.relative_accuracy_gain_pct, "null") +
           "}";
  }
  out += report.kinds.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

std::string summary_to_csv(const SummaryReport& report) {
  std::string out =
      "threshold_kind,steps,mean_accuracy_pct,auc,f1_ge_0_8_pct,final_fpr,final_tpr,"
      "relative_accuracy_gain_pct\n";
  for (const auto& k : report.kinds) {
    out += csv::escape(k.threshold_kind) + ',' + std::to_string(k.steps) + ',' +
           format_real(k.mean_accuracy_pct) + ',' + optional_real(k.auc, "") + ',' +
           format_real(k.f1_ge_0_8_pct) + ',' + format_real(k.final_fpr) + ',' +
           format_real(k.final_tpr) + ',' + optional_real(k.relative_accuracy_gain_pct, "") + '\n';
  }
  return out;
}

SummaryReport parse_summary_json(const std::string& text) {
  SummaryReport report;
  try {
    const json doc = json::parse(text);
    report.accuracy_aggregation = doc.at("accuracy_aggregation").get<std::string>();
    report.auc_source = doc.at("auc_source").get<std::string>();
    for (const auto& item : doc.at("kinds")) {
      KindSummary k;
      k.threshold_kind = item.at("threshold_kind").get<std::string>();
      k.steps = item.at("steps").get<std::size_t>();
      k.mean_accuracy_pct = item.at("mean_accuracy_pct").get<double>();
      if (!item.at("auc").is_null()) k.auc = item.at("auc").get<double>();
      k.f1_ge_0_8_pct = item.at("f1_ge_0_8_pct").get<double>();
      k.final_fpr = item.at("final_fpr").get<double>();
      k.final_tpr = item.at("final_tpr").get<double>();
      if (!item.at("relative_accuracy_gain_pct").is_null()) {
        k.relative_accuracy_gain_pct = item.at("relative_accuracy_gain_pct").get<double>();
      }
      report.kinds.push_back(std::move(k));
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::malformed_file, ex.what());
  }
  return report;
}

void export_rows(const std::vector<ExperimentRow>& rows, const std::filesystem::path& path,
                 FileFormat format) {
  write_text_file(path, format == FileFormat::json ? rows_to_json(rows) : rows_to_csv(rows));
}

void export_summary(const SummaryReport& report, const std::filesystem::path& path,
                    FileFormat format) {
  write_text_file(path,
                  format == FileFormat::json ? summary_to_json(report) : summary_to_csv(report));
}

std::string roc_to_csv(const RocCurve& curve) {
  std::string out = "lambda,fpr,tpr\n";
  for (const auto& p : curve.points) {
    out += format_real(p.lambda) + ',' + format_real(p.fpr) + ',' + format_real(p.tpr) + '\n';
  }
  out += "# auc=" + format_real(curve.auc) + '\n';
  return out;
}

RocCurve roc_export(const SimilarityDistributions& dist, const AdaptConfig& config,
                    const std::filesystem::path& path, std::size_t num_points) {
  auto curve = roc_sweep(dist, num_points, config.epsilon, config.tpr_denominator);
  write_text_file(path, roc_to_csv(curve));
  return curve;
}

std::string state_to_json(const ThresholdState& s) {
  return "{\"lambda_current\": " + format_real(s.lambda_current) +
         ", \"lambda_old\": " + format_real(s.lambda_old) +
         ", \"f1_current\": " + format_real(s.f1_current) +
         ", \"f1_old\": " + format_real(s.f1_old) +
         ", \"provenance\": " + json(std::string(to_string(s.provenance))).dump() +
         ", \"gallery_version\": " + std::to_string(s.gallery_version) +
         ", \"tau\": " + format_real(s.tau) + "}";
}

ThresholdState parse_state_json(const std::string& text) {
  ThresholdState s;
  try {
    const json doc = json::parse(text);
    s.lambda_current = doc.at("lambda_current").get<double>();
    s.lambda_old = doc.at("lambda_old").get<double>();
    s.f1_current = doc.at("f1_current").get<double>();
    s.f1_old = doc.at("f1_old").get<double>();
    auto p = parse_provenance(doc.at("provenance").get<std::string>());
    if (!p) throw Error(ErrorCode::malformed_file, "unknown provenance");
    s.provenance = *p;
    s.gallery_version = doc.at("gallery_version").get<std::uint64_t>();
    s.tau = doc.at("tau").get<double>();
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::malformed_file, ex.what());
  }
  return s;
}

AdaptConfig parse_config_json(const std::string& text, AdaptConfig base) {
  AdaptConfig c = base;
  try {
    const json doc = json::parse(text);
    if (!doc.is_object()) throw Error(ErrorCode::malformed_file, "config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
      if (key == "tau") {
        c.tau = value.get<double>();
      } else if (key == "epsilon") {
        c.epsilon = value.get<double>();
      } else if (key == "grid_points") {
        c.grid_points = value.get<std::size_t>();
      } else if (key == "refine_iters") {
        c.refine_iters = value.get<std::size_t>();
      } else if (key == "recompute_every_n") {
        c.recompute_every_n = value.get<std::uint64_t>();
      } else if (key == "objective") {
        auto o = parse_objective(value.get<std::string>());
        if (!o) throw Error(ErrorCode::malformed_file, "unknown objective");
        c.objective = *o;
      } else if (key == "bound_mode") {
        auto b = parse_bound_mode(value.get<std::string>());
        if (!b) throw Error(ErrorCode::malformed_file, "unknown bound_mode");
        c.bound_mode = *b;
      } else if (key == "tpr_denominator") {
        auto t = parse_tpr_denominator(value.get<std::string>());
        if (!t) throw Error(ErrorCode::malformed_file, "unknown tpr_denominator");
        c.tpr_denominator = *t;
      } else {
        throw Error(ErrorCode::malformed_file, "unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::malformed_file, ex.what());
  }
  return c;
}

}  // namespace adthresh
