#include "adthresh/evaluation.hpp"

#include <algorithm>
#include <limits>

#include "adthresh/error.hpp"

namespace adthresh {

namespace {

void require_evaluable(const SimilarityDistributions& dist) {
  if (!dist.supports_evaluation()) {
    throw Error(ErrorCode::insufficient_samples,
                "confusion counts need at least one auto and one cross sample (have " +
                    std::to_string(dist.auto_samples.size()) + " auto, " +
                    std::to_string(dist.cross_samples.size()) + " cross)");
  }
}

double guarded_ratio(std::size_t num, std::size_t den, double epsilon) {
  if (den == 0) return epsilon > 0.0 ? static_cast<double>(num) / epsilon : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

double smoothed_ratio(std::size_t num, std::size_t den, double epsilon) {
  const double d = static_cast<double>(den) + epsilon;
  return d > 0.0 ? static_cast<double>(num) / d : 0.0;
}

}  // namespace

ConfusionCounts confusion_at(const SimilarityDistributions& dist, double lambda) {
  require_evaluable(dist);
  ConfusionCounts c;
  c.lambda = lambda;
  for (double s : dist.auto_samples) (s >= lambda ? c.tp : c.fn)++;
  for (double s : dist.cross_samples) (s >= lambda ? c.fp : c.tn)++;
  return c;
}

double f1_from_counts(const ConfusionCounts& c, double epsilon) {
  if (c.tp == 0) return 0.0;
  const double precision = guarded_ratio(c.tp, c.tp + c.fp, epsilon);
  const double recall = guarded_ratio(c.tp, c.tp + c.fn, epsilon);
  return 2.0 * precision * recall / (precision + recall);
}

double tpr_from_counts(const ConfusionCounts& c, double epsilon, TprDenominator tpr_mode) {
  return tpr_mode == TprDenominator::standard ? smoothed_ratio(c.tp, c.tp + c.fn, epsilon)
                                              : smoothed_ratio(c.tp, c.tp + c.fp, epsilon);
}

double fpr_from_counts(const ConfusionCounts& c, double epsilon) {
  return smoothed_ratio(c.fp, c.fp + c.tn, epsilon);
}

MetricsReport metrics_from_counts(const ConfusionCounts& c, double epsilon,
                                  TprDenominator tpr_mode) {
  MetricsReport m;
  m.counts = c;
  // tp = 0 whenever a precision/recall denominator is zero, so the guard
  // yields 0 rather than NaN.
  m.precision = guarded_ratio(c.tp, c.tp + c.fp, epsilon);
  m.recall = guarded_ratio(c.tp, c.tp + c.fn, epsilon);
  m.f1 = f1_from_counts(c, epsilon);
  const std::size_t total = c.tp + c.fp + c.fn + c.tn;
  m.accuracy = total ? static_cast<double>(c.tp + c.tn) / static_cast<double>(total) : 0.0;
  m.tpr = tpr_from_counts(c, epsilon, tpr_mode);
  m.fpr = fpr_from_counts(c, epsilon);
  return m;
}

MetricsReport metrics_at(const SimilarityDistributions& dist, double lambda, double epsilon,
                         TprDenominator tpr_mode) {
  if (epsilon < 0.0) throw Error(ErrorCode::invalid_argument, "epsilon must be non-negative");
  return metrics_from_counts(confusion_at(dist, lambda), epsilon, tpr_mode);
}

SortedSamples::SortedSamples(const SimilarityDistributions& dist)
    : auto_(dist.auto_samples), cross_(dist.cross_samples) {
  require_evaluable(dist);
  std::sort(auto_.begin(), auto_.end());
  std::sort(cross_.begin(), cross_.end());
  distinct_.reserve(auto_.size() + cross_.size());
  std::merge(auto_.begin(), auto_.end(), cross_.begin(), cross_.end(),
             std::back_inserter(distinct_));
  distinct_.erase(std::unique(distinct_.begin(), distinct_.end()), distinct_.end());
}

ConfusionCounts SortedSamples::confusion_at(double lambda) const {
  ConfusionCounts c;
  c.lambda = lambda;
  // lower_bound: first element not less than lambda, i.e. the first s ≥ λ.
  c.fn = static_cast<std::size_t>(std::lower_bound(auto_.begin(), auto_.end(), lambda) -
                                  auto_.begin());
  c.tp = auto_.size() - c.fn;
  c.tn = static_cast<std::size_t>(std::lower_bound(cross_.begin(), cross_.end(), lambda) -
                                  cross_.begin());
  c.fp = cross_.size() - c.tn;
  return c;
}

double trapezoid_auc(std::vector<RocPoint> points) {
  if (points.size() < 2) return 0.0;
  std::sort(points.begin(), points.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.fpr < b.fpr || (a.fpr == b.fpr && a.tpr < b.tpr);
  });
  // Points sharing an fpr form a vertical step and add no area, so the
  // step must keep both ends rather than jump straight to its top.
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) * 0.5;
  }
  return area;
}

RocCurve roc_sweep(const SimilarityDistributions& dist, std::size_t num_points, double epsilon,
                   TprDenominator tpr_mode) {
  if (num_points < 2) throw Error(ErrorCode::invalid_argument, "num_points must be at least 2");
  const SortedSamples sorted(dist);
  const auto& values = sorted.distinct_values();
  constexpr double delta = 1e-6;
  const double lo = values.front() - delta;
  const double hi = values.back() + delta;
  const double step = (hi - lo) / static_cast<double>(num_points - 1);

  RocCurve curve;
  curve.points.reserve(num_points + 2);
  constexpr double inf = std::numeric_limits<double>::infinity();
  curve.points.push_back({0.0, 0.0, inf});
  for (std::size_t i = 0; i < num_points; ++i) {
    // Descending lambda; the last grid value is pinned to lo exactly.
    const std::size_t k = num_points - 1 - i;
    const double lambda = k == 0 ? lo : (k == num_points - 1 ? hi : lo + static_cast<double>(k) * step);
    const auto c = sorted.confusion_at(lambda);
    curve.points.push_back({fpr_from_counts(c, epsilon), tpr_from_counts(c, epsilon, tpr_mode),
                            lambda});
  }
  curve.points.push_back({1.0, 1.0, -inf});

  // Counts only change at sample values, so adding one threshold per
  // distinct value makes the area exact whatever the grid resolution.
  std::vector<RocPoint> vertices = curve.points;
  vertices.reserve(vertices.size() + values.size());
  for (double v : values) {
    const auto c = sorted.confusion_at(v);
    vertices.push_back({fpr_from_counts(c, epsilon), tpr_from_counts(c, epsilon, tpr_mode), v});
  }
  curve.auc = trapezoid_auc(std::move(vertices));
  return curve;
}

}  // namespace adthresh
