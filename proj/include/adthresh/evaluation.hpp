#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "adthresh/similarity.hpp"

namespace adthresh {

inline constexpr double kDefaultEpsilon = 1e-9;

/// A sample equal to lambda is a positive prediction: TP/FP use s ≥ λ and
/// FN/TN use s < λ, so tp + fn and fp + tn always partition the samples.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  double lambda = 0.0;

  bool operator==(const ConfusionCounts&) const = default;
};

/// Denominator used for the true positive rate.
///   standard: TP / (TP + FN + ε)
///   predicted: TP / (TP + FP + ε), over predicted positives instead.
enum class TprDenominator { standard, predicted };

struct MetricsReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  ConfusionCounts counts;
};

struct RocPoint {
  double fpr;
  double tpr;
  double lambda;
};

struct RocCurve {
  // Sorted by lambda descending; the first point is the (0,0) anchor at
  // λ = +inf and the last the (1,1) anchor at λ = -inf.
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// Throws insufficient_samples when either side is empty.
ConfusionCounts confusion_at(const SimilarityDistributions& dist, double lambda);

/// Exact ratios for precision and recall; ε only enters when a denominator is
/// zero. f1 is 0 whenever tp is 0.
MetricsReport metrics_from_counts(const ConfusionCounts& counts, double epsilon = kDefaultEpsilon,
                                  TprDenominator tpr_mode = TprDenominator::standard);
MetricsReport metrics_at(const SimilarityDistributions& dist, double lambda,
                         double epsilon = kDefaultEpsilon,
                         TprDenominator tpr_mode = TprDenominator::standard);

double f1_from_counts(const ConfusionCounts& counts, double epsilon = kDefaultEpsilon);
double tpr_from_counts(const ConfusionCounts& counts, double epsilon, TprDenominator tpr_mode);
double fpr_from_counts(const ConfusionCounts& counts, double epsilon);

/// Sorted copy of the two sample sets; counts at any lambda by binary search
/// and agrees exactly with confusion_at.
class SortedSamples {
 public:
  explicit SortedSamples(const SimilarityDistributions& dist);

  ConfusionCounts confusion_at(double lambda) const;

  std::span<const double> auto_sorted() const noexcept { return auto_; }
  std::span<const double> cross_sorted() const noexcept { return cross_; }
  /// Ascending distinct values across both sets.
  const std::vector<double>& distinct_values() const noexcept { return distinct_; }

 private:
  std::vector<double> auto_;
  std::vector<double> cross_;
  std::vector<double> distinct_;
};

/// Lambda swept over num_points evenly spaced values spanning
/// [min - 1e-6, max + 1e-6] of all samples, plus the two anchors. AUC is the
/// trapezoid over (fpr, tpr) sorted by fpr then tpr; the area also takes one
/// point at every distinct sample value, so it does not depend on num_points.
RocCurve roc_sweep(const SimilarityDistributions& dist, std::size_t num_points,
                   double epsilon = kDefaultEpsilon,
                   TprDenominator tpr_mode = TprDenominator::standard);

/// Trapezoidal area under arbitrary (fpr, tpr) points sorted by fpr then tpr.
double trapezoid_auc(std::vector<RocPoint> points);

}  // namespace adthresh
