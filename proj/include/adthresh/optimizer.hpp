#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "adthresh/distribution_stats.hpp"
#include "adthresh/error.hpp"
#include "adthresh/evaluation.hpp"
#include "adthresh/similarity.hpp"

namespace adthresh {

class Gallery;

enum class Objective { f1, tpr_fpr_gap };
enum class BoundMode { unbounded_01, means_bounded };

/// How optimize_f1 searches lambda.
///   automatic:   plateau scan up to kPlateauScanLimit samples, grid+golden above
///   plateau_scan: exact enumeration of every constant-count interval
///   grid_golden:  coarse grid followed by golden-section refinement
enum class SearchMethod { automatic, plateau_scan, grid_golden };

inline constexpr std::size_t kPlateauScanLimit = 100000;

struct AdaptConfig {
  double tau = 0.8;
  double epsilon = kDefaultEpsilon;
  std::size_t grid_points = 512;
  std::size_t refine_iters = 64;
  std::uint64_t recompute_every_n = 1;
  Objective objective = Objective::f1;
  BoundMode bound_mode = BoundMode::unbounded_01;
  TprDenominator tpr_denominator = TprDenominator::standard;
  SearchMethod search = SearchMethod::automatic;

  /// Throws invalid_argument on grid_points < 3, tau outside (0, 1],
  /// negative epsilon or recompute_every_n == 0.
  void validate() const;
};

enum class Provenance { intersection, mean_fallback, optimized, retained_old };

std::string_view to_string(Provenance p);
std::string_view to_string(Objective o);
std::string_view to_string(BoundMode b);
std::string_view to_string(TprDenominator t);
std::optional<Provenance> parse_provenance(std::string_view text);
std::optional<Objective> parse_objective(std::string_view text);
std::optional<BoundMode> parse_bound_mode(std::string_view text);
std::optional<TprDenominator> parse_tpr_denominator(std::string_view text);

struct ThresholdState {
  double lambda_current = 0.5;
  double lambda_old = 0.5;
  double f1_current = 0.0;
  double f1_old = 0.0;
  Provenance provenance = Provenance::mean_fallback;
  std::uint64_t gallery_version = 0;
  double tau = 0.8;

  bool operator==(const ThresholdState&) const = default;
};

struct OptimizeResult {
  double lambda = 0.0;
  double f1 = 0.0;         // f1 at lambda, always reported
  double objective = 0.0;  // value of the configured objective at lambda
};

/// Objective value over the counts: f1, or |TPR - FPR|.
double objective_value(const ConfusionCounts& counts, const AdaptConfig& config);

/// |TPR(λ) - FPR(λ)| at lambda.
double tpr_fpr_objective(const SimilarityDistributions& dist, double lambda,
                         double epsilon = kDefaultEpsilon,
                         TprDenominator tpr_mode = TprDenominator::standard);

/// Lambda interval searched under the configured bound mode.
struct SearchBounds {
  double lo;
  double hi;
};
SearchBounds search_bounds(const SimilarityDistributions& dist, const AdaptConfig& config);

/// Maximizes the configured objective (f1 by default) over the search bounds.
/// Because the counts are piecewise constant in lambda, the answer is reported
/// as the midpoint of the winning plateau clipped to the bounds; among equally
/// good plateaus the lowest one wins.
OptimizeResult optimize_f1(const SimilarityDistributions& dist, const AdaptConfig& config);

OptimizeResult optimize_by_plateau_scan(const SortedSamples& sorted, SearchBounds bounds,
                                        const AdaptConfig& config);
OptimizeResult optimize_by_grid_golden(const SortedSamples& sorted, SearchBounds bounds,
                                       const AdaptConfig& config);

/// Midpoint of the constant-count interval that contains lambda, clipped to
/// the bounds. The result always evaluates to the same counts as lambda.
double plateau_midpoint(const SortedSamples& sorted, SearchBounds bounds, double lambda);

/// Acceptance rule, first matching case wins:
///   f1(candidate) ≥ τ                       → candidate
///   f1(candidate) ≥ f1 of incumbent          → candidate
///   otherwise                                → incumbent
/// The incumbent is `state.lambda_current`; it becomes lambda_old.
ThresholdState select_threshold(double lambda_candidate, double f1_candidate,
                                const ThresholdState& state, const AdaptConfig& config);

struct AdaptOutcome {
  std::optional<ThresholdState> state;  // prior state when adaptation was skipped
  bool adapted = false;
  std::optional<ErrorCode> skip_code;
  std::string diagnostic;
  // Populated whenever the Gaussian stage ran.
  std::optional<GaussianEstimate> auto_fit;
  std::optional<GaussianEstimate> cross_fit;
  std::optional<IntersectionResult> intersection;
};

/// Full pipeline on a fixed snapshot, no side effects:
/// distributions → Gaussian fits → intersection → initial λ → τ test →
/// optimizer → acceptance rule. Degenerate data (too few samples, zero
/// variance, coinciding fits, inverted means) leaves `prior` untouched and
/// reports the reason.
AdaptOutcome adapt_distributions(const SimilarityDistributions& dist,
                                 const std::optional<ThresholdState>& prior,
                                 const AdaptConfig& config);

AdaptOutcome compute_adaptation(const Gallery& gallery, const std::optional<ThresholdState>& prior,
                                const AdaptConfig& config);

/// compute_adaptation plus resetting the gallery's adaptation counters when
/// the pipeline ran.
AdaptOutcome adapt(Gallery& gallery, const std::optional<ThresholdState>& prior,
                   const AdaptConfig& config);

/// True on cold start, after recompute_every_n registrations, or after any
/// removal that moved the gallery past the state's version.
bool adaptation_due(const Gallery& gallery, const std::optional<ThresholdState>& state,
                    const AdaptConfig& config);

AdaptOutcome maybe_adapt(Gallery& gallery, const std::optional<ThresholdState>& state,
                         const AdaptConfig& config);

/// Holds the published threshold for concurrent readers. Readers get an
/// immutable snapshot; publish swaps it in one step. refresh() serializes
/// adaptation so only one runs at a time.
class ThresholdCell {
 public:
  std::shared_ptr<const ThresholdState> snapshot() const;
  void publish(ThresholdState state);

  /// Runs maybe_adapt under the adaptation lock and publishes the result.
  /// The caller must keep the gallery free of concurrent writers meanwhile.
  AdaptOutcome refresh(Gallery& gallery, const AdaptConfig& config);

 private:
  mutable std::mutex state_mutex_;
  std::mutex adapt_mutex_;
  std::shared_ptr<const ThresholdState> state_;
};

}  // namespace adthresh
