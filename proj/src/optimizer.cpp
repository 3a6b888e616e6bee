#include "adthresh/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "adthresh/gallery.hpp"

namespace adthresh {

void AdaptConfig::validate() const {
  if (!(tau > 0.0 && tau <= 1.0)) throw Error(ErrorCode::invalid_argument, "tau must lie in (0, 1]");
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::invalid_argument, "epsilon must be non-negative");
  if (grid_points < 3) throw Error(ErrorCode::invalid_argument, "grid_points must be at least 3");
  if (recompute_every_n == 0) {
    throw Error(ErrorCode::invalid_argument, "recompute_every_n must be positive");
  }
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::intersection: return "intersection";
    case Provenance::mean_fallback: return "mean_fallback";
    case Provenance::optimized: return "optimized";
    case Provenance::retained_old: return "retained_old";
  }
  return "unknown";
}

std::string_view to_string(Objective o) {
  return o == Objective::f1 ? "f1" : "tpr-fpr-gap";
}

std::string_view to_string(BoundMode b) {
  return b == BoundMode::unbounded_01 ? "unbounded" : "means";
}

std::string_view to_string(TprDenominator t) {
  return t == TprDenominator::standard ? "standard" : "predicted";
}

std::optional<Provenance> parse_provenance(std::string_view text) {
  for (auto p : {Provenance::intersection, Provenance::mean_fallback, Provenance::optimized,
                 Provenance::retained_old}) {
    if (text == to_string(p)) return p;
  }
  return std::nullopt;
}

std::optional<Objective> parse_objective(std::string_view text) {
  if (text == "f1") return Objective::f1;
  if (text == "tpr-fpr-gap" || text == "tpr_fpr_gap") return Objective::tpr_fpr_gap;
  return std::nullopt;
}

std::optional<BoundMode> parse_bound_mode(std::string_view text) {
  if (text == "unbounded" || text == "unbounded_01") return BoundMode::unbounded_01;
  if (text == "means" || text == "means_bounded") return BoundMode::means_bounded;
  return std::nullopt;
}

std::optional<TprDenominator> parse_tpr_denominator(std::string_view text) {
  if (text == "standard") return TprDenominator::standard;
  if (text == "predicted") return TprDenominator::predicted;
  return std::nullopt;
}

double objective_value(const ConfusionCounts& counts, const AdaptConfig& config) {
  if (config.objective == Objective::f1) return f1_from_counts(counts, config.epsilon);
  return std::abs(tpr_from_counts(counts, config.epsilon, config.tpr_denominator) -
                  fpr_from_counts(counts, config.epsilon));
}

double tpr_fpr_objective(const SimilarityDistributions& dist, double lambda, double epsilon,
                         TprDenominator tpr_mode) {
  const auto m = metrics_at(dist, lambda, epsilon, tpr_mode);
  return std::abs(m.tpr - m.fpr);
}

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// Plateau k is (values[k-1], values[k]], with values[-1] = -inf and
// values[m] = +inf. Returns the midpoint of its intersection with the bounds,
// or nullopt when they do not overlap.
std::optional<double> clipped_midpoint(const std::vector<double>& values, std::size_t k,
                                       SearchBounds bounds) {
  const double open_lo = k == 0 ? -kInf : values[k - 1];
  const double closed_hi = k == values.size() ? kInf : values[k];
  if (!(open_lo < bounds.hi) || closed_hi < bounds.lo) return std::nullopt;
  const double left = std::max(open_lo, bounds.lo);
  const double right = std::min(closed_hi, bounds.hi);
  double mid = 0.5 * (left + right);
  // Adjacent doubles can round the midpoint onto the open end.
  if (!(mid > open_lo)) mid = right;
  return mid;
}

}  // namespace

SearchBounds search_bounds(const SimilarityDistributions& dist, const AdaptConfig& config) {
  if (config.bound_mode == BoundMode::unbounded_01) return {0.0, 1.0};
  const double mu_auto = mean_of(dist.auto_samples);
  const double mu_cross = mean_of(dist.cross_samples);
  return {std::min(mu_auto, mu_cross), std::max(mu_auto, mu_cross)};
}

double plateau_midpoint(const SortedSamples& sorted, SearchBounds bounds, double lambda) {
  const auto& values = sorted.distinct_values();
  const auto k = static_cast<std::size_t>(
      std::lower_bound(values.begin(), values.end(), lambda) - values.begin());
  if (auto mid = clipped_midpoint(values, k, bounds)) return *mid;
  return std::clamp(lambda, bounds.lo, bounds.hi);
}

OptimizeResult optimize_by_plateau_scan(const SortedSamples& sorted, SearchBounds bounds,
                                        const AdaptConfig& config) {
  const auto& values = sorted.distinct_values();
  std::optional<OptimizeResult> best;
  for (std::size_t k = 0; k <= values.size(); ++k) {
    const auto mid = clipped_midpoint(values, k, bounds);
    if (!mid) continue;
    const auto counts = sorted.confusion_at(*mid);
    const double value = objective_value(counts, config);
    if (!best || value > best->objective) {
      best = OptimizeResult{*mid, f1_from_counts(counts, config.epsilon), value};
    }
  }
  if (!best) {
    // Reversed bounds cannot happen through search_bounds; guard anyway.
    const auto counts = sorted.confusion_at(bounds.lo);
    return {bounds.lo, f1_from_counts(counts, config.epsilon), objective_value(counts, config)};
  }
  return *best;
}

OptimizeResult optimize_by_grid_golden(const SortedSamples& sorted, SearchBounds bounds,
                                       const AdaptConfig& config) {
  auto evaluate = [&](double lambda) { return objective_value(sorted.confusion_at(lambda), config); };

  const std::size_t n = config.grid_points;
  const double span = bounds.hi - bounds.lo;
  auto grid = [&](std::size_t i) {
    return i == n - 1 ? bounds.hi : bounds.lo + span * static_cast<double>(i) / static_cast<double>(n - 1);
  };

  std::size_t best_i = 0;
  double best_lambda = grid(0);
  double best_value = evaluate(best_lambda);
  for (std::size_t i = 1; i < n; ++i) {
    const double v = evaluate(grid(i));
    if (v > best_value) {
      best_value = v;
      best_i = i;
      best_lambda = grid(i);
    }
  }

  // Golden-section refinement inside the neighbouring grid cells. The
  // objective is a step function, so keep the best point seen rather than
  // trusting the final bracket.
  double a = grid(best_i == 0 ? 0 : best_i - 1);
  double b = grid(std::min(best_i + 1, n - 1));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = evaluate(c), fd = evaluate(d);
  auto consider = [&](double lambda, double value) {
    if (value > best_value) {
      best_value = value;
      best_lambda = lambda;
    }
  };
  consider(c, fc);
  consider(d, fd);
  for (std::size_t it = 0; it < config.refine_iters && b - a > 0.0; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = evaluate(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = evaluate(d);
      consider(d, fd);
    }
  }

  const double lambda = plateau_midpoint(sorted, bounds, best_lambda);
  const auto counts = sorted.confusion_at(lambda);
  return {lambda, f1_from_counts(counts, config.epsilon), objective_value(counts, config)};
}

OptimizeResult optimize_f1(const SimilarityDistributions& dist, const AdaptConfig& config) {
  config.validate();
  const SortedSamples sorted(dist);
  const auto bounds = search_bounds(dist, config);
  const std::size_t total = dist.auto_samples.size() + dist.cross_samples.size();
  const bool scan = config.search == SearchMethod::plateau_scan ||
                    (config.search == SearchMethod::automatic && total <= kPlateauScanLimit);
  return scan ? optimize_by_plateau_scan(sorted, bounds, config)
              : optimize_by_grid_golden(sorted, bounds, config);
}

ThresholdState select_threshold(double lambda_candidate, double f1_candidate,
                                const ThresholdState& state, const AdaptConfig& config) {
  ThresholdState next = state;
  next.tau = config.tau;
  next.lambda_old = state.lambda_current;
  next.f1_old = state.f1_current;
  if (f1_candidate >= config.tau || f1_candidate >= state.f1_current) {
    next.lambda_current = lambda_candidate;
    next.f1_current = f1_candidate;
    next.provenance = Provenance::optimized;
  } else {
    next.lambda_current = next.lambda_old;
    next.f1_current = next.f1_old;
    next.provenance = Provenance::retained_old;
  }
  return next;
}

namespace {

AdaptOutcome skipped(const std::optional<ThresholdState>& prior, ErrorCode code,
                     std::string diagnostic) {
  AdaptOutcome out;
  out.state = prior;
  out.skip_code = code;
  out.diagnostic = "adaptation skipped: " + std::move(diagnostic);
  return out;
}

}  // namespace

AdaptOutcome adapt_distributions(const SimilarityDistributions& dist,
                                 const std::optional<ThresholdState>& prior,
                                 const AdaptConfig& config) {
  config.validate();
  if (!dist.supports_adaptation()) {
    return skipped(prior, ErrorCode::insufficient_samples,
                   "need at least 2 auto and 2 cross samples, have " +
                       std::to_string(dist.auto_samples.size()) + " auto and " +
                       std::to_string(dist.cross_samples.size()) + " cross");
  }

  AdaptOutcome out;
  InitialThreshold init;
  try {
    out.auto_fit = estimate_gaussian(dist.auto_samples);
    out.cross_fit = estimate_gaussian(dist.cross_samples);
    out.intersection = intersect_gaussians(*out.auto_fit, *out.cross_fit);
    init = initialize_threshold(*out.intersection, *out.auto_fit, *out.cross_fit);
  } catch (const Error& e) {
    if (!is_degenerate(e.code())) throw;
    AdaptOutcome skip = skipped(prior, e.code(), e.what());
    skip.auto_fit = out.auto_fit;
    skip.cross_fit = out.cross_fit;
    skip.intersection = out.intersection;
    return skip;
  }

  const double f1_init = f1_from_counts(confusion_at(dist, init.lambda), config.epsilon);
  ThresholdState incumbent;
  incumbent.lambda_current = incumbent.lambda_old = init.lambda;
  incumbent.f1_current = incumbent.f1_old = f1_init;
  incumbent.provenance =
      init.source == InitSource::intersection ? Provenance::intersection : Provenance::mean_fallback;
  incumbent.tau = config.tau;

  ThresholdState state = incumbent;
  if (f1_init < config.tau) {
    const auto candidate = optimize_f1(dist, config);
    state = select_threshold(candidate.lambda, candidate.f1, incumbent, config);
  }
  state.gallery_version = dist.gallery_version;

  out.state = state;
  out.adapted = true;
  return out;
}

AdaptOutcome compute_adaptation(const Gallery& gallery, const std::optional<ThresholdState>& prior,
                                const AdaptConfig& config) {
  if (gallery.identity_count() < 2) {
    return skipped(prior, ErrorCode::insufficient_identities,
                   "need at least 2 identities, gallery has " +
                       std::to_string(gallery.identity_count()));
  }
  return adapt_distributions(build_distributions(gallery), prior, config);
}

AdaptOutcome adapt(Gallery& gallery, const std::optional<ThresholdState>& prior,
                   const AdaptConfig& config) {
  auto outcome = compute_adaptation(gallery, prior, config);
  // Skips are data-driven: rerunning on the same contents would skip again.
  gallery.mark_adapted();
  return outcome;
}

bool adaptation_due(const Gallery& gallery, const std::optional<ThresholdState>& state,
                    const AdaptConfig& config) {
  if (!state) return true;
  if (gallery.registrations_since_adapt() >= config.recompute_every_n) return true;
  return gallery.removals_since_adapt() > 0 && state->gallery_version != gallery.change_counter();
}

AdaptOutcome maybe_adapt(Gallery& gallery, const std::optional<ThresholdState>& state,
                         const AdaptConfig& config) {
  if (!adaptation_due(gallery, state, config)) {
    AdaptOutcome out;
    out.state = state;
    out.diagnostic = "adaptation not due";
    return out;
  }
  return adapt(gallery, state, config);
}

std::shared_ptr<const ThresholdState> ThresholdCell::snapshot() const {
  std::lock_guard lock(state_mutex_);
  return state_;
}

void ThresholdCell::publish(ThresholdState state) {
  auto next = std::make_shared<const ThresholdState>(state);
  std::lock_guard lock(state_mutex_);
  state_ = std::move(next);
}

AdaptOutcome ThresholdCell::refresh(Gallery& gallery, const AdaptConfig& config) {
  std::lock_guard adapt_lock(adapt_mutex_);
  std::optional<ThresholdState> prior;
  if (auto current = snapshot()) prior = *current;
  auto outcome = maybe_adapt(gallery, prior, config);
  if (outcome.adapted && outcome.state) publish(*outcome.state);
  return outcome;
}

}  // namespace adthresh
