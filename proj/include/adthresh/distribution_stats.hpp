#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace adthresh {

/// Descriptive normal fit of one similarity distribution.
struct GaussianEstimate {
  double mu = 0.0;
  double sigma = 1.0;  // population standard deviation (divide by n)
  double nu = 1.0;     // sigma²
  std::size_t n = 0;
};

/// Throws insufficient_samples for fewer than 2 samples and zero_variance
/// when every sample is equal.
GaussianEstimate estimate_gaussian(std::span<const double> samples);

/// Builds an estimate from known parameters (tests, synthetic studies).
GaussianEstimate make_gaussian(double mu, double sigma, std::size_t n = 2);

double gaussian_pdf(const GaussianEstimate& g, double x);
double gaussian_log_pdf(const GaussianEstimate& g, double x);

struct QuadraticCoeffs {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

struct IntersectionResult {
  std::vector<double> roots;  // ascending, 0 to 2 entries
  std::optional<double> chosen;
  QuadraticCoeffs coeffs;
};

/// Solves pdf_auto(x) = pdf_cross(x) through
///   A = ν₁ - ν₂,  B = 2(μ₁ν₂ - μ₂ν₁),  C = ν₁μ₂² - ν₂μ₁² - ν₁ν₂·log(ν₁/ν₂)
/// with subscript 1 = auto, 2 = cross.
///
/// |A| ≤ 1e-12 is treated as the equal-variance (linear) case. Otherwise the
/// cancellation-free form q = -(B + sign(B)·√(B²-4AC))/2 gives roots q/A and
/// C/q. `chosen` is the root between the two means; when both qualify the one
/// with the larger density wins, ties to the smaller root.
///
/// Throws identical_distributions when A and B both vanish.
IntersectionResult intersect_gaussians(const GaussianEstimate& auto_fit,
                                       const GaussianEstimate& cross_fit);

enum class InitSource { intersection, mean_fallback };

struct InitialThreshold {
  double lambda = 0.0;
  InitSource source = InitSource::mean_fallback;
};

/// The intersection root when it lies in [μ_cross, μ_auto] ∩ [0, 1], else the
/// midpoint of the two means. Throws inverted_means unless μ_auto > μ_cross.
InitialThreshold initialize_threshold(const IntersectionResult& intersection,
                                      const GaussianEstimate& auto_fit,
                                      const GaussianEstimate& cross_fit);

struct HistogramSummary {
  std::vector<double> bin_edges;  // bins + 1 entries, strictly increasing
  std::vector<double> densities;  // Σ density·width = 1
  std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max]; the last bin is closed on the right.
/// A zero-width span is widened to [v - 0.5, v + 0.5].
HistogramSummary histogram(std::span<const double> samples, std::size_t bins);

}  // namespace adthresh
