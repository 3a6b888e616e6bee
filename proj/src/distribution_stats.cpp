#include "adthresh/distribution_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "adthresh/error.hpp"

namespace adthresh {

namespace {
constexpr double kLinearCutoff = 1e-12;
}

GaussianEstimate estimate_gaussian(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::insufficient_samples,
                "need at least 2 samples, got " + std::to_string(samples.size()));
  }
  const auto n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double s : samples) sum += s;
  const double mu = sum / n;
  double ss = 0.0;
  for (double s : samples) ss += (s - mu) * (s - mu);
  const double nu = ss / n;
  // Rounding in the mean can leave a tiny positive nu for identical samples.
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  if (!(nu > 0.0) || *lo == *hi) {
    throw Error(ErrorCode::zero_variance, "all " + std::to_string(samples.size()) +
                                              " samples are equal; distribution is degenerate");
  }
  return {mu, std::sqrt(nu), nu, samples.size()};
}

GaussianEstimate make_gaussian(double mu, double sigma, std::size_t n) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::invalid_argument, "sigma must be positive");
  return {mu, sigma, sigma * sigma, n};
}

double gaussian_pdf(const GaussianEstimate& g, double x) {
  const double z = (x - g.mu) / g.sigma;
  return std::exp(-0.5 * z * z) / (g.sigma * std::sqrt(2.0 * std::numbers::pi));
}

double gaussian_log_pdf(const GaussianEstimate& g, double x) {
  const double z = (x - g.mu) / g.sigma;
  return -0.5 * z * z - std::log(g.sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
}

IntersectionResult intersect_gaussians(const GaussianEstimate& auto_fit,
                                       const GaussianEstimate& cross_fit) {
  const double mu1 = auto_fit.mu, nu1 = auto_fit.nu;
  const double mu2 = cross_fit.mu, nu2 = cross_fit.nu;

  IntersectionResult result;
  auto& [a, b, c] = result.coeffs;
  a = nu1 - nu2;
  b = 2.0 * (mu1 * nu2 - mu2 * nu1);
  c = nu1 * mu2 * mu2 - nu2 * mu1 * mu1 - nu1 * nu2 * std::log(nu1 / nu2);

  if (std::abs(a) <= kLinearCutoff) {
    if (b == 0.0 || std::abs(b) <= 1e-15 * (std::abs(mu1 * nu2) + std::abs(mu2 * nu1))) {
      throw Error(ErrorCode::identical_distributions,
                  "auto and cross fits coincide; no separating threshold exists");
    }
    double root;
    if (nu1 == nu2) {
      // -C/B reduces to the midpoint exactly; evaluating it directly avoids
      // the μ₁² - μ₂² cancellation.
      root = 0.5 * (mu1 + mu2);
    } else {
      root = -c / b;
      // One Newton step on the full quadratic absorbs the dropped A·x² term.
      const double slope = 2.0 * a * root + b;
      if (slope != 0.0) root -= ((a * root + b) * root + c) / slope;
    }
    result.roots.push_back(root);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      if (q == 0.0) {
        result.roots.push_back(0.0);
      } else {
        result.roots.push_back(q / a);
        result.roots.push_back(c / q);
        std::sort(result.roots.begin(), result.roots.end());
      }
    }
  }

  const double lo = std::min(mu1, mu2), hi = std::max(mu1, mu2);
  double best_density = -1.0;
  for (double r : result.roots) {  // ascending, so ties keep the smaller root
    if (r < lo || r > hi) continue;
    const double density = gaussian_pdf(auto_fit, r);
    if (!result.chosen || density > best_density) {
      result.chosen = r;
      best_density = density;
    }
  }
  return result;
}

InitialThreshold initialize_threshold(const IntersectionResult& intersection,
                                      const GaussianEstimate& auto_fit,
                                      const GaussianEstimate& cross_fit) {
  if (!(auto_fit.mu > cross_fit.mu)) {
    throw Error(ErrorCode::inverted_means,
                "mean auto similarity must exceed mean cross similarity");
  }
  if (intersection.chosen) {
    const double r = *intersection.chosen;
    if (r >= cross_fit.mu && r <= auto_fit.mu && r >= 0.0 && r <= 1.0) {
      return {r, InitSource::intersection};
    }
  }
  return {0.5 * (cross_fit.mu + auto_fit.mu), InitSource::mean_fallback};
}

HistogramSummary histogram(std::span<const double> samples, std::size_t bins) {
  if (samples.empty()) throw Error(ErrorCode::insufficient_samples, "histogram of no samples");
  if (bins == 0) throw Error(ErrorCode::invalid_argument, "bins must be positive");

  auto [min_it, max_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *min_it, hi = *max_it;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);

  HistogramSummary h;
  h.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i < bins; ++i) h.bin_edges[i] = lo + static_cast<double>(i) * width;
  h.bin_edges[bins] = hi;
  h.counts.assign(bins, 0);
  for (double s : samples) {
    auto idx = static_cast<std::size_t>(std::floor((s - lo) / width));
    ++h.counts[std::min(idx, bins - 1)];
  }
  const double total = static_cast<double>(samples.size());
  h.densities.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    h.densities[i] = static_cast<double>(h.counts[i]) / (total * width);
  }
  return h;
}

}  // namespace adthresh
