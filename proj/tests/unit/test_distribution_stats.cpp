#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "adthresh/distribution_stats.hpp"
#include "adthresh/error.hpp"
#include "oracles.hpp"

using namespace adthresh;
using V = std::vector<double>;

TEST(EstimateGaussian, TwoPoints) {
  const auto g = estimate_gaussian(V{0, 1});
  EXPECT_DOUBLE_EQ(g.mu, 0.5);
  EXPECT_DOUBLE_EQ(g.sigma, 0.5);
  EXPECT_DOUBLE_EQ(g.nu, 0.25);
  EXPECT_EQ(g.n, 2u);
}

TEST(EstimateGaussian, PopulationVariance) {
  const auto g = estimate_gaussian(V{0.2, 0.4, 0.6, 0.8});
  EXPECT_NEAR(g.mu, 0.5, 1e-15);
  // (0.09 + 0.01 + 0.01 + 0.09) / 4
  EXPECT_NEAR(g.nu, 0.05, 1e-15);
  EXPECT_NEAR(g.nu, g.sigma * g.sigma, 1e-12 * g.nu);
}

TEST(EstimateGaussian, Degenerate) {
  try {
    estimate_gaussian(V{0.3, 0.3, 0.3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::zero_variance);
  }
  try {
    estimate_gaussian(V{0.3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::insufficient_samples);
  }
}

TEST(GaussianPdf, KnownValues) {
  const auto std_normal = make_gaussian(0, 1);
  EXPECT_NEAR(gaussian_pdf(std_normal, 0), 0.3989422804014327, 1e-16);
  EXPECT_EQ(gaussian_pdf(std_normal, 1), gaussian_pdf(std_normal, -1));
  EXPECT_NEAR(gaussian_pdf(make_gaussian(5, 2), 5), 0.19947114020071635, 1e-16);
  EXPECT_NEAR(gaussian_log_pdf(make_gaussian(0.3, 0.2), 0.7),
              std::log(gaussian_pdf(make_gaussian(0.3, 0.2), 0.7)), 1e-13);
}

TEST(GaussianPdf, IntegratesToOne) {
  for (double sigma : {0.01, 0.2, 3.0}) {
    const auto g = make_gaussian(0.4, sigma);
    const int n = 20000;
    const double lo = g.mu - 8 * sigma, h = 16 * sigma / n;
    double area = 0.5 * (gaussian_pdf(g, lo) + gaussian_pdf(g, lo + n * h));
    for (int i = 1; i < n; ++i) area += gaussian_pdf(g, lo + i * h);
    EXPECT_NEAR(area * h, 1.0, 1e-6);
  }
}

TEST(Intersect, EqualVariancesGiveMidpoint) {
  const auto r = intersect_gaussians(make_gaussian(0.6, 0.1), make_gaussian(0.3, 0.1));
  ASSERT_EQ(r.roots.size(), 1u);
  ASSERT_TRUE(r.chosen);
  EXPECT_NEAR(*r.chosen, 0.45, 1e-12);
}

TEST(Intersect, IdenticalDistributions) {
  try {
    intersect_gaussians(make_gaussian(0.4, 0.1), make_gaussian(0.4, 0.1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::identical_distributions);
  }
}

TEST(Intersect, MatchesBisection) {
  const auto a = make_gaussian(0.6, 0.15), c = make_gaussian(0.1, 0.25);
  const auto r = intersect_gaussians(a, c);
  ASSERT_TRUE(r.chosen);
  const double expected = oracle::bisect_intersection(0.6, 0.15, 0.1, 0.25, 0.1, 0.6);
  EXPECT_NEAR(*r.chosen, expected, 1e-12);
  EXPECT_LE(std::abs(gaussian_pdf(a, *r.chosen) - gaussian_pdf(c, *r.chosen)), 1e-12);
  EXPECT_EQ(r.roots.size(), 2u);
}

TEST(Intersect, CoefficientsFollowDefinition) {
  const auto a = make_gaussian(0.7, 0.2), c = make_gaussian(0.2, 0.1);
  const auto r = intersect_gaussians(a, c);
  EXPECT_DOUBLE_EQ(r.coeffs.a, 0.04 - 0.01);
  EXPECT_NEAR(r.coeffs.b, 2 * (0.7 * 0.01 - 0.2 * 0.04), 1e-16);
  EXPECT_NEAR(r.coeffs.c, 0.04 * 0.04 - 0.01 * 0.49 - 0.04 * 0.01 * std::log(4.0), 1e-16);
}

TEST(Intersect, RandomResidualsAndChosenInBand) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mu(0, 1), sd(0.02, 0.4);
  for (int t = 0; t < 2000; ++t) {
    const auto a = make_gaussian(mu(rng), sd(rng)), c = make_gaussian(mu(rng), sd(rng));
    const auto r = intersect_gaussians(a, c);
    const double peak = std::max(gaussian_pdf(a, a.mu), gaussian_pdf(c, c.mu));
    for (double x : r.roots) {
      EXPECT_LE(std::abs(gaussian_pdf(a, x) - gaussian_pdf(c, x)), 1e-9 * peak);
      // Far-out roots have log densities near -1e9, where one ulp is already
      // about 1e-7, so the log check is relative to magnitude.
      const double la = gaussian_log_pdf(a, x), lc = gaussian_log_pdf(c, x);
      EXPECT_LE(std::abs(la - lc), 1e-12 * std::max(1.0, std::abs(la)))
          << a.mu << " " << a.sigma << " " << c.mu << " " << c.sigma << " root " << x;
    }
    EXPECT_TRUE(std::is_sorted(r.roots.begin(), r.roots.end()));
    if (r.chosen) {
      EXPECT_GE(*r.chosen, std::min(a.mu, c.mu));
      EXPECT_LE(*r.chosen, std::max(a.mu, c.mu));
    }
  }
}

TEST(Intersect, TranslationEquivariance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mu(0, 1), sd(0.05, 0.3), shift(-0.5, 0.5);
  for (int t = 0; t < 500; ++t) {
    const double m1 = mu(rng), s1 = sd(rng), m2 = mu(rng), s2 = sd(rng), d = shift(rng);
    const auto r0 = intersect_gaussians(make_gaussian(m1, s1), make_gaussian(m2, s2));
    const auto r1 = intersect_gaussians(make_gaussian(m1 + d, s1), make_gaussian(m2 + d, s2));
    ASSERT_EQ(r0.roots.size(), r1.roots.size());
    for (std::size_t k = 0; k < r0.roots.size(); ++k) {
      EXPECT_NEAR(r1.roots[k], r0.roots[k] + d, 1e-12 * std::max(1.0, std::abs(r0.roots[k])));
    }
  }
}

TEST(Intersect, NearlyEqualVariances) {
  // |A| below the linear cutoff but not zero.
  const auto a = make_gaussian(0.6, 0.1), c = make_gaussian(0.3, std::sqrt(0.01 + 5e-13));
  const auto r = intersect_gaussians(a, c);
  ASSERT_EQ(r.roots.size(), 1u);
  EXPECT_LE(std::abs(gaussian_log_pdf(a, r.roots[0]) - gaussian_log_pdf(c, r.roots[0])), 1e-9);
}

TEST(InitializeThreshold, Cases) {
  const auto a = make_gaussian(0.6, 0.1), c = make_gaussian(0.3, 0.1);
  IntersectionResult in;
  in.chosen = 0.45;
  auto t = initialize_threshold(in, a, c);
  EXPECT_EQ(t.lambda, 0.45);
  EXPECT_EQ(t.source, InitSource::intersection);

  in.chosen.reset();
  t = initialize_threshold(in, a, c);
  EXPECT_NEAR(t.lambda, 0.45, 1e-15);
  EXPECT_EQ(t.source, InitSource::mean_fallback);

  in.chosen = 0.75;
  t = initialize_threshold(in, a, c);
  EXPECT_NEAR(t.lambda, 0.45, 1e-15);
  EXPECT_EQ(t.source, InitSource::mean_fallback);
}

TEST(InitializeThreshold, OutsideUnitIntervalFallsBack) {
  const auto a = make_gaussian(1.4, 0.1), c = make_gaussian(0.9, 0.1);
  IntersectionResult in;
  in.chosen = 1.15;
  const auto t = initialize_threshold(in, a, c);
  EXPECT_EQ(t.source, InitSource::mean_fallback);
}

TEST(InitializeThreshold, InvertedMeans) {
  IntersectionResult in;
  try {
    initialize_threshold(in, make_gaussian(0.3, 0.1), make_gaussian(0.6, 0.1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::inverted_means);
  }
}

TEST(InitializeThreshold, AlwaysWithinMeans) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> mu(0, 1), sd(0.02, 0.4);
  for (int t = 0; t < 1000; ++t) {
    double m1 = mu(rng), m2 = mu(rng);
    if (m1 == m2) continue;
    if (m1 < m2) std::swap(m1, m2);
    const auto a = make_gaussian(m1, sd(rng)), c = make_gaussian(m2, sd(rng));
    const auto init = initialize_threshold(intersect_gaussians(a, c), a, c);
    EXPECT_GE(init.lambda, c.mu);
    EXPECT_LE(init.lambda, a.mu);
  }
}

TEST(Histogram, TwoBins) {
  const auto h = histogram(V{0, 1}, 2);
  EXPECT_EQ(h.bin_edges, (V{0, 0.5, 1.0}));
  EXPECT_EQ(h.densities, (V{1.0, 1.0}));
}

TEST(Histogram, DegenerateSpan) {
  const auto h = histogram(V{0.4, 0.4, 0.4}, 5);
  ASSERT_EQ(h.bin_edges.size(), 6u);
  EXPECT_LT(h.bin_edges.front(), 0.4);
  EXPECT_GT(h.bin_edges.back(), 0.4);
  int occupied = 0;
  for (auto c : h.counts) occupied += c > 0;
  EXPECT_EQ(occupied, 1);
}

TEST(Histogram, Normalized) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  V s(1000);
  for (auto& x : s) x = n(rng);
  const auto h = histogram(s, 50);
  double mass = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_GE(h.densities[i], 0.0);
    EXPECT_LT(h.bin_edges[i], h.bin_edges[i + 1]);
    mass += h.densities[i] * (h.bin_edges[i + 1] - h.bin_edges[i]);
  }
  EXPECT_NEAR(mass, 1.0, 1e-9);
  EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}), 1000u);
}

TEST(Histogram, Errors) {
  EXPECT_THROW(histogram(V{}, 3), Error);
  EXPECT_THROW(histogram(V{1}, 0), Error);
}
