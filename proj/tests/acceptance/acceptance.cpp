// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures. Tolerances and seeds are fixed below.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "adthresh/distribution_stats.hpp"
#include "adthresh/error.hpp"
#include "adthresh/evaluation.hpp"
#include "adthresh/gallery.hpp"
#include "adthresh/gallery_io.hpp"
#include "adthresh/harness.hpp"
#include "adthresh/optimizer.hpp"
#include "adthresh/similarity.hpp"
#include "adthresh/synth.hpp"
#include "cli.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace adthresh;

namespace {

constexpr double kRootResidualRel = 1e-9;    // criterion 1, times max peak
constexpr double kMidpointTol = 1e-12;       // criterion 1
constexpr double kAucTol = 0.01;             // criterion 4
constexpr std::size_t kRocPoints = 1001;     // criterion 4

struct Check {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

SimilarityDistributions dist(std::vector<double> a, std::vector<double> c) {
  SimilarityDistributions d;
  d.auto_samples = std::move(a);
  d.cross_samples = std::move(c);
  return d;
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

Check intersection_oracle() {
  Check r;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> mu(-1, 2), sd(0.01, 0.5);
  std::size_t roots = 0;
  for (int t = 0; t < 1000; ++t) {
    double m1 = mu(rng), m2 = mu(rng);
    while (m1 == m2) m2 = mu(rng);
    const auto a = make_gaussian(m1, sd(rng)), c = make_gaussian(m2, sd(rng));
    const auto res = intersect_gaussians(a, c);
    const double peak = std::max(oracle::normal_pdf(a.mu, a.sigma, a.mu),
                                 oracle::normal_pdf(c.mu, c.sigma, c.mu));
    for (double x : res.roots) {
      ++roots;
      const double resid =
          std::abs(oracle::normal_pdf(a.mu, a.sigma, x) - oracle::normal_pdf(c.mu, c.sigma, x));
      if (resid > kRootResidualRel * peak) {
        r.fail("tuple " + std::to_string(t) + " root " + num(x) + " residual " + num(resid));
      }
    }
  }
  for (int t = 0; t < 1000; ++t) {
    double m1 = mu(rng), m2 = mu(rng);
    while (m1 == m2) m2 = mu(rng);
    const double s = sd(rng);
    const auto res = intersect_gaussians(make_gaussian(m1, s), make_gaussian(m2, s));
    const double want = 0.5 * (m1 + m2);
    if (res.roots.size() != 1 || std::abs(res.roots[0] - want) > kMidpointTol) {
      r.fail("equal variance tuple " + std::to_string(t) + " missed midpoint " + num(want));
    }
  }
  if (r.ok) r.detail = std::to_string(roots) + " roots checked";
  return r;
}

Check optimizer_oracle() {
  Check r;
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> size(1, 300);
  for (int t = 0; t < 500; ++t) {
    const std::size_t na = size(rng), nc = size(rng);
    // Alternate continuous and gridded values; the latter force ties.
    auto a = t % 2 ? testutil::gridded_samples(rng, na, 20, 100)
                   : testutil::uniform_samples(rng, na, 0.0, 1.0);
    auto c = t % 2 ? testutil::gridded_samples(rng, nc, -20, 70)
                   : testutil::uniform_samples(rng, nc, -0.3, 0.8);
    const auto res = optimize_f1(dist(a, c), AdaptConfig{});
    const double best = oracle::best_f1(a, c, 0.0, 1.0);
    const double at = oracle::f1(oracle::count(a, c, res.lambda));
    if (at != best || res.lambda < 0.0 || res.lambda > 1.0) {
      r.fail("set " + std::to_string(t) + ": f1 " + num(at) + " vs oracle " + num(best));
    }
  }
  return r;
}

Check confusion_partition() {
  Check r;
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> size(1, 200);
  for (int t = 0; t < 200; ++t) {
    const auto d = dist(testutil::uniform_samples(rng, size(rng), -0.2, 1.0),
                        testutil::uniform_samples(rng, size(rng), -0.4, 0.9));
    std::size_t last_tp = d.auto_samples.size() + 1, last_fp = d.cross_samples.size() + 1;
    for (int k = 0; k <= 100; ++k) {
      const double lambda = -0.5 + 1.6 * k / 100.0;
      const auto c = confusion_at(d, lambda);
      if (c.tp + c.fn != d.auto_samples.size() || c.fp + c.tn != d.cross_samples.size()) {
        r.fail("partition broken at set " + std::to_string(t));
      }
      if (c.tp > last_tp || c.fp > last_fp) r.fail("counts rose at set " + std::to_string(t));
      last_tp = c.tp;
      last_fp = c.fp;
    }
  }
  return r;
}

Check auc_oracle() {
  Check r;
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> size(1, 100);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    // At most 200 values per set: up to 100 on each side.
    auto a = t % 2 ? testutil::gridded_samples(rng, size(rng), 10, 100)
                   : testutil::uniform_samples(rng, size(rng), 0.1, 1.0);
    auto c = t % 2 ? testutil::gridded_samples(rng, size(rng), -10, 80)
                   : testutil::uniform_samples(rng, size(rng), -0.1, 0.8);
    const double got = roc_sweep(dist(a, c), kRocPoints).auc;
    const double want = oracle::mann_whitney_auc(a, c);
    worst = std::max(worst, std::abs(got - want));
    if (std::abs(got - want) > kAucTol) {
      r.fail("set " + std::to_string(t) + ": auc " + num(got) + " vs " + num(want));
    }
  }
  if (r.ok) r.detail = "max deviation " + num(worst);
  return r;
}

Check dominance() {
  Check r;
  SynthSpec spec;
  spec.num_identities = 100;
  spec.embeddings_per_identity = 5;
  spec.dimension = 64;
  spec.within_spread = 0.1;
  spec.between_spread = 1.0;
  spec.rng_seed = 42;
  RunOptions opts;
  opts.fixed_thresholds = {0.3, 0.5, 0.7};
  const auto rows = run_incremental(generate_synthetic(spec), opts);

  for (const auto& adaptive : rows) {
    if (adaptive.threshold_kind != kAdaptiveKind) continue;
    for (const auto& fixed : rows) {
      if (fixed.step == adaptive.step && fixed.threshold_kind != kAdaptiveKind &&
          adaptive.f1 < fixed.f1) {
        r.fail("step " + std::to_string(adaptive.step) + ": adaptive f1 " + num(adaptive.f1) +
               " < " + fixed.threshold_kind + " " + num(fixed.f1));
      }
    }
  }
  const auto report = summarize(rows);
  int positive = 0;
  std::string gains;
  for (const auto& k : report.kinds) {
    if (!k.relative_accuracy_gain_pct) continue;
    gains += " " + k.threshold_kind + "=" + num(*k.relative_accuracy_gain_pct) + "%";
    if (*k.relative_accuracy_gain_pct > 0.0) ++positive;
  }
  if (positive < 2) r.fail("positive gain over only " + std::to_string(positive) + " fixed:" + gains);
  if (r.ok) r.detail = "gains" + gains;
  return r;
}

Check never_worsen() {
  Check r;
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<std::size_t> ids(3, 12), per(2, 5), dim(8, 32);
  std::uniform_real_distribution<double> within(0.2, 0.9), tau(0.5, 1.0);
  std::size_t adapted_calls = 0;
  for (int t = 0; t < 50; ++t) {
    SynthSpec spec;
    spec.num_identities = ids(rng);
    spec.embeddings_per_identity = per(rng);
    spec.dimension = dim(rng);
    spec.within_spread = within(rng);
    spec.rng_seed = rng();
    auto g = gallery_from(generate_synthetic(spec));
    AdaptConfig cfg;
    cfg.tau = tau(rng);
    cfg.bound_mode = t % 2 ? BoundMode::means_bounded : BoundMode::unbounded_01;
    // Half the sequences start from an arbitrary poor prior.
    std::optional<ThresholdState> s;
    if (t % 3 == 0) {
      ThresholdState prior;
      prior.lambda_current = prior.lambda_old = 0.99;
      prior.f1_current = prior.f1_old = 0.0;
      s = prior;
    }
    double last = -1.0;
    for (int k = 0; k < 6; ++k) {
      const auto out = adapt(g, s, cfg);
      if (!out.adapted) break;
      ++adapted_calls;
      s = out.state;
      if (s->f1_current < last) {
        r.fail("gallery " + std::to_string(t) + " call " + std::to_string(k) + ": f1 " +
               num(s->f1_current) + " < " + num(last));
      }
      if (s->provenance == Provenance::optimized && s->f1_current < s->f1_old) {
        r.fail("gallery " + std::to_string(t) + ": optimized f1 below f1_old");
      }
      last = s->f1_current;
    }
  }
  if (adapted_calls == 0) r.fail("no gallery adapted");
  if (r.ok) r.detail = std::to_string(adapted_calls) + " adaptations";
  return r;
}

Check determinism_and_round_trips() {
  Check r;
  testutil::TempDir dir;
  SynthSpec spec;
  spec.num_identities = 20;
  spec.embeddings_per_identity = 4;
  spec.dimension = 32;
  spec.within_spread = 0.15;
  spec.rng_seed = 77;
  const auto synth = generate_synthetic(spec);
  write_embedding_file(dir.file("g.csv"), synth.dimension, synth.embeddings);

  RunOptions opts;
  opts.order = IdentityOrder::seeded_shuffle;
  opts.seed = 5;
  for (int i = 0; i < 2; ++i) {
    const auto loaded = read_embedding_file(dir.file("g.csv"));
    export_rows(run_incremental(loaded, opts), dir.file("run" + std::to_string(i) + ".csv"),
                FileFormat::csv);
  }
  if (read_text_file(dir.file("run0.csv")) != read_text_file(dir.file("run1.csv"))) {
    r.fail("simulate output differs between runs");
  }
  if (read_embedding_file(dir.file("g.csv")).embeddings != synth.embeddings) {
    r.fail("embedding csv round-trip changed values");
  }

  auto g = gallery_from(synth);
  g.remove(synth.embeddings[3].instance_id);
  g.mark_adapted();
  g.register_embedding("late", synth.embeddings[5].vector);
  for (const char* name : {"gallery.csv", "gallery.json"}) {
    save_gallery(g, dir.file(name));
    const auto back = load_gallery(dir.file(name));
    if (!back.same_contents(g) || back.dimension() != g.dimension()) {
      r.fail(std::string(name) + " round-trip lost contents");
    }
  }
  const auto back = load_gallery(dir.file("gallery.json"));
  if (back.change_counter() != g.change_counter() ||
      back.registrations_since_adapt() != g.registrations_since_adapt() ||
      back.removals_since_adapt() != g.removals_since_adapt()) {
    r.fail("gallery.json round-trip lost counters");
  }
  return r;
}

Check degenerate_inputs() {
  Check r;
  testutil::TempDir dir;
  Gallery single(4);
  single.register_embedding("a", std::vector<double>{1, 0, 0, 0});
  single.register_embedding("b", std::vector<double>{0, 1, 0, 0});
  single.register_embedding("c", std::vector<double>{0, 0, 1, 0.5});
  const auto path = dir.file("single.csv");
  save_gallery(single, path);

  std::ostringstream out, err;
  const int code = cli::run({"adapt", "--gallery", path.string()}, out, err);
  if (code != 3) r.fail("in-process exit code " + std::to_string(code));
  const std::string cmd = std::string(ADTHRESH_CLI_PATH) + " adapt --gallery " + path.string() +
                          " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 3) {
    r.fail("binary exit status " + std::to_string(WEXITSTATUS(status)));
  }

  ThresholdState prior;
  prior.lambda_current = prior.lambda_old = 0.37;
  prior.f1_current = prior.f1_old = 0.6;
  const auto outcome = adapt_distributions(dist({0.8, 0.8, 0.8}, {0.1, 0.2, 0.3}), prior, {});
  if (outcome.adapted || outcome.skip_code != ErrorCode::zero_variance) {
    r.fail("zero-variance samples not skipped");
  }
  if (outcome.diagnostic.empty()) r.fail("zero-variance skip has no diagnostic");
  if (!outcome.state || !(*outcome.state == prior)) r.fail("prior state not retained");
  return r;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Check()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "gaussian intersection roots and equal-variance midpoint", 1.0, intersection_oracle},
      {2, "optimize_f1 equals exhaustive plateau maximum", 10.0, optimizer_oracle},
      {3, "confusion partition and monotonicity", 5.0, confusion_partition},
      {4, "roc auc matches mann-whitney", 10.0, auc_oracle},
      {5, "adaptive dominates fixed thresholds on synthetic run", 60.0, dominance},
      {6, "f1_current never worsens on a fixed gallery", 30.0, never_worsen},
      {7, "determinism and gallery round-trips", 10.0, determinism_and_round_trips},
      {8, "degenerate input handling", 1.0, degenerate_inputs},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Check res;
    try {
      res = c.run();
    } catch (const std::exception& e) {
      res.fail(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit_s) res.fail("took " + num(secs) + " s");
    if (!res.ok) ++failures;
    std::printf("%s %d %s (%.3f s, limit %.0f s)%s%s\n", res.ok ? "PASS" : "FAIL", c.id, c.name,
                secs, c.limit_s, res.detail.empty() ? "" : ": ", res.detail.c_str());
  }
  return failures;
}
