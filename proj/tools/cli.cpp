#include "cli.hpp"

#include <iomanip>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "adthresh/error.hpp"
#include "adthresh/gallery_io.hpp"
#include "adthresh/harness.hpp"
#include "adthresh/real_format.hpp"
#include "adthresh/stream.hpp"
#include "adthresh/synth.hpp"

namespace adthresh::cli {

namespace {

// Flags that override AdaptConfig; unset flags leave the config file (or the
// defaults) in charge.
struct ConfigFlags {
  std::string config_path;
  std::optional<double> tau;
  std::optional<double> epsilon;
  std::optional<std::string> objective;
  std::optional<std::string> bound;
  std::optional<std::string> tpr_denominator;
  std::optional<std::size_t> grid_points;
  std::optional<std::size_t> refine_iters;
  std::optional<std::uint64_t> recompute_every_n;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON file with AdaptConfig fields")
        ->check(CLI::ExistingFile);
    app->add_option("--tau", tau, "target f1 for accepting the initial threshold (default 0.8)");
    app->add_option("--epsilon", epsilon, "division guard (default 1e-9)");
    app->add_option("--objective", objective, "f1 | tpr-fpr-gap")
        ->check(CLI::IsMember({"f1", "tpr-fpr-gap"}));
    app->add_option("--bound", bound, "unbounded | means")
        ->check(CLI::IsMember({"unbounded", "means"}));
    app->add_option("--tpr-denominator", tpr_denominator, "standard | predicted")
        ->check(CLI::IsMember({"standard", "predicted"}));
    app->add_option("--grid-points", grid_points, "coarse grid size (default 512)");
    app->add_option("--refine-iters", refine_iters, "golden-section iterations (default 64)");
    app->add_option("--recompute-every", recompute_every_n,
                    "registrations between adaptations (default 1)");
  }

  AdaptConfig resolve() const {
    AdaptConfig c;
    if (!config_path.empty()) c = parse_config_json(read_text_file(config_path), c);
    if (tau) c.tau = *tau;
    if (epsilon) c.epsilon = *epsilon;
    if (objective) c.objective = *parse_objective(*objective);
    if (bound) c.bound_mode = *parse_bound_mode(*bound);
    if (tpr_denominator) c.tpr_denominator = *parse_tpr_denominator(*tpr_denominator);
    if (grid_points) c.grid_points = *grid_points;
    if (refine_iters) c.refine_iters = *refine_iters;
    if (recompute_every_n) c.recompute_every_n = *recompute_every_n;
    c.validate();
    return c;
  }
};

int cmd_adapt(const std::string& gallery_path, const std::string& state_path,
              const ConfigFlags& flags, std::ostream& out, std::ostream& err) {
  const auto config = flags.resolve();
  Gallery gallery = load_gallery(gallery_path);
  std::optional<ThresholdState> prior;
  if (!state_path.empty()) prior = parse_state_json(read_text_file(state_path));

  const auto outcome = compute_adaptation(gallery, prior, config);
  if (!outcome.adapted) {
    err << outcome.diagnostic << '\n';
    if (outcome.state) out << state_to_json(*outcome.state) << '\n';
    return kExitAdaptSkipped;
  }
  out << state_to_json(*outcome.state) << '\n';
  return kExitOk;
}

void print_summary(const SummaryReport& report, std::ostream& out) {
  out << std::left << std::setw(16) << "threshold" << std::right << std::setw(10) << "auc"
      << std::setw(14) << "accuracy_%" << std::setw(12) << "f1>=0.8_%" << std::setw(14)
      << "acc_gain_%" << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& k : report.kinds) {
    out << std::left << std::setw(16) << k.threshold_kind << std::right << std::setw(10);
    if (k.auc) {
      out << *k.auc;
    } else {
      out << "-";
    }
    out << std::setw(14) << k.mean_accuracy_pct << std::setw(12) << k.f1_ge_0_8_pct
        << std::setw(14);
    if (k.relative_accuracy_gain_pct) {
      out << *k.relative_accuracy_gain_pct;
    } else {
      out << "-";
    }
    out << '\n';
  }
  out << "accuracy: mean over steps; auc: final-step ROC (shared by all kinds)\n";
  out.unsetf(std::ios::floatfield);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive decision thresholds for identity galleries"};
  app.require_subcommand(1);

  // adapt
  std::string adapt_gallery, adapt_state;
  ConfigFlags adapt_flags;
  auto* adapt_cmd = app.add_subcommand("adapt", "Compute the adaptive threshold for a gallery");
  adapt_cmd->add_option("--gallery", adapt_gallery, "embedding file (.csv or .json)")
      ->required()
      ->check(CLI::ExistingFile);
  adapt_cmd->add_option("--state", adapt_state, "prior ThresholdState JSON")
      ->check(CLI::ExistingFile);
  adapt_flags.attach(adapt_cmd);

  // simulate
  std::string sim_embeddings, sim_out, sim_summary, sim_order = "input";
  std::vector<double> sim_fixed{0.3, 0.5, 0.7};
  std::uint64_t sim_seed = 0;
  bool sim_per_step_roc = false;
  std::size_t sim_roc_points = 1001;
  ConfigFlags sim_flags;
  auto* sim_cmd = app.add_subcommand("simulate", "Incremental gallery growth experiment");
  sim_cmd->add_option("--embeddings", sim_embeddings, "embedding file")
      ->required()
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--fixed", sim_fixed, "comma separated fixed thresholds")
      ->delimiter(',');
  sim_cmd->add_option("--order", sim_order, "input | shuffle")
      ->check(CLI::IsMember({"input", "shuffle"}));
  sim_cmd->add_option("--seed", sim_seed, "shuffle seed");
  sim_cmd->add_option("--out", sim_out, "rows output (.csv or .json)")->required();
  sim_cmd->add_option("--summary", sim_summary, "summary output (.json or .csv)");
  sim_cmd->add_flag("--per-step-roc", sim_per_step_roc, "AUC at every step");
  sim_cmd->add_option("--roc-points", sim_roc_points, "ROC grid size (default 1001)");
  sim_flags.attach(sim_cmd);

  // synth
  SynthSpec spec;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic embedding file");
  synth_cmd->add_option("--identities", spec.num_identities)->required();
  synth_cmd->add_option("--per-identity", spec.embeddings_per_identity)->required();
  synth_cmd->add_option("--dim", spec.dimension)->required();
  synth_cmd->add_option("--within", spec.within_spread)->required();
  synth_cmd->add_option("--between", spec.between_spread)->required();
  synth_cmd->add_option("--seed", spec.rng_seed)->required();
  synth_cmd->add_option("--out", synth_out)->required();

  // roc
  std::string roc_embeddings, roc_out;
  std::size_t roc_points = 1001;
  ConfigFlags roc_flags;
  auto* roc_cmd = app.add_subcommand("roc", "Export the ROC curve of a gallery");
  roc_cmd->add_option("--embeddings", roc_embeddings)->required()->check(CLI::ExistingFile);
  roc_cmd->add_option("--points", roc_points, "lambda grid size (default 1001)");
  roc_cmd->add_option("--out", roc_out)->required();
  roc_flags.attach(roc_cmd);

  // simulate-stream
  std::string stream_gallery, stream_queries, stream_out;
  std::optional<double> stream_threshold;
  bool stream_auto_register = false, stream_append = false;
  ConfigFlags stream_flags;
  auto* stream_cmd =
      app.add_subcommand("simulate-stream", "Replay queries against a gallery at query time");
  stream_cmd->add_option("--gallery", stream_gallery)->required()->check(CLI::ExistingFile);
  stream_cmd->add_option("--queries", stream_queries)->required()->check(CLI::ExistingFile);
  stream_cmd->add_option("--threshold", stream_threshold, "fixed threshold instead of adaptive");
  stream_cmd->add_flag("--auto-register", stream_auto_register,
                       "register unmatched queries as new identities");
  stream_cmd->add_flag("--append-on-match", stream_append,
                       "append matched queries to the matched identity");
  stream_cmd->add_option("--out", stream_out, "per-query CSV");
  stream_flags.attach(stream_cmd);

  std::vector<const char*> argv{"adthresh"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*adapt_cmd) return cmd_adapt(adapt_gallery, adapt_state, adapt_flags, out, err);

    if (*sim_cmd) {
      RunOptions options;
      options.config = sim_flags.resolve();
      options.fixed_thresholds = sim_fixed;
      options.order = sim_order == "shuffle" ? IdentityOrder::seeded_shuffle : IdentityOrder::input;
      options.seed = sim_seed;
      options.per_step_roc = sim_per_step_roc;
      options.roc_points = sim_roc_points;
      const auto rows = run_incremental(read_embedding_file(sim_embeddings), options);
      export_rows(rows, sim_out, format_for_path(sim_out));
      const auto report = summarize(rows);
      if (!sim_summary.empty()) export_summary(report, sim_summary, format_for_path(sim_summary));
      print_summary(report, out);
      return kExitOk;
    }

    if (*synth_cmd) {
      const auto file = generate_synthetic(spec);
      write_embedding_file(synth_out, file.dimension, file.embeddings);
      out << "wrote " << file.embeddings.size() << " embeddings to " << synth_out << '\n';
      return kExitOk;
    }

    if (*roc_cmd) {
      const auto config = roc_flags.resolve();
      const auto dist = build_distributions(load_gallery(roc_embeddings));
      const auto curve = roc_export(dist, config, roc_out, roc_points);
      out << "auc=" << format_real(curve.auc) << '\n';
      return kExitOk;
    }

    if (*stream_cmd) {
      StreamPolicy policy;
      policy.config = stream_flags.resolve();
      policy.auto_register = stream_auto_register;
      policy.append_on_match = stream_append;
      policy.fixed_threshold = stream_threshold;
      RecognitionSession session(load_gallery(stream_gallery), policy);
      const auto queries = read_embedding_file(stream_queries);
      if (queries.dimension != session.gallery().dimension()) {
        throw Error(ErrorCode::dimension_mismatch, "queries and gallery differ in dimension");
      }
      std::vector<StreamEvent> events;
      std::size_t correct = 0, registered = 0;
      for (const auto& q : queries.embeddings) {
        events.push_back(session.process(q));
        correct += events.back().correct;
        registered += events.back().registered;
      }
      if (!stream_out.empty()) write_text_file(stream_out, stream_events_to_csv(events));
      out << "queries=" << events.size() << " correct=" << correct
          << " registered=" << registered
          << " final_threshold=" << format_real(session.current_threshold()) << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInput;
}

}  // namespace adthresh::cli
