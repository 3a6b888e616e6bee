#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adthresh/gallery.hpp"
#include "adthresh/optimizer.hpp"

namespace adthresh {

struct StreamPolicy {
  AdaptConfig config;
  // Register unmatched queries as new identities (under the query's label).
  bool auto_register = false;
  // Append matched queries to the identity they matched.
  bool append_on_match = false;
  // Use this threshold instead of the adaptive one.
  std::optional<double> fixed_threshold;
  // Used while no adaptive state exists yet.
  double bootstrap_threshold = 0.5;
};

struct StreamEvent {
  std::string query_id;
  std::string true_identity;
  MatchResult match;
  double threshold = 0.0;
  bool registered = false;
  bool correct = false;  // right label when matched, unseen identity when not
};

/// Query-time recognition loop: match against the gallery at the current
/// threshold, optionally grow the gallery, and re-adapt when due.
class RecognitionSession {
 public:
  RecognitionSession(Gallery gallery, StreamPolicy policy);

  StreamEvent process(const Embedding& query);

  const Gallery& gallery() const noexcept { return gallery_; }
  std::shared_ptr<const ThresholdState> threshold_state() const { return cell_.snapshot(); }
  double current_threshold() const;

 private:
  void refresh();

  Gallery gallery_;
  StreamPolicy policy_;
  ThresholdCell cell_;
};

std::string stream_events_to_csv(const std::vector<StreamEvent>& events);

}  // namespace adthresh
