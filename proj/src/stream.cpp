#include "adthresh/stream.hpp"

#include "adthresh/real_format.hpp"
#include "csv.hpp"

namespace adthresh {

RecognitionSession::RecognitionSession(Gallery gallery, StreamPolicy policy)
    : gallery_(std::move(gallery)), policy_(std::move(policy)) {
  policy_.config.validate();
  if (!policy_.fixed_threshold) refresh();
}

void RecognitionSession::refresh() {
  if (gallery_.identity_count() < 2) return;
  cell_.refresh(gallery_, policy_.config);
}

double RecognitionSession::current_threshold() const {
  if (policy_.fixed_threshold) return *policy_.fixed_threshold;
  if (auto state = cell_.snapshot()) return state->lambda_current;
  return policy_.bootstrap_threshold;
}

StreamEvent RecognitionSession::process(const Embedding& query) {
  StreamEvent ev;
  ev.query_id = query.instance_id;
  ev.true_identity = query.identity;
  ev.threshold = current_threshold();

  const bool known = gallery_.identities().contains(query.identity);
  if (gallery_.empty()) {
    ev.match.matched = false;
  } else {
    ev.match = gallery_.match_query(query.vector, ev.threshold);
  }
  ev.correct = ev.match.matched ? ev.match.identity == query.identity : !known;

  if (!ev.match.matched && policy_.auto_register) {
    gallery_.register_embedding(query.identity, query.vector);
    ev.registered = true;
  } else if (ev.match.matched && policy_.append_on_match) {
    gallery_.register_embedding(*ev.match.identity, query.vector);
    ev.registered = true;
  }
  if (ev.registered && !policy_.fixed_threshold) refresh();
  return ev;
}

std::string stream_events_to_csv(const std::vector<StreamEvent>& events) {
  std::string out =
      "query_instance_id,true_identity,matched,predicted_identity,nearest_instance_id,"
      "best_similarity,threshold,registered,correct\n";
  for (const auto& ev : events) {
    out += csv::escape(ev.query_id) + ',' + csv::escape(ev.true_identity) + ',' +
           (ev.match.matched ? "1" : "0") + ',' + csv::escape(ev.match.identity.value_or("")) +
           ',' + csv::escape(ev.match.nearest_instance_id) + ',' +
           format_real(ev.match.best_similarity) + ',' + format_real(ev.threshold) + ',' +
           (ev.registered ? "1" : "0") + ',' + (ev.correct ? "1" : "0") + '\n';
  }
  return out;
}

}  // namespace adthresh
