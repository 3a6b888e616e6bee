#include "adthresh/gallery.hpp"

#include <algorithm>
#include <cmath>

#include "adthresh/error.hpp"
#include "adthresh/similarity.hpp"

namespace adthresh {

Gallery::Gallery(std::size_t dimension) : dimension_(dimension) {
  if (dimension < 2) {
    throw Error(ErrorCode::invalid_argument,
                "gallery dimension must be at least 2, got " + std::to_string(dimension));
  }
}

void Gallery::validate(std::span<const double> vector) const {
  if (vector.size() != dimension_) {
    throw Error(ErrorCode::dimension_mismatch, "expected " + std::to_string(dimension_) +
                                                   " components, got " +
                                                   std::to_string(vector.size()));
  }
  for (double v : vector) {
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "non-finite vector component");
  }
  if (detail::norm(vector) == 0.0) {
    throw Error(ErrorCode::zero_norm, "zero vectors cannot be registered");
  }
}

std::string Gallery::mint_instance_id() {
  for (;;) {
    std::string id = "e" + std::to_string(next_id_++);
    if (!index_.contains(id)) return id;
  }
}

std::string Gallery::register_embedding(std::string_view identity, std::span<const double> vector) {
  validate(vector);
  if (identity.empty()) throw Error(ErrorCode::invalid_argument, "identity label is empty");
  Embedding e{mint_instance_id(), std::string(identity), {vector.begin(), vector.end()}};
  std::string id = e.instance_id;
  insert(std::move(e));
  return id;
}

void Gallery::insert(Embedding embedding) {
  validate(embedding.vector);
  if (embedding.identity.empty()) {
    throw Error(ErrorCode::invalid_argument, "identity label is empty");
  }
  if (embedding.instance_id.empty()) {
    throw Error(ErrorCode::invalid_argument, "instance id is empty");
  }
  if (index_.contains(embedding.instance_id)) {
    throw Error(ErrorCode::duplicate_instance_id, embedding.instance_id);
  }
  index_.emplace(embedding.instance_id, embedding.identity);
  auto it = identities_.find(embedding.identity);
  if (it == identities_.end()) {
    it = identities_.emplace(embedding.identity, std::vector<Embedding>{}).first;
  }
  it->second.push_back(std::move(embedding));
  ++change_counter_;
  ++registrations_since_adapt_;
}

bool Gallery::remove(std::string_view instance_id) {
  auto idx = index_.find(std::string(instance_id));
  if (idx == index_.end()) return false;

  auto ident = identities_.find(idx->second);
  auto& list = ident->second;
  list.erase(std::find_if(list.begin(), list.end(),
                          [&](const Embedding& e) { return e.instance_id == instance_id; }));
  if (list.empty()) identities_.erase(ident);
  index_.erase(idx);
  ++change_counter_;
  ++removals_since_adapt_;
  return true;
}

MatchResult Gallery::match_query(std::span<const double> query, double threshold) const {
  if (empty()) throw Error(ErrorCode::empty_gallery, "cannot match against an empty gallery");
  if (query.size() != dimension_) {
    throw Error(ErrorCode::dimension_mismatch, "query has " + std::to_string(query.size()) +
                                                   " components, gallery " +
                                                   std::to_string(dimension_));
  }
  const double query_norm = detail::norm(query);
  if (query_norm == 0.0) throw Error(ErrorCode::zero_norm, "query vector has zero norm");

  MatchResult result;
  const Embedding* best = nullptr;
  // Identities iterate in label order; a strict comparison keeps the first
  // (smallest) label on ties.
  for (const auto& [label, embeddings] : identities_) {
    for (const auto& e : embeddings) {
      double s = detail::cosine_from_parts(detail::dot(query, e.vector), query_norm,
                                           detail::norm(e.vector));
      if (best == nullptr || s > result.best_similarity) {
        best = &e;
        result.best_similarity = s;
      }
    }
  }
  result.nearest_instance_id = best->instance_id;
  result.matched = result.best_similarity >= threshold;
  if (result.matched) result.identity = best->identity;
  return result;
}

bool Gallery::contains(std::string_view instance_id) const {
  return index_.contains(std::string(instance_id));
}

const Embedding* Gallery::find(std::string_view instance_id) const {
  auto idx = index_.find(std::string(instance_id));
  if (idx == index_.end()) return nullptr;
  const auto& list = identities_.find(idx->second)->second;
  auto it = std::find_if(list.begin(), list.end(),
                         [&](const Embedding& e) { return e.instance_id == instance_id; });
  return &*it;
}

void Gallery::mark_adapted() noexcept {
  registrations_since_adapt_ = 0;
  removals_since_adapt_ = 0;
}

void Gallery::restore_counters(std::uint64_t change_counter,
                               std::uint64_t registrations_since_adapt,
                               std::uint64_t removals_since_adapt) noexcept {
  change_counter_ = change_counter;
  registrations_since_adapt_ = registrations_since_adapt;
  removals_since_adapt_ = removals_since_adapt;
}

bool Gallery::same_contents(const Gallery& other) const {
  return dimension_ == other.dimension_ && identities_ == other.identities_;
}

}  // namespace adthresh
