#pragma once

// Cross-model topic alignment.
//
// Each topic becomes the mean embedding of its top keywords. Topics from
// different models are then partitioned greedily: first triangles (one topic
// from each of exactly three models, all three cosines >= tau) in descending
// order of mean cosine, then cross-model pairs in descending cosine, and the
// rest stay unique. Ties break on the lexicographic (model_id, topic_index)
// member list. A topic belongs to exactly one group.

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tmeval/diagnostics.hpp"
#include "tmeval/interchange.hpp"

namespace tmeval {

struct TopicRef {
  std::string model_id;
  int topic_index = 0;

  auto operator<=>(const TopicRef&) const = default;
  bool operator==(const TopicRef&) const = default;
};

struct TopicVector {
  std::string model_id;
  int topic_index = 0;
  std::vector<double> vector;
  int keywords_used = 0;

  TopicRef ref() const { return {model_id, topic_index}; }
};

enum class MissingKeywordPolicy { error, skip };

struct AlignmentConfig {
  int top_k_keywords = 30;
  double tau = 0.82;
  MissingKeywordPolicy missing_keyword_policy = MissingKeywordPolicy::error;

  void validate() const;
};

enum class MatchCategory { triplet, semi, unique };

const char* to_string(MatchCategory category);

struct Group {
  MatchCategory category = MatchCategory::unique;
  std::vector<TopicRef> members;  // sorted
  std::optional<double> avg_similarity;
  std::optional<std::string> label;

  bool operator==(const Group&) const = default;
};

/// Symmetric cosine matrix over every loaded topic (same-model pairs included).
struct SimilarityMatrix {
  std::vector<TopicRef> topics;
  Eigen::MatrixXd values;

  std::optional<std::size_t> position(const TopicRef& ref) const;
  double at(const TopicRef& a, const TopicRef& b) const;
};

struct AlignmentReport {
  std::vector<Group> groups;
  SimilarityMatrix similarity;

  std::size_t count(MatchCategory category) const;
};

/// Mean embedding of the topic's first top_k_keywords tokens.
TopicVector topic_vector(const std::string& model_id, const Topic& topic,
                         const EmbeddingTable& embeddings, const AlignmentConfig& config,
                         Warnings* warnings = nullptr);

/// Cosine similarity clamped to [-1, 1]. Throws on length mismatch or a
/// zero-norm input ("degenerate topic vector").
double cosine(std::span<const double> a, std::span<const double> b);

SimilarityMatrix similarity_matrix(const std::vector<TopicVector>& vectors, int jobs = 1);

AlignmentReport group_topics(const std::vector<TopicVector>& vectors,
                             const AlignmentConfig& config, int jobs = 1);

/// Grouping on a precomputed matrix. Requires >= 2 distinct model ids.
AlignmentReport group_topics(SimilarityMatrix similarity, double tau);

/// Sets each group's label to the first labelled member topic, if any.
void attach_group_labels(AlignmentReport& report, const std::vector<TopicSet>& topic_sets);

/// group_id,category,model_id,topic_index,avg_similarity,label
std::string alignment_csv(const AlignmentReport& report);
/// Square matrix; first column and header carry "model_id:topic_index".
std::string similarity_csv(const SimilarityMatrix& similarity);

}  // namespace tmeval
