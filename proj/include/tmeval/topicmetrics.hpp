#pragma once

#include <span>
#include <string>
#include <vector>

#include "tmeval/alignment.hpp"
#include "tmeval/corpusstats.hpp"
#include "tmeval/diagnostics.hpp"
#include "tmeval/interchange.hpp"

namespace tmeval {

struct MetricsConfig {
  int top_n = 10;  // |W_T| for coherence, uniqueness and diversity
  double epsilon = kDefaultEpsilon;
  int jobs = 1;

  void validate() const;
};

/// Average NPMI over all unordered pairs of the topic's top_n keywords.
/// Keywords absent from the corpus are skipped with a warning; fewer than
/// two usable keywords throws ("degenerate topic").
///
/// Reported as "C_v" for comparability with published tables, although it
/// is the plain pairwise average, not the indirect-cosine C_v.
double coherence_avg_npmi(const Topic& topic, const CooccurrenceStats& stats,
                          const MetricsConfig& config, Warnings* warnings = nullptr);

inline double coherence_cv(const Topic& topic, const CooccurrenceStats& stats,
                           const MetricsConfig& config, Warnings* warnings = nullptr) {
  return coherence_avg_npmi(topic, stats, config, warnings);
}

struct UniquenessResult {
  std::vector<double> per_topic;
  double model_avg = 0.0;
};

/// Mean inverse multiplicity of each top word within the multiset of all
/// matched topics' top words.
UniquenessResult uniqueness(std::span<const Topic> matched_topics, int top_n,
                            Warnings* warnings = nullptr);

/// Distinct top words divided by total top words.
double diversity(std::span<const Topic> matched_topics, int top_n, Warnings* warnings = nullptr);

struct QualityRow {
  std::string model_id;
  double avg_coherence = 0.0;
  double avg_uniqueness = 0.0;
  double avg_diversity = 0.0;
};

/// One row per topic set, each computed over that model's triplet-matched
/// topics only. Throws if the alignment has no triplet groups.
std::vector<QualityRow> quality_report(const std::vector<TopicSet>& topic_sets,
                                       const AlignmentReport& alignment,
                                       const CooccurrenceStats& stats,
                                       const MetricsConfig& config, Warnings* warnings = nullptr);

std::string quality_report_csv(const std::vector<QualityRow>& rows);

}  // namespace tmeval
