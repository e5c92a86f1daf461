#include "tmeval/topicmetrics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "tmeval/csv.hpp"
#include "tmeval/error.hpp"
#include "tmeval/parallel.hpp"

namespace tmeval {

void MetricsConfig::validate() const {
  if (top_n < 2) throw InvariantError("top_n must be >= 2");
  if (!(epsilon > 0.0)) throw InvariantError("epsilon must be positive");
}

double coherence_avg_npmi(const Topic& topic, const CooccurrenceStats& stats,
                          const MetricsConfig& config, Warnings* warnings) {
  config.validate();
  const auto limit = std::min(topic.keywords.size(), static_cast<std::size_t>(config.top_n));
  std::vector<std::string_view> usable;
  for (std::size_t r = 0; r < limit; ++r) {
    const auto& token = topic.keywords[r].token;
    if (stats.doc_freq(token) > 0) {
      usable.push_back(token);
    } else {
      warn(warnings, "keyword_not_in_corpus",
           "topic " + std::to_string(topic.topic_index) + ": keyword '" + token +
               "' absent from corpus, skipped in coherence");
    }
  }
  if (usable.size() < 2) {
    throw InvariantError("degenerate topic " + std::to_string(topic.topic_index) +
                         ": fewer than 2 keywords found in corpus");
  }
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < usable.size(); ++i) {
    for (std::size_t j = i + 1; j < usable.size(); ++j) {
      sum += npmi(stats, usable[i], usable[j], config.epsilon);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

namespace {

std::vector<std::vector<std::string_view>> top_words(std::span<const Topic> topics, int top_n,
                                                     Warnings* warnings) {
  if (topics.empty()) throw InvariantError("no matched topics to evaluate");
  if (top_n < 1) throw InvariantError("top_n must be >= 1");
  std::vector<std::vector<std::string_view>> out;
  out.reserve(topics.size());
  for (const auto& topic : topics) {
    if (topic.keywords.size() < static_cast<std::size_t>(top_n)) {
      warn(warnings, "short_topic",
           "topic " + std::to_string(topic.topic_index) + " has " +
               std::to_string(topic.keywords.size()) + " keywords, fewer than top_n " +
               std::to_string(top_n) + "; truncated");
    }
    const auto limit = std::min(topic.keywords.size(), static_cast<std::size_t>(top_n));
    auto& words = out.emplace_back();
    for (std::size_t r = 0; r < limit; ++r) words.push_back(topic.keywords[r].token);
  }
  return out;
}

}  // namespace

UniquenessResult uniqueness(std::span<const Topic> matched_topics, int top_n, Warnings* warnings) {
  const auto words = top_words(matched_topics, top_n, warnings);
  std::unordered_map<std::string_view, int> count;
  for (const auto& w : words) {
    for (auto token : w) ++count[token];
  }
  UniquenessResult result;
  for (const auto& w : words) {
    double s = 0.0;
    for (auto token : w) s += 1.0 / count[token];
    result.per_topic.push_back(s / static_cast<double>(w.size()));
  }
  double total = 0.0;
  for (double u : result.per_topic) total += u;
  result.model_avg = total / static_cast<double>(result.per_topic.size());
  return result;
}

double diversity(std::span<const Topic> matched_topics, int top_n, Warnings* warnings) {
  const auto words = top_words(matched_topics, top_n, warnings);
  std::set<std::string_view> distinct;
  std::size_t total = 0;
  for (const auto& w : words) {
    distinct.insert(w.begin(), w.end());
    total += w.size();
  }
  return static_cast<double>(distinct.size()) / static_cast<double>(total);
}

std::vector<QualityRow> quality_report(const std::vector<TopicSet>& topic_sets,
                                       const AlignmentReport& alignment,
                                       const CooccurrenceStats& stats,
                                       const MetricsConfig& config, Warnings* warnings) {
  config.validate();
  if (alignment.count(MatchCategory::triplet) == 0) {
    throw InvariantError("nothing to evaluate: alignment has no triplet matches");
  }

  std::vector<std::vector<Topic>> matched(topic_sets.size());
  for (std::size_t m = 0; m < topic_sets.size(); ++m) {
    const auto& set = topic_sets[m];
    for (const auto& group : alignment.groups) {
      if (group.category != MatchCategory::triplet) continue;
      for (const auto& member : group.members) {
        if (member.model_id != set.model_id) continue;
        const auto* topic = set.find(member.topic_index);
        if (topic == nullptr) {
          throw InvariantError("alignment refers to unknown topic " + member.model_id + ":" +
                               std::to_string(member.topic_index));
        }
        matched[m].push_back(*topic);
      }
    }
    if (matched[m].empty()) {
      throw InvariantError("nothing to evaluate: model '" + set.model_id +
                           "' has no triplet-matched topics");
    }
  }

  std::vector<QualityRow> rows(topic_sets.size());
  std::vector<Warnings> local(topic_sets.size());
  parallel_for(topic_sets.size(), config.jobs, [&](std::size_t m) {
    auto* sink = warnings != nullptr ? &local[m] : nullptr;
    double coherence = 0.0;
    for (const auto& topic : matched[m]) coherence += coherence_avg_npmi(topic, stats, config, sink);
    rows[m] = {topic_sets[m].model_id, coherence / static_cast<double>(matched[m].size()),
               uniqueness(matched[m], config.top_n, sink).model_avg,
               diversity(matched[m], config.top_n, sink)};
  });
  if (warnings != nullptr) {
    for (auto& w : local) warnings->insert(warnings->end(), w.begin(), w.end());
  }
  return rows;
}

std::string quality_report_csv(const std::vector<QualityRow>& rows) {
  std::string out;
  csv::append_row(out, {"Model", "Average Coherence (C_V)", "Average Uniqueness",
                        "Average Diversity"});
  for (const auto& r : rows) {
    csv::append_row(out, {r.model_id, csv::format_double(r.avg_coherence),
                          csv::format_double(r.avg_uniqueness),
                          csv::format_double(r.avg_diversity)});
  }
  return out;
}

}  // namespace tmeval
