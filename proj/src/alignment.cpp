#include "tmeval/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "tmeval/csv.hpp"
#include "tmeval/error.hpp"
#include "tmeval/parallel.hpp"

namespace tmeval {

void AlignmentConfig::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) throw InvariantError("tau must lie in (0, 1)");
  if (top_k_keywords < 1) throw InvariantError("top_k_keywords must be >= 1");
}

const char* to_string(MatchCategory category) {
  switch (category) {
    case MatchCategory::triplet:
      return "triplet";
    case MatchCategory::semi:
      return "semi";
    case MatchCategory::unique:
      return "unique";
  }
  return "unknown";
}

std::optional<std::size_t> SimilarityMatrix::position(const TopicRef& ref) const {
  const auto it = std::find(topics.begin(), topics.end(), ref);
  if (it == topics.end()) return std::nullopt;
  return static_cast<std::size_t>(it - topics.begin());
}

double SimilarityMatrix::at(const TopicRef& a, const TopicRef& b) const {
  const auto i = position(a);
  const auto j = position(b);
  if (!i || !j) throw InvariantError("topic not present in similarity matrix");
  return values(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(*j));
}

std::size_t AlignmentReport::count(MatchCategory category) const {
  return static_cast<std::size_t>(std::count_if(
      groups.begin(), groups.end(), [&](const Group& g) { return g.category == category; }));
}

TopicVector topic_vector(const std::string& model_id, const Topic& topic,
                         const EmbeddingTable& embeddings, const AlignmentConfig& config,
                         Warnings* warnings) {
  config.validate();
  TopicVector tv{model_id, topic.topic_index, std::vector<double>(embeddings.dim, 0.0), 0};
  const auto limit = std::min(topic.keywords.size(), static_cast<std::size_t>(config.top_k_keywords));
  std::vector<std::string> missing;
  for (std::size_t r = 0; r < limit; ++r) {
    const auto& token = topic.keywords[r].token;
    const auto* vec = embeddings.find(token);
    if (vec == nullptr) {
      if (config.missing_keyword_policy == MissingKeywordPolicy::error) {
        throw InvariantError("no embedding for keyword '" + token + "' of " + model_id +
                             " topic " + std::to_string(topic.topic_index));
      }
      missing.push_back(token);
      continue;
    }
    for (int d = 0; d < embeddings.dim; ++d) tv.vector[d] += (*vec)[d];
    ++tv.keywords_used;
  }
  if (tv.keywords_used == 0) {
    throw InvariantError("no keyword of " + model_id + " topic " +
                         std::to_string(topic.topic_index) + " has an embedding");
  }
  for (auto& x : tv.vector) x /= static_cast<double>(tv.keywords_used);
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    warn(warnings, "missing_embedding",
         model_id + " topic " + std::to_string(topic.topic_index) + ": skipped " +
             std::to_string(missing.size()) + " keyword(s) without embeddings (" + list + ")");
  }
  return tv;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvariantError("cosine of vectors with different lengths");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (!(na > 0.0) || !(nb > 0.0)) throw InvariantError("degenerate topic vector");
  // sqrt of each norm separately keeps cosine(a, b) == cosine(b, a) bitwise
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

SimilarityMatrix similarity_matrix(const std::vector<TopicVector>& vectors, int jobs) {
  SimilarityMatrix sim;
  const auto n = static_cast<Eigen::Index>(vectors.size());
  sim.values.setZero(n, n);
  for (const auto& v : vectors) {
    if (sim.position(v.ref())) {
      throw InvariantError("duplicate topic " + v.model_id + ":" + std::to_string(v.topic_index));
    }
    sim.topics.push_back(v.ref());
  }
  parallel_for(vectors.size(), jobs, [&](std::size_t i) {
    for (std::size_t j = i; j < vectors.size(); ++j) {
      const double c = cosine(vectors[i].vector, vectors[j].vector);
      sim.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c;
      sim.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = c;
    }
  });
  return sim;
}

namespace {

struct Candidate {
  double score;
  std::vector<std::size_t> positions;
  std::vector<TopicRef> members;  // sorted, used for tie-breaking
};

bool ranks_before(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.members < b.members;
}

}  // namespace

AlignmentReport group_topics(SimilarityMatrix similarity, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw InvariantError("tau must lie in (0, 1)");
  const auto& topics = similarity.topics;
  std::map<std::string, std::vector<std::size_t>> by_model;
  for (std::size_t i = 0; i < topics.size(); ++i) by_model[topics[i].model_id].push_back(i);
  if (by_model.size() < 2) throw InvariantError("alignment needs topics from >= 2 models");

  auto sim = [&](std::size_t i, std::size_t j) {
    return similarity.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };
  auto make = [&](double score, std::vector<std::size_t> pos) {
    Candidate c{score, std::move(pos), {}};
    for (auto p : c.positions) c.members.push_back(topics[p]);
    std::sort(c.members.begin(), c.members.end());
    return c;
  };

  std::vector<bool> used(topics.size(), false);
  AlignmentReport report;

  auto extract = [&](std::vector<Candidate> candidates, MatchCategory category) {
    std::sort(candidates.begin(), candidates.end(), ranks_before);
    for (auto& c : candidates) {
      if (std::any_of(c.positions.begin(), c.positions.end(), [&](auto p) { return used[p]; })) {
        continue;
      }
      for (auto p : c.positions) used[p] = true;
      report.groups.push_back({category, std::move(c.members), c.score, std::nullopt});
    }
  };

  if (by_model.size() == 3) {
    auto it = by_model.begin();
    const auto& m0 = (it++)->second;
    const auto& m1 = (it++)->second;
    const auto& m2 = it->second;
    std::vector<Candidate> triangles;
    for (auto a : m0) {
      for (auto b : m1) {
        const double ab = sim(a, b);
        if (ab < tau) continue;
        for (auto c : m2) {
          const double ac = sim(a, c);
          const double bc = sim(b, c);
          if (ac < tau || bc < tau) continue;
          triangles.push_back(make((ab + ac + bc) / 3.0, {a, b, c}));
        }
      }
    }
    extract(std::move(triangles), MatchCategory::triplet);
  }

  std::vector<Candidate> pairs;
  for (std::size_t i = 0; i < topics.size(); ++i) {
    if (used[i]) continue;
    for (std::size_t j = i + 1; j < topics.size(); ++j) {
      if (used[j] || topics[i].model_id == topics[j].model_id) continue;
      if (sim(i, j) >= tau) pairs.push_back(make(sim(i, j), {i, j}));
    }
  }
  extract(std::move(pairs), MatchCategory::semi);

  std::vector<TopicRef> rest;
  for (std::size_t i = 0; i < topics.size(); ++i) {
    if (!used[i]) rest.push_back(topics[i]);
  }
  std::sort(rest.begin(), rest.end());
  for (auto& r : rest) {
    report.groups.push_back({MatchCategory::unique, {std::move(r)}, std::nullopt, std::nullopt});
  }
  report.similarity = std::move(similarity);
  return report;
}

AlignmentReport group_topics(const std::vector<TopicVector>& vectors,
                             const AlignmentConfig& config, int jobs) {
  config.validate();
  return group_topics(similarity_matrix(vectors, jobs), config.tau);
}

void attach_group_labels(AlignmentReport& report, const std::vector<TopicSet>& topic_sets) {
  for (auto& group : report.groups) {
    for (const auto& member : group.members) {
      const auto set = std::find_if(topic_sets.begin(), topic_sets.end(), [&](const TopicSet& s) {
        return s.model_id == member.model_id;
      });
      if (set == topic_sets.end()) continue;
      const auto* topic = set->find(member.topic_index);
      if (topic != nullptr && topic->label) {
        group.label = topic->label;
        break;
      }
    }
  }
}

std::string alignment_csv(const AlignmentReport& report) {
  std::string out;
  csv::append_row(out, {"group_id", "category", "model_id", "topic_index", "avg_similarity", "label"});
  for (std::size_t g = 0; g < report.groups.size(); ++g) {
    const auto& group = report.groups[g];
    for (const auto& m : group.members) {
      csv::append_row(out, {std::to_string(g), to_string(group.category), m.model_id,
                            std::to_string(m.topic_index),
                            group.avg_similarity ? csv::format_double(*group.avg_similarity) : "",
                            group.label.value_or("")});
    }
  }
  return out;
}

std::string similarity_csv(const SimilarityMatrix& similarity) {
  std::string out;
  std::vector<std::string> header{"topic"};
  for (const auto& t : similarity.topics) {
    header.push_back(t.model_id + ":" + std::to_string(t.topic_index));
  }
  csv::append_row(out, header);
  std::vector<std::string> row(header.size());
  for (std::size_t i = 0; i < similarity.topics.size(); ++i) {
    row[0] = header[i + 1];
    for (std::size_t j = 0; j < similarity.topics.size(); ++j) {
      row[j + 1] = csv::format_double(
          similarity.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    csv::append_row(out, row);
  }
  return out;
}

}  // namespace tmeval
