#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "tmeval/alignment.hpp"
#include "tmeval/error.hpp"

namespace tmeval {
namespace {

Topic make_topic(int index, const std::vector<std::string>& words) {
  Topic t;
  t.topic_index = index;
  for (const auto& w : words) t.keywords.push_back({w, std::nullopt});
  return t;
}

TEST(TopicVector, MeanOfKeywordEmbeddings) {
  EmbeddingTable emb{2, {{"a", {1, 2}}, {"x", {1, 0}}, {"y", {0, 1}}}};
  EXPECT_EQ(topic_vector("m", make_topic(0, {"a"}), emb, {}).vector, (std::vector<double>{1, 2}));
  const auto tv = topic_vector("m", make_topic(1, {"x", "y"}), emb, {});
  EXPECT_EQ(tv.vector, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(tv.keywords_used, 2);
}

TEST(TopicVector, OnlyTopKKeywordsByRank) {
  EmbeddingTable emb{1, {{"a", {1}}, {"b", {3}}, {"c", {100}}}};
  AlignmentConfig cfg;
  cfg.top_k_keywords = 2;
  EXPECT_EQ(topic_vector("m", make_topic(0, {"a", "b", "c"}), emb, cfg).vector[0], 2.0);
}

TEST(TopicVector, MissingKeywordPolicies) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  EmbeddingTable emb{4, {}};
  std::vector<std::string> words;
  for (int k = 0; k < 30; ++k) {
    words.push_back("w" + std::to_string(k));
    if (k == 7 || k == 19) continue;
    emb.vectors[words.back()] = {g(rng), g(rng), g(rng), g(rng)};
  }
  const auto topic = make_topic(0, words);
  try {
    topic_vector("m", topic, emb, {});
    FAIL();
  } catch (const InvariantError& e) {
    EXPECT_NE(std::string(e.what()).find("'w7'"), std::string::npos);
  }

  AlignmentConfig skip;
  skip.missing_keyword_policy = MissingKeywordPolicy::skip;
  Warnings w;
  const auto tv = topic_vector("m", topic, emb, skip, &w);
  EXPECT_EQ(tv.keywords_used, 28);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].code, "missing_embedding");
  std::vector<double> mean(4, 0.0);
  for (const auto& [_, v] : emb.vectors) {
    for (int d = 0; d < 4; ++d) mean[d] += v[d] / 28.0;
  }
  for (int d = 0; d < 4; ++d) EXPECT_NEAR(tv.vector[d], mean[d], 1e-12);
}

TEST(Cosine, HandValues) {
  const std::vector<double> v{0.3, -2.0, 5.5};
  EXPECT_NEAR(cosine(v, v), 1.0, 1e-15);
  EXPECT_EQ(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 0.0);
  EXPECT_NEAR(cosine(std::vector<double>{1, 1}, std::vector<double>{1, 0}), 0.70711, 1e-5);
}

TEST(Cosine, DegenerateAndMismatchedInputsThrow) {
  try {
    cosine(std::vector<double>{0, 0}, std::vector<double>{1, 0});
    FAIL();
  } catch (const InvariantError& e) {
    EXPECT_NE(std::string(e.what()).find("degenerate topic vector"), std::string::npos);
  }
  EXPECT_THROW(cosine(std::vector<double>{1}, std::vector<double>{1, 0}), InvariantError);
}

TEST(Cosine, SymmetricBoundedAndScaleInvariant) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> a(16);
    std::vector<double> b(16);
    for (auto& x : a) x = g(rng);
    for (auto& x : b) x = g(rng);
    const double c = cosine(a, b);
    ASSERT_EQ(c, cosine(b, a));
    ASSERT_GE(c, -1.0);
    ASSERT_LE(c, 1.0);
    const double s = scale(rng);
    auto sa = a;
    for (auto& x : sa) x *= s;
    ASSERT_NEAR(cosine(sa, b), c, 1e-12);
  }
}

// ---------------------------------------------------------------------------

SimilarityMatrix three_topics(double bs, double bl, double sl) {
  SimilarityMatrix sim;
  sim.topics = {{"B", 0}, {"L", 0}, {"S", 0}};
  sim.values = Eigen::MatrixXd::Identity(3, 3);
  sim.values(0, 2) = sim.values(2, 0) = bs;
  sim.values(0, 1) = sim.values(1, 0) = bl;
  sim.values(1, 2) = sim.values(2, 1) = sl;
  return sim;
}

TEST(GroupTopics, IdenticalVectorsFormOneTriplet) {
  std::vector<TopicVector> vs{{"B", 0, {1, 2}, 1}, {"S", 0, {1, 2}, 1}, {"L", 0, {1, 2}, 1}};
  const auto r = group_topics(vs, AlignmentConfig{});
  ASSERT_EQ(r.groups.size(), 1u);
  EXPECT_EQ(r.groups[0].category, MatchCategory::triplet);
  EXPECT_NEAR(*r.groups[0].avg_similarity, 1.0, 1e-15);
}

TEST(GroupTopics, FailedTriangleFallsBackToBestPair) {
  const auto r = group_topics(three_topics(0.91, 0.90, 0.70), 0.82);
  ASSERT_EQ(r.groups.size(), 2u);
  EXPECT_EQ(r.groups[0].category, MatchCategory::semi);
  EXPECT_EQ(r.groups[0].members, (std::vector<TopicRef>{{"B", 0}, {"S", 0}}));
  EXPECT_EQ(*r.groups[0].avg_similarity, 0.91);
  EXPECT_EQ(r.groups[1].category, MatchCategory::unique);
  EXPECT_EQ(r.groups[1].members, (std::vector<TopicRef>{{"L", 0}}));
}

TEST(GroupTopics, EqualScoresBreakOnSortedMembers) {
  // {B,L} sorts before {B,S}, so it wins the tie
  const auto r = group_topics(three_topics(0.90, 0.90, 0.70), 0.82);
  ASSERT_EQ(r.groups.size(), 2u);
  EXPECT_EQ(r.groups[0].members, (std::vector<TopicRef>{{"B", 0}, {"L", 0}}));
  EXPECT_EQ(r.groups[1].members, (std::vector<TopicRef>{{"S", 0}}));
}

TEST(GroupTopics, ThresholdIsInclusive) {
  const auto r = group_topics(three_topics(0.82, 0.82, 0.82), 0.82);
  ASSERT_EQ(r.groups.size(), 1u);
  EXPECT_EQ(r.groups[0].category, MatchCategory::triplet);
}

TEST(GroupTopics, TwoModelsSkipTriplets) {
  SimilarityMatrix sim;
  sim.topics = {{"A", 0}, {"A", 1}, {"B", 0}};
  sim.values = Eigen::MatrixXd::Constant(3, 3, 0.95);
  const auto r = group_topics(sim, 0.82);
  EXPECT_EQ(r.count(MatchCategory::triplet), 0u);
  EXPECT_EQ(r.count(MatchCategory::semi), 1u);
  EXPECT_EQ(r.count(MatchCategory::unique), 1u);
  // same-model pairs never group even at high similarity
  EXPECT_EQ(r.groups[0].members, (std::vector<TopicRef>{{"A", 0}, {"B", 0}}));
}

TEST(GroupTopics, SingleModelIsRejected) {
  SimilarityMatrix sim;
  sim.topics = {{"A", 0}, {"A", 1}};
  sim.values = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_THROW(group_topics(sim, 0.82), InvariantError);
  EXPECT_THROW(group_topics(three_topics(1, 1, 1), 1.0), InvariantError);
}

TEST(GroupTopics, MatchesRescanOracleOnRandomInstances) {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 400; ++trial) {
    const int n_models = trial % 4 == 0 ? 2 : 3;
    const auto sim = oracle::random_similarity(rng, n_models, 6);
    const auto r = group_topics(sim, 0.82);
    ASSERT_EQ(r.groups, oracle::greedy_by_rescan(sim, 0.82)) << "trial " << trial;
    ASSERT_TRUE(oracle::is_partition(r, 0.82));
  }
}

std::vector<TopicVector> fixture_vectors() {
  const auto f = oracle::thirteen_eleven_eleven();
  std::vector<TopicVector> vectors;
  for (const auto& set : f.topic_sets) {
    for (const auto& t : set.topics) {
      vectors.push_back(topic_vector(set.model_id, t, f.embeddings, AlignmentConfig{}));
    }
  }
  return vectors;
}

TEST(GroupTopics, RaisingTauNeverAddsTripletsOnFixtures) {
  const auto sim = similarity_matrix(fixture_vectors());
  std::size_t prev = std::numeric_limits<std::size_t>::max();
  for (double tau : {0.1, 0.5, 0.82, 0.9, 0.917, 0.95, 0.99}) {
    const auto n = group_topics(sim, tau).count(MatchCategory::triplet);
    EXPECT_LE(n, prev) << "tau " << tau;
    prev = n;
  }
  EXPECT_EQ(prev, 0u);
}

// Greedy extraction is not monotone in general: dropping one strong
// triangle can free its members for two weaker disjoint ones.
TEST(GroupTopics, GreedyCanGainTripletsWhenTauRises) {
  SimilarityMatrix sim;
  sim.topics = {{"A", 0}, {"A", 1}, {"B", 0}, {"B", 1}, {"C", 0}, {"C", 1}, {"C", 2}};
  sim.values = Eigen::MatrixXd::Constant(7, 7, 0.1);
  sim.values.diagonal().setOnes();
  auto set = [&](int i, int j, double v) { sim.values(i, j) = sim.values(j, i) = v; };
  // A0-B0-C0 is strongest but has one edge at 0.84
  set(0, 2, 0.99);
  set(0, 4, 0.99);
  set(2, 4, 0.84);
  // A0-B1-C1 and A1-B0-C2 each overlap it in one topic
  set(0, 3, 0.9);
  set(0, 5, 0.9);
  set(3, 5, 0.9);
  set(1, 2, 0.88);
  set(1, 6, 0.88);
  set(2, 6, 0.88);
  EXPECT_EQ(group_topics(sim, 0.82).count(MatchCategory::triplet), 1u);
  EXPECT_EQ(group_topics(sim, 0.85).count(MatchCategory::triplet), 2u);
}

TEST(GroupTopics, ThirteenElevenElevenFixture) {
  const auto vectors = fixture_vectors();
  ASSERT_EQ(vectors.size(), 35u);
  for (int jobs : {1, 4}) {
    const auto r = group_topics(vectors, AlignmentConfig{}, jobs);
    EXPECT_EQ(r.count(MatchCategory::triplet), 5u);
    EXPECT_EQ(r.count(MatchCategory::semi), 6u);
    EXPECT_EQ(r.count(MatchCategory::unique), 8u);
    EXPECT_TRUE(oracle::is_partition(r, 0.82));
  }
}

TEST(SimilarityMatrix, ParallelFillIsIdentical) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<TopicVector> vs;
  for (int m = 0; m < 3; ++m) {
    for (int t = 0; t < 20; ++t) {
      std::vector<double> v(50);
      for (auto& x : v) x = g(rng);
      vs.push_back({"m" + std::to_string(m), t, v, 1});
    }
  }
  const auto a = similarity_matrix(vs, 1);
  const auto b = similarity_matrix(vs, 8);
  EXPECT_TRUE((a.values.array() == b.values.array()).all());
  EXPECT_TRUE((a.values.array() == a.values.transpose().array()).all());
  EXPECT_EQ(similarity_csv(a), similarity_csv(b));
}

TEST(AlignmentCsv, OneRowPerMemberWithLabels) {
  auto r = group_topics(three_topics(0.91, 0.90, 0.70), 0.82);
  Topic labelled = make_topic(0, {"x"});
  labelled.label = "Renewable Energy";
  attach_group_labels(r, {TopicSet{"S", {labelled}}});
  EXPECT_EQ(alignment_csv(r),
            "group_id,category,model_id,topic_index,avg_similarity,label\n"
            "0,semi,B,0,0.91,Renewable Energy\n"
            "0,semi,S,0,0.91,Renewable Energy\n"
            "1,unique,L,0,,\n");
}

}  // namespace
}  // namespace tmeval
