#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "test_util.hpp"
#include "tmeval/error.hpp"
#include "tmeval/interchange.hpp"

namespace tmeval {
namespace {

using testing::TempDir;

constexpr const char* kTopics =
    "model_id,topic_index,rank,token,weight\n"
    "bertopic,0,1,water,0.12\n"
    "bertopic,0,2,energy,\n"
    "bertopic,1,2,network,0.05\n"
    "bertopic,1,1,learning,0.09\n";

constexpr const char* kTheta =
    "doc_id,t0,t1\n"
    "d1,0.7,0.3\n"
    "d2,0.2,0.2\n"
    "d3,0,1\n";

constexpr const char* kCovariates =
    "doc_id,gender,province\n"
    "d1,female,Ontario\n"
    "d2,male,Quebec\n"
    "d3,female,Ontario\n";

BundlePaths write_bundle(const TempDir& dir, const char* theta = kTheta) {
  return {dir.write("topics.csv", kTopics), dir.write("theta.csv", theta),
          dir.write("covariates.csv", kCovariates), std::nullopt};
}

TEST(LoadBundle, ReadsHandWrittenFixture) {
  TempDir dir("bundle");
  const auto b = load_bundle(write_bundle(dir));
  EXPECT_EQ(b.theta.n_docs(), 3u);
  EXPECT_EQ(b.theta.n_topics(), 2u);
  EXPECT_EQ(b.topics.model_id, "bertopic");
  ASSERT_EQ(b.topics.topics.size(), 2u);
  // keywords come back in rank order regardless of file order
  EXPECT_EQ(b.topics.topics[1].keywords[0].token, "learning");
  EXPECT_FALSE(b.topics.topics[0].keywords[1].weight.has_value());
  EXPECT_EQ(b.covariates.column("province")[1], "Quebec");
  EXPECT_DOUBLE_EQ(b.theta.values(1, 0), 0.2);  // not renormalized by default
}

TEST(LoadBundle, NegativeProportionIsReportedWithLine) {
  TempDir dir("negative");
  const auto paths = write_bundle(dir, "doc_id,t0,t1\nd1,0.5,0.5\nd2,-0.01,1.01\nd3,0,1\n");
  try {
    load_bundle(paths);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("negative proportion"), std::string::npos);
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LoadBundle, RenormalizeScalesRows) {
  TempDir dir("renorm");
  LoadOptions opts;
  opts.renormalize = true;
  const auto b = load_bundle(write_bundle(dir), opts);
  EXPECT_DOUBLE_EQ(b.theta.values(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(b.theta.values(1, 1), 0.5);
  EXPECT_TRUE(b.theta.normalized);
}

TEST(LoadBundle, NormalizedFlagRejectsBadRows) {
  TempDir dir("normflag");
  LoadOptions opts;
  opts.normalized = true;
  EXPECT_THROW(load_bundle(write_bundle(dir), opts), ParseError);
}

TEST(LoadBundle, ManifestResolvesRelativePaths) {
  TempDir dir("manifest");
  write_bundle(dir);
  dir.write("embeddings.csv", "token,e0,e1\nwater,1,0\nenergy,0,1\n");
  dir.write("manifest.json", R"({"model_id": "bt", "files": {"topics": "topics.csv",
    "theta": "theta.csv", "covariates": "covariates.csv", "embeddings": "embeddings.csv"},
    "dim": 2, "normalized": false, "provenance": "hand"})");
  const auto b = load_bundle(dir / "manifest.json");
  EXPECT_EQ(b.theta.model_id, "bt");
  ASSERT_TRUE(b.embeddings.has_value());
  EXPECT_EQ(b.embeddings->dim, 2);
}

TEST(LoadBundle, ManifestDimMismatchThrows) {
  TempDir dir("manifest_dim");
  write_bundle(dir);
  dir.write("embeddings.csv", "token,e0,e1\nwater,1,0\n");
  dir.write("manifest.json", R"({"files": {"topics": "topics.csv", "theta": "theta.csv",
    "covariates": "covariates.csv", "embeddings": "embeddings.csv"}, "dim": 3})");
  EXPECT_THROW(load_bundle(dir / "manifest.json"), InvariantError);
}

TEST(LoadBundle, MalformedFilesAreRejected) {
  TempDir dir("malformed");
  EXPECT_THROW(read_topic_set(dir.write("a.csv", "model_id,topic_index,rank,token,weight\n"
                                                  "m,0,1,x,\nm,0,2,x,\n")),
               ParseError);
  EXPECT_THROW(read_topic_set(dir.write("b.csv", "model_id,topic_index,rank,token\nm,0,1,x\n")),
               ParseError);
  EXPECT_THROW(read_theta(dir.write("c.csv", "doc_id,topic0\nd,1\n")), ParseError);
  EXPECT_THROW(read_theta(dir.write("d.csv", "doc_id,t0\nd,1\nd,0\n")), ParseError);
  EXPECT_THROW(read_covariates(dir.write("e.csv", "doc_id,g\nd1,\n")), ParseError);
  EXPECT_THROW(read_embeddings(dir.write("f.csv", "token,e0,e2\nx,1,2\n")), ParseError);
  EXPECT_THROW(read_embeddings(dir.write("g.csv", "token,e0\nx,nan\n")), ParseError);
}

TEST(ValidateBundle, ConsistentBundleHasNoErrors) {
  TempDir dir("valid");
  const auto b = load_bundle(write_bundle(dir));
  const auto r = validate_bundle(b.topics, b.theta, b.covariates);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.doc_count, 3u);
  EXPECT_EQ(r.matched_doc_count, 3u);
}

TEST(ValidateBundle, DocIdMismatchIsAnError) {
  TempDir dir("mismatch");
  auto b = load_bundle(write_bundle(dir));
  b.theta.doc_ids[2] = "d9";
  const auto r = validate_bundle(b.topics, b.theta, b.covariates);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.errors[0].code, "doc_id_mismatch");
  EXPECT_NE(r.errors[0].message.find("doc_id mismatch"), std::string::npos);
  EXPECT_NE(r.errors[0].message.find("d9"), std::string::npos);
  EXPECT_EQ(r.matched_doc_count, 2u);
}

TEST(ValidateBundle, TopicIndexMismatchIsAnError) {
  TempDir dir("topicmismatch");
  auto b = load_bundle(write_bundle(dir));
  b.theta.topic_indices = {0, 2};
  const auto r = validate_bundle(b.topics, b.theta, b.covariates);
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].code, "topic_index_mismatch");
}

TEST(ValidateBundle, SmallCategoryAndLowMassWarn) {
  TempDir dir("warn");
  const auto b = load_bundle(write_bundle(dir));
  const auto r = validate_bundle(b.topics, b.theta, b.covariates);
  bool small = false;
  bool low = false;
  for (const auto& w : r.warnings) {
    small |= w.code == "small_category" && w.message.find("small category") != std::string::npos;
    low |= w.code == "low_theta_mass";
  }
  EXPECT_TRUE(small);  // every category here has < 30 docs
  EXPECT_TRUE(low);    // d2 sums to 0.4
}

TEST(ValidateBundle, TwelveDocProvinceWarnsThirtyDoesNot) {
  TopicSet topics{"m", {{0, std::nullopt, {{"a", std::nullopt}}}}};
  ThetaMatrix theta;
  CovariateTable cov;
  auto& province = cov.columns["province"];
  for (int i = 0; i < 42; ++i) {
    theta.doc_ids.push_back("d" + std::to_string(i));
    cov.doc_ids.push_back("d" + std::to_string(i));
    province.push_back(i < 12 ? "PE" : "ON");
  }
  theta.topic_indices = {0};
  theta.values = Eigen::MatrixXd::Ones(42, 1);
  const auto r = validate_bundle(topics, theta, cov);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].message.find("'PE'"), std::string::npos);
  EXPECT_EQ(r, validate_bundle(topics, theta, cov));  // pure
}

TEST(Renormalize, PreservesRowArgmax) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  ThetaMatrix theta;
  theta.values.resize(200, 6);
  for (Eigen::Index i = 0; i < 200; ++i) {
    theta.doc_ids.push_back("d" + std::to_string(i));
    for (Eigen::Index k = 0; k < 6; ++k) theta.values(i, k) = u(rng);
  }
  theta.topic_indices = {0, 1, 2, 3, 4, 5};
  auto scaled = theta;
  renormalize_rows(scaled);
  for (Eigen::Index i = 0; i < 200; ++i) {
    Eigen::Index a = 0;
    Eigen::Index b = 0;
    theta.values.row(i).maxCoeff(&a);
    scaled.values.row(i).maxCoeff(&b);
    EXPECT_EQ(a, b);
    EXPECT_NEAR(scaled.values.row(i).sum(), 1.0, 1e-12);
  }
}

TEST(Renormalize, ZeroRowIsLeftAlone) {
  ThetaMatrix theta{"m", {"a", "b"}, {0, 1}, Eigen::MatrixXd::Zero(2, 2), false};
  theta.values(0, 0) = 2.0;
  renormalize_rows(theta);
  EXPECT_DOUBLE_EQ(theta.values(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(theta.values(1, 0), 0.0);
  EXPECT_FALSE(theta.normalized);
}

TEST(BundleFiles, WriteThenLoadIsBitExact) {
  TempDir dir("roundtrip");
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ThetaMatrix theta{"m", {}, {3, 7, 11}, Eigen::MatrixXd(50, 3), false};
  CovariateTable cov;
  EmbeddingTable emb{4, {}};
  for (int i = 0; i < 50; ++i) {
    theta.doc_ids.push_back("doc \"" + std::to_string(i) + "\", x");
    cov.doc_ids.push_back(theta.doc_ids.back());
    cov.columns["g"].push_back(i % 3 == 0 ? "a" : "b,c");
    for (int k = 0; k < 3; ++k) theta.values(i, k) = u(rng) / 3.0;
    emb.vectors["tok" + std::to_string(i)] = {u(rng) - 0.5, u(rng) * 1e-300, u(rng) * 1e300, -u(rng)};
  }
  TopicSet topics{"m", {{3, "Water & Energy", {{"water", 0.1 / 3}, {"energy", std::nullopt}}},
                        {7, std::nullopt, {{"x", 1e-17}}}}};
  write_theta(theta, dir / "theta.csv");
  write_covariates(cov, dir / "cov.csv");
  write_embeddings(emb, dir / "emb.csv");
  write_topic_set(topics, dir / "topics.csv");

  const auto t2 = read_theta(dir / "theta.csv", "m");
  EXPECT_EQ(t2.doc_ids, theta.doc_ids);
  EXPECT_EQ(t2.topic_indices, theta.topic_indices);
  EXPECT_TRUE((t2.values.array() == theta.values.array()).all());
  const auto c2 = read_covariates(dir / "cov.csv");
  EXPECT_EQ(c2.columns, cov.columns);
  const auto e2 = read_embeddings(dir / "emb.csv");
  EXPECT_EQ(e2.vectors, emb.vectors);
  const auto s2 = read_topic_set(dir / "topics.csv");
  EXPECT_EQ(s2.topics, topics.topics);
}

// ---------------------------------------------------------------------------

TEST(PValueDisplay, MatchesTableConvention) {
  EXPECT_EQ(format_p_value(3e-16), "<0.0001");
  EXPECT_EQ(format_p_value(0.0450), "0.0450");
  EXPECT_EQ(format_p_value(0.0282), "0.0282");
  EXPECT_EQ(format_p_value(0.9348), "0.9348");
  EXPECT_EQ(format_p_value(0.0001), "0.0001");
  EXPECT_EQ(format_p_value(0.0), "<0.0001");
  EXPECT_EQ(format_p_value(std::nan("")), "NA");
}

EffectTable sample_effects() {
  EffectTable t;
  t.model_id = "bertopic";
  t.rows.push_back({0, "Environmental Science", "Intercept", 0.0568, 0.0014, 39.6711, 3e-16,
                    4990.0, 25, false});
  t.rows.push_back({0, "Environmental Science", "Alberta", 0.0229, 0.0028, 8.1083, 3e-16,
                    4990.0, 25, false});
  t.rows.push_back({0, "Environmental Science", "Ontario", -0.0042, 0.0021, -2.0046, 0.0450,
                    4990.5, 25, false});
  t.rows.push_back({1, "", "Quebec", 0.1, 0.0, std::nan(""), std::nan(""), 12.0, 3, true});
  return t;
}

TEST(EffectTable, CsvColumnsAndDisplay) {
  const auto text = effect_table_csv(sample_effects());
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "model_id,topic_index,topic_label,term,estimate,std_error,t_value,p_value,p_display,"
            "df,samples_used,implied_reference");
  EXPECT_NE(text.find("Alberta,0.0229,0.0028,8.1083,3e-16,<0.0001,4990,25,0"), std::string::npos);
  EXPECT_NE(text.find("0.045,0.0450,"), std::string::npos);
  EXPECT_NE(text.find("NaN,NaN,NA,12,3,1"), std::string::npos);
}

TEST(EffectTable, EmptyTableIsHeaderOnly) {
  TempDir dir("empty_effects");
  write_effect_table(EffectTable{}, dir / "e.csv", TableFormat::csv);
  const auto text = csv::read_text(dir / "e.csv");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  EXPECT_TRUE(read_effect_table(dir / "e.csv", TableFormat::csv).rows.empty());
}

void expect_same_bits(double a, double b) {
  if (std::isnan(a)) {
    EXPECT_TRUE(std::isnan(b));
  } else {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(a), std::bit_cast<std::uint64_t>(b));
  }
}

TEST(EffectTable, RoundTripsInBothFormats) {
  TempDir dir("effects_rt");
  auto table = sample_effects();
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int i = 0; i < 40; ++i) {
    table.rows.push_back({i, "t", "x", g(rng) * 1e-3, std::abs(g(rng)), g(rng),
                          std::abs(g(rng)) / 10, 100.5, 20, false});
  }
  for (auto format : {TableFormat::csv, TableFormat::json}) {
    const auto path = dir / (format == TableFormat::csv ? "e.csv" : "e.json");
    write_effect_table(table, path, format);
    const auto back = read_effect_table(path, format);
    ASSERT_EQ(back.rows.size(), table.rows.size());
    EXPECT_EQ(back.model_id, table.model_id);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& a = table.rows[i];
      const auto& b = back.rows[i];
      EXPECT_EQ(a.topic_index, b.topic_index);
      EXPECT_EQ(a.term, b.term);
      EXPECT_EQ(a.topic_label, b.topic_label);
      EXPECT_EQ(a.samples_used, b.samples_used);
      EXPECT_EQ(a.implied_reference, b.implied_reference);
      expect_same_bits(a.estimate, b.estimate);
      expect_same_bits(a.std_error, b.std_error);
      expect_same_bits(a.t_value, b.t_value);
      expect_same_bits(a.p_value, b.p_value);
      expect_same_bits(a.df, b.df);
    }
  }
}

TEST(EffectTable, AttachLabels) {
  EffectTable t;
  t.rows.push_back({1, "", "Intercept", 0, 0, 0, 0, 0, 0, false});
  TopicSet topics{"m", {{1, "Public Health", {{"vaccine", std::nullopt}}}}};
  attach_topic_labels(t, topics);
  EXPECT_EQ(t.rows[0].topic_label, "Public Health");
}

}  // namespace
}  // namespace tmeval
