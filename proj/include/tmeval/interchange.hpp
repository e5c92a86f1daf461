#pragma once

// On-disk interchange formats for topic-model exports.
//
//   topics.csv      model_id,topic_index,rank,token,weight[,label]
//   theta.csv       doc_id,t<k>...
//   covariates.csv  doc_id,<covariate>...
//   embeddings.csv  token,e0..e<dim-1>
//   manifest.json   model_id, files, dim, normalized, provenance
//
// All numeric fields are written in shortest round-trip form, so
// load(write(x)) reproduces every double bit for bit.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tmeval/diagnostics.hpp"

namespace tmeval {

struct Keyword {
  std::string token;
  std::optional<double> weight;

  bool operator==(const Keyword&) const = default;
};

struct Topic {
  int topic_index = 0;
  std::optional<std::string> label;
  std::vector<Keyword> keywords;  // ranked, best first

  bool operator==(const Topic&) const = default;
};

struct TopicSet {
  std::string model_id;
  std::vector<Topic> topics;

  /// Throws InvariantError on duplicate indices, empty or duplicate keywords.
  void validate() const;
  const Topic* find(int topic_index) const;
  std::vector<int> indices() const;
};

struct ThetaMatrix {
  std::string model_id;
  std::vector<std::string> doc_ids;
  std::vector<int> topic_indices;
  Eigen::MatrixXd values;  // n_docs x n_topics
  bool normalized = false;

  std::size_t n_docs() const { return doc_ids.size(); }
  std::size_t n_topics() const { return topic_indices.size(); }
  void validate() const;
};

struct CovariateTable {
  std::vector<std::string> doc_ids;
  std::map<std::string, std::vector<std::string>> columns;

  /// Throws InvariantError if the column does not exist.
  const std::vector<std::string>& column(const std::string& name) const;
  void validate() const;
};

struct EmbeddingTable {
  int dim = 0;
  std::map<std::string, std::vector<double>> vectors;

  const std::vector<double>* find(const std::string& token) const;
  void validate() const;
};

struct ValidationReport {
  std::vector<Diagnostic> errors;
  std::vector<Diagnostic> warnings;
  std::size_t doc_count = 0;
  std::size_t matched_doc_count = 0;

  bool ok() const { return errors.empty(); }
  bool operator==(const ValidationReport&) const = default;
};

struct BundlePaths {
  std::filesystem::path topics;
  std::filesystem::path theta;
  std::filesystem::path covariates;
  std::optional<std::filesystem::path> embeddings;
};

struct Manifest {
  std::string model_id;
  BundlePaths files;
  std::optional<int> dim;
  bool normalized = false;
  std::string provenance;
};

struct LoadOptions {
  /// Scale every theta row with positive sum to 1. Off by default.
  bool renormalize = false;
  /// Require theta rows to sum to 1 within 1e-6.
  bool normalized = false;
};

struct Bundle {
  TopicSet topics;
  ThetaMatrix theta;
  CovariateTable covariates;
  std::optional<EmbeddingTable> embeddings;
};

TopicSet read_topic_set(const std::filesystem::path& path);
ThetaMatrix read_theta(const std::filesystem::path& path, std::string model_id = {},
                       bool normalized = false);
CovariateTable read_covariates(const std::filesystem::path& path);
EmbeddingTable read_embeddings(const std::filesystem::path& path);

/// Paths inside the manifest are resolved relative to its directory.
Manifest read_manifest(const std::filesystem::path& path);

void write_topic_set(const TopicSet& topics, const std::filesystem::path& path);
void write_theta(const ThetaMatrix& theta, const std::filesystem::path& path);
void write_covariates(const CovariateTable& covariates, const std::filesystem::path& path);
void write_embeddings(const EmbeddingTable& embeddings, const std::filesystem::path& path);
/// Writes file paths relative to the manifest's directory when possible.
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

Bundle load_bundle(const BundlePaths& paths, const LoadOptions& options = {});
Bundle load_bundle(const std::filesystem::path& manifest_path, const LoadOptions& options = {});

/// Scales each row with positive sum to sum 1. Zero rows are left as-is.
void renormalize_rows(ThetaMatrix& theta);

/// Cross-file consistency checks; never throws.
ValidationReport validate_bundle(const TopicSet& topics, const ThetaMatrix& theta,
                                 const CovariateTable& covariates);

inline constexpr std::size_t kSmallCategoryDocs = 30;
inline constexpr double kLowThetaMass = 0.5;

// ---------------------------------------------------------------------------
// Effect tables

struct EffectRow {
  int topic_index = 0;
  std::string topic_label;
  std::string term;
  double estimate = 0.0;
  double std_error = 0.0;
  double t_value = 0.0;
  double p_value = 0.0;
  double df = 0.0;
  int samples_used = 0;
  /// True for the reference category row, whose coefficient is implied by
  /// the others (minus their sum) rather than fitted directly.
  bool implied_reference = false;
};

struct EffectTable {
  std::string model_id;
  std::vector<EffectRow> rows;
};

enum class TableFormat { csv, json };

/// "<0.0001" below 1e-4, "NA" for NaN, otherwise four decimals.
std::string format_p_value(double p);

std::string effect_table_csv(const EffectTable& table);
std::string effect_table_json(const EffectTable& table);
void write_effect_table(const EffectTable& table, const std::filesystem::path& path,
                        TableFormat format);
EffectTable read_effect_table(const std::filesystem::path& path, TableFormat format);

/// Fills topic_label from the topic set where a label exists.
void attach_topic_labels(EffectTable& table, const TopicSet& topics);

}  // namespace tmeval
