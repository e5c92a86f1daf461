#include "tmeval/interchange.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "tmeval/csv.hpp"
#include "tmeval/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tmeval {

namespace {

constexpr double kRowSumTolerance = 1e-6;

int parse_topic_column(const std::string& name, const std::string& source) {
  if (name.size() < 2 || name[0] != 't') {
    throw ParseError(source, 1, "theta column '" + name + "' is not of the form t<k>");
  }
  const auto k = csv::parse_int(std::string_view(name).substr(1), source, 1);
  if (k < 0) throw ParseError(source, 1, "negative topic index in column '" + name + "'");
  return static_cast<int>(k);
}

template <typename Range>
void require_unique_ids(const Range& ids, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw InvariantError(std::string("duplicate ") + what + " '" + id + "'");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Domain type invariants

void TopicSet::validate() const {
  std::set<int> indices;
  for (const auto& topic : topics) {
    if (topic.topic_index < 0) {
      throw InvariantError("negative topic_index " + std::to_string(topic.topic_index));
    }
    if (!indices.insert(topic.topic_index).second) {
      throw InvariantError("duplicate topic_index " + std::to_string(topic.topic_index) +
                           " in model '" + model_id + "'");
    }
    if (topic.keywords.empty()) {
      throw InvariantError("topic " + std::to_string(topic.topic_index) + " has no keywords");
    }
    std::unordered_set<std::string> tokens;
    for (const auto& kw : topic.keywords) {
      if (kw.token.empty()) {
        throw InvariantError("empty token in topic " + std::to_string(topic.topic_index));
      }
      if (!tokens.insert(kw.token).second) {
        throw InvariantError("token '" + kw.token + "' repeated in topic " +
                             std::to_string(topic.topic_index));
      }
    }
  }
}

const Topic* TopicSet::find(int topic_index) const {
  for (const auto& topic : topics) {
    if (topic.topic_index == topic_index) return &topic;
  }
  return nullptr;
}

std::vector<int> TopicSet::indices() const {
  std::vector<int> out;
  out.reserve(topics.size());
  for (const auto& t : topics) out.push_back(t.topic_index);
  return out;
}

void ThetaMatrix::validate() const {
  if (static_cast<std::size_t>(values.rows()) != doc_ids.size() ||
      static_cast<std::size_t>(values.cols()) != topic_indices.size()) {
    throw InvariantError("theta shape does not match doc_ids/topic_indices");
  }
  require_unique_ids(doc_ids, "doc_id");
  std::set<int> seen;
  for (int k : topic_indices) {
    if (!seen.insert(k).second) {
      throw InvariantError("duplicate theta topic index " + std::to_string(k));
    }
  }
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index k = 0; k < values.cols(); ++k) {
      const double v = values(i, k);
      if (!std::isfinite(v)) {
        throw InvariantError("non-finite proportion for doc '" + doc_ids[i] + "'");
      }
      if (v < 0.0) {
        throw InvariantError("negative proportion for doc '" + doc_ids[i] + "'");
      }
    }
    if (normalized && std::abs(values.row(i).sum() - 1.0) > kRowSumTolerance) {
      throw InvariantError("row for doc '" + doc_ids[i] + "' does not sum to 1");
    }
  }
}

const std::vector<std::string>& CovariateTable::column(const std::string& name) const {
  const auto it = columns.find(name);
  if (it == columns.end()) throw InvariantError("unknown covariate '" + name + "'");
  return it->second;
}

void CovariateTable::validate() const {
  require_unique_ids(doc_ids, "doc_id");
  for (const auto& [name, labels] : columns) {
    if (labels.size() != doc_ids.size()) {
      throw InvariantError("covariate '" + name + "' length differs from doc_ids");
    }
    if (labels.empty() && !doc_ids.empty()) {
      throw InvariantError("covariate '" + name + "' has no categories");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i].empty()) {
        throw InvariantError("empty category label for covariate '" + name + "', doc '" +
                             doc_ids[i] + "'");
      }
    }
  }
}

const std::vector<double>* EmbeddingTable::find(const std::string& token) const {
  const auto it = vectors.find(token);
  return it == vectors.end() ? nullptr : &it->second;
}

void EmbeddingTable::validate() const {
  if (dim <= 0) throw InvariantError("embedding dim must be positive");
  for (const auto& [token, vec] : vectors) {
    if (static_cast<int>(vec.size()) != dim) {
      throw InvariantError("embedding for '" + token + "' has wrong length");
    }
    for (double x : vec) {
      if (!std::isfinite(x)) throw InvariantError("non-finite embedding for '" + token + "'");
    }
  }
}

// ---------------------------------------------------------------------------
// Readers

TopicSet read_topic_set(const fs::path& path) {
  const auto table = csv::read_file(path);
  const auto c_model = table.require_column("model_id");
  const auto c_index = table.require_column("topic_index");
  const auto c_rank = table.require_column("rank");
  const auto c_token = table.require_column("token");
  const auto c_weight = table.require_column("weight");
  const auto c_label = table.column("label");

  struct Entry {
    long long rank;
    std::size_t line;
    Keyword kw;
  };
  std::map<int, std::vector<Entry>> by_topic;
  std::map<int, std::optional<std::string>> labels;
  std::vector<int> order;

  TopicSet set;
  for (const auto& row : table.rows) {
    const auto& f = row.fields;
    if (set.model_id.empty()) {
      set.model_id = f[c_model];
    } else if (f[c_model] != set.model_id) {
      throw ParseError(table.source, row.line,
                       "mixed model_id '" + f[c_model] + "' (expected '" + set.model_id + "')");
    }
    const auto index = csv::parse_int(f[c_index], table.source, row.line);
    if (index < 0) throw ParseError(table.source, row.line, "negative topic_index");
    const auto rank = csv::parse_int(f[c_rank], table.source, row.line);
    if (f[c_token].empty()) throw ParseError(table.source, row.line, "empty token");
    Keyword kw{f[c_token], std::nullopt};
    if (!f[c_weight].empty()) kw.weight = csv::parse_double(f[c_weight], table.source, row.line);

    const int k = static_cast<int>(index);
    if (!by_topic.contains(k)) order.push_back(k);
    by_topic[k].push_back({rank, row.line, std::move(kw)});
    if (c_label != csv::npos && !f[c_label].empty()) labels[k] = f[c_label];
  }

  for (int k : order) {
    auto& entries = by_topic[k];
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.rank < b.rank; });
    Topic topic;
    topic.topic_index = k;
    if (labels.contains(k)) topic.label = labels[k];
    std::unordered_set<std::string> seen;
    for (auto& e : entries) {
      if (!seen.insert(e.kw.token).second) {
        throw ParseError(table.source, e.line,
                         "token '" + e.kw.token + "' repeated in topic " + std::to_string(k));
      }
      topic.keywords.push_back(std::move(e.kw));
    }
    set.topics.push_back(std::move(topic));
  }
  set.validate();
  return set;
}

ThetaMatrix read_theta(const fs::path& path, std::string model_id, bool normalized) {
  const auto table = csv::read_file(path);
  if (table.header.empty() || table.header[0] != "doc_id") {
    throw ParseError(table.source, 1, "first column must be doc_id");
  }
  ThetaMatrix theta;
  theta.model_id = std::move(model_id);
  theta.normalized = normalized;
  for (std::size_t c = 1; c < table.header.size(); ++c) {
    theta.topic_indices.push_back(parse_topic_column(table.header[c], table.source));
  }
  const auto n = table.rows.size();
  const auto k = theta.topic_indices.size();
  theta.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table.rows[i];
    if (!seen.insert(row.fields[0]).second) {
      throw ParseError(table.source, row.line, "duplicate doc_id '" + row.fields[0] + "'");
    }
    theta.doc_ids.push_back(row.fields[0]);
    double sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      const double v = csv::parse_double(row.fields[c + 1], table.source, row.line);
      if (!std::isfinite(v)) throw ParseError(table.source, row.line, "non-finite proportion");
      if (v < 0.0) throw ParseError(table.source, row.line, "negative proportion");
      theta.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v;
      sum += v;
    }
    if (normalized && std::abs(sum - 1.0) > kRowSumTolerance) {
      throw ParseError(table.source, row.line, "row does not sum to 1 but normalized is set");
    }
  }
  theta.validate();
  return theta;
}

CovariateTable read_covariates(const fs::path& path) {
  const auto table = csv::read_file(path);
  if (table.header.empty() || table.header[0] != "doc_id") {
    throw ParseError(table.source, 1, "first column must be doc_id");
  }
  CovariateTable cov;
  std::vector<std::vector<std::string>> cols(table.header.size() - 1);
  std::unordered_set<std::string> seen;
  for (const auto& row : table.rows) {
    if (!seen.insert(row.fields[0]).second) {
      throw ParseError(table.source, row.line, "duplicate doc_id '" + row.fields[0] + "'");
    }
    cov.doc_ids.push_back(row.fields[0]);
    for (std::size_t c = 1; c < row.fields.size(); ++c) {
      if (row.fields[c].empty()) {
        throw ParseError(table.source, row.line,
                         "empty category label in column '" + table.header[c] + "'");
      }
      cols[c - 1].push_back(row.fields[c]);
    }
  }
  for (std::size_t c = 1; c < table.header.size(); ++c) {
    if (!cov.columns.emplace(table.header[c], std::move(cols[c - 1])).second) {
      throw ParseError(table.source, 1, "duplicate column '" + table.header[c] + "'");
    }
  }
  cov.validate();
  return cov;
}

EmbeddingTable read_embeddings(const fs::path& path) {
  const auto table = csv::read_file(path);
  if (table.header.empty() || table.header[0] != "token") {
    throw ParseError(table.source, 1, "first column must be token");
  }
  EmbeddingTable emb;
  emb.dim = static_cast<int>(table.header.size()) - 1;
  for (int d = 0; d < emb.dim; ++d) {
    if (table.header[d + 1] != "e" + std::to_string(d)) {
      throw ParseError(table.source, 1, "expected column e" + std::to_string(d));
    }
  }
  if (emb.dim <= 0) throw ParseError(table.source, 1, "no embedding columns");
  for (const auto& row : table.rows) {
    std::vector<double> vec;
    vec.reserve(emb.dim);
    for (int d = 0; d < emb.dim; ++d) {
      const double x = csv::parse_double(row.fields[d + 1], table.source, row.line);
      if (!std::isfinite(x)) throw ParseError(table.source, row.line, "non-finite component");
      vec.push_back(x);
    }
    if (!emb.vectors.emplace(row.fields[0], std::move(vec)).second) {
      throw ParseError(table.source, row.line, "duplicate token '" + row.fields[0] + "'");
    }
  }
  return emb;
}

Manifest read_manifest(const fs::path& path) {
  json j;
  try {
    j = json::parse(csv::read_text(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 1, e.what());
  }
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  try {
    Manifest m;
    m.model_id = j.value("model_id", "");
    const auto& files = j.at("files");
    m.files.topics = resolve(files.at("topics").get<std::string>());
    m.files.theta = resolve(files.at("theta").get<std::string>());
    m.files.covariates = resolve(files.at("covariates").get<std::string>());
    if (files.contains("embeddings") && !files["embeddings"].is_null()) {
      m.files.embeddings = resolve(files["embeddings"].get<std::string>());
    }
    if (j.contains("dim") && !j["dim"].is_null()) m.dim = j["dim"].get<int>();
    m.normalized = j.value("normalized", false);
    m.provenance = j.value("provenance", "");
    return m;
  } catch (const json::exception& e) {
    throw ParseError(path.string(), 1, e.what());
  }
}

// ---------------------------------------------------------------------------
// Writers

void write_topic_set(const TopicSet& topics, const fs::path& path) {
  bool any_label = std::any_of(topics.topics.begin(), topics.topics.end(),
                               [](const Topic& t) { return t.label.has_value(); });
  std::string out;
  std::vector<std::string> header{"model_id", "topic_index", "rank", "token", "weight"};
  if (any_label) header.push_back("label");
  csv::append_row(out, header);
  for (const auto& topic : topics.topics) {
    for (std::size_t r = 0; r < topic.keywords.size(); ++r) {
      const auto& kw = topic.keywords[r];
      std::vector<std::string> row{topics.model_id, std::to_string(topic.topic_index),
                                   std::to_string(r + 1), kw.token,
                                   kw.weight ? csv::format_double(*kw.weight) : ""};
      if (any_label) row.push_back(topic.label.value_or(""));
      csv::append_row(out, row);
    }
  }
  csv::write_text(path, out);
}

void write_theta(const ThetaMatrix& theta, const fs::path& path) {
  std::string out;
  std::vector<std::string> header{"doc_id"};
  for (int k : theta.topic_indices) header.push_back("t" + std::to_string(k));
  csv::append_row(out, header);
  std::vector<std::string> row(header.size());
  for (std::size_t i = 0; i < theta.doc_ids.size(); ++i) {
    row[0] = theta.doc_ids[i];
    for (std::size_t c = 0; c < theta.topic_indices.size(); ++c) {
      row[c + 1] = csv::format_double(
          theta.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)));
    }
    csv::append_row(out, row);
  }
  csv::write_text(path, out);
}

void write_covariates(const CovariateTable& covariates, const fs::path& path) {
  std::string out;
  std::vector<std::string> header{"doc_id"};
  for (const auto& [name, _] : covariates.columns) header.push_back(name);
  csv::append_row(out, header);
  std::vector<std::string> row(header.size());
  for (std::size_t i = 0; i < covariates.doc_ids.size(); ++i) {
    row[0] = covariates.doc_ids[i];
    std::size_t c = 1;
    for (const auto& [_, labels] : covariates.columns) row[c++] = labels[i];
    csv::append_row(out, row);
  }
  csv::write_text(path, out);
}

void write_embeddings(const EmbeddingTable& embeddings, const fs::path& path) {
  std::string out;
  std::vector<std::string> header{"token"};
  for (int d = 0; d < embeddings.dim; ++d) header.push_back("e" + std::to_string(d));
  csv::append_row(out, header);
  std::vector<std::string> row(header.size());
  for (const auto& [token, vec] : embeddings.vectors) {
    row[0] = token;
    for (int d = 0; d < embeddings.dim; ++d) row[d + 1] = csv::format_double(vec[d]);
    csv::append_row(out, row);
  }
  csv::write_text(path, out);
}

void write_manifest(const Manifest& manifest, const fs::path& path) {
  const auto base = path.parent_path();
  auto rel = [&](const fs::path& p) {
    std::error_code ec;
    auto r = fs::relative(p, base.empty() ? fs::current_path() : base, ec);
    return (ec || r.empty()) ? p.generic_string() : r.generic_string();
  };
  json j;
  j["model_id"] = manifest.model_id;
  j["files"] = {{"topics", rel(manifest.files.topics)},
                {"theta", rel(manifest.files.theta)},
                {"covariates", rel(manifest.files.covariates)}};
  if (manifest.files.embeddings) j["files"]["embeddings"] = rel(*manifest.files.embeddings);
  j["dim"] = manifest.dim ? json(*manifest.dim) : json(nullptr);
  j["normalized"] = manifest.normalized;
  j["provenance"] = manifest.provenance;
  csv::write_text(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Bundles

void renormalize_rows(ThetaMatrix& theta) {
  bool all_positive = true;
  for (Eigen::Index i = 0; i < theta.values.rows(); ++i) {
    const double s = theta.values.row(i).sum();
    if (s > 0.0) {
      theta.values.row(i) /= s;
    } else {
      all_positive = false;
    }
  }
  theta.normalized = all_positive;
}

Bundle load_bundle(const BundlePaths& paths, const LoadOptions& options) {
  Bundle b;
  b.topics = read_topic_set(paths.topics);
  b.theta = read_theta(paths.theta, b.topics.model_id, options.normalized);
  if (options.renormalize) renormalize_rows(b.theta);
  b.covariates = read_covariates(paths.covariates);
  if (paths.embeddings) b.embeddings = read_embeddings(*paths.embeddings);
  return b;
}

Bundle load_bundle(const fs::path& manifest_path, const LoadOptions& options) {
  const auto m = read_manifest(manifest_path);
  LoadOptions opts = options;
  opts.normalized = opts.normalized || m.normalized;
  auto b = load_bundle(m.files, opts);
  if (!m.model_id.empty()) {
    b.topics.model_id = m.model_id;
    b.theta.model_id = m.model_id;
  }
  if (m.dim && b.embeddings && b.embeddings->dim != *m.dim) {
    throw InvariantError("manifest dim " + std::to_string(*m.dim) +
                         " does not match embeddings dim " + std::to_string(b.embeddings->dim));
  }
  return b;
}

ValidationReport validate_bundle(const TopicSet& topics, const ThetaMatrix& theta,
                                 const CovariateTable& covariates) {
  ValidationReport report;
  report.doc_count = theta.doc_ids.size();

  const std::set<std::string> cov_ids(covariates.doc_ids.begin(), covariates.doc_ids.end());
  const std::set<std::string> theta_ids(theta.doc_ids.begin(), theta.doc_ids.end());
  std::vector<std::string> only_theta;
  std::vector<std::string> only_cov;
  std::set_difference(theta_ids.begin(), theta_ids.end(), cov_ids.begin(), cov_ids.end(),
                      std::back_inserter(only_theta));
  std::set_difference(cov_ids.begin(), cov_ids.end(), theta_ids.begin(), theta_ids.end(),
                      std::back_inserter(only_cov));
  report.matched_doc_count = theta_ids.size() - only_theta.size();

  auto sample = [](const std::vector<std::string>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size() && i < 5; ++i) {
      if (i > 0) s += ", ";
      s += ids[i];
    }
    if (ids.size() > 5) s += ", ...";
    return s;
  };
  if (!only_theta.empty()) {
    report.errors.push_back({"doc_id_mismatch", "doc_id mismatch: " +
                                                    std::to_string(only_theta.size()) +
                                                    " theta doc(s) absent from covariates (" +
                                                    sample(only_theta) + ")"});
  }
  if (!only_cov.empty()) {
    report.errors.push_back({"doc_id_mismatch", "doc_id mismatch: " +
                                                    std::to_string(only_cov.size()) +
                                                    " covariate doc(s) absent from theta (" +
                                                    sample(only_cov) + ")"});
  }

  auto topic_idx = topics.indices();
  auto theta_idx = theta.topic_indices;
  std::sort(topic_idx.begin(), topic_idx.end());
  std::sort(theta_idx.begin(), theta_idx.end());
  if (topic_idx != theta_idx) {
    report.errors.push_back({"topic_index_mismatch",
                             "topic_index mismatch: topics file has " +
                                 std::to_string(topic_idx.size()) + " topics, theta has " +
                                 std::to_string(theta_idx.size()) + " with differing indices"});
  }

  for (const auto& [name, labels] : covariates.columns) {
    std::map<std::string, std::size_t> counts;
    for (const auto& l : labels) ++counts[l];
    for (const auto& [label, count] : counts) {
      if (count < kSmallCategoryDocs) {
        report.warnings.push_back({"small_category", "small category: '" + label +
                                                         "' in covariate '" + name + "' has " +
                                                         std::to_string(count) + " documents"});
      }
    }
  }

  std::size_t low_mass = 0;
  std::string first_low;
  for (Eigen::Index i = 0; i < theta.values.rows(); ++i) {
    if (theta.values.row(i).sum() < kLowThetaMass) {
      if (low_mass++ == 0) first_low = theta.doc_ids[i];
    }
  }
  if (low_mass > 0) {
    report.warnings.push_back({"low_theta_mass", std::to_string(low_mass) +
                                                     " theta row(s) sum to < 0.5 (first: '" +
                                                     first_low + "')"});
  }
  return report;
}

// ---------------------------------------------------------------------------
// Effect tables

std::string format_p_value(double p) {
  if (std::isnan(p)) return "NA";
  if (p < 1e-4) return "<0.0001";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", p);
  return buf;
}

namespace {

const std::vector<std::string> kEffectColumns{
    "model_id", "topic_index", "topic_label", "term",    "estimate",     "std_error",
    "t_value",  "p_value",     "p_display",   "df",      "samples_used", "implied_reference"};

double json_number(const json& v) {
  return v.is_null() ? std::nan("") : v.get<double>();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string effect_table_csv(const EffectTable& table) {
  std::string out;
  csv::append_row(out, kEffectColumns);
  for (const auto& r : table.rows) {
    csv::append_row(out, {table.model_id, std::to_string(r.topic_index), r.topic_label, r.term,
                          csv::format_double(r.estimate), csv::format_double(r.std_error),
                          csv::format_double(r.t_value), csv::format_double(r.p_value),
                          format_p_value(r.p_value), csv::format_double(r.df),
                          std::to_string(r.samples_used), r.implied_reference ? "1" : "0"});
  }
  return out;
}

std::string effect_table_json(const EffectTable& table) {
  json rows = json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"topic_index", r.topic_index},
                    {"topic_label", r.topic_label},
                    {"term", r.term},
                    {"estimate", number_or_null(r.estimate)},
                    {"std_error", number_or_null(r.std_error)},
                    {"t_value", number_or_null(r.t_value)},
                    {"p_value", number_or_null(r.p_value)},
                    {"p_display", format_p_value(r.p_value)},
                    {"df", number_or_null(r.df)},
                    {"samples_used", r.samples_used},
                    {"implied_reference", r.implied_reference}});
  }
  json j{{"model_id", table.model_id}, {"rows", std::move(rows)}};
  return j.dump(2) + "\n";
}

void write_effect_table(const EffectTable& table, const fs::path& path, TableFormat format) {
  csv::write_text(path, format == TableFormat::csv ? effect_table_csv(table)
                                                   : effect_table_json(table));
}

EffectTable read_effect_table(const fs::path& path, TableFormat format) {
  EffectTable table;
  if (format == TableFormat::json) {
    try {
      const auto j = json::parse(csv::read_text(path));
      table.model_id = j.at("model_id").get<std::string>();
      for (const auto& r : j.at("rows")) {
        EffectRow row;
        row.topic_index = r.at("topic_index").get<int>();
        row.topic_label = r.at("topic_label").get<std::string>();
        row.term = r.at("term").get<std::string>();
        row.estimate = json_number(r.at("estimate"));
        row.std_error = json_number(r.at("std_error"));
        row.t_value = json_number(r.at("t_value"));
        row.p_value = json_number(r.at("p_value"));
        row.df = json_number(r.at("df"));
        row.samples_used = r.at("samples_used").get<int>();
        row.implied_reference = r.value("implied_reference", false);
        table.rows.push_back(std::move(row));
      }
    } catch (const json::exception& e) {
      throw ParseError(path.string(), 1, e.what());
    }
    return table;
  }

  const auto t = csv::read_file(path);
  if (t.header != kEffectColumns) throw ParseError(t.source, 1, "unexpected effect table header");
  for (const auto& row : t.rows) {
    const auto& f = row.fields;
    if (table.model_id.empty()) table.model_id = f[0];
    EffectRow r;
    r.topic_index = static_cast<int>(csv::parse_int(f[1], t.source, row.line));
    r.topic_label = f[2];
    r.term = f[3];
    r.estimate = csv::parse_double(f[4], t.source, row.line);
    r.std_error = csv::parse_double(f[5], t.source, row.line);
    r.t_value = csv::parse_double(f[6], t.source, row.line);
    r.p_value = csv::parse_double(f[7], t.source, row.line);
    r.df = csv::parse_double(f[9], t.source, row.line);
    r.samples_used = static_cast<int>(csv::parse_int(f[10], t.source, row.line));
    r.implied_reference = f[11] == "1";
    table.rows.push_back(std::move(r));
  }
  return table;
}

void attach_topic_labels(EffectTable& table, const TopicSet& topics) {
  for (auto& row : table.rows) {
    if (const auto* t = topics.find(row.topic_index); t != nullptr && t->label) {
      row.topic_label = *t->label;
    }
  }
}

}  // namespace tmeval
