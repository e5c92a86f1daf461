#include "tmeval/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "tmeval/alignment.hpp"
#include "tmeval/coffee.hpp"
#include "tmeval/corpusstats.hpp"
#include "tmeval/csv.hpp"
#include "tmeval/error.hpp"
#include "tmeval/interchange.hpp"
#include "tmeval/synthgen.hpp"
#include "tmeval/topicmetrics.hpp"
#include "tmeval/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace tmeval::cli {

std::string sha256_file(const std::string& path) {
  const auto bytes = csv::read_text(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed for '" + path + "'");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

namespace {

struct Common {
  std::string out_root = "out";
  std::string tag;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct BundleArgs {
  std::string manifest;
  std::string topics;
  std::string theta;
  std::string covariates;
  std::string embeddings;
  bool renormalize = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out_root, "Output root directory")->capture_default_str();
  cmd->add_option("--tag", c.tag, "Run directory name (default: UTC timestamp)");
  cmd->add_option("--seed", c.seed, "Seed for all randomness")->capture_default_str();
  cmd->add_option("--jobs", c.jobs, "Worker threads; output does not depend on it")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_bundle(CLI::App* cmd, BundleArgs& b, bool with_embeddings) {
  cmd->add_option("--manifest", b.manifest, "Bundle manifest.json");
  cmd->add_option("--topics", b.topics, "topics.csv");
  cmd->add_option("--theta", b.theta, "theta.csv");
  cmd->add_option("--covariates", b.covariates, "covariates.csv");
  if (with_embeddings) cmd->add_option("--embeddings", b.embeddings, "embeddings.csv");
  cmd->add_flag("--renormalize-theta", b.renormalize, "Scale theta rows to sum to 1");
}

std::string utc_stamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

fs::path run_dir(const Common& c, const std::string& command) {
  const auto dir = fs::path(c.out_root) / command / (c.tag.empty() ? utc_stamp() : c.tag);
  fs::create_directories(dir);
  return dir;
}

class RunRecord {
 public:
  RunRecord(std::string command, const Common& common) : command_(std::move(command)) {
    config_["seed"] = common.seed;
    config_["jobs"] = common.jobs;
    config_["tag"] = common.tag;
  }
  ordered_json& config() { return config_; }
  void input(const std::string& path) {
    if (!path.empty()) inputs_[path] = sha256_file(path);
  }
  void output(const std::string& name) { outputs_.push_back(name); }

  void write(const fs::path& dir) const {
    ordered_json j;
    j["command"] = command_;
    j["tool_version"] = kVersion;
    j["config"] = config_;
    j["inputs"] = ordered_json::object();
    for (const auto& [path, digest] : inputs_) j["inputs"][path] = digest;
    j["outputs"] = outputs_;
    csv::write_text(dir / "run_manifest.json", j.dump(2) + "\n");
  }

 private:
  std::string command_;
  ordered_json config_ = ordered_json::object();
  std::map<std::string, std::string> inputs_;
  std::vector<std::string> outputs_;
};

struct LoadedBundle {
  Bundle bundle;
  std::vector<std::string> input_files;
};

LoadedBundle load(const BundleArgs& args, bool require_embeddings) {
  LoadedBundle out;
  LoadOptions opts;
  opts.renormalize = args.renormalize;
  if (!args.manifest.empty()) {
    const auto m = read_manifest(args.manifest);
    out.bundle = load_bundle(fs::path(args.manifest), opts);
    out.input_files = {args.manifest, m.files.topics.string(), m.files.theta.string(),
                       m.files.covariates.string()};
    if (m.files.embeddings) out.input_files.push_back(m.files.embeddings->string());
  } else {
    if (args.topics.empty() || args.theta.empty() || args.covariates.empty()) {
      throw CLI::ValidationError("bundle", "give --manifest or all of --topics, --theta, --covariates");
    }
    BundlePaths paths{args.topics, args.theta, args.covariates, std::nullopt};
    if (!args.embeddings.empty()) paths.embeddings = args.embeddings;
    out.bundle = load_bundle(paths, opts);
    out.input_files = {args.topics, args.theta, args.covariates};
    if (!args.embeddings.empty()) out.input_files.push_back(args.embeddings);
  }
  if (require_embeddings && !out.bundle.embeddings) {
    throw CLI::ValidationError("bundle", "embeddings are required for this command");
  }
  return out;
}

void print_warnings(const Warnings& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning [" << w.code << "] " << w.message << "\n";
}

std::string fixed4(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

// ---------------------------------------------------------------------------

int cmd_validate(const Common& common, const BundleArgs& args, std::ostream& out,
                 std::ostream& err) {
  RunRecord record("validate", common);
  record.config()["renormalize_theta"] = args.renormalize;
  const auto dir = run_dir(common, "validate");

  ValidationReport report;
  std::vector<std::string> inputs;
  try {
    auto loaded = load(args, false);
    inputs = loaded.input_files;
    const auto& b = loaded.bundle;
    report = validate_bundle(b.topics, b.theta, b.covariates);
  } catch (const Error& e) {
    report.errors.push_back({"load_failed", e.what()});
  }
  for (const auto& f : inputs) record.input(f);

  ordered_json j;
  j["doc_count"] = report.doc_count;
  j["matched_doc_count"] = report.matched_doc_count;
  auto list = [](const std::vector<Diagnostic>& ds) {
    ordered_json a = ordered_json::array();
    for (const auto& d : ds) a.push_back({{"code", d.code}, {"message", d.message}});
    return a;
  };
  j["errors"] = list(report.errors);
  j["warnings"] = list(report.warnings);
  csv::write_text(dir / "validation.json", j.dump(2) + "\n");
  record.output("validation.json");
  record.write(dir);

  for (const auto& e : report.errors) err << "error [" << e.code << "] " << e.message << "\n";
  print_warnings(report.warnings, err);
  out << "validate: " << report.doc_count << " docs, " << report.matched_doc_count
      << " matched, " << report.errors.size() << " error(s), " << report.warnings.size()
      << " warning(s)\n";
  return report.ok() ? kExitOk : kExitFailure;
}

struct PreprocessArgs {
  std::string corpus;
  std::string stopwords;
  std::string domain_stopwords;
  PreprocessConfig config;
};

int cmd_preprocess(const Common& common, const PreprocessArgs& args, std::ostream& out) {
  RunRecord record("preprocess", common);
  auto config = args.config;
  if (!args.stopwords.empty()) config.stopwords = read_stopwords(args.stopwords);
  if (!args.domain_stopwords.empty()) config.domain_stopwords = read_stopwords(args.domain_stopwords);
  config.validate();
  record.input(args.corpus);
  record.input(args.stopwords);
  record.input(args.domain_stopwords);
  auto& c = record.config();
  c["min_token_len"] = config.min_token_len;
  c["ngram_threshold"] = config.ngram_threshold;
  c["ngram_discount"] = config.ngram_discount;
  c["ngram_passes"] = config.ngram_passes;

  auto file = read_corpus_file(args.corpus);
  Corpus corpus = file.tokenized ? std::move(*file.tokenized) : tokenize(file.raw, config);
  corpus = detect_ngrams(std::move(corpus), config);

  const auto dir = run_dir(common, "preprocess");
  write_corpus(corpus, dir / "corpus.csv");
  record.output("corpus.csv");
  record.write(dir);
  std::size_t tokens = 0;
  for (const auto& d : corpus.docs) tokens += d.tokens.size();
  out << "preprocess: " << corpus.docs.size() << " docs, " << tokens << " tokens -> "
      << (dir / "corpus.csv").string() << "\n";
  return kExitOk;
}

struct AlignArgs {
  std::vector<std::string> topics;
  std::string embeddings;
  std::string missing = "error";
  AlignmentConfig config;
};

AlignmentReport run_alignment(const AlignArgs& args, const Common& common,
                              std::vector<TopicSet>& sets, RunRecord& record, Warnings& warnings) {
  auto config = args.config;
  config.missing_keyword_policy =
      args.missing == "skip" ? MissingKeywordPolicy::skip : MissingKeywordPolicy::error;
  config.validate();
  const auto embeddings = read_embeddings(args.embeddings);
  record.input(args.embeddings);
  std::vector<TopicVector> vectors;
  for (const auto& path : args.topics) {
    record.input(path);
    sets.push_back(read_topic_set(path));
    for (const auto& t : sets.back().topics) {
      vectors.push_back(topic_vector(sets.back().model_id, t, embeddings, config, &warnings));
    }
  }
  auto& c = record.config();
  c["tau"] = config.tau;
  c["top_k_embed"] = config.top_k_keywords;
  c["missing_keywords"] = args.missing;
  auto report = group_topics(vectors, config, common.jobs);
  attach_group_labels(report, sets);
  return report;
}

int cmd_align(const Common& common, const AlignArgs& args, std::ostream& out, std::ostream& err) {
  RunRecord record("align", common);
  Warnings warnings;
  std::vector<TopicSet> sets;
  const auto report = run_alignment(args, common, sets, record, warnings);
  const auto dir = run_dir(common, "align");
  csv::write_text(dir / "alignment.csv", alignment_csv(report));
  csv::write_text(dir / "similarity.csv", similarity_csv(report.similarity));
  record.output("alignment.csv");
  record.output("similarity.csv");
  record.write(dir);
  print_warnings(warnings, err);
  out << "align: " << report.count(MatchCategory::triplet) << " triplet, "
      << report.count(MatchCategory::semi) << " semi, " << report.count(MatchCategory::unique)
      << " unique\n";
  return kExitOk;
}

struct QualityArgs {
  AlignArgs align;
  std::string corpus;
  std::optional<int> window;
  MetricsConfig metrics;
};

int cmd_quality(const Common& common, QualityArgs args, std::ostream& out, std::ostream& err) {
  RunRecord record("quality", common);
  Warnings warnings;
  std::vector<TopicSet> sets;
  const auto alignment = run_alignment(args.align, common, sets, record, warnings);

  record.input(args.corpus);
  auto file = read_corpus_file(args.corpus);
  const Corpus corpus = file.tokenized ? std::move(*file.tokenized) : tokenize(file.raw, {});
  std::set<std::string> vocab;
  for (const auto& s : sets) {
    for (const auto& t : s.topics) {
      for (std::size_t r = 0; r < t.keywords.size() && r < static_cast<std::size_t>(args.metrics.top_n); ++r) {
        vocab.insert(t.keywords[r].token);
      }
    }
  }
  CooccurrenceOptions co;
  co.window = args.window;
  co.jobs = common.jobs;
  const auto stats = build_cooccurrence(corpus, vocab, co);

  args.metrics.jobs = common.jobs;
  auto& c = record.config();
  c["top_n_metric"] = args.metrics.top_n;
  c["epsilon"] = args.metrics.epsilon;
  c["window"] = args.window ? ordered_json(*args.window) : ordered_json(nullptr);
  const auto rows = quality_report(sets, alignment, stats, args.metrics, &warnings);

  const auto dir = run_dir(common, "quality");
  csv::write_text(dir / "quality.csv", quality_report_csv(rows));
  csv::write_text(dir / "alignment.csv", alignment_csv(alignment));
  record.output("quality.csv");
  record.output("alignment.csv");
  record.write(dir);
  print_warnings(warnings, err);
  out << "Model\tAverage Coherence (C_V)\tAverage Uniqueness\tAverage Diversity\n";
  for (const auto& r : rows) {
    out << r.model_id << "\t" << std::setprecision(3) << std::fixed << r.avg_coherence << "\t"
        << r.avg_uniqueness << "\t" << r.avg_diversity << "\n";
  }
  out << std::defaultfloat;
  return kExitOk;
}

struct EffectsArgs {
  BundleArgs bundle;
  CoffeeConfig coffee;
  std::vector<std::string> drop;
  std::string format = "csv";
};

int cmd_effects(const Common& common, EffectsArgs args, std::ostream& out, std::ostream& err) {
  RunRecord record("effects", common);
  auto loaded = load(args.bundle, false);
  for (const auto& f : loaded.input_files) record.input(f);
  auto& bundle = loaded.bundle;

  const auto report = validate_bundle(bundle.topics, bundle.theta, bundle.covariates);
  if (!report.ok()) {
    for (const auto& e : report.errors) err << "error [" << e.code << "] " << e.message << "\n";
    return kExitFailure;
  }

  if (!args.drop.empty()) {
    const auto& column = bundle.covariates.column(args.coffee.covariate);
    std::set<std::string> drop_ids;
    for (std::size_t i = 0; i < column.size(); ++i) {
      if (std::find(args.drop.begin(), args.drop.end(), column[i]) != args.drop.end()) {
        drop_ids.insert(bundle.covariates.doc_ids[i]);
      }
    }
    ThetaMatrix kept = bundle.theta;
    std::vector<Eigen::Index> rows;
    kept.doc_ids.clear();
    for (std::size_t i = 0; i < bundle.theta.doc_ids.size(); ++i) {
      if (!drop_ids.contains(bundle.theta.doc_ids[i])) {
        rows.push_back(static_cast<Eigen::Index>(i));
        kept.doc_ids.push_back(bundle.theta.doc_ids[i]);
      }
    }
    kept.values = bundle.theta.values(rows, Eigen::all);
    bundle.theta = std::move(kept);
  }

  args.coffee.seed = common.seed;
  args.coffee.jobs = common.jobs;
  auto& c = record.config();
  c["covariate"] = args.coffee.covariate;
  c["bootstrap"] = args.coffee.n_bootstrap;
  c["min_feasible"] = args.coffee.min_feasible_samples;
  c["merge_threshold"] = args.coffee.merge_threshold;
  c["merged_label"] = args.coffee.merged_label;
  c["renormalize_theta"] = args.bundle.renormalize;
  c["drop_categories"] = args.drop;
  c["format"] = args.format;

  Warnings warnings;
  auto table = coffee_run(bundle.theta, bundle.covariates, args.coffee, &warnings);
  attach_topic_labels(table, bundle.topics);

  const auto dir = run_dir(common, "effects");
  const bool json = args.format == "json";
  const std::string name = json ? "effects.json" : "effects.csv";
  write_effect_table(table, dir / name, json ? TableFormat::json : TableFormat::csv);
  record.output(name);
  record.write(dir);
  print_warnings(warnings, err);

  int last_topic = -1;
  for (const auto& r : table.rows) {
    if (r.topic_index != last_topic) {
      last_topic = r.topic_index;
      out << "topic " << r.topic_index << (r.topic_label.empty() ? "" : " " + r.topic_label)
          << "\n  " << std::left << std::setw(28) << "term" << std::right << std::setw(10)
          << "Estimate" << std::setw(12) << "Std. Error" << std::setw(10) << "t-value"
          << std::setw(10) << "p-value" << "\n";
    }
    out << "  " << std::left << std::setw(28) << (r.implied_reference ? r.term + " (ref)" : r.term)
        << std::right << std::setw(10) << fixed4(r.estimate) << std::setw(12) << fixed4(r.std_error)
        << std::setw(10) << fixed4(r.t_value) << std::setw(10) << format_p_value(r.p_value) << "\n";
  }
  return kExitOk;
}

struct SynthArgs {
  int n_docs = 5000;
  int n_topics = 4;
  std::string categories = "A:0.5,B:0.3,C:0.2";
  std::string base_mean;
  std::vector<std::string> effects;
  double concentration = 50.0;
  std::string covariate_name = "group";
  std::string model_id = "synthetic";
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

int cmd_synth(const Common& common, const SynthArgs& args, std::ostream& out) {
  RunRecord record("synth", common);
  SynthSpec spec;
  spec.n_docs = args.n_docs;
  spec.n_topics = args.n_topics;
  spec.concentration = args.concentration;
  spec.seed = common.seed;
  spec.covariate_name = args.covariate_name;
  spec.model_id = args.model_id;
  for (const auto& item : split(args.categories, ',')) {
    const auto kv = split(item, ':');
    if (kv.size() != 2) throw CLI::ValidationError("--categories", "expected LABEL:PROPORTION");
    spec.categories.push_back({kv[0], csv::parse_double(kv[1], "--categories", 1)});
  }
  if (args.base_mean.empty()) {
    spec.base_mean.assign(static_cast<std::size_t>(args.n_topics), 1.0 / args.n_topics);
  } else {
    for (const auto& v : split(args.base_mean, ',')) {
      spec.base_mean.push_back(csv::parse_double(v, "--base-mean", 1));
    }
  }
  for (const auto& e : args.effects) {
    const auto parts = split(e, ':');
    if (parts.size() != 3) throw CLI::ValidationError("--effect", "expected CATEGORY:TOPIC:SHIFT");
    spec.effects[{parts[0], static_cast<int>(csv::parse_int(parts[1], "--effect", 1))}] =
        csv::parse_double(parts[2], "--effect", 1);
  }

  auto& c = record.config();
  c["n_docs"] = spec.n_docs;
  c["n_topics"] = spec.n_topics;
  c["categories"] = args.categories;
  c["base_mean"] = spec.base_mean;
  c["effects"] = args.effects;
  c["concentration"] = spec.concentration;
  c["covariate_name"] = spec.covariate_name;
  c["model_id"] = spec.model_id;

  const auto bundle = generate_synthetic(spec);
  const auto dir = run_dir(common, "synth");
  const auto manifest = write_synthetic_bundle(bundle, dir);
  for (const auto* f : {"topics.csv", "theta.csv", "covariates.csv", "truth.csv", "manifest.json"}) {
    record.output(f);
  }
  record.write(dir);
  out << "synth: " << spec.n_docs << " docs, " << spec.n_topics << " topics -> "
      << manifest.string() << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topic-model evaluation and bootstrapped covariate effects", "tmeval"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;
  BundleArgs bundle;
  PreprocessArgs pre;
  AlignArgs align;
  QualityArgs quality;
  EffectsArgs effects;
  SynthArgs synth;

  auto* validate = app.add_subcommand("validate", "Check a bundle for cross-file consistency");
  add_common(validate, common);
  add_bundle(validate, bundle, true);

  auto* preprocess = app.add_subcommand("preprocess", "Tokenize and merge n-grams");
  add_common(preprocess, common);
  preprocess->add_option("--corpus", pre.corpus, "CSV with doc_id,text or doc_id,tokens")
      ->required()
      ->check(CLI::ExistingFile);
  preprocess->add_option("--stopwords", pre.stopwords, "One stop-word per line")
      ->check(CLI::ExistingFile);
  preprocess->add_option("--domain-stopwords", pre.domain_stopwords, "Domain stop-words")
      ->check(CLI::ExistingFile);
  preprocess->add_option("--min-token-len", pre.config.min_token_len)->capture_default_str();
  preprocess->add_option("--ngram-threshold", pre.config.ngram_threshold)->capture_default_str();
  preprocess->add_option("--ngram-discount", pre.config.ngram_discount)->capture_default_str();
  preprocess->add_option("--ngram-passes", pre.config.ngram_passes)
      ->check(CLI::Range(0, 2))
      ->capture_default_str();

  auto add_align_options = [](CLI::App* cmd, AlignArgs& a) {
    cmd->add_option("--topics", a.topics, "topics.csv of each model (repeat)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--embeddings", a.embeddings, "embeddings.csv")->required()->check(CLI::ExistingFile);
    cmd->add_option("--tau", a.config.tau, "Grouping threshold")->capture_default_str();
    cmd->add_option("--top-k-embed", a.config.top_k_keywords, "Keywords averaged per topic")
        ->capture_default_str();
    cmd->add_option("--missing-keywords", a.missing, "error|skip")
        ->check(CLI::IsMember({"error", "skip"}))
        ->capture_default_str();
  };

  auto* align_cmd = app.add_subcommand("align", "Cross-model topic alignment");
  add_common(align_cmd, common);
  add_align_options(align_cmd, align);

  auto* quality_cmd = app.add_subcommand("quality", "Coherence, uniqueness and diversity report");
  add_common(quality_cmd, common);
  add_align_options(quality_cmd, quality.align);
  quality_cmd->add_option("--corpus", quality.corpus, "Tokenized corpus CSV")
      ->required()
      ->check(CLI::ExistingFile);
  quality_cmd->add_option("--top-n-metric", quality.metrics.top_n)->capture_default_str();
  quality_cmd->add_option("--epsilon", quality.metrics.epsilon)->capture_default_str();
  quality_cmd->add_option("--window", quality.window, "Sliding co-occurrence window (tokens)");

  auto* effects_cmd = app.add_subcommand("effects", "Bootstrapped covariate effects");
  add_common(effects_cmd, common);
  add_bundle(effects_cmd, effects.bundle, false);
  effects.coffee.merge_threshold = 1000;
  effects_cmd->add_option("--covariate", effects.coffee.covariate, "Covariate column")->required();
  effects_cmd->add_option("--bootstrap", effects.coffee.n_bootstrap, "Bootstrap samples N")
      ->capture_default_str();
  effects_cmd->add_option("--min-feasible", effects.coffee.min_feasible_samples)
      ->capture_default_str();
  effects_cmd->add_option("--merge-threshold", effects.coffee.merge_threshold,
                          "Merge categories with fewer docs (0 = off)")
      ->capture_default_str();
  effects_cmd->add_option("--merged-label", effects.coffee.merged_label)->capture_default_str();
  effects_cmd->add_option("--drop-category", effects.drop, "Exclude docs in this category (repeat)");
  effects_cmd->add_option("--format", effects.format)
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic bundle with known effects");
  add_common(synth_cmd, common);
  synth_cmd->add_option("--n-docs", synth.n_docs)->capture_default_str();
  synth_cmd->add_option("--n-topics", synth.n_topics)->capture_default_str();
  synth_cmd->add_option("--categories", synth.categories, "LABEL:PROPORTION,...")
      ->capture_default_str();
  synth_cmd->add_option("--base-mean", synth.base_mean, "Comma-separated simplex (default uniform)");
  synth_cmd->add_option("--effect", synth.effects, "CATEGORY:TOPIC:SHIFT (repeat)");
  synth_cmd->add_option("--concentration", synth.concentration)->capture_default_str();
  synth_cmd->add_option("--covariate-name", synth.covariate_name)->capture_default_str();
  synth_cmd->add_option("--model-id", synth.model_id)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    out << (e.get_name() == "CallForVersion" ? std::string(e.what()) + "\n" : app.help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "tmeval: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(common, bundle, out, err);
    if (preprocess->parsed()) return cmd_preprocess(common, pre, out);
    if (align_cmd->parsed()) return cmd_align(common, align, out, err);
    if (quality_cmd->parsed()) return cmd_quality(common, quality, out, err);
    // theta is renormalized at load time, so coffee_run must not repeat it
    if (effects_cmd->parsed()) return cmd_effects(common, effects, out, err);
    if (synth_cmd->parsed()) return cmd_synth(common, synth, out);
  } catch (const CLI::ValidationError& e) {
    err << "tmeval: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "tmeval: error: " << e.what() << "\n";
    return kExitFailure;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace tmeval::cli
