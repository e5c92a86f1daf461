#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tmeval {

struct Document {
  std::string doc_id;
  std::vector<std::string> tokens;

  bool operator==(const Document&) const = default;
};

struct Corpus {
  std::vector<Document> docs;

  bool operator==(const Corpus&) const = default;
};

using RawDocument = std::pair<std::string, std::string>;  // (doc_id, text)

struct PreprocessConfig {
  std::set<std::string> stopwords;
  std::set<std::string> domain_stopwords;
  int min_token_len = 2;
  double ngram_threshold = 10.0;
  double ngram_discount = 5.0;
  int ngram_passes = 2;  // 1 = bigrams, 2 = bigrams then trigrams

  void validate() const;
};

/// Lowercases, turns every non-letter byte into a separator, drops short
/// tokens and stop-words. Bytes >= 0x80 are treated as letters so UTF-8
/// sequences survive intact; only ASCII is case-folded.
std::vector<std::string> tokenize_text(std::string_view text, const PreprocessConfig& config);
Corpus tokenize(const std::vector<RawDocument>& raw_docs, const PreprocessConfig& config);

/// Count-discount collocation score (count(a,b) - discount) * V / (count(a) * count(b)).
double collocation_score(double pair_count, double count_a, double count_b, double vocab_size,
                         double discount);

/// Runs config.ngram_passes merge passes. Each pass scores every adjacent
/// pair over the whole corpus and merges qualifying pairs left to right,
/// without overlap, into "a_b".
Corpus detect_ngrams(Corpus corpus, const PreprocessConfig& config);

struct CooccurrenceOptions {
  /// When set, each document is split into sliding windows of this many
  /// tokens (stride 1) and every window counts as one context.
  std::optional<int> window;
  int jobs = 1;
};

/// Document-frequency statistics restricted to a vocabulary.
class CooccurrenceStats {
 public:
  CooccurrenceStats() = default;

  /// Builds stats from explicit counts; pair keys may be given in either
  /// order. Throws InvariantError when the counts are inconsistent.
  static CooccurrenceStats from_counts(
      long long total_docs, const std::unordered_map<std::string, long long>& doc_freq,
      const std::vector<std::tuple<std::string, std::string, long long>>& pair_freq);

  long long total_docs() const { return total_docs_; }
  /// 0 for tokens outside the vocabulary.
  long long doc_freq(std::string_view token) const;
  long long co_doc_freq(std::string_view a, std::string_view b) const;
  const std::vector<std::string>& vocabulary() const { return vocab_; }
  std::size_t stored_pairs() const { return pairs_.size(); }

 private:
  friend CooccurrenceStats build_cooccurrence(const Corpus&, const std::set<std::string>&,
                                              const CooccurrenceOptions&);
  std::optional<std::uint32_t> id_of(std::string_view token) const;
  static std::uint64_t key(std::uint32_t a, std::uint32_t b);

  long long total_docs_ = 0;
  std::vector<std::string> vocab_;  // sorted
  std::vector<long long> doc_freq_;
  std::unordered_map<std::uint64_t, long long> pairs_;  // (min id, max id)
};

/// Boolean presence per document (or window). Throws if vocab is empty.
CooccurrenceStats build_cooccurrence(const Corpus& corpus, const std::set<std::string>& vocab,
                                     const CooccurrenceOptions& options = {});

inline constexpr double kDefaultEpsilon = 1e-12;

/// Normalized PMI from document probabilities, with epsilon added to the
/// joint probability in both logs. Symmetric, clamped to [-1, 1].
/// Throws InvariantError if either token has zero document frequency.
double npmi(const CooccurrenceStats& stats, std::string_view w_i, std::string_view w_j,
            double epsilon = kDefaultEpsilon);

/// Reads doc_id,text (raw) or doc_id,tokens (space separated).
struct CorpusFile {
  std::vector<RawDocument> raw;  // filled for doc_id,text files
  std::optional<Corpus> tokenized;  // filled for doc_id,tokens files
};
CorpusFile read_corpus_file(const std::filesystem::path& path);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);
std::set<std::string> read_stopwords(const std::filesystem::path& path);

}  // namespace tmeval
