#include "tmeval/corpusstats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "tmeval/csv.hpp"
#include "tmeval/error.hpp"
#include "tmeval/parallel.hpp"

namespace tmeval {

void PreprocessConfig::validate() const {
  if (min_token_len < 1) throw InvariantError("min_token_len must be >= 1");
  if (ngram_passes < 0 || ngram_passes > 2) throw InvariantError("ngram_passes must be 0, 1 or 2");
}

namespace {

bool is_letter(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

std::size_t utf8_length(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(
      s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

}  // namespace

std::vector<std::string> tokenize_text(std::string_view text, const PreprocessConfig& config) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (utf8_length(current) >= static_cast<std::size_t>(config.min_token_len) &&
        !config.stopwords.contains(current) && !config.domain_stopwords.contains(current)) {
      tokens.push_back(current);
    }
    current.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_letter(c)) {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

Corpus tokenize(const std::vector<RawDocument>& raw_docs, const PreprocessConfig& config) {
  config.validate();
  Corpus corpus;
  corpus.docs.reserve(raw_docs.size());
  std::set<std::string> seen;
  for (const auto& [id, text] : raw_docs) {
    if (!seen.insert(id).second) throw InvariantError("duplicate doc_id '" + id + "'");
    corpus.docs.push_back({id, tokenize_text(text, config)});
  }
  return corpus;
}

double collocation_score(double pair_count, double count_a, double count_b, double vocab_size,
                         double discount) {
  return (pair_count - discount) * vocab_size / (count_a * count_b);
}

namespace {

void merge_pass(Corpus& corpus, const PreprocessConfig& config) {
  std::unordered_map<std::string, long long> unigram;
  std::map<std::pair<std::string, std::string>, long long> bigram;
  for (const auto& doc : corpus.docs) {
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      ++unigram[doc.tokens[i]];
      if (i + 1 < doc.tokens.size()) ++bigram[{doc.tokens[i], doc.tokens[i + 1]}];
    }
  }
  const auto vocab_size = static_cast<double>(unigram.size());

  std::set<std::pair<std::string, std::string>> accepted;
  for (const auto& [pair, count] : bigram) {
    const double score =
        collocation_score(static_cast<double>(count), static_cast<double>(unigram[pair.first]),
                          static_cast<double>(unigram[pair.second]), vocab_size,
                          config.ngram_discount);
    if (score >= config.ngram_threshold) accepted.insert(pair);
  }
  if (accepted.empty()) return;

  for (auto& doc : corpus.docs) {
    std::vector<std::string> merged;
    merged.reserve(doc.tokens.size());
    std::size_t i = 0;
    while (i < doc.tokens.size()) {
      if (i + 1 < doc.tokens.size() && accepted.contains({doc.tokens[i], doc.tokens[i + 1]})) {
        merged.push_back(doc.tokens[i] + "_" + doc.tokens[i + 1]);
        i += 2;
      } else {
        merged.push_back(std::move(doc.tokens[i]));
        i += 1;
      }
    }
    doc.tokens = std::move(merged);
  }
}

}  // namespace

Corpus detect_ngrams(Corpus corpus, const PreprocessConfig& config) {
  config.validate();
  for (int pass = 0; pass < config.ngram_passes; ++pass) merge_pass(corpus, config);
  return corpus;
}

// ---------------------------------------------------------------------------

std::uint64_t CooccurrenceStats::key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::optional<std::uint32_t> CooccurrenceStats::id_of(std::string_view token) const {
  const auto it = std::lower_bound(vocab_.begin(), vocab_.end(), token);
  if (it == vocab_.end() || *it != token) return std::nullopt;
  return static_cast<std::uint32_t>(it - vocab_.begin());
}

long long CooccurrenceStats::doc_freq(std::string_view token) const {
  const auto id = id_of(token);
  return id ? doc_freq_[*id] : 0;
}

long long CooccurrenceStats::co_doc_freq(std::string_view a, std::string_view b) const {
  const auto ia = id_of(a);
  const auto ib = id_of(b);
  if (!ia || !ib) return 0;
  if (*ia == *ib) return doc_freq_[*ia];
  const auto it = pairs_.find(key(*ia, *ib));
  return it == pairs_.end() ? 0 : it->second;
}

CooccurrenceStats CooccurrenceStats::from_counts(
    long long total_docs, const std::unordered_map<std::string, long long>& doc_freq,
    const std::vector<std::tuple<std::string, std::string, long long>>& pair_freq) {
  if (total_docs <= 0) throw InvariantError("total_docs must be positive");
  CooccurrenceStats s;
  s.total_docs_ = total_docs;
  for (const auto& [token, _] : doc_freq) s.vocab_.push_back(token);
  std::sort(s.vocab_.begin(), s.vocab_.end());
  s.doc_freq_.resize(s.vocab_.size());
  for (std::size_t i = 0; i < s.vocab_.size(); ++i) {
    const auto df = doc_freq.at(s.vocab_[i]);
    if (df < 0 || df > total_docs) {
      throw InvariantError("doc_freq of '" + s.vocab_[i] + "' outside [0, D]");
    }
    s.doc_freq_[i] = df;
  }
  for (const auto& [a, b, count] : pair_freq) {
    const auto ia = s.id_of(a);
    const auto ib = s.id_of(b);
    if (!ia || !ib || *ia == *ib) throw InvariantError("pair (" + a + ", " + b + ") is invalid");
    if (count < 0 || count > std::min(s.doc_freq_[*ia], s.doc_freq_[*ib])) {
      throw InvariantError("pair count for (" + a + ", " + b + ") exceeds marginal");
    }
    if (count > 0) s.pairs_[key(*ia, *ib)] = count;
  }
  return s;
}

CooccurrenceStats build_cooccurrence(const Corpus& corpus, const std::set<std::string>& vocab,
                                     const CooccurrenceOptions& options) {
  if (vocab.empty()) throw InvariantError("vocabulary is empty");
  if (corpus.docs.empty()) throw InvariantError("corpus is empty");
  if (options.window && *options.window < 1) throw InvariantError("window must be >= 1");

  CooccurrenceStats stats;
  stats.vocab_.assign(vocab.begin(), vocab.end());
  stats.doc_freq_.assign(stats.vocab_.size(), 0);

  struct Partial {
    long long contexts = 0;
    std::vector<long long> doc_freq;
    std::unordered_map<std::uint64_t, long long> pairs;
  };

  const std::size_t n_docs = corpus.docs.size();
  const std::size_t n_chunks = std::max<std::size_t>(
      1, std::min<std::size_t>(n_docs, static_cast<std::size_t>(std::max(1, options.jobs))));
  std::vector<Partial> partials(n_chunks);

  auto count_context = [&](Partial& p, std::vector<std::uint32_t>& ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    ++p.contexts;
    for (std::size_t a = 0; a < ids.size(); ++a) {
      ++p.doc_freq[ids[a]];
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        ++p.pairs[CooccurrenceStats::key(ids[a], ids[b])];
      }
    }
  };

  parallel_for(n_chunks, options.jobs, [&](std::size_t chunk) {
    Partial& p = partials[chunk];
    p.doc_freq.assign(stats.vocab_.size(), 0);
    const std::size_t begin = chunk * n_docs / n_chunks;
    const std::size_t end = (chunk + 1) * n_docs / n_chunks;
    std::vector<std::optional<std::uint32_t>> mapped;
    std::vector<std::uint32_t> ids;
    for (std::size_t d = begin; d < end; ++d) {
      const auto& tokens = corpus.docs[d].tokens;
      mapped.clear();
      for (const auto& t : tokens) mapped.push_back(stats.id_of(t));

      const std::size_t width =
          options.window ? static_cast<std::size_t>(*options.window) : tokens.size();
      const std::size_t n_windows =
          (!options.window || tokens.size() <= width) ? 1 : tokens.size() - width + 1;
      for (std::size_t w = 0; w < n_windows; ++w) {
        ids.clear();
        const std::size_t stop = std::min(tokens.size(), w + width);
        for (std::size_t i = w; i < stop; ++i) {
          if (mapped[i]) ids.push_back(*mapped[i]);
        }
        count_context(p, ids);
      }
    }
  });

  for (const auto& p : partials) {
    stats.total_docs_ += p.contexts;
    for (std::size_t i = 0; i < p.doc_freq.size(); ++i) stats.doc_freq_[i] += p.doc_freq[i];
    for (const auto& [k, v] : p.pairs) stats.pairs_[k] += v;
  }
  return stats;
}

double npmi(const CooccurrenceStats& stats, std::string_view w_i, std::string_view w_j,
            double epsilon) {
  if (!(epsilon > 0.0)) throw InvariantError("epsilon must be positive");
  const auto df_i = stats.doc_freq(w_i);
  const auto df_j = stats.doc_freq(w_j);
  if (df_i <= 0) throw InvariantError("token absent from corpus: '" + std::string(w_i) + "'");
  if (df_j <= 0) throw InvariantError("token absent from corpus: '" + std::string(w_j) + "'");

  const auto d = static_cast<double>(stats.total_docs());
  const double p_i = static_cast<double>(df_i) / d;
  const double p_j = static_cast<double>(df_j) / d;
  const double p_ij = static_cast<double>(stats.co_doc_freq(w_i, w_j)) / d;

  const double denominator = -std::log(p_ij + epsilon);
  // With p_ij = 1 the epsilon pushes the denominator just past the 1e-12
  // guard and the ratio would come out as -1, so that case is caught directly.
  if (p_ij >= 1.0 || std::abs(denominator) < 1e-12) return 1.0;
  const double value = std::log((p_ij + epsilon) / (p_i * p_j)) / denominator;
  return std::clamp(value, -1.0, 1.0);
}

// ---------------------------------------------------------------------------

CorpusFile read_corpus_file(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  const auto c_id = table.require_column("doc_id");
  const auto c_text = table.column("text");
  const auto c_tokens = table.column("tokens");
  if ((c_text == csv::npos) == (c_tokens == csv::npos)) {
    throw ParseError(table.source, 1, "corpus needs exactly one of 'text' or 'tokens'");
  }
  CorpusFile file;
  if (c_text != csv::npos) {
    for (const auto& row : table.rows) file.raw.emplace_back(row.fields[c_id], row.fields[c_text]);
    return file;
  }
  Corpus corpus;
  std::set<std::string> seen;
  for (const auto& row : table.rows) {
    if (!seen.insert(row.fields[c_id]).second) {
      throw ParseError(table.source, row.line, "duplicate doc_id '" + row.fields[c_id] + "'");
    }
    Document doc{row.fields[c_id], {}};
    std::string_view rest = row.fields[c_tokens];
    while (!rest.empty()) {
      const auto sp = rest.find(' ');
      const auto tok = rest.substr(0, sp);
      if (!tok.empty()) doc.tokens.emplace_back(tok);
      if (sp == std::string_view::npos) break;
      rest.remove_prefix(sp + 1);
    }
    corpus.docs.push_back(std::move(doc));
  }
  file.tokenized = std::move(corpus);
  return file;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::string out;
  csv::append_row(out, {"doc_id", "tokens"});
  for (const auto& doc : corpus.docs) {
    std::string joined;
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      if (i > 0) joined.push_back(' ');
      joined += doc.tokens[i];
    }
    csv::append_row(out, {doc.doc_id, joined});
  }
  csv::write_text(path, out);
}

std::set<std::string> read_stopwords(const std::filesystem::path& path) {
  const auto text = csv::read_text(path);
  std::set<std::string> words;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string word = text.substr(pos, nl - pos);
    while (!word.empty() && (word.back() == '\r' || word.back() == ' ' || word.back() == '\t')) {
      word.pop_back();
    }
    const auto first = word.find_first_not_of(" \t");
    if (first != std::string::npos) {
      word = word.substr(first);
      for (auto& c : word) {
        if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(std::tolower(c));
      }
      words.insert(word);
    }
    pos = nl + 1;
  }
  return words;
}

}  // namespace tmeval
