#include "tmeval/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "tmeval/csv.hpp"
#include "tmeval/error.hpp"

namespace tmeval {

namespace {

constexpr double kSimplexTolerance = 1e-9;
constexpr std::uint64_t kAssignmentStream = 0xA551'6E00'0000'0001ULL;

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t key) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

std::vector<double> SynthSpec::category_mean(const std::string& label) const {
  std::vector<double> mean = base_mean;
  for (int k = 0; k < n_topics && k < static_cast<int>(mean.size()); ++k) {
    if (const auto it = effects.find({label, k}); it != effects.end()) mean[k] += it->second;
  }
  return mean;
}

void SynthSpec::validate() const {
  if (n_docs < 1) throw InvariantError("n_docs must be positive");
  if (n_topics < 1) throw InvariantError("n_topics must be positive");
  if (!(concentration > 0.0)) throw InvariantError("concentration must be positive");
  if (categories.empty()) throw InvariantError("at least one category is required");
  if (static_cast<int>(base_mean.size()) != n_topics) {
    throw InvariantError("base_mean length must equal n_topics");
  }
  const double base_sum = std::accumulate(base_mean.begin(), base_mean.end(), 0.0);
  if (std::abs(base_sum - 1.0) > kSimplexTolerance) throw InvariantError("base_mean must sum to 1");

  std::set<std::string> labels;
  double total_prop = 0.0;
  for (const auto& c : categories) {
    if (c.label.empty()) throw InvariantError("empty category label");
    if (!labels.insert(c.label).second) throw InvariantError("duplicate category '" + c.label + "'");
    if (!(c.proportion > 0.0)) throw InvariantError("category proportions must be positive");
    total_prop += c.proportion;
  }
  if (std::abs(total_prop - 1.0) > 1e-6) throw InvariantError("category proportions must sum to 1");

  for (const auto& [key, shift] : effects) {
    if (!labels.contains(key.first)) {
      throw InvariantError("effect for unknown category '" + key.first + "'");
    }
    if (key.second < 0 || key.second >= n_topics) {
      throw InvariantError("effect for topic " + std::to_string(key.second) + " out of range");
    }
  }
  for (const auto& c : categories) {
    const auto mean = category_mean(c.label);
    const double sum = std::accumulate(mean.begin(), mean.end(), 0.0);
    if (std::abs(sum - 1.0) > kSimplexTolerance) {
      throw InvariantError("infeasible simplex shift: shifts of category '" + c.label +
                           "' do not sum to 0 across topics");
    }
    for (double m : mean) {
      if (!(m > 0.0)) {
        throw InvariantError("infeasible simplex shift: category '" + c.label +
                             "' has a non-positive mean component");
      }
    }
  }
}

SynthBundle generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(spec.n_docs);
  const auto k = static_cast<std::size_t>(spec.n_topics);

  // Exact counts by largest remainder, then a seeded shuffle.
  std::vector<std::size_t> counts(spec.categories.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    const double exact = spec.categories[c].proportion * static_cast<double>(n);
    counts[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[remainders[i % remainders.size()].second];

  std::vector<std::size_t> category_of_doc;
  category_of_doc.reserve(n);
  for (std::size_t c = 0; c < counts.size(); ++c) category_of_doc.insert(category_of_doc.end(), counts[c], c);
  auto assign_rng = stream(spec.seed, kAssignmentStream);
  std::shuffle(category_of_doc.begin(), category_of_doc.end(), assign_rng);

  std::vector<std::vector<double>> means;
  for (const auto& c : spec.categories) means.push_back(spec.category_mean(c.label));

  SynthBundle out;
  out.theta.model_id = spec.model_id;
  out.theta.normalized = true;
  out.theta.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (std::size_t t = 0; t < k; ++t) out.theta.topic_indices.push_back(static_cast<int>(t));
  const int width = static_cast<int>(std::to_string(n - 1).size());
  auto& labels = out.covariates.columns[spec.covariate_name];

  for (std::size_t d = 0; d < n; ++d) {
    std::string id = std::to_string(d);
    id.insert(0, static_cast<std::size_t>(width) - id.size(), '0');
    out.theta.doc_ids.push_back("doc" + id);
    out.covariates.doc_ids.push_back("doc" + id);
    const auto c = category_of_doc[d];
    labels.push_back(spec.categories[c].label);

    auto rng = stream(spec.seed, d);
    std::vector<double> draw(k);
    double total = 0.0;
    for (std::size_t t = 0; t < k; ++t) {
      std::gamma_distribution<double> gamma(spec.concentration * means[c][t], 1.0);
      draw[t] = gamma(rng);
      total += draw[t];
    }
    for (std::size_t t = 0; t < k; ++t) {
      out.theta.values(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(t)) = draw[t] / total;
    }
  }

  for (std::size_t t = 0; t < k; ++t) {
    double grand = 0.0;
    for (const auto& m : means) grand += m[t];
    grand /= static_cast<double>(means.size());
    for (std::size_t c = 0; c < means.size(); ++c) {
      out.truth[{spec.categories[c].label, static_cast<int>(t)}] = means[c][t] - grand;
    }
  }
  return out;
}

std::filesystem::path write_synthetic_bundle(const SynthBundle& bundle,
                                             const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  TopicSet topics;
  topics.model_id = bundle.theta.model_id;
  for (int k : bundle.theta.topic_indices) {
    Topic t;
    t.topic_index = k;
    for (int r = 0; r < 5; ++r) {
      t.keywords.push_back({"topic" + std::to_string(k) + "_w" + std::to_string(r), std::nullopt});
    }
    topics.topics.push_back(std::move(t));
  }
  write_topic_set(topics, dir / "topics.csv");
  write_theta(bundle.theta, dir / "theta.csv");
  write_covariates(bundle.covariates, dir / "covariates.csv");

  std::string truth;
  csv::append_row(truth, {"category", "topic_index", "coefficient"});
  for (const auto& [key, value] : bundle.truth) {
    csv::append_row(truth, {key.first, std::to_string(bundle.theta.topic_indices[key.second]),
                            csv::format_double(value)});
  }
  csv::write_text(dir / "truth.csv", truth);

  Manifest m;
  m.model_id = bundle.theta.model_id;
  m.files = {dir / "topics.csv", dir / "theta.csv", dir / "covariates.csv", std::nullopt};
  m.normalized = bundle.theta.normalized;
  m.provenance = "synthetic bundle with known sum-contrast effects";
  write_manifest(m, dir / "manifest.json");
  return dir / "manifest.json";
}

}  // namespace tmeval
