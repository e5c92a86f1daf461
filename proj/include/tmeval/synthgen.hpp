#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tmeval/interchange.hpp"

namespace tmeval {

struct CategorySpec {
  std::string label;
  double proportion = 0.0;
};

using CategoryTopic = std::pair<std::string, int>;  // (category label, topic column)

/// Synthetic theta/covariate bundle with known category effects.
struct SynthSpec {
  int n_docs = 1000;
  int n_topics = 4;
  std::vector<CategorySpec> categories;
  std::vector<double> base_mean;               // simplex, length n_topics
  std::map<CategoryTopic, double> effects;     // shift of a category's mean; absent = 0
  double concentration = 50.0;
  std::uint64_t seed = 0;
  std::string covariate_name = "group";
  std::string model_id = "synthetic";

  /// Mean theta row of one category: base_mean plus its shifts.
  std::vector<double> category_mean(const std::string& label) const;
  /// Throws InvariantError unless every category mean is a strict simplex point.
  void validate() const;
};

struct SynthBundle {
  ThetaMatrix theta;
  CovariateTable covariates;
  /// Sum-contrast coefficient per (category, topic): the category mean minus
  /// the unweighted mean of all category means.
  std::map<CategoryTopic, double> truth;
};

/// Category counts follow the proportions exactly (largest remainder) and
/// are shuffled with SynthSpec::seed; row d is Dirichlet(concentration * mean)
/// drawn from a stream keyed on (seed, d).
SynthBundle generate_synthetic(const SynthSpec& spec);

/// Writes topics.csv (placeholder keywords), theta.csv, covariates.csv,
/// truth.csv and manifest.json into dir. Returns the manifest path.
std::filesystem::path write_synthetic_bundle(const SynthBundle& bundle,
                                             const std::filesystem::path& dir);

}  // namespace tmeval
