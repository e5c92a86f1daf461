#pragma once

// Bootstrapped covariate effect estimation for topic prevalence.
//
// Documents are resampled with replacement, jointly with their covariate
// rows. Each resample gets one sum-contrast OLS fit per topic; a resample is
// used only if its design has full column rank and contains every category
// seen in the full data. Per term, the estimate is the mean of the sampled
// coefficients, the standard error their sample standard deviation, df the
// median residual df, and p = 2 * t_sf(|t|, df).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tmeval/diagnostics.hpp"
#include "tmeval/interchange.hpp"

namespace tmeval {

struct CoffeeConfig {
  int n_bootstrap = 25;
  std::uint64_t seed = 0;
  std::string covariate;
  int min_feasible_samples = 5;
  bool renormalize_theta = false;
  /// Categories with fewer documents are relabelled merged_label before
  /// fitting. 0 disables merging.
  long long merge_threshold = 0;
  std::string merged_label = "Other";
  int jobs = 1;

  void validate() const;
};

/// n indices drawn uniformly with replacement from [0, n), from a stream
/// keyed on (seed, sample_index) alone.
std::vector<std::size_t> resample_indices(std::size_t n, std::uint64_t seed,
                                          std::uint64_t sample_index);

/// One bootstrap resample as a view over the original tables. The same row
/// vector selects theta rows and (doc_id-joined) covariate rows.
struct BootstrapSample {
  const ThetaMatrix* theta = nullptr;
  const CovariateTable* covariates = nullptr;
  std::vector<std::size_t> theta_rows;
  std::vector<std::size_t> covariate_rows;

  std::size_t size() const { return theta_rows.size(); }
  double theta_value(std::size_t i, std::size_t topic_column) const;
  const std::string& doc_id(std::size_t i) const;
  const std::string& covariate(const std::string& name, std::size_t i) const;
};

/// Throws if a theta doc_id has no covariate row.
BootstrapSample resample(const ThetaMatrix& theta, const CovariateTable& covariates,
                         std::uint64_t sample_index, const CoffeeConfig& config);

struct Aggregate {
  double estimate = 0.0;
  double std_error = 0.0;
  double t_value = 0.0;
  double p_value = 0.0;
  double df = 0.0;
  int samples_used = 0;
};

/// Mean, n-1 standard deviation and median df over the feasible samples.
/// Fewer than min_feasible samples NaN-marks every field; a zero standard
/// error NaN-marks t and p.
Aggregate aggregate(std::span<const double> coef_samples, std::span<const double> df_samples,
                    int min_feasible);

/// Runs the full bootstrap. Rows are ordered by theta topic column, then
/// Intercept, contrast terms, and the implied reference category last.
/// Output is identical for any config.jobs.
EffectTable coffee_run(const ThetaMatrix& theta, const CovariateTable& covariates,
                       const CoffeeConfig& config, Warnings* warnings = nullptr);

}  // namespace tmeval
