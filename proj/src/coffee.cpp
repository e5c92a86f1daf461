#include "tmeval/coffee.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include "tmeval/error.hpp"
#include "tmeval/linstat.hpp"
#include "tmeval/parallel.hpp"

namespace tmeval {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::size_t> join_rows(const ThetaMatrix& theta, const CovariateTable& covariates) {
  std::unordered_map<std::string_view, std::size_t> index;
  index.reserve(covariates.doc_ids.size());
  for (std::size_t i = 0; i < covariates.doc_ids.size(); ++i) index.emplace(covariates.doc_ids[i], i);
  std::vector<std::size_t> rows;
  rows.reserve(theta.doc_ids.size());
  for (const auto& id : theta.doc_ids) {
    const auto it = index.find(id);
    if (it == index.end()) {
      throw InvariantError("doc_id mismatch: theta doc '" + id + "' has no covariate row");
    }
    rows.push_back(it->second);
  }
  return rows;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

struct SampleFit {
  bool feasible = false;
  double df = 0.0;
  Eigen::MatrixXd coefficients;  // terms x topics, reference row appended
};

}  // namespace

void CoffeeConfig::validate() const {
  if (n_bootstrap < 2) throw InvariantError("n_bootstrap must be >= 2");
  if (min_feasible_samples < 2) throw InvariantError("min_feasible_samples must be >= 2");
  if (covariate.empty()) throw InvariantError("no covariate column selected");
  if (merge_threshold < 0) throw InvariantError("merge_threshold must be >= 0");
}

std::vector<std::size_t> resample_indices(std::size_t n, std::uint64_t seed,
                                          std::uint64_t sample_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(sample_index),
                    static_cast<std::uint32_t>(sample_index >> 32)};
  std::mt19937_64 rng(seq);
  std::vector<std::size_t> rows(n);
  if (n == 0) return rows;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (auto& r : rows) r = pick(rng);
  return rows;
}

double BootstrapSample::theta_value(std::size_t i, std::size_t topic_column) const {
  return theta->values(static_cast<Eigen::Index>(theta_rows[i]),
                       static_cast<Eigen::Index>(topic_column));
}

const std::string& BootstrapSample::doc_id(std::size_t i) const {
  return theta->doc_ids[theta_rows[i]];
}

const std::string& BootstrapSample::covariate(const std::string& name, std::size_t i) const {
  return covariates->column(name)[covariate_rows[i]];
}

BootstrapSample resample(const ThetaMatrix& theta, const CovariateTable& covariates,
                         std::uint64_t sample_index, const CoffeeConfig& config) {
  const auto joined = join_rows(theta, covariates);
  BootstrapSample s{&theta, &covariates, resample_indices(theta.n_docs(), config.seed, sample_index),
                    {}};
  s.covariate_rows.reserve(s.theta_rows.size());
  for (auto r : s.theta_rows) s.covariate_rows.push_back(joined[r]);
  return s;
}

Aggregate aggregate(std::span<const double> coef_samples, std::span<const double> df_samples,
                    int min_feasible) {
  Aggregate a;
  a.samples_used = static_cast<int>(coef_samples.size());
  if (coef_samples.empty() || coef_samples.size() < static_cast<std::size_t>(std::max(1, min_feasible)) ||
      df_samples.size() != coef_samples.size()) {
    a.estimate = a.std_error = a.t_value = a.p_value = a.df = kNaN;
    return a;
  }
  const auto n = static_cast<double>(coef_samples.size());
  const auto [lo, hi] = std::minmax_element(coef_samples.begin(), coef_samples.end());
  double sum = 0.0;
  for (double c : coef_samples) sum += c;
  // Identical samples give exactly zero spread; summation rounding would not.
  a.estimate = *lo == *hi ? *lo : sum / n;
  if (*lo == *hi) {
    a.std_error = 0.0;
  } else if (coef_samples.size() >= 2) {
    double ss = 0.0;
    for (double c : coef_samples) ss += (c - a.estimate) * (c - a.estimate);
    a.std_error = std::sqrt(ss / (n - 1.0));
  } else {
    a.std_error = kNaN;
  }
  a.df = median(std::vector<double>(df_samples.begin(), df_samples.end()));
  if (!(a.std_error > 0.0) || !(a.df > 0.0)) {
    a.t_value = a.p_value = kNaN;
    return a;
  }
  a.t_value = a.estimate / a.std_error;
  a.p_value = std::min(1.0, 2.0 * t_sf(std::abs(a.t_value), a.df));
  return a;
}

EffectTable coffee_run(const ThetaMatrix& theta_in, const CovariateTable& covariates,
                       const CoffeeConfig& config, Warnings* warnings) {
  config.validate();
  ThetaMatrix renormalized;
  const ThetaMatrix* theta = &theta_in;
  if (config.renormalize_theta) {
    renormalized = theta_in;
    renormalize_rows(renormalized);
    theta = &renormalized;
  }
  const auto& column = covariates.column(config.covariate);
  const auto joined = join_rows(*theta, covariates);
  const std::size_t n = theta->n_docs();
  const std::size_t n_topics = theta->n_topics();
  if (n == 0) throw InvariantError("no documents to regress");

  std::vector<std::string> labels;
  labels.reserve(n);
  for (auto r : joined) labels.push_back(column[r]);
  if (config.merge_threshold > 0) {
    labels = merge_small_categories(labels, config.merge_threshold, config.merged_label, warnings);
  }
  const DesignMatrix full = build_design(labels);
  const int n_categories = static_cast<int>(full.categories.size());
  const auto p = static_cast<Eigen::Index>(n_categories);
  const bool has_reference_row = n_categories >= 2;
  const Eigen::Index n_terms = p + (has_reference_row ? 1 : 0);
  if (!has_reference_row) {
    warn(warnings, "intercept_only",
         "covariate '" + config.covariate + "' has a single category; fitting intercept only");
  }

  std::vector<SampleFit> fits(static_cast<std::size_t>(config.n_bootstrap));
  parallel_for(fits.size(), config.jobs, [&](std::size_t s) {
    const auto rows = resample_indices(n, config.seed, s);
    std::vector<int> codes(n);
    std::vector<bool> present(static_cast<std::size_t>(n_categories), false);
    Eigen::MatrixXd y(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_topics));
    for (std::size_t i = 0; i < n; ++i) {
      codes[i] = full.category_of_row[rows[i]];
      present[static_cast<std::size_t>(codes[i])] = true;
      y.row(static_cast<Eigen::Index>(i)) = theta->values.row(static_cast<Eigen::Index>(rows[i]));
    }
    auto& fit = fits[s];
    if (std::find(present.begin(), present.end(), false) != present.end()) return;
    const auto x = sum_contrast_matrix(codes, n_categories);
    const auto ols = ols_fit_columns(x, y);
    if (!ols.front().full_rank()) return;
    fit.feasible = true;
    fit.df = static_cast<double>(ols.front().df_resid);
    fit.coefficients.resize(n_terms, static_cast<Eigen::Index>(n_topics));
    for (std::size_t k = 0; k < n_topics; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      fit.coefficients.col(kk).head(p) = ols[k].coefficients;
      if (has_reference_row) {
        fit.coefficients(p, kk) = implied_reference_coefficient(ols[k].coefficients);
      }
    }
  });

  std::vector<double> df_samples;
  for (const auto& f : fits) {
    if (f.feasible) df_samples.push_back(f.df);
  }
  if (df_samples.empty()) {
    throw InvariantError("covariate design never feasible in " +
                         std::to_string(config.n_bootstrap) + " bootstrap samples");
  }
  if (df_samples.size() < static_cast<std::size_t>(config.min_feasible_samples)) {
    warn(warnings, "few_feasible_samples",
         std::to_string(df_samples.size()) + " feasible samples, fewer than " +
             std::to_string(config.min_feasible_samples) + "; results NaN-marked");
  }

  std::vector<std::string> terms = full.columns;
  if (has_reference_row) terms.push_back(full.reference_category);

  EffectTable table;
  table.model_id = theta->model_id;
  std::vector<double> coef;
  for (std::size_t k = 0; k < n_topics; ++k) {
    for (Eigen::Index t = 0; t < n_terms; ++t) {
      coef.clear();
      for (const auto& f : fits) {
        if (f.feasible) coef.push_back(f.coefficients(t, static_cast<Eigen::Index>(k)));
      }
      const auto agg = aggregate(coef, df_samples, config.min_feasible_samples);
      table.rows.push_back({theta->topic_indices[k], "", terms[static_cast<std::size_t>(t)],
                            agg.estimate, agg.std_error, agg.t_value, agg.p_value, agg.df,
                            agg.samples_used, has_reference_row && t == p});
    }
  }
  return table;
}

}  // namespace tmeval
