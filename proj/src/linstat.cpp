#include "tmeval/linstat.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/special_functions/beta.hpp>

#include "tmeval/error.hpp"

namespace tmeval {

std::vector<std::string> sorted_categories(std::span<const std::string> labels) {
  std::vector<std::string> cats(labels.begin(), labels.end());
  std::sort(cats.begin(), cats.end());
  cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
  return cats;
}

Eigen::MatrixXd sum_contrast_matrix(std::span<const int> codes, int n_categories) {
  if (n_categories < 1) throw InvariantError("design needs at least one category");
  const auto n = static_cast<Eigen::Index>(codes.size());
  const Eigen::Index p = n_categories;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, p);
  x.col(0).setOnes();
  const int reference = n_categories - 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int code = codes[static_cast<std::size_t>(i)];
    if (code < 0 || code >= n_categories) throw InvariantError("category code out of range");
    if (code == reference) {
      x.row(i).tail(p - 1).setConstant(-1.0);
    } else {
      x(i, code + 1) = 1.0;
    }
  }
  return x;
}

DesignMatrix build_design(std::span<const std::string> labels) {
  DesignMatrix design;
  design.categories = sorted_categories(labels);
  if (design.categories.empty()) throw InvariantError("design needs at least one category");
  design.reference_category = design.categories.back();
  design.columns.emplace_back(kInterceptTerm);
  for (std::size_t j = 0; j + 1 < design.categories.size(); ++j) {
    design.columns.push_back(design.categories[j]);
  }
  design.category_of_row.reserve(labels.size());
  for (const auto& label : labels) {
    const auto it = std::lower_bound(design.categories.begin(), design.categories.end(), label);
    design.category_of_row.push_back(static_cast<int>(it - design.categories.begin()));
  }
  design.values =
      sum_contrast_matrix(design.category_of_row, static_cast<int>(design.categories.size()));
  return design;
}

std::vector<OLSFit> ols_fit_columns(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.rows() != y.rows()) throw InvariantError("design and response row counts differ");
  if (x.rows() < 1) throw InvariantError("OLS needs at least one observation");
  if (!x.allFinite() || !y.allFinite()) throw InvariantError("non-finite input to OLS");

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  const int rank = static_cast<int>(qr.rank());
  const Eigen::MatrixXd beta = qr.solve(y);
  const Eigen::MatrixXd resid = y - x * beta;

  std::vector<OLSFit> fits;
  fits.reserve(static_cast<std::size_t>(y.cols()));
  for (Eigen::Index k = 0; k < y.cols(); ++k) {
    fits.push_back({beta.col(k), static_cast<long long>(x.rows()) - rank, rank,
                    resid.col(k).squaredNorm()});
  }
  return fits;
}

OLSFit ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  return std::move(ols_fit_columns(x, y).front());
}

double implied_reference_coefficient(const Eigen::VectorXd& coefficients) {
  if (coefficients.size() < 2) return 0.0;
  return -coefficients.tail(coefficients.size() - 1).sum();
}

double t_sf(double t, double df) {
  if (!(df > 0.0) || !std::isfinite(df)) throw InvariantError("t_sf needs df > 0");
  if (std::isnan(t)) return std::nan("");
  if (t < 0.0) return 1.0 - t_sf(-t, df);
  if (t == 0.0) return 0.5;
  if (std::isinf(t)) return 0.0;

  // P(T > t) = I_x(df/2, 1/2) / 2 with x = df / (df + t^2). Near x = 1 use
  // the complement on 1 - x = t^2 / (df + t^2), which is exact in that form.
  const double t2 = t * t;
  const double x = df / (df + t2);
  if (x < 0.5) return 0.5 * boost::math::ibeta(0.5 * df, 0.5, x);
  return 0.5 * boost::math::ibetac(0.5, 0.5 * df, t2 / (df + t2));
}

std::vector<std::string> merge_small_categories(std::span<const std::string> labels,
                                                long long threshold,
                                                const std::string& merged_label,
                                                Warnings* warnings) {
  if (threshold < 0) throw InvariantError("merge threshold must be >= 0");
  std::map<std::string, long long> counts;
  for (const auto& l : labels) ++counts[l];
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(counts[l] < threshold ? merged_label : l);
  if (!out.empty() && sorted_categories(out).size() == 1) {
    warn(warnings, "degenerate_covariate",
         "degenerate covariate: a single category '" + out.front() +
             "' remains after merging; design is intercept-only");
  }
  return out;
}

}  // namespace tmeval
