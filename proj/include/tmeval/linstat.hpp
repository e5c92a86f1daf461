#pragma once

// Statistical kernel: sum-contrast designs, QR least squares and Student-t
// tails.
//
// Sum coding with P categories (sorted ascending, last one is the
// reference) gives P-1 contrast columns. A row in non-reference category j
// has +1 in column j and 0 elsewhere; a reference row has -1 in every
// contrast column. The intercept is then the unweighted mean of category
// means, and each coefficient is that category's mean minus the intercept.
// The reference coefficient is implied: minus the sum of the others.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tmeval/diagnostics.hpp"

namespace tmeval {

inline constexpr const char* kInterceptTerm = "Intercept";

struct DesignMatrix {
  std::vector<std::string> columns;     // "Intercept", then non-reference categories
  Eigen::MatrixXd values;               // n x p
  std::vector<std::string> categories;  // ascending
  std::string reference_category;       // categories.back()
  std::vector<int> category_of_row;     // index into categories

  Eigen::Index n_rows() const { return values.rows(); }
};

/// Sorted distinct labels.
std::vector<std::string> sorted_categories(std::span<const std::string> labels);

/// Sum-contrast design for one categorical column.
DesignMatrix build_design(std::span<const std::string> labels);

/// Design from integer codes in [0, n_categories); code n_categories-1 is the
/// reference. Returns intercept-only when n_categories == 1.
Eigen::MatrixXd sum_contrast_matrix(std::span<const int> codes, int n_categories);

struct OLSFit {
  Eigen::VectorXd coefficients;
  long long df_resid = 0;
  int rank = 0;
  double residual_sum_squares = 0.0;

  bool full_rank() const { return rank == coefficients.size(); }
};

/// Least squares by column-pivoted Householder QR. A rank-deficient design is
/// reported with rank < p; callers treat it as infeasible.
OLSFit ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Fits every column of Y against the same design with one factorization.
std::vector<OLSFit> ols_fit_columns(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// Minus the sum of the contrast coefficients (all but the intercept).
double implied_reference_coefficient(const Eigen::VectorXd& coefficients);

/// Upper tail P(T > t) of Student's t with df degrees of freedom, via the
/// regularized incomplete beta function. Throws if df <= 0 or is not finite.
double t_sf(double t, double df);

/// Replaces every label occurring fewer than `threshold` times with
/// merged_label. Warns when only one category remains.
std::vector<std::string> merge_small_categories(std::span<const std::string> labels,
                                                long long threshold = 1000,
                                                const std::string& merged_label = "Other",
                                                Warnings* warnings = nullptr);

}  // namespace tmeval
