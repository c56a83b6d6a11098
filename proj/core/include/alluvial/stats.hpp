#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alluvial/types.hpp"

namespace alluvial {

/// Observations are rows, predictors are columns.
using Matrix = std::vector<std::vector<double>>;

struct RegressionResult {
    std::vector<double> coefficients;
    std::vector<double> standardized_betas;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<double> p_values;
    int n = 0;
    std::vector<std::string> warnings;
};

struct FactorLoadings {
    /// loadings[variable][component], eigenvector scaled by sqrt(eigenvalue).
    std::vector<std::vector<double>> loadings;
    /// Correlation-matrix eigenvalues, non-increasing; sums to the variable
    /// count.
    std::vector<double> explained_variance;
};

struct CrossValReport {
    std::vector<ModelWeights> fold_weights;
    ModelWeights mean_weights;
    ModelWeights weight_sd;
    double r_squared_mean = 0.0;
    double r_squared_sd = 0.0;
    int k = 0;
    int repeats = 0;
    std::vector<std::string> warnings;
};

/// Least squares with intercept, solved by column-pivoted QR. Standardized
/// betas are coefficient * sd(x)/sd(y); p-values are two-sided t-tests on
/// n - p - 1 degrees of freedom. A zero-variance target yields r_squared 0
/// with a warning instead of NaN.
RegressionResult ols(const std::vector<double>& y, const Matrix& X);

/// Unrotated PCA of the correlation matrix. Sign convention: each
/// component's largest-magnitude loading is positive. column_names, when
/// given, are used in DegenerateVariable messages.
FactorLoadings pca_loadings(const Matrix& X, const std::vector<std::string>& column_names = {});

/// Repeated k-fold cross-validation of the four-feature model. Every fold
/// fits target on (timesteps, entities, flow_arcs, crossings), normalizes
/// the standardized betas to sum to 1, and scores R-squared on the held-out
/// fold. Per-weight mean and standard deviation are taken across all
/// k * repeats folds. Singular folds are skipped with a warning. Fold
/// shuffling is deterministic in seed.
CrossValReport fit_weights(const std::vector<FeatureVector>& features,
                           const std::vector<double>& target, int k, int repeats,
                           std::uint64_t seed = 0);

/// Two-sided p-value for a t statistic, via the regularized incomplete beta
/// function. Exposed for reuse and direct verification.
double t_two_sided_p(double t, double degrees_of_freedom);

double mean(const std::vector<double>& values);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two
/// values.
double sample_sd(const std::vector<double>& values);

} // namespace alluvial
