#include "alluvial/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "alluvial/rng.hpp"

namespace alluvial {

namespace {

constexpr double kVarianceEps = 1e-12;

Eigen::MatrixXd to_eigen(const Matrix& X) {
    const auto rows = static_cast<Eigen::Index>(X.size());
    const auto cols = static_cast<Eigen::Index>(X.empty() ? 0 : X.front().size());
    Eigen::MatrixXd M(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(X[static_cast<std::size_t>(r)].size()) != cols)
            throw FormatError("ragged matrix: row " + std::to_string(r) + " has " +
                              std::to_string(X[static_cast<std::size_t>(r)].size()) +
                              " columns, expected " + std::to_string(cols));
        for (Eigen::Index c = 0; c < cols; ++c)
            M(r, c) = X[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    return M;
}

/// Continued-fraction evaluation of the regularized incomplete beta
/// function I_x(a, b) (Lentz's method).
double betacf(double a, double b, double x) {
    constexpr int kIterations = 300;
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-15;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

} // namespace

double t_two_sided_p(double t, double degrees_of_freedom) {
    if (degrees_of_freedom <= 0.0) throw OutOfRange("degrees of freedom must be positive");
    if (!std::isfinite(t)) return 0.0;
    const double x = degrees_of_freedom / (degrees_of_freedom + t * t);
    return incomplete_beta(degrees_of_freedom / 2.0, 0.5, x);
}

double mean(const std::vector<double>& values) {
    if (values.empty()) throw EmptyInput("mean of nothing");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_sd(const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    const double mu = mean(values);
    double acc = 0.0;
    for (double v : values) acc += (v - mu) * (v - mu);
    return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

RegressionResult ols(const std::vector<double>& y, const Matrix& X) {
    const std::size_t n = y.size();
    const std::size_t p = X.empty() ? 0 : X.front().size();
    if (p == 0) throw OutOfRange("no predictors");
    if (X.size() != n) throw FormatError("X has " + std::to_string(X.size()) + " rows, y has " +
                                         std::to_string(n));
    if (n < p + 2)
        throw InsufficientData("need more than " + std::to_string(p + 1) + " observations, got " +
                               std::to_string(n));

    Eigen::MatrixXd A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p) + 1);
    A.col(0).setOnes();
    A.rightCols(static_cast<Eigen::Index>(p)) = to_eigen(X);
    Eigen::VectorXd yv(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) yv(static_cast<Eigen::Index>(i)) = y[i];

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<Eigen::Index>(p) + 1)
        throw SingularDesign("design matrix rank " + std::to_string(qr.rank()) + " < " +
                             std::to_string(p + 1));
    const Eigen::VectorXd beta = qr.solve(yv);

    RegressionResult result;
    result.n = static_cast<int>(n);
    result.intercept = beta(0);
    result.coefficients.resize(p);
    for (std::size_t j = 0; j < p; ++j)
        result.coefficients[j] = beta(static_cast<Eigen::Index>(j) + 1);

    const Eigen::VectorXd fitted = A * beta;
    const Eigen::VectorXd residuals = yv - fitted;
    const double y_mean = yv.mean();
    const double sst = (yv.array() - y_mean).square().sum();
    const double ssr = residuals.squaredNorm();
    if (sst < kVarianceEps) {
        result.warnings.push_back("target has zero variance; R-squared reported as 0");
        result.r_squared = 0.0;
    } else {
        result.r_squared = std::clamp(1.0 - ssr / sst, 0.0, 1.0);
    }

    const double df = static_cast<double>(n - p - 1);
    const double sigma2 = ssr / df;
    const Eigen::MatrixXd xtx_inv = (A.transpose() * A).inverse();

    const double sd_y = std::sqrt(sst / static_cast<double>(n - 1));
    result.standardized_betas.resize(p);
    result.p_values.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        const Eigen::Index col = static_cast<Eigen::Index>(j) + 1;
        const double sd_x = std::sqrt((A.col(col).array() - A.col(col).mean()).square().sum() /
                                      static_cast<double>(n - 1));
        if (sd_y < kVarianceEps) {
            result.standardized_betas[j] = 0.0;
        } else {
            result.standardized_betas[j] = result.coefficients[j] * sd_x / sd_y;
        }
        const double se = std::sqrt(std::max(0.0, sigma2 * xtx_inv(col, col)));
        if (se < 1e-14) {
            result.p_values[j] = std::abs(result.coefficients[j]) < 1e-14 ? 1.0 : 0.0;
        } else {
            result.p_values[j] = t_two_sided_p(result.coefficients[j] / se, df);
        }
    }
    return result;
}

FactorLoadings pca_loadings(const Matrix& X, const std::vector<std::string>& column_names) {
    const std::size_t n = X.size();
    const std::size_t p = n == 0 ? 0 : X.front().size();
    if (p < 2 || n < 3)
        throw InsufficientData("PCA needs at least 2 variables and 3 observations, got " +
                               std::to_string(p) + " and " + std::to_string(n));

    Eigen::MatrixXd M = to_eigen(X);
    auto name_of = [&](std::size_t j) {
        return j < column_names.size() ? column_names[j] : "column " + std::to_string(j);
    };
    for (std::size_t j = 0; j < p; ++j) {
        const Eigen::Index col = static_cast<Eigen::Index>(j);
        const double sd = std::sqrt((M.col(col).array() - M.col(col).mean()).square().sum() /
                                    static_cast<double>(n - 1));
        if (sd < kVarianceEps)
            throw DegenerateVariable("zero variance in " + name_of(j));
        M.col(col) = (M.col(col).array() - M.col(col).mean()) / sd;
    }
    const Eigen::MatrixXd corr = M.transpose() * M / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(corr);
    if (solver.info() != Eigen::Success) throw SingularDesign("eigendecomposition failed");

    // Eigen returns ascending eigenvalues; report them descending.
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return solver.eigenvalues()(static_cast<Eigen::Index>(a)) >
               solver.eigenvalues()(static_cast<Eigen::Index>(b));
    });

    FactorLoadings result;
    result.explained_variance.resize(p);
    result.loadings.assign(p, std::vector<double>(p, 0.0));
    for (std::size_t out = 0; out < p; ++out) {
        const Eigen::Index src = static_cast<Eigen::Index>(order[out]);
        const double lambda = std::max(0.0, solver.eigenvalues()(src));
        result.explained_variance[out] = lambda;
        Eigen::VectorXd vec = solver.eigenvectors().col(src);
        Eigen::Index arg = 0;
        vec.cwiseAbs().maxCoeff(&arg);
        if (vec(arg) < 0.0) vec = -vec;
        for (std::size_t var = 0; var < p; ++var)
            result.loadings[var][out] = vec(static_cast<Eigen::Index>(var)) * std::sqrt(lambda);
    }
    return result;
}

CrossValReport fit_weights(const std::vector<FeatureVector>& features,
                           const std::vector<double>& target, int k, int repeats,
                           std::uint64_t seed) {
    const std::size_t n = features.size();
    if (target.size() != n)
        throw FormatError("feature and target counts differ: " + std::to_string(n) + " vs " +
                          std::to_string(target.size()));
    if (k < 2) throw InsufficientData("k must be at least 2");
    if (static_cast<std::size_t>(k) > n)
        throw InsufficientData("k=" + std::to_string(k) + " folds need at least that many charts, got " +
                               std::to_string(n));
    if (repeats < 1) throw InsufficientData("repeats must be at least 1");

    Matrix X(n, std::vector<double>(4));
    for (std::size_t i = 0; i < n; ++i)
        X[i] = {static_cast<double>(features[i].timesteps), static_cast<double>(features[i].entities),
                static_cast<double>(features[i].flow_arcs),
                static_cast<double>(features[i].crossings)};

    CrossValReport report;
    report.k = k;
    report.repeats = repeats;
    std::vector<std::array<double, 4>> weight_draws;
    std::vector<double> r2_draws;

    for (int repeat = 0; repeat < repeats; ++repeat) {
        std::vector<int> index(n);
        std::iota(index.begin(), index.end(), 0);
        SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(repeat));
        rng.shuffle(index);

        for (int fold = 0; fold < k; ++fold) {
            const std::size_t begin = n * static_cast<std::size_t>(fold) / static_cast<std::size_t>(k);
            const std::size_t end =
                n * (static_cast<std::size_t>(fold) + 1) / static_cast<std::size_t>(k);
            Matrix x_train;
            std::vector<double> y_train, y_test;
            Matrix x_test;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t row = static_cast<std::size_t>(index[i]);
                if (i >= begin && i < end) {
                    x_test.push_back(X[row]);
                    y_test.push_back(target[row]);
                } else {
                    x_train.push_back(X[row]);
                    y_train.push_back(target[row]);
                }
            }

            const std::string tag =
                "repeat " + std::to_string(repeat) + " fold " + std::to_string(fold);
            RegressionResult fit;
            try {
                fit = ols(y_train, x_train);
            } catch (const NumericError& e) {
                report.warnings.push_back(tag + " skipped: " + e.what());
                continue;
            }
            const double beta_sum = std::accumulate(fit.standardized_betas.begin(),
                                                    fit.standardized_betas.end(), 0.0);
            if (std::abs(beta_sum) < 1e-12) {
                report.warnings.push_back(tag + " skipped: standardized betas sum to 0");
                continue;
            }
            std::array<double, 4> weights{};
            for (std::size_t j = 0; j < 4; ++j) weights[j] = fit.standardized_betas[j] / beta_sum;
            weight_draws.push_back(weights);
            ModelWeights fold_weights{weights[0], weights[1], weights[2], weights[3],
                                      WeightLabel::Custom};
            report.fold_weights.push_back(fold_weights);

            double sse = 0.0, sst = 0.0;
            const double test_mean = mean(y_test);
            for (std::size_t i = 0; i < y_test.size(); ++i) {
                double predicted = fit.intercept;
                for (std::size_t j = 0; j < 4; ++j) predicted += fit.coefficients[j] * x_test[i][j];
                sse += (y_test[i] - predicted) * (y_test[i] - predicted);
                sst += (y_test[i] - test_mean) * (y_test[i] - test_mean);
            }
            if (sst < kVarianceEps) {
                if (sse < kVarianceEps) {
                    r2_draws.push_back(1.0);
                } else {
                    report.warnings.push_back(tag + ": constant held-out target; R-squared 0");
                    r2_draws.push_back(0.0);
                }
            } else {
                r2_draws.push_back(1.0 - sse / sst);
            }
        }
    }
    if (weight_draws.empty()) throw SingularDesign("every fold was singular");

    std::array<std::vector<double>, 4> per_weight;
    for (const auto& draw : weight_draws)
        for (std::size_t j = 0; j < 4; ++j) per_weight[j].push_back(draw[j]);
    report.mean_weights = {mean(per_weight[0]), mean(per_weight[1]), mean(per_weight[2]),
                           mean(per_weight[3]), WeightLabel::Custom};
    report.weight_sd = {sample_sd(per_weight[0]), sample_sd(per_weight[1]),
                        sample_sd(per_weight[2]), sample_sd(per_weight[3]), WeightLabel::Custom};
    report.r_squared_mean = mean(r2_draws);
    report.r_squared_sd = sample_sd(r2_draws);
    return report;
}

} // namespace alluvial
