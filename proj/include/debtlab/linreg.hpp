#pragma once

#include <string>
#include <utility>
#include <vector>

#include "debtlab/table.hpp"

namespace debtlab {

enum class ResponseTransform { Identity, Log };

struct OlsOptions {
    ResponseTransform transform = ResponseTransform::Identity;
    double rank_tol = 1e-10;  // R diagonal below rank_tol * max|R_jj| => rank deficient
};

struct LinearModel {
    double intercept = 0.0;
    std::vector<double> coefficients;
    std::vector<std::string> predictor_names;  // after categorical encoding
    std::vector<double> fitted;
    std::vector<double> residuals;             // observed - fitted
    std::vector<double> labels;                // class labels backing the dummies
    ResponseTransform transform = ResponseTransform::Identity;
    double r_squared = 0.0;                    // training 1 - SSE/SST

    double coefficient(const std::string& name) const;
};

/// Ordinary least squares with intercept. Categorical class column, when
/// present, enters as K-1 dummies against the smallest label.
LinearModel fit_ols(const Table& t, const OlsOptions& opts = {});

std::vector<double> predict(const LinearModel& m, const Table& t);

struct Diagnostics {
    std::vector<std::pair<double, double>> residuals_vs_fitted;
    std::vector<double> standardized;
    std::vector<std::pair<double, double>> qq;  // (theoretical quantile, sample quantile)
    double bp_r2 = 0.0;   // R^2 of squared residuals regressed on fitted values
    bool heteroscedastic = false;
};

struct DiagnosticsOptions {
    double bp_r2_threshold = 0.05;
};

Diagnostics diagnostics(const LinearModel& m, const DiagnosticsOptions& opts = {});

/// Writes residuals.csv and qq.csv under dir (created if needed).
void write_diagnostics_csv(const Diagnostics& d, const std::string& dir);

/// Component-plus-residual series for one predictor: (x_ij, e_i + b_j x_ij),
/// sorted by x.
std::vector<std::pair<double, double>> partial_residuals(const LinearModel& m, const Table& t,
                                                         const std::string& predictor);

void write_partial_csv(const std::vector<std::pair<double, double>>& pr,
                       const std::string& path);

}  // namespace debtlab
