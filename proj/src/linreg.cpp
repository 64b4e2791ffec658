#include "debtlab/linreg.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "debtlab/linalg.hpp"

namespace debtlab {

double LinearModel::coefficient(const std::string& name) const {
    for (std::size_t j = 0; j < predictor_names.size(); ++j)
        if (predictor_names[j] == name) return coefficients[j];
    throw std::runtime_error("unknown predictor '" + name + "'");
}

namespace {

std::vector<double> transform_response(const std::vector<double>& y, ResponseTransform tr) {
    if (tr == ResponseTransform::Identity) return y;
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] <= 0.0) throw std::runtime_error("log response transform requires y > 0");
        out[i] = std::log(y[i]);
    }
    return out;
}

}  // namespace

LinearModel fit_ols(const Table& t, const OlsOptions& opts) {
    DesignMatrix d = design_matrix(t, ClassEncoding::DropFirst);
    const std::size_t n = d.x.rows();
    const std::size_t p = d.x.cols();
    if (n <= p + 1)
        throw std::runtime_error("fit_ols: need more than " + std::to_string(p + 1) +
                                 " rows for " + std::to_string(p) + " predictors, got " +
                                 std::to_string(n));

    std::vector<double> y = transform_response(d.y, opts.transform);

    // Design with leading intercept column.
    Matrix a(n, p + 1);
    for (std::size_t r = 0; r < n; ++r) {
        a(r, 0) = 1.0;
        for (std::size_t c = 0; c < p; ++c) a(r, c + 1) = d.x(r, c);
    }

    LeastSquares ls = qr_least_squares(std::move(a), y, opts.rank_tol);
    if (ls.rank_deficient) {
        const std::string which =
            ls.deficient_col == 0 ? "(intercept)" : d.names[ls.deficient_col - 1];
        throw std::runtime_error("fit_ols: design matrix is rank deficient at column '" +
                                 which + "'");
    }

    LinearModel m;
    m.transform = opts.transform;
    m.intercept = ls.coef[0];
    m.coefficients.assign(ls.coef.begin() + 1, ls.coef.end());
    m.predictor_names = d.names;
    m.labels = d.labels;

    m.fitted.resize(n);
    m.residuals.resize(n);
    double sse = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double f = m.intercept;
        for (std::size_t c = 0; c < p; ++c) f += m.coefficients[c] * d.x(r, c);
        m.fitted[r] = f;
        m.residuals[r] = y[r] - f;
        sse += m.residuals[r] * m.residuals[r];
    }
    const double ybar = mean(y);
    double sst = 0.0;
    for (double v : y) sst += (v - ybar) * (v - ybar);
    m.r_squared = sst > 0.0 ? 1.0 - sse / sst : 1.0;
    return m;
}

std::vector<double> predict(const LinearModel& m, const Table& t) {
    DesignMatrix d = m.labels.empty() ? design_matrix(t, ClassEncoding::DropFirst)
                                      : design_matrix(t, ClassEncoding::DropFirst, m.labels);
    if (d.names != m.predictor_names)
        throw std::runtime_error("predict: table columns do not match the fitted model");
    std::vector<double> out(d.x.rows());
    for (std::size_t r = 0; r < d.x.rows(); ++r) {
        double f = m.intercept;
        for (std::size_t c = 0; c < d.x.cols(); ++c) f += m.coefficients[c] * d.x(r, c);
        out[r] = f;
    }
    return out;
}

Diagnostics diagnostics(const LinearModel& m, const DiagnosticsOptions& opts) {
    const std::size_t n = m.residuals.size();
    if (n < 10) throw std::runtime_error("diagnostics: need at least 10 observations");

    Diagnostics d;
    d.residuals_vs_fitted.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        d.residuals_vs_fitted.emplace_back(m.fitted[i], m.residuals[i]);

    double sd = 0.0;
    for (double r : m.residuals) sd += r * r;
    sd = std::sqrt(sd / static_cast<double>(n - 1));

    d.standardized.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        d.standardized[i] = sd > 0.0 ? m.residuals[i] / sd : 0.0;

    std::vector<double> sorted = d.standardized;
    std::sort(sorted.begin(), sorted.end());
    d.qq.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double q = inverse_normal_cdf((static_cast<double>(i) + 0.5) / n);
        d.qq.emplace_back(q, sorted[i]);
    }

    // Breusch-Pagan style score: squared residuals regressed on fitted values.
    if (sd > 0.0) {
        std::vector<double> sq(n);
        for (std::size_t i = 0; i < n; ++i) sq[i] = m.residuals[i] * m.residuals[i];
        const double fbar = mean(m.fitted);
        const double qbar = mean(sq);
        double sxy = 0.0, sxx = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = m.fitted[i] - fbar;
            const double dy = sq[i] - qbar;
            sxy += dx * dy;
            sxx += dx * dx;
            syy += dy * dy;
        }
        d.bp_r2 = (sxx > 0.0 && syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 0.0;
        d.heteroscedastic = d.bp_r2 > opts.bp_r2_threshold;
    }
    return d;
}

void write_diagnostics_csv(const Diagnostics& d, const std::string& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(std::filesystem::path(dir) / "residuals.csv", std::ios::binary);
        out << "fitted,residual,standardized\n";
        for (std::size_t i = 0; i < d.residuals_vs_fitted.size(); ++i)
            out << format_double(d.residuals_vs_fitted[i].first) << ','
                << format_double(d.residuals_vs_fitted[i].second) << ','
                << format_double(d.standardized[i]) << '\n';
    }
    {
        std::ofstream out(std::filesystem::path(dir) / "qq.csv", std::ios::binary);
        out << "theoretical,sample\n";
        for (const auto& [q, s] : d.qq)
            out << format_double(q) << ',' << format_double(s) << '\n';
    }
}

std::vector<std::pair<double, double>> partial_residuals(const LinearModel& m, const Table& t,
                                                         const std::string& predictor) {
    const double beta = m.coefficient(predictor);  // throws on unknown predictor
    const std::size_t col = t.column_index(predictor);
    if (t.n_rows() != m.residuals.size())
        throw std::runtime_error("partial_residuals: table does not match the fitted model");

    std::vector<std::pair<double, double>> out;
    out.reserve(t.n_rows());
    for (std::size_t r = 0; r < t.n_rows(); ++r) {
        const double x = t.at(r, col);
        out.emplace_back(x, m.residuals[r] + beta * x);
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

void write_partial_csv(const std::vector<std::pair<double, double>>& pr,
                       const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "x,partial_residual\n";
    for (const auto& [x, v] : pr) out << format_double(x) << ',' << format_double(v) << '\n';
}

}  // namespace debtlab
