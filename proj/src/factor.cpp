#include "debtlab/factor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "debtlab/parallel.hpp"
#include "debtlab/rng.hpp"

namespace debtlab {

namespace {

// Correlation matrix of pre-extracted columns; throws naming any
// zero-variance column.
Matrix correlation_of(const std::vector<std::vector<double>>& cols,
                      const std::vector<std::string>& names) {
    const std::size_t m = cols.size();
    const std::size_t n = cols.empty() ? 0 : cols[0].size();

    std::vector<double> mu(m), sd(m);
    for (std::size_t j = 0; j < m; ++j) {
        mu[j] = mean(cols[j]);
        double s = 0.0;
        for (double v : cols[j]) s += (v - mu[j]) * (v - mu[j]);
        sd[j] = std::sqrt(s);
        if (sd[j] == 0.0)
            throw std::runtime_error("correlation: column '" +
                                     (j < names.size() ? names[j] : std::to_string(j)) +
                                     "' has zero variance");
    }

    Matrix c(m, m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        c(j, j) = 1.0;
        for (std::size_t k = j + 1; k < m; ++k) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += (cols[j][r] - mu[j]) * (cols[k][r] - mu[k]);
            const double corr = s / (sd[j] * sd[k]);
            c(j, k) = corr;
            c(k, j) = corr;
        }
    }
    return c;
}

std::vector<double> correlation_eigenvalues(const std::vector<std::vector<double>>& cols,
                                            const std::vector<std::string>& names) {
    return jacobi_eigen(correlation_of(cols, names)).values;
}

}  // namespace

CorrelationEigen correlation_eigen(const Table& t) {
    const auto pred = t.predictor_cols();
    if (pred.size() < 2)
        throw std::runtime_error("correlation_eigen: need at least 2 predictor columns");
    if (t.n_rows() < 3) throw std::runtime_error("correlation_eigen: need at least 3 rows");

    CorrelationEigen out;
    out.names = t.predictor_names();
    std::vector<std::vector<double>> cols;
    cols.reserve(pred.size());
    for (std::size_t c : pred) cols.push_back(t.column(c));

    out.correlation = correlation_of(cols, out.names);
    SymEigen eig = jacobi_eigen(out.correlation);
    out.eigenvalues = std::move(eig.values);
    out.eigenvectors = std::move(eig.vectors);
    return out;
}

ParallelAnalysisResult parallel_analysis(const Table& t, std::size_t n_sims, double quantile,
                                         std::uint64_t seed, int threads) {
    if (n_sims < 20) throw std::invalid_argument("parallel_analysis: need at least 20 simulations");
    if (!(quantile > 0.0 && quantile <= 1.0))
        throw std::invalid_argument("parallel_analysis: quantile outside (0, 1]");

    CorrelationEigen obs = correlation_eigen(t);
    const std::size_t m = obs.names.size();
    const std::size_t n = t.n_rows();

    // i-th eigenvalues across simulated standard-normal datasets of one shape
    std::vector<std::vector<double>> sims(n_sims);
    const Rng root = Rng(seed).substream("parallel-analysis");
    const std::vector<std::string> no_names;
    parallel_for(n_sims, threads, [&](std::size_t s) {
        Rng rng = root.substream(s);
        std::vector<std::vector<double>> cols(m, std::vector<double>(n));
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t r = 0; r < n; ++r) cols[j][r] = rng.normal();
        sims[s] = correlation_eigenvalues(cols, no_names);
    });

    ParallelAnalysisResult out;
    out.observed = obs.eigenvalues;
    out.thresholds.resize(m);
    std::vector<double> level(n_sims);
    const double pos = quantile * static_cast<double>(n_sims);
    const std::size_t idx =
        pos <= 1.0 ? 0 : std::min(n_sims - 1, static_cast<std::size_t>(std::ceil(pos)) - 1);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t s = 0; s < n_sims; ++s) level[s] = sims[s][i];
        std::sort(level.begin(), level.end());
        out.thresholds[i] = level[idx];
        if (out.observed[i] > out.thresholds[i]) ++out.n_factors;
    }
    return out;
}

ScreeData scree_data(const std::vector<double>& eigenvalues, double drop_threshold) {
    if (eigenvalues.size() < 2) throw std::invalid_argument("scree_data: need at least 2 eigenvalues");
    ScreeData out;
    out.drop_threshold = drop_threshold;
    for (std::size_t i = 0; i < eigenvalues.size(); ++i)
        out.series.emplace_back(i + 1, eigenvalues[i]);
    for (std::size_t i = 0; i + 1 < eigenvalues.size(); ++i)
        if (eigenvalues[i] - eigenvalues[i + 1] > drop_threshold) out.suggested = i + 1;
    return out;
}

FactorModel extract_loadings(const CorrelationEigen& eig, std::size_t k,
                             double suppress_threshold) {
    const std::size_t m = eig.eigenvalues.size();
    if (k < 1 || k > m) throw std::invalid_argument("extract_loadings: k outside 1..m");

    FactorModel fm;
    fm.eigenvalues = eig.eigenvalues;
    fm.n_factors = k;
    fm.suppress_threshold = suppress_threshold;
    fm.variable_names = eig.names;
    fm.loadings = Matrix(m, k);
    for (std::size_t j = 0; j < k; ++j) {
        const double scale = std::sqrt(std::max(eig.eigenvalues[j], 0.0));
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double v = std::abs(eig.eigenvectors(i, j));
            if (v > best) {
                best = v;
                arg = i;
            }
        }
        const double sign = eig.eigenvectors(arg, j) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < m; ++i)
            fm.loadings(i, j) = sign * scale * eig.eigenvectors(i, j);
    }
    return fm;
}

std::vector<double> FactorModel::communalities() const {
    std::vector<double> out(loadings.rows(), 0.0);
    for (std::size_t i = 0; i < loadings.rows(); ++i)
        for (std::size_t j = 0; j < loadings.cols(); ++j)
            out[i] += loadings(i, j) * loadings(i, j);
    return out;
}

void write_scree_csv(const ScreeData& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "index,eigenvalue\n";
    for (const auto& [i, v] : s.series) out << i << ',' << format_double(v) << '\n';
}

void write_loadings_csv(const FactorModel& fm, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "variable";
    for (std::size_t j = 0; j < fm.n_factors; ++j) out << ",Factor" << (j + 1);
    out << '\n';
    for (std::size_t i = 0; i < fm.loadings.rows(); ++i) {
        out << fm.variable_names[i];
        for (std::size_t j = 0; j < fm.n_factors; ++j) {
            out << ',';
            const double v = fm.loadings(i, j);
            if (std::abs(v) >= fm.suppress_threshold) out << format_double(v);
        }
        out << '\n';
    }
}

}  // namespace debtlab
