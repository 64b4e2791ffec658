#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "debtlab/linalg.hpp"
#include "debtlab/table.hpp"

namespace debtlab {

struct CorrelationEigen {
    std::vector<std::string> names;   // predictor names, in table order
    Matrix correlation;
    std::vector<double> eigenvalues;  // descending
    Matrix eigenvectors;              // orthonormal columns
};

/// Pearson correlation of the predictor columns and its full symmetric
/// eigendecomposition (cyclic Jacobi).
CorrelationEigen correlation_eigen(const Table& t);

struct ParallelAnalysisResult {
    std::size_t n_factors = 0;
    std::vector<double> observed;    // eigenvalues, descending
    std::vector<double> thresholds;  // simulated quantile per position
};

/// Retains factor i iff the observed i-th eigenvalue exceeds the chosen
/// quantile of the i-th eigenvalues of n_sims same-shape standard-normal
/// datasets.
ParallelAnalysisResult parallel_analysis(const Table& t, std::size_t n_sims = 100,
                                         double quantile = 0.95, std::uint64_t seed = 0,
                                         int threads = 1);

struct ScreeData {
    std::vector<std::pair<std::size_t, double>> series;  // (1-based index, eigenvalue)
    std::size_t suggested = 0;  // position of the last drop above drop_threshold
    double drop_threshold = 0.4;
};

ScreeData scree_data(const std::vector<double>& eigenvalues, double drop_threshold = 0.4);

struct FactorModel {
    std::vector<double> eigenvalues;  // all m, descending
    Matrix loadings;                  // m variables x k factors
    std::size_t n_factors = 0;
    double suppress_threshold = 0.1;  // report form blanks entries below this
    std::vector<std::string> variable_names;

    std::vector<double> communalities() const;  // row sums of squared loadings
};

/// Unrotated principal-component loadings: column j = eigenvector_j *
/// sqrt(eigenvalue_j), sign-flipped so each column's largest-magnitude entry
/// is positive.
FactorModel extract_loadings(const CorrelationEigen& eig, std::size_t k,
                             double suppress_threshold = 0.1);

void write_scree_csv(const ScreeData& s, const std::string& path);
void write_loadings_csv(const FactorModel& fm, const std::string& path);

}  // namespace debtlab
