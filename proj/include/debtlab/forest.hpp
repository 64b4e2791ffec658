#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "debtlab/linalg.hpp"
#include "debtlab/table.hpp"

namespace debtlab {

struct ForestConfig {
    std::size_t n_trees = 500;
    std::size_t mtry = 0;      // 0 = ceil(m / 3)
    std::size_t min_leaf = 5;
    std::uint64_t seed = 0;
    bool bootstrap = true;     // test hook; false trains every tree on all rows
    int threads = 1;
};

struct TreeNode {
    bool leaf = true;
    std::size_t split_col = 0;
    double threshold = 0.0;    // rows with x[split_col] <= threshold go left
    int left = -1;
    int right = -1;
    double prediction = 0.0;   // leaf mean of the node's training responses
    std::size_t n_rows = 0;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::size_t max_depth_reached = 0;

    double predict_row(const double* x) const;
};

struct Forest {
    std::vector<RegressionTree> trees;
    std::vector<std::vector<std::size_t>> oob_indices;  // per tree, sorted
    ForestConfig config;
    std::vector<std::string> feature_names;
};

/// Bagged CART regression trees: each tree grows on an independent bootstrap
/// sample; at each node mtry candidate columns are sampled without
/// replacement and the split minimizing total child SSE wins. Ties resolve to
/// the lowest column index, then the lowest threshold. The class column must
/// be pre-expanded to indicator columns.
Forest fit_forest(const Table& t, ForestConfig config);

std::vector<double> predict_forest(const Forest& f, const Table& t);

/// Out-of-bag RMSE over the training table: each row is predicted by the
/// trees whose bootstrap sample missed it.
double oob_error(const Forest& f, const Table& t);

/// Mean increase in per-tree OOB MSE after permuting one predictor at a time.
std::vector<double> permutation_importance(const Forest& f, const Table& t, std::uint64_t seed);

}  // namespace debtlab
