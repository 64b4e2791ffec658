#include "debtlab/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "debtlab/parallel.hpp"
#include "debtlab/rng.hpp"

namespace debtlab {

double RegressionTree::predict_row(const double* x) const {
    int idx = 0;
    for (;;) {
        const TreeNode& node = nodes[idx];
        if (node.leaf) return node.prediction;
        idx = x[node.split_col] <= node.threshold ? node.left : node.right;
    }
}

namespace {

struct SortEntry {
    double value;
    double y;
    std::size_t row;
};

struct GrowContext {
    const Matrix& x;
    const std::vector<double>& y;
    std::size_t mtry;
    std::size_t min_leaf;
    Rng rng;
    RegressionTree tree;
    std::vector<SortEntry> sort_buf;
};

double node_mean(const std::vector<double>& y, const std::vector<std::size_t>& rows) {
    double s = 0.0;
    for (std::size_t r : rows) s += y[r];
    return s / static_cast<double>(rows.size());
}

struct BestSplit {
    bool found = false;
    std::size_t col = 0;
    double threshold = 0.0;
    double sse = 0.0;
};

// Exact scan over the sorted values of each candidate column. Split positions
// land between consecutive distinct values; both children must keep at least
// min_leaf rows.
BestSplit find_best_split(GrowContext& ctx, const std::vector<std::size_t>& rows,
                          const std::vector<std::size_t>& candidates) {
    BestSplit best;
    const std::size_t n = rows.size();
    auto& keyed = ctx.sort_buf;
    keyed.resize(n);

    for (std::size_t col : candidates) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t r = rows[i];
            keyed[i] = {ctx.x(r, col), ctx.y[r], r};
        }
        // Row index breaks value ties so duplicated datasets sort identically.
        std::sort(keyed.begin(), keyed.end(), [](const SortEntry& a, const SortEntry& b) {
            if (a.value != b.value) return a.value < b.value;
            return a.row < b.row;
        });

        // Prefix sums for O(1) SSE of each left/right partition.
        double sum_total = 0.0, sq_total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum_total += keyed[i].y;
            sq_total += keyed[i].y * keyed[i].y;
        }
        double sum_left = 0.0, sq_left = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            sum_left += keyed[i].y;
            sq_left += keyed[i].y * keyed[i].y;
            if (keyed[i].value == keyed[i + 1].value) continue;  // not a distinct-value boundary
            const std::size_t nl = i + 1;
            const std::size_t nr = n - nl;
            if (nl < ctx.min_leaf || nr < ctx.min_leaf) continue;
            const double sum_right = sum_total - sum_left;
            const double sq_right = sq_total - sq_left;
            const double sse = (sq_left - sum_left * sum_left / static_cast<double>(nl)) +
                               (sq_right - sum_right * sum_right / static_cast<double>(nr));
            const double threshold = (keyed[i].value + keyed[i + 1].value) / 2.0;
            if (!best.found || sse < best.sse ||
                (sse == best.sse &&
                 (col < best.col || (col == best.col && threshold < best.threshold)))) {
                best.found = true;
                best.col = col;
                best.threshold = threshold;
                best.sse = sse;
            }
        }
    }
    return best;
}

int grow_node(GrowContext& ctx, const std::vector<std::size_t>& rows, std::size_t depth) {
    ctx.tree.max_depth_reached = std::max(ctx.tree.max_depth_reached, depth);
    const int idx = static_cast<int>(ctx.tree.nodes.size());
    ctx.tree.nodes.emplace_back();
    ctx.tree.nodes[idx].n_rows = rows.size();

    double lo = ctx.y[rows[0]], hi = lo;
    for (std::size_t r : rows) {
        lo = std::min(lo, ctx.y[r]);
        hi = std::max(hi, ctx.y[r]);
    }
    const bool can_split = rows.size() >= 2 * ctx.min_leaf && lo != hi;

    BestSplit best;
    if (can_split) {
        auto candidates = ctx.rng.sample_without_replacement(ctx.x.cols(), ctx.mtry);
        best = find_best_split(ctx, rows, candidates);
    }
    if (!can_split || !best.found) {
        ctx.tree.nodes[idx].leaf = true;
        ctx.tree.nodes[idx].prediction = node_mean(ctx.y, rows);
        return idx;
    }

    std::vector<std::size_t> left_rows, right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    for (std::size_t r : rows)
        (ctx.x(r, best.col) <= best.threshold ? left_rows : right_rows).push_back(r);

    ctx.tree.nodes[idx].leaf = false;
    ctx.tree.nodes[idx].split_col = best.col;
    ctx.tree.nodes[idx].threshold = best.threshold;
    const int left = grow_node(ctx, left_rows, depth + 1);
    ctx.tree.nodes[idx].left = left;
    const int right = grow_node(ctx, right_rows, depth + 1);
    ctx.tree.nodes[idx].right = right;
    return idx;
}

Matrix predictor_matrix(const Table& t, std::vector<std::string>* names) {
    if (t.class_col)
        throw std::runtime_error("forest: class column must be pre-expanded to indicators");
    const auto pred = t.predictor_cols();
    Matrix x(t.n_rows(), pred.size());
    for (std::size_t r = 0; r < t.n_rows(); ++r)
        for (std::size_t j = 0; j < pred.size(); ++j) x(r, j) = t.at(r, pred[j]);
    if (names) *names = t.predictor_names();
    return x;
}

}  // namespace

Forest fit_forest(const Table& t, ForestConfig config) {
    std::vector<std::string> names;
    Matrix x = predictor_matrix(t, &names);
    const std::vector<double> y = t.response();
    const std::size_t n = x.rows();
    const std::size_t m = x.cols();

    if (n == 0 || m == 0) throw std::runtime_error("fit_forest: empty table");
    if (config.n_trees < 1) throw std::invalid_argument("fit_forest: n_trees must be >= 1");
    if (config.min_leaf < 1) throw std::invalid_argument("fit_forest: min_leaf must be >= 1");
    if (n < 2 * config.min_leaf)
        throw std::runtime_error("fit_forest: need at least " +
                                 std::to_string(2 * config.min_leaf) + " rows, got " +
                                 std::to_string(n));
    if (config.mtry == 0)
        config.mtry = (m + 2) / 3;  // ceil(m / 3)
    if (config.mtry > m)
        throw std::invalid_argument("fit_forest: mtry " + std::to_string(config.mtry) +
                                    " exceeds predictor count " + std::to_string(m));

    Forest f;
    f.config = config;
    f.feature_names = names;
    f.trees.resize(config.n_trees);
    f.oob_indices.resize(config.n_trees);

    const Rng root(config.seed);
    parallel_for(config.n_trees, config.threads, [&](std::size_t k) {
        Rng tree_rng = root.substream("tree").substream(k);
        std::vector<std::size_t> inbag;
        std::vector<bool> drawn(n, false);
        if (config.bootstrap) {
            inbag.reserve(n);
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t r = tree_rng.index(n);
                inbag.push_back(r);
                drawn[r] = true;
            }
            std::sort(inbag.begin(), inbag.end());
        } else {
            inbag.resize(n);
            std::iota(inbag.begin(), inbag.end(), 0);
            drawn.assign(n, true);
        }
        GrowContext ctx{x, y, config.mtry, config.min_leaf, tree_rng.substream("grow"), {}, {}};
        grow_node(ctx, inbag, 0);
        f.trees[k] = std::move(ctx.tree);
        for (std::size_t i = 0; i < n; ++i)
            if (!drawn[i]) f.oob_indices[k].push_back(i);
    });
    return f;
}

std::vector<double> predict_forest(const Forest& f, const Table& t) {
    std::vector<std::string> names;
    Matrix x = predictor_matrix(t, &names);
    if (names != f.feature_names)
        throw std::runtime_error("predict_forest: table columns do not match training layout");

    std::vector<double> out(x.rows(), 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        double s = 0.0;
        for (const auto& tree : f.trees) s += tree.predict_row(x.row_ptr(r));
        out[r] = s / static_cast<double>(f.trees.size());
    }
    return out;
}

double oob_error(const Forest& f, const Table& t) {
    std::vector<std::string> names;
    Matrix x = predictor_matrix(t, &names);
    if (names != f.feature_names)
        throw std::runtime_error("oob_error: table columns do not match training layout");
    const std::vector<double> y = t.response();

    std::vector<double> acc(x.rows(), 0.0);
    std::vector<std::size_t> cnt(x.rows(), 0);
    for (std::size_t k = 0; k < f.trees.size(); ++k) {
        for (std::size_t r : f.oob_indices[k]) {
            acc[r] += f.trees[k].predict_row(x.row_ptr(r));
            ++cnt[r];
        }
    }
    double sse = 0.0;
    std::size_t covered = 0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        if (cnt[r] == 0) continue;
        const double err = acc[r] / static_cast<double>(cnt[r]) - y[r];
        sse += err * err;
        ++covered;
    }
    if (covered == 0)
        throw std::runtime_error("oob_error: no out-of-bag coverage; grow more trees");
    return std::sqrt(sse / static_cast<double>(covered));
}

std::vector<double> permutation_importance(const Forest& f, const Table& t, std::uint64_t seed) {
    std::vector<std::string> names;
    Matrix x = predictor_matrix(t, &names);
    if (names != f.feature_names)
        throw std::runtime_error("permutation_importance: table columns do not match training layout");
    const std::vector<double> y = t.response();
    const std::size_t m = x.cols();

    std::vector<double> importance(m, 0.0);
    std::vector<std::size_t> counted(m, 0);
    const Rng root(seed);

    for (std::size_t k = 0; k < f.trees.size(); ++k) {
        const auto& oob = f.oob_indices[k];
        if (oob.size() < 2) continue;
        double base = 0.0;
        for (std::size_t r : oob) {
            const double err = f.trees[k].predict_row(x.row_ptr(r)) - y[r];
            base += err * err;
        }
        base /= static_cast<double>(oob.size());

        std::vector<double> buf(x.cols());
        for (std::size_t j = 0; j < m; ++j) {
            Rng rng = root.substream(k * 1315423911ULL + j);
            std::vector<std::size_t> perm(oob.begin(), oob.end());
            rng.shuffle(perm);
            double mse = 0.0;
            for (std::size_t i = 0; i < oob.size(); ++i) {
                const double* row = x.row_ptr(oob[i]);
                std::copy(row, row + x.cols(), buf.begin());
                buf[j] = x(perm[i], j);
                const double err = f.trees[k].predict_row(buf.data()) - y[oob[i]];
                mse += err * err;
            }
            mse /= static_cast<double>(oob.size());
            importance[j] += mse - base;
            ++counted[j];
        }
    }
    for (std::size_t j = 0; j < m; ++j)
        if (counted[j] > 0) importance[j] /= static_cast<double>(counted[j]);
    return importance;
}

}  // namespace debtlab
