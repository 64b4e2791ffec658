#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "debtlab/forest.hpp"
#include "debtlab/generator.hpp"
#include "debtlab/neural.hpp"
#include "debtlab/table.hpp"

namespace debtlab {

/// sqrt(mean squared error).
double rmse(const std::vector<double>& observed, const std::vector<double>& predicted);

/// Squared Pearson correlation between observed and predicted; 0 when the
/// predictions have zero variance.
double r_squared(const std::vector<double>& observed, const std::vector<double>& predicted);

/// 1 - SSE/SST, reported alongside the correlation form for transparency.
double r_squared_sse(const std::vector<double>& observed, const std::vector<double>& predicted);

struct FoldPlan {
    std::size_t n_folds = 10;
    std::vector<std::size_t> assignments;  // fold index per row
    std::uint64_t seed = 0;

    static FoldPlan make(std::size_t n_rows, std::size_t n_folds, std::uint64_t seed);
    std::uint64_t hash() const;
    std::vector<std::size_t> test_rows(std::size_t fold) const;
    std::vector<std::size_t> train_rows(std::size_t fold) const;
};

/// A trained model ready to score new tables.
using PredictFn = std::function<std::vector<double>(const Table&)>;
/// Trains on one fold's training partition; fold_seed feeds any randomness.
using TrainFn = std::function<PredictFn(const Table& train, std::uint64_t fold_seed)>;

struct FoldScore {
    double rmse = 0.0;
    double r2 = 0.0;
    double r2_sse = 0.0;
    std::vector<double> observed;
    std::vector<double> predicted;
};

struct CvReport {
    std::string model_tag;
    std::string dataset_tag;
    std::vector<FoldScore> per_fold;
    double rmse_mean = 0.0;
    double r2_mean = 0.0;
    double r2_sse_mean = 0.0;
    std::optional<int> selected_hidden;
    std::size_t n_folds = 0;
    std::uint64_t plan_hash = 0;
};

CvReport cross_validate(const TrainFn& train, const Table& t, const FoldPlan& plan,
                        const std::string& model_tag, const std::string& dataset_tag,
                        int threads = 1, std::uint64_t seed = 0);

enum class TrainerKind { Backprop, Rprop };

/// Standard model factories used by the comparison harness. Networks see
/// class labels as indicator columns and min-max scaled predictors (scaler
/// fitted on the training partition only).
TrainFn linreg_trainer();
TrainFn forest_trainer(ForestConfig cfg);
TrainFn network_trainer(std::vector<std::size_t> hidden_sizes, TrainerKind kind, TrainConfig cfg);

/// As network_trainer, but the caller supplies the initial network for each
/// fold, built from the encoded and scaled training table.
using NetworkBuilder = std::function<Network(const Table& train_scaled, std::uint64_t seed)>;
TrainFn custom_network_trainer(NetworkBuilder builder, TrainerKind kind, TrainConfig cfg);

struct SweepConfig {
    std::vector<int> sizes;  // hidden-layer widths to try
    TrainerKind kind = TrainerKind::Rprop;
    TrainConfig train;
    double tie_epsilon = 0.0;  // reports within this of the best count as ties
    int threads = 1;
};

/// Trains one single-hidden-layer network per size, cross-validates each and
/// returns the minimum-RMSE report. Ties break toward fewer neurons.
CvReport sweep_hidden_sizes(const Table& t, const SweepConfig& cfg, const FoldPlan& plan,
                            const std::string& model_tag, const std::string& dataset_tag);

struct CompareConfig {
    std::uint64_t seed = 0;
    std::size_t n_folds = 10;
    std::vector<std::string> families = {"linreg", "forest", "nn_backprop", "nn_rprop"};
    std::vector<int> hidden_sizes = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    ForestConfig forest;
    TrainConfig backprop;
    TrainConfig rprop;
    ExpandConfig expand;
    double sweep_tie_epsilon = 0.0;
    int threads = 1;
};

struct CompareRow {
    std::string family;
    std::string dataset;
    double rmse = 0.0;
    double r2 = 0.0;
    double r2_sse = 0.0;
    std::optional<int> hidden;
    std::string error;  // non-empty when this cell failed
};

struct Comparison {
    std::vector<CompareRow> rows;
    std::uint64_t plan_hash = 0;
    std::size_t n_folds = 0;
};

/// Runs every requested family on variants A-D built from one transformed
/// table, under a single shared fold plan. Per-cell failures are recorded and
/// the run continues.
Comparison compare_models(const Table& transformed_with_class, const CompareConfig& cfg);

std::string comparison_text(const Comparison& c);
void write_comparison_csv(const Comparison& c, const std::string& path);

}  // namespace debtlab
