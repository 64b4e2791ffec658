#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "debtlab/evalcv.hpp"
#include "debtlab/factor.hpp"
#include "debtlab/neural.hpp"
#include "debtlab/table.hpp"

namespace debtlab {

struct TopologyPlan {
    std::size_t n_factors = 0;       // first hidden layer width
    std::size_t n_classes = 0;       // second hidden layer width
    bool include_class_layer = true;
    bool loading_init = false;
    std::size_t scree_suggested = 0;
    bool scree_agrees = false;       // scree suggestion matched parallel analysis
};

struct PlanConfig {
    std::size_t n_sims = 100;
    double quantile = 0.95;
    double drop_threshold = 0.4;
    bool include_class_layer = true;
    bool loading_init = false;
};

/// Sizes the hidden layers from the data: parallel analysis fixes the factor
/// layer (the scree suggestion is cross-checked and reported; parallel
/// analysis wins a disagreement) and the distinct class labels fix the class
/// layer.
TopologyPlan plan_topology(const Table& t, const PlanConfig& cfg, std::uint64_t seed);

/// Fully connected net with hidden sizes [n_factors] or
/// [n_factors, n_classes]. With loading_init the input-to-first-layer weights
/// start at the factor loadings scaled by init_scale; everything else is
/// random.
Network build_network(const TopologyPlan& plan, std::size_t input_size, const FactorModel& fa,
                      std::uint64_t seed, double init_scale = 0.5);

struct TopdnnConfig {
    std::uint64_t seed = 0;
    std::size_t n_folds = 10;
    TrainConfig train;           // Rprop settings
    PlanConfig plan;
    bool feed_class_inputs = false;  // also feed class indicators as inputs
    int threads = 1;
};

struct TopdnnReport {
    TopologyPlan plan;
    FactorModel fa;
    ScreeData scree;
    ParallelAnalysisResult pa;
    CvReport factor_only;                 // hidden sizes [n_factors]
    std::optional<CvReport> factor_class; // hidden sizes [n_factors, n_classes]
    Network factor_net;                   // trained on the full table, for export
    std::optional<Network> factor_class_net;
};

/// The full experiment: factor analysis on the class-free view, both network
/// variants trained with Rprop under one shared fold plan.
TopdnnReport run_topdnn(const Table& t_with_class, const TopdnnConfig& cfg);

struct ConvergenceComparison {
    int epochs_loading_init = 0;
    int epochs_random_init = 0;
    double loss_loading_init = 0.0;
    double loss_random_init = 0.0;
};

/// Epochs-to-convergence of the factor-only network under loading-based vs
/// random initialization (full-table training with a tol-based stop).
ConvergenceComparison compare_convergence(const Table& t_with_class, const TopdnnConfig& cfg,
                                          double tol);

}  // namespace debtlab
