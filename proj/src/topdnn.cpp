#include "debtlab/topdnn.hpp"

#include <stdexcept>

#include "debtlab/generator.hpp"
#include "debtlab/rng.hpp"

namespace debtlab {

namespace {

TopologyPlan plan_from_analysis(const ParallelAnalysisResult& pa, const ScreeData& scree,
                                const Table& t, const PlanConfig& cfg) {
    if (pa.n_factors == 0)
        throw std::runtime_error(
            "plan_topology: parallel analysis found no factor structure; "
            "fall back to a plain hidden-size sweep");

    TopologyPlan plan;
    plan.include_class_layer = cfg.include_class_layer;
    plan.loading_init = cfg.loading_init;
    plan.n_factors = pa.n_factors;
    plan.scree_suggested = scree.suggested;
    plan.scree_agrees = scree.suggested == pa.n_factors;

    if (cfg.include_class_layer) {
        if (!t.class_col)
            throw std::runtime_error(
                "plan_topology: class layer requested but table has no class column");
        plan.n_classes = class_labels(t).size();
        if (plan.n_classes < 2)
            throw std::runtime_error("plan_topology: class layer needs at least 2 distinct labels");
    }
    return plan;
}

}  // namespace

TopologyPlan plan_topology(const Table& t, const PlanConfig& cfg, std::uint64_t seed) {
    if (t.predictor_cols().empty())
        throw std::runtime_error("plan_topology: table has no predictors");

    const Table view = t.class_col ? drop_class_column(t) : t;
    const ParallelAnalysisResult pa = parallel_analysis(view, cfg.n_sims, cfg.quantile, seed);
    const ScreeData scree = scree_data(pa.observed, cfg.drop_threshold);
    return plan_from_analysis(pa, scree, t, cfg);
}

Network build_network(const TopologyPlan& plan, std::size_t input_size, const FactorModel& fa,
                      std::uint64_t seed, double init_scale) {
    if (plan.n_factors < 1) throw std::invalid_argument("build_network: plan has no factor layer");

    Topology topo;
    topo.input_size = input_size;
    topo.hidden_sizes = {plan.n_factors};
    if (plan.include_class_layer) topo.hidden_sizes.push_back(plan.n_classes);
    topo.output_size = 1;

    Network net = Network::make(topo, seed, init_scale);
    if (plan.loading_init) {
        if (fa.loadings.rows() != input_size || fa.loadings.cols() != plan.n_factors)
            throw std::runtime_error("build_network: loading matrix shape does not match the input");
        for (std::size_t i = 0; i < input_size; ++i)
            for (std::size_t j = 0; j < plan.n_factors; ++j)
                net.layers[0].weights(i, j) = fa.loadings(i, j) * init_scale;
    }
    return net;
}

namespace {

struct Prepared {
    Table train_view;  // what the networks actually train on
    TopologyPlan plan;
    FactorModel fa;
    ScreeData scree;
    ParallelAnalysisResult pa;
};

Prepared prepare(const Table& t_with_class, const TopdnnConfig& cfg) {
    if (!t_with_class.class_col)
        throw std::runtime_error("run_topdnn: table must carry class labels");

    Prepared p;
    const Table b_view = drop_class_column(t_with_class);
    const CorrelationEigen eig = correlation_eigen(b_view);
    p.pa = parallel_analysis(b_view, cfg.plan.n_sims, cfg.plan.quantile, cfg.seed, cfg.threads);
    p.scree = scree_data(eig.eigenvalues, cfg.plan.drop_threshold);
    p.plan = plan_from_analysis(p.pa, p.scree, t_with_class, cfg.plan);
    p.fa = extract_loadings(eig, p.plan.n_factors);

    // Class labels stay out of the inputs unless explicitly requested; the
    // class information enters through the layer sizing only.
    p.train_view = cfg.feed_class_inputs ? t_with_class : b_view;
    return p;
}

CvReport run_variant(const Prepared& p, const TopdnnConfig& cfg, const FoldPlan& plan,
                     bool with_class_layer, const std::string& tag) {
    TopologyPlan variant_plan = p.plan;
    variant_plan.include_class_layer = with_class_layer;
    variant_plan.loading_init = cfg.plan.loading_init;

    const FactorModel& fa = p.fa;
    NetworkBuilder builder = [variant_plan, fa](const Table& train_scaled, std::uint64_t seed) {
        return build_network(variant_plan, train_scaled.predictor_cols().size(), fa, seed);
    };
    TrainFn trainer = custom_network_trainer(builder, TrainerKind::Rprop, cfg.train);
    return cross_validate(trainer, p.train_view, plan, tag, "B", cfg.threads, cfg.seed);
}

Network train_full(const Prepared& p, const TopdnnConfig& cfg, bool with_class_layer) {
    TopologyPlan variant_plan = p.plan;
    variant_plan.include_class_layer = with_class_layer;
    variant_plan.loading_init = cfg.plan.loading_init;

    Table encoded = p.train_view;
    if (encoded.class_col) encoded = expand_class_indicators(encoded, class_labels(encoded));
    const ColumnScaler scaler = ColumnScaler::fit(encoded);
    const Table scaled = scaler.apply(encoded);

    Network net = build_network(variant_plan, scaled.predictor_cols().size(), p.fa,
                                Rng(cfg.seed).substream("full-fit").root_seed());
    return train_rprop(std::move(net), scaled, cfg.train).net;
}

}  // namespace

TopdnnReport run_topdnn(const Table& t_with_class, const TopdnnConfig& cfg) {
    Prepared p = prepare(t_with_class, cfg);

    TopdnnReport report;
    report.plan = p.plan;
    report.fa = p.fa;
    report.scree = p.scree;
    report.pa = p.pa;

    const FoldPlan plan = FoldPlan::make(p.train_view.n_rows(), cfg.n_folds, cfg.seed);
    report.factor_only = run_variant(p, cfg, plan, false, "topdnn_factor");
    report.factor_net = train_full(p, cfg, false);
    if (cfg.plan.include_class_layer) {
        report.factor_class = run_variant(p, cfg, plan, true, "topdnn_factor_class");
        report.factor_class_net = train_full(p, cfg, true);
    }
    return report;
}

ConvergenceComparison compare_convergence(const Table& t_with_class, const TopdnnConfig& cfg,
                                          double tol) {
    Prepared p = prepare(t_with_class, cfg);

    Table encoded = p.train_view;
    if (encoded.class_col) encoded = expand_class_indicators(encoded, class_labels(encoded));
    const ColumnScaler scaler = ColumnScaler::fit(encoded);
    const Table scaled = scaler.apply(encoded);
    const std::size_t input_size = scaled.predictor_cols().size();
    const std::uint64_t seed = Rng(cfg.seed).substream("convergence").root_seed();

    TrainConfig tc = cfg.train;
    tc.tol = tol;
    tc.restarts = 1;

    ConvergenceComparison out;
    TopologyPlan variant_plan = p.plan;
    variant_plan.include_class_layer = false;

    variant_plan.loading_init = true;
    TrainResult with_loadings =
        train_rprop(build_network(variant_plan, input_size, p.fa, seed), scaled, tc);
    out.epochs_loading_init = with_loadings.optim.epochs;
    out.loss_loading_init = with_loadings.optim.loss_trace.back();

    variant_plan.loading_init = false;
    TrainResult random_start =
        train_rprop(build_network(variant_plan, input_size, p.fa, seed), scaled, tc);
    out.epochs_random_init = random_start.optim.epochs;
    out.loss_random_init = random_start.optim.loss_trace.back();
    return out;
}

}  // namespace debtlab
