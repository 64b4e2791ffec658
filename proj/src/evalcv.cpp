#include "debtlab/evalcv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "debtlab/linreg.hpp"
#include "debtlab/parallel.hpp"
#include "debtlab/rng.hpp"

namespace debtlab {

double rmse(const std::vector<double>& observed, const std::vector<double>& predicted) {
    if (observed.empty()) throw std::invalid_argument("rmse: empty vectors");
    if (observed.size() != predicted.size())
        throw std::invalid_argument("rmse: length mismatch");
    double sse = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = observed[i] - predicted[i];
        sse += e * e;
    }
    return std::sqrt(sse / static_cast<double>(observed.size()));
}

double r_squared(const std::vector<double>& observed, const std::vector<double>& predicted) {
    if (observed.size() != predicted.size())
        throw std::invalid_argument("r_squared: length mismatch");
    if (observed.size() < 2) throw std::invalid_argument("r_squared: need at least 2 values");
    const double mo = mean(observed);
    const double mp = mean(predicted);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    bool pred_constant = true;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double dx = observed[i] - mo;
        const double dy = predicted[i] - mp;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
        pred_constant = pred_constant && predicted[i] == predicted[0];
    }
    if (sxx == 0.0) throw std::invalid_argument("r_squared: observed values have zero variance");
    if (syy == 0.0 || pred_constant) return 0.0;
    const double r2 = (sxy * sxy) / (sxx * syy);
    return std::clamp(r2, 0.0, 1.0);
}

double r_squared_sse(const std::vector<double>& observed, const std::vector<double>& predicted) {
    if (observed.size() != predicted.size())
        throw std::invalid_argument("r_squared_sse: length mismatch");
    if (observed.size() < 2) throw std::invalid_argument("r_squared_sse: need at least 2 values");
    const double mo = mean(observed);
    double sse = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        sse += (observed[i] - predicted[i]) * (observed[i] - predicted[i]);
        sst += (observed[i] - mo) * (observed[i] - mo);
    }
    if (sst == 0.0) throw std::invalid_argument("r_squared_sse: observed values have zero variance");
    return 1.0 - sse / sst;
}

FoldPlan FoldPlan::make(std::size_t n_rows, std::size_t n_folds, std::uint64_t seed) {
    if (n_folds < 2) throw std::invalid_argument("fold plan: need at least 2 folds");
    if (n_rows < 2 * n_folds)
        throw std::invalid_argument("fold plan: every fold needs at least 2 rows");
    FoldPlan plan;
    plan.n_folds = n_folds;
    plan.seed = seed;
    std::vector<std::size_t> order(n_rows);
    std::iota(order.begin(), order.end(), 0);
    Rng rng = Rng(seed).substream("folds");
    rng.shuffle(order);
    plan.assignments.resize(n_rows);
    for (std::size_t rank = 0; rank < n_rows; ++rank)
        plan.assignments[order[rank]] = rank % n_folds;
    return plan;
}

std::uint64_t FoldPlan::hash() const {
    return fnv1a64(assignments.data(), assignments.size() * sizeof(std::size_t));
}

std::vector<std::size_t> FoldPlan::test_rows(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < assignments.size(); ++r)
        if (assignments[r] == fold) out.push_back(r);
    return out;
}

std::vector<std::size_t> FoldPlan::train_rows(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < assignments.size(); ++r)
        if (assignments[r] != fold) out.push_back(r);
    return out;
}

CvReport cross_validate(const TrainFn& train, const Table& t, const FoldPlan& plan,
                        const std::string& model_tag, const std::string& dataset_tag,
                        int threads, std::uint64_t seed) {
    if (plan.assignments.size() != t.n_rows())
        throw std::invalid_argument("cross_validate: fold plan does not cover the table");

    CvReport report;
    report.model_tag = model_tag;
    report.dataset_tag = dataset_tag;
    report.n_folds = plan.n_folds;
    report.plan_hash = plan.hash();
    report.per_fold.resize(plan.n_folds);

    const Rng root = Rng(seed).substream("cv").substream(model_tag);
    parallel_for(plan.n_folds, threads, [&](std::size_t fold) {
        try {
            const Table train_t = subset_rows(t, plan.train_rows(fold));
            const Table test_t = subset_rows(t, plan.test_rows(fold));
            PredictFn model = train(train_t, root.substream(fold).root_seed());
            FoldScore score;
            score.observed = test_t.response();
            score.predicted = model(test_t);
            score.rmse = rmse(score.observed, score.predicted);
            score.r2 = r_squared(score.observed, score.predicted);
            score.r2_sse = r_squared_sse(score.observed, score.predicted);
            report.per_fold[fold] = std::move(score);
        } catch (const std::exception& e) {
            throw std::runtime_error("fold " + std::to_string(fold) + ": " + e.what());
        }
    });

    for (const FoldScore& f : report.per_fold) {
        report.rmse_mean += f.rmse;
        report.r2_mean += f.r2;
        report.r2_sse_mean += f.r2_sse;
    }
    report.rmse_mean /= static_cast<double>(plan.n_folds);
    report.r2_mean /= static_cast<double>(plan.n_folds);
    report.r2_sse_mean /= static_cast<double>(plan.n_folds);
    return report;
}

TrainFn linreg_trainer() {
    return [](const Table& train, std::uint64_t) -> PredictFn {
        auto model = std::make_shared<LinearModel>(fit_ols(train));
        return [model](const Table& t) { return predict(*model, t); };
    };
}

TrainFn forest_trainer(ForestConfig cfg) {
    return [cfg](const Table& train, std::uint64_t fold_seed) -> PredictFn {
        ForestConfig fc = cfg;
        fc.seed = fold_seed;
        std::vector<double> labels;
        Table encoded = train;
        if (train.class_col) {
            labels = class_labels(train);
            encoded = expand_class_indicators(train, labels);
        }
        auto forest = std::make_shared<Forest>(fit_forest(encoded, fc));
        return [forest, labels](const Table& t) {
            const Table enc = t.class_col ? expand_class_indicators(t, labels) : t;
            return predict_forest(*forest, enc);
        };
    };
}

namespace {

struct NetPipeline {
    std::vector<double> labels;
    ColumnScaler scaler;
    Network net;
};

TrainFn network_trainer_impl(NetworkBuilder builder, TrainerKind kind, TrainConfig cfg) {
    return [builder, kind, cfg](const Table& train, std::uint64_t fold_seed) -> PredictFn {
        TrainConfig fold_cfg = cfg;
        fold_cfg.seed = fold_seed;

        auto pipe = std::make_shared<NetPipeline>();
        Table encoded = train;
        if (train.class_col) {
            pipe->labels = class_labels(train);
            encoded = expand_class_indicators(train, pipe->labels);
        }
        pipe->scaler = ColumnScaler::fit(encoded);
        const Table scaled = pipe->scaler.apply(encoded);

        Network net = builder(scaled, fold_seed);
        TrainResult result = kind == TrainerKind::Rprop
                                 ? train_rprop(std::move(net), scaled, fold_cfg)
                                 : train_backprop(std::move(net), scaled, fold_cfg);
        pipe->net = std::move(result.net);

        return [pipe](const Table& t) {
            const Table enc =
                t.class_col ? expand_class_indicators(t, pipe->labels) : t;
            return pipe->net.predict(pipe->scaler.apply(enc));
        };
    };
}

}  // namespace

TrainFn network_trainer(std::vector<std::size_t> hidden_sizes, TrainerKind kind, TrainConfig cfg) {
    const double init_scale = cfg.init_scale;
    NetworkBuilder builder = [hidden_sizes, init_scale](const Table& train_scaled,
                                                        std::uint64_t seed) {
        Topology topo;
        topo.input_size = train_scaled.predictor_cols().size();
        topo.hidden_sizes = hidden_sizes;
        topo.output_size = 1;
        return Network::make(topo, seed, init_scale);
    };
    return network_trainer_impl(std::move(builder), kind, cfg);
}

TrainFn custom_network_trainer(NetworkBuilder builder, TrainerKind kind, TrainConfig cfg) {
    return network_trainer_impl(std::move(builder), kind, cfg);
}

CvReport sweep_hidden_sizes(const Table& t, const SweepConfig& cfg, const FoldPlan& plan,
                            const std::string& model_tag, const std::string& dataset_tag) {
    if (cfg.sizes.empty()) throw std::invalid_argument("sweep_hidden_sizes: empty size list");
    for (int s : cfg.sizes)
        if (s < 1) throw std::invalid_argument("sweep_hidden_sizes: sizes must be >= 1");

    std::vector<CvReport> reports(cfg.sizes.size());
    parallel_for(cfg.sizes.size(), cfg.threads, [&](std::size_t i) {
        const int size = cfg.sizes[i];
        TrainFn trainer =
            network_trainer({static_cast<std::size_t>(size)}, cfg.kind, cfg.train);
        reports[i] = cross_validate(trainer, t, plan,
                                    model_tag + "(h=" + std::to_string(size) + ")", dataset_tag,
                                    /*threads=*/1,
                                    cfg.train.seed + static_cast<std::uint64_t>(size) * 0x9E37ULL);
        reports[i].selected_hidden = size;
    });

    // Minimum RMSE wins; anything within tie_epsilon of the minimum counts as
    // a tie and the smallest size takes it.
    double best_rmse = reports[0].rmse_mean;
    for (const CvReport& r : reports) best_rmse = std::min(best_rmse, r.rmse_mean);
    std::size_t winner = 0;
    int winner_size = std::numeric_limits<int>::max();
    for (std::size_t i = 0; i < reports.size(); ++i) {
        if (reports[i].rmse_mean <= best_rmse + cfg.tie_epsilon && cfg.sizes[i] < winner_size) {
            winner = i;
            winner_size = cfg.sizes[i];
        }
    }
    CvReport out = reports[winner];
    out.model_tag = model_tag;
    return out;
}

Comparison compare_models(const Table& transformed_with_class, const CompareConfig& cfg) {
    if (!transformed_with_class.class_col)
        throw std::invalid_argument("compare_models: table must carry class labels");

    const FoldPlan plan =
        FoldPlan::make(transformed_with_class.n_rows(), cfg.n_folds, cfg.seed);

    Comparison out;
    out.plan_hash = plan.hash();
    out.n_folds = cfg.n_folds;

    const DatasetVariant variants[] = {DatasetVariant::A, DatasetVariant::B, DatasetVariant::C,
                                       DatasetVariant::D};
    const Rng root(cfg.seed);

    for (const std::string& family : cfg.families) {
        for (DatasetVariant v : variants) {
            const std::string tag(1, variant_tag(v));
            CompareRow row;
            row.family = family;
            row.dataset = tag;
            try {
                const Table data = make_variant(transformed_with_class, v,
                                                root.substream("expand").root_seed(), cfg.expand);
                const std::uint64_t cell_seed =
                    root.substream(family).substream(tag).root_seed();
                CvReport report;
                if (family == "linreg") {
                    report = cross_validate(linreg_trainer(), data, plan, family, tag,
                                            cfg.threads, cell_seed);
                } else if (family == "forest") {
                    ForestConfig fc = cfg.forest;
                    fc.threads = 1;
                    report = cross_validate(forest_trainer(fc), data, plan, family, tag,
                                            cfg.threads, cell_seed);
                } else if (family == "nn_backprop" || family == "nn_rprop") {
                    SweepConfig sc;
                    sc.sizes = cfg.hidden_sizes;
                    sc.kind = family == "nn_rprop" ? TrainerKind::Rprop : TrainerKind::Backprop;
                    sc.train = family == "nn_rprop" ? cfg.rprop : cfg.backprop;
                    sc.train.seed = cell_seed;
                    sc.tie_epsilon = cfg.sweep_tie_epsilon;
                    sc.threads = cfg.threads;
                    report = sweep_hidden_sizes(data, sc, plan, family, tag);
                } else {
                    throw std::invalid_argument("unknown model family '" + family + "'");
                }
                row.rmse = report.rmse_mean;
                row.r2 = report.r2_mean;
                row.r2_sse = report.r2_sse_mean;
                row.hidden = report.selected_hidden;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

namespace {

std::string family_title(const std::string& family) {
    if (family == "linreg") return "Linear Regression";
    if (family == "forest") return "Random Forests";
    if (family == "nn_backprop") return "Neural Networks Backpropagation";
    if (family == "nn_rprop") return "Neural Networks Resilient Backpropagation";
    return family;
}

}  // namespace

std::string comparison_text(const Comparison& c) {
    std::ostringstream os;
    os << std::left << std::setw(12) << "Dataset" << std::right << std::setw(10) << "RMSE"
       << std::setw(12) << "Rsquared" << '\n';
    std::string current_family;
    for (const CompareRow& row : c.rows) {
        if (row.family != current_family) {
            current_family = row.family;
            os << family_title(row.family) << '\n';
        }
        std::string label = row.dataset;
        if (row.hidden) label += " (" + std::to_string(*row.hidden) + " Neurons)";
        os << std::left << std::setw(12) << label;
        if (row.error.empty()) {
            os << std::right << std::fixed << std::setprecision(4) << std::setw(10) << row.rmse
               << std::setw(12) << row.r2 << '\n';
            os.unsetf(std::ios::fixed);
        } else {
            os << std::right << std::setw(10) << "error" << "  " << row.error << '\n';
        }
    }
    return os.str();
}

void write_comparison_csv(const Comparison& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "model,dataset,rmse,r2,r2_sse,hidden,n_folds,plan_hash,error\n";
    for (const CompareRow& row : c.rows) {
        out << row.family << ',' << row.dataset << ',';
        if (row.error.empty())
            out << format_double(row.rmse) << ',' << format_double(row.r2) << ','
                << format_double(row.r2_sse);
        else
            out << ",,";
        out << ',';
        if (row.hidden) out << *row.hidden;
        out << ',' << c.n_folds << ',' << c.plan_hash << ',';
        std::string msg = row.error;
        std::replace(msg.begin(), msg.end(), ',', ';');
        out << msg << '\n';
    }
}

}  // namespace debtlab
