#include "debtlab/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "debtlab/linreg.hpp"
#include "debtlab/rng.hpp"

namespace debtlab::cli {

namespace fs = std::filesystem;

std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for checksumming");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
    return hex;
}

namespace {

Table resolve_table(const CommonOptions& common) {
    if (common.data_csv) return load_csv(*common.data_csv, "udebt", std::string("class"));
    GeneratorConfig gc = common.generator;
    gc.n_rows = common.rows;
    gc.seed = common.seed;
    return generate(gc);
}

void write_manifest(const std::string& command, const CommonOptions& common,
                    const nlohmann::json& config, const std::vector<std::string>& artifacts) {
    nlohmann::json manifest;
    manifest["command"] = command;
    manifest["seed"] = common.seed;
    manifest["output_dir"] = common.out_dir;
    manifest["config"] = config;
    nlohmann::json sums = nlohmann::json::object();
    for (const std::string& name : artifacts)
        sums[name] = file_checksum((fs::path(common.out_dir) / name).string());
    manifest["artifacts"] = std::move(sums);

    std::ofstream out(fs::path(common.out_dir) / "manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest.json");
    out << manifest.dump(2) << '\n';
}

nlohmann::json common_json(const CommonOptions& c) {
    return {{"rows", c.rows},
            {"seed", c.seed},
            {"out", c.out_dir},
            {"threads", c.threads},
            {"data", c.data_csv ? *c.data_csv : ""},
            {"noise_sd", c.generator.noise_sd},
            {"nonlinearity_gain", c.generator.nonlinearity_gain},
            {"class_gain", c.generator.class_gain}};
}

}  // namespace

int cmd_gen(const GenOptions& opts) {
    fs::create_directories(opts.common.out_dir);
    const Table transformed = resolve_table(opts.common);

    std::vector<std::string> artifacts;
    const Rng root(opts.common.seed);
    for (DatasetVariant v :
         {DatasetVariant::A, DatasetVariant::B, DatasetVariant::C, DatasetVariant::D}) {
        const Table data = make_variant(transformed, v, root.substream("expand").root_seed());
        const std::string name = std::string("variant_") + variant_tag(v) + ".csv";
        write_csv(data, (fs::path(opts.common.out_dir) / name).string());
        artifacts.push_back(name);
    }

    write_manifest("gen", opts.common, common_json(opts.common), artifacts);
    std::cout << "wrote " << artifacts.size() << " dataset variants to " << opts.common.out_dir
              << '\n';
    return 0;
}

int cmd_compare(const CompareOptions& opts) {
    fs::create_directories(opts.common.out_dir);
    const Table transformed = resolve_table(opts.common);

    CompareConfig cc;
    cc.seed = opts.common.seed;
    cc.n_folds = opts.folds;
    cc.families = opts.families;
    cc.hidden_sizes = opts.hidden_sizes;
    cc.threads = opts.common.threads;
    cc.forest.n_trees = opts.trees;

    cc.rprop.max_epochs = opts.nn_epochs;
    cc.rprop.restarts = opts.nn_restarts;
    cc.backprop.max_epochs = opts.nn_epochs;
    cc.backprop.restarts = opts.nn_restarts;
    const double n_train = static_cast<double>(transformed.n_rows()) *
                           (static_cast<double>(opts.folds - 1) / opts.folds);
    cc.backprop.learning_rate = opts.backprop_lr / n_train;

    const Comparison comparison = compare_models(transformed, cc);

    write_comparison_csv(comparison, (fs::path(opts.common.out_dir) / "comparison.csv").string());
    const std::string text = comparison_text(comparison);
    {
        std::ofstream out(fs::path(opts.common.out_dir) / "comparison.txt", std::ios::binary);
        out << text;
    }

    nlohmann::json config = common_json(opts.common);
    config["folds"] = opts.folds;
    config["families"] = opts.families;
    config["hidden_sizes"] = opts.hidden_sizes;
    config["trees"] = opts.trees;
    config["nn_epochs"] = opts.nn_epochs;
    config["nn_restarts"] = opts.nn_restarts;
    config["plan_hash"] = comparison.plan_hash;
    write_manifest("compare", opts.common, config, {"comparison.csv", "comparison.txt"});

    std::cout << text;
    return 0;
}

int cmd_topdnn(const TopdnnOptions& opts) {
    fs::create_directories(opts.common.out_dir);
    const Table transformed = resolve_table(opts.common);

    TopdnnConfig tc;
    tc.seed = opts.common.seed;
    tc.n_folds = opts.folds;
    tc.threads = opts.common.threads;
    tc.plan.include_class_layer = opts.class_layer;
    tc.plan.loading_init = opts.loading_init;
    tc.feed_class_inputs = opts.feed_class_inputs;
    tc.train.max_epochs = opts.nn_epochs;
    tc.train.restarts = opts.nn_restarts;

    const TopdnnReport report = run_topdnn(transformed, tc);

    std::cout << "factor analysis: parallel analysis retains " << report.plan.n_factors
              << " factor(s); scree suggests " << report.plan.scree_suggested
              << (report.plan.scree_agrees ? " (methods agree)" : " (parallel analysis wins)")
              << '\n';
    std::cout << "eigenvalues:";
    for (const auto& [i, v] : report.scree.series) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), " %.3f", v);
        std::cout << buf;
    }
    std::cout << "\nparallel-analysis thresholds:";
    for (double v : report.pa.thresholds) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), " %.3f", v);
        std::cout << buf;
    }
    std::cout << '\n';

    std::vector<std::string> artifacts = {"scree.csv", "loadings.csv", "topdnn_report.csv",
                                          "topdnn_factor.json"};
    write_scree_csv(report.scree, (fs::path(opts.common.out_dir) / "scree.csv").string());
    write_loadings_csv(report.fa, (fs::path(opts.common.out_dir) / "loadings.csv").string());
    {
        std::ofstream out(fs::path(opts.common.out_dir) / "topdnn_factor.json",
                          std::ios::binary);
        out << network_structure_json(report.factor_net, report.fa.variable_names) << '\n';
    }
    if (report.factor_class_net) {
        std::ofstream out(fs::path(opts.common.out_dir) / "topdnn_factor_class.json",
                          std::ios::binary);
        out << network_structure_json(*report.factor_class_net, report.fa.variable_names) << '\n';
        artifacts.push_back("topdnn_factor_class.json");
    }

    auto layer_list = [&report](bool with_class) {
        std::string s = "[" + std::to_string(report.plan.n_factors);
        if (with_class) s += " " + std::to_string(report.plan.n_classes);
        return s + "]";
    };
    {
        std::ofstream out(fs::path(opts.common.out_dir) / "topdnn_report.csv", std::ios::binary);
        out << "network,hidden_layers,rmse,r2,r2_sse\n";
        out << "factor," << layer_list(false) << ','
            << format_double(report.factor_only.rmse_mean) << ','
            << format_double(report.factor_only.r2_mean) << ','
            << format_double(report.factor_only.r2_sse_mean) << '\n';
        if (report.factor_class)
            out << "factor+class," << layer_list(true) << ','
                << format_double(report.factor_class->rmse_mean) << ','
                << format_double(report.factor_class->r2_mean) << ','
                << format_double(report.factor_class->r2_sse_mean) << '\n';
    }

    char line[160];
    std::snprintf(line, sizeof(line), "factor net %s: RMSE %.4f  R2 %.4f",
                  ("[" + std::to_string(report.plan.n_factors) + "]").c_str(),
                  report.factor_only.rmse_mean, report.factor_only.r2_mean);
    std::cout << line << '\n';
    if (report.factor_class) {
        std::snprintf(line, sizeof(line), "factor+class net [%zu,%zu]: RMSE %.4f  R2 %.4f",
                      report.plan.n_factors, report.plan.n_classes,
                      report.factor_class->rmse_mean, report.factor_class->r2_mean);
        std::cout << line << '\n';
    }

    nlohmann::json config = common_json(opts.common);
    config["folds"] = opts.folds;
    config["class_layer"] = opts.class_layer;
    config["loading_init"] = opts.loading_init;
    config["nn_epochs"] = opts.nn_epochs;
    config["n_factors"] = report.plan.n_factors;
    config["n_classes"] = report.plan.n_classes;
    if (opts.loading_init) {
        const ConvergenceComparison conv = compare_convergence(transformed, tc, 1e-6);
        config["epochs_to_convergence"] = {{"loading_init", conv.epochs_loading_init},
                                           {"random_init", conv.epochs_random_init},
                                           {"loss_loading_init", conv.loss_loading_init},
                                           {"loss_random_init", conv.loss_random_init}};
        std::cout << "epochs to convergence: loading init " << conv.epochs_loading_init
                  << ", random init " << conv.epochs_random_init << '\n';
    }
    write_manifest("topdnn", opts.common, config, artifacts);
    return 0;
}

int cmd_diagnose(const DiagnoseOptions& opts) {
    fs::create_directories(opts.common.out_dir);
    const Table transformed = resolve_table(opts.common);
    const Table data = make_variant(transformed, variant_from_string(opts.variant),
                                    Rng(opts.common.seed).substream("expand").root_seed());

    OlsOptions oo;
    if (opts.response_transform == "log")
        oo.transform = ResponseTransform::Log;
    else if (opts.response_transform != "none")
        throw std::invalid_argument("unknown response transform '" + opts.response_transform +
                                    "' (expected none or log)");

    const LinearModel model = fit_ols(data, oo);

    // Validate the predictor before writing anything, listing alternatives.
    bool known = false;
    for (const auto& name : model.predictor_names) known = known || name == opts.partial_predictor;
    if (!known) {
        std::string available;
        for (const auto& name : model.predictor_names)
            available += (available.empty() ? "" : ", ") + name;
        throw std::invalid_argument("unknown predictor '" + opts.partial_predictor +
                                    "'; available: " + available);
    }

    const Diagnostics diag = diagnostics(model);
    write_diagnostics_csv(diag, opts.common.out_dir);
    const auto pr = partial_residuals(model, data, opts.partial_predictor);
    const std::string partial_name = "partial_" + opts.partial_predictor + ".csv";
    write_partial_csv(pr, (fs::path(opts.common.out_dir) / partial_name).string());

    std::cout << "fit on variant " << opts.variant << ": training R2 " << model.r_squared
              << ", heteroscedasticity " << (diag.heteroscedastic ? "flagged" : "not flagged")
              << " (score " << diag.bp_r2 << ")\n";

    nlohmann::json config = common_json(opts.common);
    config["variant"] = opts.variant;
    config["partial"] = opts.partial_predictor;
    config["response_transform"] = opts.response_transform;
    write_manifest("diagnose", opts.common, config,
                   {"residuals.csv", "qq.csv", partial_name});
    return 0;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");

    std::map<std::string, std::string> out;
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        nlohmann::json j;
        in >> j;
        for (const auto& [key, value] : j.items()) {
            if (value.is_string())
                out[key] = value.get<std::string>();
            else
                out[key] = value.dump();
        }
        return out;
    }

    // flat TOML subset: key = value lines, # comments, optional quotes
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        if (!key.empty()) out[key] = value;
    }
    return out;
}

}  // namespace debtlab::cli
