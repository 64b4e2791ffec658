#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "debtlab/cli.hpp"

namespace {

using debtlab::cli::CommonOptions;

// flags > config file > defaults: config values apply only where the flag
// was not given on the command line.
void apply_config_file(CLI::App& app, const std::string& path) {
    const auto values = debtlab::cli::load_config_file(path);
    for (const auto& [key, value] : values) {
        CLI::Option* opt = app.get_option_no_throw("--" + key);
        if (opt == nullptr || opt->count() > 0) continue;
        opt->add_result(value);
        opt->run_callback();
    }
}

void add_common_flags(CLI::App* cmd, CommonOptions& common, std::string& config_path) {
    cmd->add_option("--rows", common.rows, "rows to generate")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", common.seed, "root seed for every substream");
    cmd->add_option("--out", common.out_dir, "output directory");
    cmd->add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--noise-sd", common.generator.noise_sd, "response noise SD")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--nonlinearity-gain", common.generator.nonlinearity_gain,
                    "strength of the nonlinear response terms")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--class-gain", common.generator.class_gain,
                    "strength of class-specific response structure")
        ->check(CLI::NonNegativeNumber);
    auto* data = cmd->add_option_function<std::string>(
        "--data", [&common](const std::string& path) { common.data_csv = path; },
        "transformed CSV (columns incl. class and udebt) to use instead of generating");
    data->check(CLI::ExistingFile);
    cmd->add_option("--config", config_path, "JSON or key=value config file")
        ->check(CLI::ExistingFile);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"debtlab: regression laboratory for consumer-indebtedness modelling"};
    app.require_subcommand(1);

    debtlab::cli::GenOptions gen;
    debtlab::cli::CompareOptions compare;
    debtlab::cli::TopdnnOptions topdnn;
    debtlab::cli::DiagnoseOptions diagnose;
    std::string gen_config, compare_config, topdnn_config, diagnose_config;

    CLI::App* gen_cmd = app.add_subcommand("gen", "generate dataset variants A-D as CSV");
    add_common_flags(gen_cmd, gen.common, gen_config);

    CLI::App* compare_cmd =
        app.add_subcommand("compare", "cross-validated model comparison over variants A-D");
    add_common_flags(compare_cmd, compare.common, compare_config);
    compare_cmd->add_option("--folds", compare.folds, "cross-validation folds")
        ->check(CLI::Range(2, 1000));
    compare_cmd->add_option("--models", compare.families,
                            "model families (linreg forest nn_backprop nn_rprop)");
    compare_cmd->add_option("--hidden-sizes", compare.hidden_sizes,
                            "hidden sizes swept for the network families");
    compare_cmd->add_option("--trees", compare.trees, "trees per forest")
        ->check(CLI::PositiveNumber);
    compare_cmd->add_option("--epochs", compare.nn_epochs, "training epochs per network")
        ->check(CLI::PositiveNumber);
    compare_cmd->add_option("--restarts", compare.nn_restarts, "random restarts per network")
        ->check(CLI::PositiveNumber);

    CLI::App* topdnn_cmd = app.add_subcommand(
        "topdnn", "factor analysis driven network topology experiment");
    add_common_flags(topdnn_cmd, topdnn.common, topdnn_config);
    topdnn_cmd->add_option("--folds", topdnn.folds, "cross-validation folds")
        ->check(CLI::Range(2, 1000));
    topdnn_cmd->add_flag("!--no-class-layer", topdnn.class_layer,
                         "skip the class-sized second hidden layer");
    topdnn_cmd->add_flag("--loading-init", topdnn.loading_init,
                         "initialize first-layer weights from the factor loadings");
    topdnn_cmd->add_flag("--class-inputs", topdnn.feed_class_inputs,
                         "also feed class indicators as network inputs");
    topdnn_cmd->add_option("--epochs", topdnn.nn_epochs, "training epochs per network")
        ->check(CLI::PositiveNumber);
    topdnn_cmd->add_option("--restarts", topdnn.nn_restarts, "random restarts per network")
        ->check(CLI::PositiveNumber);

    CLI::App* diagnose_cmd =
        app.add_subcommand("diagnose", "linear-model diagnostics as plot-ready CSV");
    add_common_flags(diagnose_cmd, diagnose.common, diagnose_config);
    diagnose_cmd->add_option("--variant", diagnose.variant, "dataset variant (A-D)");
    diagnose_cmd->add_option("--partial", diagnose.partial_predictor,
                             "predictor for the partial-residual series");
    diagnose_cmd->add_option("--response-transform", diagnose.response_transform,
                             "response transform before the fit (none | log)");

    try {
        app.parse(argc, argv);
        if (!gen_config.empty()) apply_config_file(*gen_cmd, gen_config);
        if (!compare_config.empty()) apply_config_file(*compare_cmd, compare_config);
        if (!topdnn_config.empty()) apply_config_file(*topdnn_cmd, topdnn_config);
        if (!diagnose_config.empty()) apply_config_file(*diagnose_cmd, diagnose_config);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (gen_cmd->parsed()) return debtlab::cli::cmd_gen(gen);
        if (compare_cmd->parsed()) return debtlab::cli::cmd_compare(compare);
        if (topdnn_cmd->parsed()) return debtlab::cli::cmd_topdnn(topdnn);
        if (diagnose_cmd->parsed()) return debtlab::cli::cmd_diagnose(diagnose);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
