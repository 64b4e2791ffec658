#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "debtlab/evalcv.hpp"
#include "debtlab/generator.hpp"
#include "debtlab/topdnn.hpp"

namespace debtlab::cli {

/// Shared run options; every command snapshots the merged configuration into
/// a manifest.json that is sufficient to reproduce the run.
struct CommonOptions {
    std::size_t rows = 10000;
    std::uint64_t seed = 0;
    std::string out_dir = "runs/latest";
    int threads = 1;
    std::optional<std::string> data_csv;  // use this transformed table instead of generating
    GeneratorConfig generator;            // rows/seed copied in before use
};

struct GenOptions {
    CommonOptions common;
};

struct CompareOptions {
    CommonOptions common;
    std::size_t folds = 10;
    std::vector<std::string> families = {"linreg", "forest", "nn_backprop", "nn_rprop"};
    std::vector<int> hidden_sizes = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::size_t trees = 500;
    int nn_epochs = 300;
    int nn_restarts = 2;
    double backprop_lr = 1.0;  // scaled by 1/n_train internally
};

struct TopdnnOptions {
    CommonOptions common;
    std::size_t folds = 10;
    bool class_layer = true;
    bool loading_init = false;
    bool feed_class_inputs = false;
    int nn_epochs = 400;
    int nn_restarts = 2;
};

struct DiagnoseOptions {
    CommonOptions common;
    std::string variant = "D";
    std::string partial_predictor = "housingfactor";
    std::string response_transform = "none";  // none | log
};

int cmd_gen(const GenOptions& opts);
int cmd_compare(const CompareOptions& opts);
int cmd_topdnn(const TopdnnOptions& opts);
int cmd_diagnose(const DiagnoseOptions& opts);

/// FNV-1a checksum of a file's bytes as 16 hex digits.
std::string file_checksum(const std::string& path);

/// Loads a JSON or flat key = value TOML config file into string options.
std::map<std::string, std::string> load_config_file(const std::string& path);

}  // namespace debtlab::cli
