#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "debtlab/linalg.hpp"
#include "debtlab/table.hpp"

namespace debtlab {

enum class Activation { Sigmoid, Tanh };

struct Topology {
    std::size_t input_size = 0;
    std::vector<std::size_t> hidden_sizes;
    std::size_t output_size = 1;

    std::size_t param_count() const;
};

struct Layer {
    Matrix weights;              // fan_in x fan_out
    std::vector<double> biases;  // fan_out
};

/// Feed-forward MLP: sigmoid (or tanh) hidden layers, identity output.
/// hidden_sizes may be empty, which degenerates to a linear model; the
/// planners and sweeps only ever build nets with at least one hidden layer.
struct Network {
    Topology topology;
    std::vector<Layer> layers;
    Activation hidden_activation = Activation::Sigmoid;

    static Network make(const Topology& topo, std::uint64_t seed, double init_scale = 0.5,
                        Activation act = Activation::Sigmoid);

    double forward(const std::vector<double>& x) const;

    /// Predicts every row of the table. The class column, when present, must
    /// already be expanded to indicator columns.
    std::vector<double> predict(const Table& t) const;

    std::vector<double> params() const;
    void set_params(const std::vector<double>& p);
};

/// Half the sum of squared errors over the table (full batch).
double sse_loss(const Network& net, const Table& t);

/// Exact full-batch gradient of 1/2 * SSE with respect to every weight and
/// bias, in Network::params() order.
std::vector<double> gradient(const Network& net, const Table& t);

struct TrainConfig {
    int max_epochs = 1000;
    /// Stop when the full-batch loss improvement drops below tol. Negative
    /// infinity (the default) disables early stopping.
    double tol = -std::numeric_limits<double>::infinity();
    double learning_rate = 0.01;  // backprop only
    std::uint64_t seed = 0;
    double init_scale = 0.5;
    int restarts = 1;  // independent random initializations; best final loss wins
};

struct RpropConfig {
    double eta_plus = 1.2;
    double eta_minus = 0.5;
    double delta0 = 0.1;
    double delta_max = 50.0;
    double delta_min = 1e-6;
};

struct OptimResult {
    std::vector<double> loss_trace;  // loss before each update, then the final loss
    int epochs = 0;                  // number of parameter updates applied
    bool stopped_early = false;
    double delta_low = 0.0;   // step-size extrema observed across all epochs (rprop)
    double delta_high = 0.0;
};

/// Objective fills grad (same length as params) and returns the loss.
using Objective = std::function<double(const std::vector<double>& params, std::vector<double>& grad)>;

/// Full-batch gradient descent: w <- w - lr * grad. Throws on non-finite loss.
OptimResult gradient_descent(std::vector<double>& params, const Objective& obj, int max_epochs,
                             double tol, double learning_rate);

/// Resilient backpropagation on the gradient sign. Same sign as the previous
/// epoch grows the per-parameter step by eta_plus; a sign flip shrinks it by
/// eta_minus, skips the update and clears the remembered sign.
OptimResult rprop(std::vector<double>& params, const Objective& obj, int max_epochs, double tol,
                  const RpropConfig& rc = {});

struct TrainResult {
    Network net;
    OptimResult optim;
};

TrainResult train_backprop(Network net, const Table& t, const TrainConfig& cfg);
TrainResult train_rprop(Network net, const Table& t, const TrainConfig& cfg,
                        const RpropConfig& rc = {});

void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);
std::string network_json(const Network& net);

/// Layer/edge listing with weight magnitudes, for external diagram plotting.
std::string network_structure_json(const Network& net, const std::vector<std::string>& input_names);

}  // namespace debtlab
