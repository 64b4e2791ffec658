#include "debtlab/neural.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "debtlab/rng.hpp"

namespace debtlab {

namespace {

double activate(double z, Activation act) {
    return act == Activation::Sigmoid ? 1.0 / (1.0 + std::exp(-z)) : std::tanh(z);
}

// Derivative expressed through the activation value.
double activate_deriv(double a, Activation act) {
    return act == Activation::Sigmoid ? a * (1.0 - a) : 1.0 - a * a;
}

std::vector<std::size_t> layer_sizes(const Topology& topo) {
    std::vector<std::size_t> sizes;
    sizes.push_back(topo.input_size);
    for (std::size_t h : topo.hidden_sizes) sizes.push_back(h);
    sizes.push_back(topo.output_size);
    return sizes;
}

void check_topology(const Topology& topo) {
    if (topo.input_size < 1 || topo.output_size < 1)
        throw std::invalid_argument("topology: layer sizes must be >= 1");
    for (std::size_t h : topo.hidden_sizes)
        if (h < 1) throw std::invalid_argument("topology: hidden sizes must be >= 1");
}

}  // namespace

std::size_t Topology::param_count() const {
    const auto sizes = layer_sizes(*this);
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) n += sizes[l] * sizes[l + 1] + sizes[l + 1];
    return n;
}

Network Network::make(const Topology& topo, std::uint64_t seed, double init_scale,
                      Activation act) {
    check_topology(topo);
    Network net;
    net.topology = topo;
    net.hidden_activation = act;
    Rng rng(seed);
    const auto sizes = layer_sizes(topo);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        Layer layer;
        layer.weights = Matrix(sizes[l], sizes[l + 1]);
        layer.biases.assign(sizes[l + 1], 0.0);
        for (std::size_t i = 0; i < sizes[l]; ++i)
            for (std::size_t j = 0; j < sizes[l + 1]; ++j)
                layer.weights(i, j) = rng.uniform(-init_scale, init_scale);
        for (std::size_t j = 0; j < sizes[l + 1]; ++j)
            layer.biases[j] = rng.uniform(-init_scale, init_scale);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

double Network::forward(const std::vector<double>& x) const {
    if (x.size() != topology.input_size)
        throw std::runtime_error("forward: input size mismatch");
    for (double v : x)
        if (!std::isfinite(v)) throw std::runtime_error("forward: non-finite input");

    std::vector<double> a = x;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const Layer& layer = layers[l];
        std::vector<double> z = layer.biases;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double ai = a[i];
            const double* w = layer.weights.row_ptr(i);
            for (std::size_t j = 0; j < z.size(); ++j) z[j] += ai * w[j];
        }
        if (l + 1 < layers.size())
            for (double& v : z) v = activate(v, hidden_activation);
        a = std::move(z);
    }
    return a[0];
}

std::vector<double> Network::predict(const Table& t) const {
    if (t.class_col)
        throw std::runtime_error("network predict: class column must be pre-expanded to indicators");
    const auto pred = t.predictor_cols();
    if (pred.size() != topology.input_size)
        throw std::runtime_error("network predict: table has " + std::to_string(pred.size()) +
                                 " predictors, network expects " +
                                 std::to_string(topology.input_size));
    std::vector<double> out(t.n_rows());
    std::vector<double> x(pred.size());
    for (std::size_t r = 0; r < t.n_rows(); ++r) {
        for (std::size_t j = 0; j < pred.size(); ++j) x[j] = t.at(r, pred[j]);
        out[r] = forward(x);
    }
    return out;
}

std::vector<double> Network::params() const {
    std::vector<double> p;
    for (const Layer& layer : layers) {
        p.insert(p.end(), layer.weights.data().begin(), layer.weights.data().end());
        p.insert(p.end(), layer.biases.begin(), layer.biases.end());
    }
    return p;
}

void Network::set_params(const std::vector<double>& p) {
    std::size_t k = 0;
    for (Layer& layer : layers) {
        for (double& w : layer.weights.data()) w = p[k++];
        for (double& b : layer.biases) b = p[k++];
    }
    if (k != p.size()) throw std::runtime_error("set_params: parameter count mismatch");
}

namespace {

struct Batch {
    Matrix x;
    std::vector<double> y;
};

Batch batch_from_table(const Network& net, const Table& t) {
    if (t.class_col)
        throw std::runtime_error("network training: class column must be pre-expanded to indicators");
    const auto pred = t.predictor_cols();
    if (pred.size() != net.topology.input_size)
        throw std::runtime_error("network training: table has " + std::to_string(pred.size()) +
                                 " predictors, network expects " +
                                 std::to_string(net.topology.input_size));
    Batch b;
    b.x = Matrix(t.n_rows(), pred.size());
    b.y.resize(t.n_rows());
    for (std::size_t r = 0; r < t.n_rows(); ++r) {
        for (std::size_t j = 0; j < pred.size(); ++j) b.x(r, j) = t.at(r, pred[j]);
        b.y[r] = t.at(r, t.response_col);
    }
    return b;
}

// Forward/backward over the whole batch; returns 1/2 SSE and fills grad
// (Network::params() layout). All per-row buffers are hoisted out of the row
// loop; this is the hot path of every training run.
double batch_loss_grad(const Network& net, const Batch& batch, std::vector<double>* grad) {
    const std::size_t n_layers = net.layers.size();
    std::vector<Matrix> gw;
    std::vector<std::vector<double>> gb;
    if (grad) {
        for (const Layer& layer : net.layers) {
            gw.emplace_back(layer.weights.rows(), layer.weights.cols(), 0.0);
            gb.emplace_back(layer.biases.size(), 0.0);
        }
    }

    std::vector<std::vector<double>> acts(n_layers + 1);
    acts[0].resize(batch.x.cols());
    std::size_t widest = batch.x.cols();
    for (std::size_t l = 0; l < n_layers; ++l) {
        acts[l + 1].resize(net.layers[l].biases.size());
        widest = std::max(widest, acts[l + 1].size());
    }
    std::vector<double> delta(widest), delta_prev(widest);

    double loss = 0.0;
    for (std::size_t r = 0; r < batch.x.rows(); ++r) {
        const double* xrow = batch.x.row_ptr(r);
        std::copy(xrow, xrow + batch.x.cols(), acts[0].begin());
        for (std::size_t l = 0; l < n_layers; ++l) {
            const Layer& layer = net.layers[l];
            std::vector<double>& z = acts[l + 1];
            std::copy(layer.biases.begin(), layer.biases.end(), z.begin());
            const std::vector<double>& a = acts[l];
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double ai = a[i];
                const double* w = layer.weights.row_ptr(i);
                for (std::size_t j = 0; j < z.size(); ++j) z[j] += ai * w[j];
            }
            if (l + 1 < n_layers)
                for (double& v : z) v = activate(v, net.hidden_activation);
        }
        const double err = acts[n_layers][0] - batch.y[r];
        loss += 0.5 * err * err;

        if (!grad) continue;
        delta[0] = err;  // identity output, 1/2 SSE
        std::size_t delta_width = 1;
        for (std::size_t l = n_layers; l-- > 0;) {
            const std::vector<double>& a_in = acts[l];
            for (std::size_t j = 0; j < delta_width; ++j) gb[l][j] += delta[j];
            for (std::size_t i = 0; i < a_in.size(); ++i) {
                const double ai = a_in[i];
                double* grow = gw[l].row_ptr(i);
                for (std::size_t j = 0; j < delta_width; ++j) grow[j] += ai * delta[j];
            }
            if (l == 0) break;
            const Layer& layer = net.layers[l];
            for (std::size_t i = 0; i < a_in.size(); ++i) {
                const double* w = layer.weights.row_ptr(i);
                double s = 0.0;
                for (std::size_t j = 0; j < delta_width; ++j) s += w[j] * delta[j];
                delta_prev[i] = s * activate_deriv(a_in[i], net.hidden_activation);
            }
            delta_width = a_in.size();
            std::swap(delta, delta_prev);
        }
    }

    if (grad) {
        grad->clear();
        for (std::size_t l = 0; l < n_layers; ++l) {
            grad->insert(grad->end(), gw[l].data().begin(), gw[l].data().end());
            grad->insert(grad->end(), gb[l].begin(), gb[l].end());
        }
    }
    return loss;
}

}  // namespace

double sse_loss(const Network& net, const Table& t) {
    Batch b = batch_from_table(net, t);
    return batch_loss_grad(net, b, nullptr);
}

std::vector<double> gradient(const Network& net, const Table& t) {
    Batch b = batch_from_table(net, t);
    std::vector<double> g;
    batch_loss_grad(net, b, &g);
    return g;
}

OptimResult gradient_descent(std::vector<double>& params, const Objective& obj, int max_epochs,
                             double tol, double learning_rate) {
    if (max_epochs < 1) throw std::invalid_argument("gradient_descent: max_epochs must be >= 1");
    OptimResult res;
    std::vector<double> grad(params.size());
    double prev = std::numeric_limits<double>::infinity();
    for (int epoch = 0; epoch < max_epochs; ++epoch) {
        const double loss = obj(params, grad);
        if (!std::isfinite(loss))
            throw std::runtime_error("training diverged: loss is not finite at epoch " +
                                     std::to_string(epoch));
        res.loss_trace.push_back(loss);
        if (epoch > 0 && prev - loss < tol) {
            res.stopped_early = true;
            return res;
        }
        prev = loss;
        for (std::size_t i = 0; i < params.size(); ++i) params[i] -= learning_rate * grad[i];
        ++res.epochs;
    }
    std::vector<double> unused(params.size());
    const double final_loss = obj(params, unused);
    if (!std::isfinite(final_loss)) throw std::runtime_error("training diverged: final loss not finite");
    res.loss_trace.push_back(final_loss);
    return res;
}

OptimResult rprop(std::vector<double>& params, const Objective& obj, int max_epochs, double tol,
                  const RpropConfig& rc) {
    if (max_epochs < 1) throw std::invalid_argument("rprop: max_epochs must be >= 1");
    OptimResult res;
    res.delta_low = rc.delta0;
    res.delta_high = rc.delta0;
    std::vector<double> grad(params.size());
    std::vector<double> step(params.size(), rc.delta0);
    std::vector<int> prev_sign(params.size(), 0);
    double prev = std::numeric_limits<double>::infinity();

    for (int epoch = 0; epoch < max_epochs; ++epoch) {
        const double loss = obj(params, grad);
        if (!std::isfinite(loss))
            throw std::runtime_error("training diverged: loss is not finite at epoch " +
                                     std::to_string(epoch));
        res.loss_trace.push_back(loss);
        if (epoch > 0 && prev - loss < tol) {
            res.stopped_early = true;
            return res;
        }
        prev = loss;

        for (std::size_t i = 0; i < params.size(); ++i) {
            const int s = grad[i] > 0.0 ? 1 : (grad[i] < 0.0 ? -1 : 0);
            const int agreement = prev_sign[i] * s;
            if (agreement > 0) {
                step[i] = std::min(step[i] * rc.eta_plus, rc.delta_max);
                params[i] -= s * step[i];
                prev_sign[i] = s;
            } else if (agreement < 0) {
                step[i] = std::max(step[i] * rc.eta_minus, rc.delta_min);
                prev_sign[i] = 0;  // skip the update after a sign flip
            } else {
                params[i] -= s * step[i];
                prev_sign[i] = s;
            }
            res.delta_low = std::min(res.delta_low, step[i]);
            res.delta_high = std::max(res.delta_high, step[i]);
        }
        ++res.epochs;
    }
    std::vector<double> unused(params.size());
    const double final_loss = obj(params, unused);
    if (!std::isfinite(final_loss)) throw std::runtime_error("training diverged: final loss not finite");
    res.loss_trace.push_back(final_loss);
    return res;
}

namespace {

TrainResult train_impl(Network net, const Table& t, const TrainConfig& cfg, bool use_rprop,
                       const RpropConfig& rc) {
    if (cfg.max_epochs < 1) throw std::invalid_argument("train: max_epochs must be >= 1");
    if (!use_rprop && !(cfg.learning_rate >= 0.0))
        throw std::invalid_argument("train: learning rate must be nonnegative");
    if (cfg.restarts < 1) throw std::invalid_argument("train: restarts must be >= 1");

    Batch batch = batch_from_table(net, t);
    Network work = net;  // scratch copy the objective evaluates through
    auto objective = [&work, &batch](const std::vector<double>& p, std::vector<double>& g) {
        work.set_params(p);
        return batch_loss_grad(work, batch, &g);
    };

    Rng rng(cfg.seed);
    TrainResult best;
    double best_loss = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < cfg.restarts; ++attempt) {
        // The caller-provided initialization is attempt 0; restarts re-draw.
        Network candidate = attempt == 0
                                ? net
                                : Network::make(net.topology, rng.substream(attempt).root_seed(),
                                                cfg.init_scale, net.hidden_activation);
        std::vector<double> params = candidate.params();
        OptimResult opt = use_rprop
                              ? rprop(params, objective, cfg.max_epochs, cfg.tol, rc)
                              : gradient_descent(params, objective, cfg.max_epochs, cfg.tol,
                                                 cfg.learning_rate);
        candidate.set_params(params);
        const double final_loss = opt.loss_trace.back();
        if (final_loss < best_loss) {
            best_loss = final_loss;
            best.net = std::move(candidate);
            best.optim = std::move(opt);
        }
    }
    return best;
}

}  // namespace

TrainResult train_backprop(Network net, const Table& t, const TrainConfig& cfg) {
    return train_impl(std::move(net), t, cfg, false, RpropConfig{});
}

TrainResult train_rprop(Network net, const Table& t, const TrainConfig& cfg,
                        const RpropConfig& rc) {
    return train_impl(std::move(net), t, cfg, true, rc);
}

std::string network_json(const Network& net) {
    nlohmann::json j;
    j["topology"] = {{"input", net.topology.input_size},
                     {"hidden", net.topology.hidden_sizes},
                     {"output", net.topology.output_size}};
    j["hidden_activation"] = net.hidden_activation == Activation::Sigmoid ? "sigmoid" : "tanh";
    j["output_activation"] = "identity";
    nlohmann::json layers = nlohmann::json::array();
    for (const Layer& layer : net.layers) {
        layers.push_back({{"rows", layer.weights.rows()},
                          {"cols", layer.weights.cols()},
                          {"weights", layer.weights.data()},  // row-major
                          {"biases", layer.biases}});
    }
    j["layers"] = std::move(layers);
    return j.dump(2);
}

void save_network(const Network& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << network_json(net) << '\n';
}

Network load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    nlohmann::json j;
    in >> j;

    Network net;
    net.topology.input_size = j.at("topology").at("input").get<std::size_t>();
    net.topology.hidden_sizes = j.at("topology").at("hidden").get<std::vector<std::size_t>>();
    net.topology.output_size = j.at("topology").at("output").get<std::size_t>();
    net.hidden_activation =
        j.at("hidden_activation").get<std::string>() == "tanh" ? Activation::Tanh
                                                               : Activation::Sigmoid;
    for (const auto& jl : j.at("layers")) {
        Layer layer;
        const auto rows = jl.at("rows").get<std::size_t>();
        const auto cols = jl.at("cols").get<std::size_t>();
        layer.weights = Matrix(rows, cols);
        layer.weights.data() = jl.at("weights").get<std::vector<double>>();
        if (layer.weights.data().size() != rows * cols)
            throw std::runtime_error("network file: weight shape mismatch");
        layer.biases = jl.at("biases").get<std::vector<double>>();
        net.layers.push_back(std::move(layer));
    }
    return net;
}

std::string network_structure_json(const Network& net, const std::vector<std::string>& input_names) {
    nlohmann::json j;
    std::vector<std::size_t> sizes;
    sizes.push_back(net.topology.input_size);
    for (std::size_t h : net.topology.hidden_sizes) sizes.push_back(h);
    sizes.push_back(net.topology.output_size);
    j["layer_sizes"] = sizes;
    j["input_names"] = input_names;
    nlohmann::json edges = nlohmann::json::array();
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        for (std::size_t i = 0; i < layer.weights.rows(); ++i)
            for (std::size_t k = 0; k < layer.weights.cols(); ++k)
                edges.push_back({{"layer", l},
                                 {"from", i},
                                 {"to", k},
                                 {"weight", layer.weights(i, k)},
                                 {"magnitude", std::abs(layer.weights(i, k))}});
    }
    j["edges"] = std::move(edges);
    return j.dump(2);
}

}  // namespace debtlab
