#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "debtlab/neural.hpp"
#include "debtlab/rng.hpp"
#include "support/oracles.hpp"

using namespace debtlab;

namespace {

Table tiny_table(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    for (std::size_t c = 0; c < x[0].size(); ++c) {
        names.push_back("p" + std::to_string(c));
        std::vector<double> col;
        for (const auto& row : x) col.push_back(row[c]);
        cols.push_back(std::move(col));
    }
    names.push_back("udebt");
    cols.push_back(y);
    return oracle::table_from_columns(names, cols);
}

}  // namespace

TEST_CASE("all-zero weights leave only the output bias") {
    Topology topo{3, {2}, 1};
    Network net = Network::make(topo, 1, 0.0);  // init_scale 0 zeroes everything
    net.layers[1].biases[0] = 0.75;
    CHECK(net.forward({0.3, -0.1, 2.0}) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(net.forward({9.0, 9.0, 9.0}) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("1-1-1 identity weights give sigma(0) = 0.5 at x = 0") {
    Topology topo{1, {1}, 1};
    Network net = Network::make(topo, 1, 0.0);
    net.layers[0].weights(0, 0) = 1.0;
    net.layers[1].weights(0, 0) = 1.0;
    CHECK(net.forward({0.0}) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("forward matches the straight-line oracle on a random 9-3-1 net") {
    Topology topo{9, {3}, 1};
    Network net = Network::make(topo, 99, 0.8);
    Rng rng(7);
    std::vector<std::size_t> sizes = {9, 3, 1};
    std::vector<Matrix> weights = {net.layers[0].weights, net.layers[1].weights};
    std::vector<std::vector<double>> biases = {net.layers[0].biases, net.layers[1].biases};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(9);
        for (double& v : x) v = rng.uniform(-2.0, 2.0);
        CHECK(net.forward(x) ==
              doctest::Approx(oracle::mlp_forward(sizes, weights, biases, x)).epsilon(1e-12));
    }
}

TEST_CASE("forward validates inputs") {
    Topology topo{2, {2}, 1};
    Network net = Network::make(topo, 3);
    CHECK_THROWS(net.forward({1.0}));
    CHECK_THROWS(net.forward({1.0, std::nan("")}));
}

TEST_CASE("zero residuals give a zero gradient") {
    // constant-zero target with an all-zero network: output is exactly 0
    Topology topo{2, {2}, 1};
    Network net = Network::make(topo, 1, 0.0);
    net.layers[1].biases[0] = 0.0;
    Table t = tiny_table({{0.5, 0.1}, {-0.2, 0.4}}, {0.5, 0.5});
    net.layers[1].biases[0] = 0.5;  // fits both rows exactly
    for (double g : gradient(net, t)) CHECK(g == 0.0);
}

TEST_CASE("gradient matches central finite differences on random nets") {
    Rng seeder(1234);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t inputs = 2 + seeder.index(3);
        std::vector<std::size_t> hidden = {1 + seeder.index(3)};
        if (trial % 2 == 1) hidden.push_back(1 + seeder.index(2));
        Topology topo{inputs, hidden, 1};
        Network net = Network::make(topo, seeder.next_u64(), 0.7);

        Rng rng(seeder.next_u64());
        std::vector<std::vector<double>> x(12, std::vector<double>(inputs));
        std::vector<double> y(12);
        for (std::size_t r = 0; r < 12; ++r) {
            for (double& v : x[r]) v = rng.uniform(-1.0, 1.0);
            y[r] = rng.uniform(-1.0, 1.0);
        }
        Table t = tiny_table(x, y);

        auto grad = gradient(net, t);
        auto params = net.params();
        const double h = 1e-5;
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto plus = params, minus = params;
            plus[i] += h;
            minus[i] -= h;
            Network np = net, nm = net;
            np.set_params(plus);
            nm.set_params(minus);
            const double fd = (sse_loss(np, t) - sse_loss(nm, t)) / (2.0 * h);
            const double scale = std::max(std::abs(grad[i]), std::abs(fd));
            if (scale > 1e-4)
                CHECK(std::abs(grad[i] - fd) / scale < 1e-5);
            else
                CHECK(std::abs(grad[i] - fd) < 1e-8);
        }
    }
}

TEST_CASE("a linear net's gradient reduces to the least-squares gradient") {
    // no hidden layer: y_hat = w x + b, grad matches X^T (y_hat - y)
    Topology topo{2, {}, 1};
    Network net = Network::make(topo, 5, 0.4);
    Rng rng(6);
    std::vector<std::vector<double>> x(15, std::vector<double>(2));
    std::vector<double> y(15);
    for (std::size_t r = 0; r < 15; ++r) {
        for (double& v : x[r]) v = rng.uniform(-1.0, 1.0);
        y[r] = rng.uniform(-1.0, 1.0);
    }
    Table t = tiny_table(x, y);
    auto grad = gradient(net, t);

    std::vector<double> expected(3, 0.0);  // w0, w1, b
    for (std::size_t r = 0; r < 15; ++r) {
        const double err =
            net.layers[0].weights(0, 0) * x[r][0] + net.layers[0].weights(1, 0) * x[r][1] +
            net.layers[0].biases[0] - y[r];
        expected[0] += err * x[r][0];
        expected[1] += err * x[r][1];
        expected[2] += err;
    }
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(grad[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("backprop drives a noiseless linear instance to tiny loss") {
    Rng rng(44);
    std::vector<std::vector<double>> x(20, std::vector<double>(2));
    std::vector<double> y(20);
    for (std::size_t r = 0; r < 20; ++r) {
        for (double& v : x[r]) v = rng.uniform(0.0, 1.0);
        y[r] = 0.3 + 0.4 * x[r][0] - 0.2 * x[r][1];
    }
    Table t = tiny_table(x, y);
    Topology topo{2, {}, 1};  // linear-capable net with a known zero-loss solution
    TrainConfig cfg;
    cfg.max_epochs = 5000;
    cfg.learning_rate = 0.01;
    cfg.seed = 3;
    TrainResult res = train_backprop(Network::make(topo, 3), t, cfg);
    CHECK(2.0 * res.optim.loss_trace.back() < 1e-4);  // SSE < 1e-4
    // loss trace is non-strictly decreasing below the stability threshold
    for (std::size_t i = 0; i + 1 < res.optim.loss_trace.size(); ++i)
        CHECK(res.optim.loss_trace[i + 1] <= res.optim.loss_trace[i] + 1e-15);
}

TEST_CASE("learning rate zero keeps parameters frozen") {
    Table t = tiny_table({{0.1, 0.2}, {0.4, 0.3}, {0.7, 0.1}}, {1.0, 2.0, 3.0});
    Topology topo{2, {2}, 1};
    Network net = Network::make(topo, 11);
    auto before = net.params();
    TrainConfig cfg;
    cfg.max_epochs = 50;
    cfg.learning_rate = 0.0;
    TrainResult res = train_backprop(net, t, cfg);
    CHECK(res.net.params() == before);
}

TEST_CASE("training is deterministic for a fixed seed") {
    Rng rng(15);
    std::vector<std::vector<double>> x(25, std::vector<double>(3));
    std::vector<double> y(25);
    for (std::size_t r = 0; r < 25; ++r) {
        for (double& v : x[r]) v = rng.uniform(0.0, 1.0);
        y[r] = x[r][0] * x[r][1] + 0.3 * x[r][2];
    }
    Table t = tiny_table(x, y);
    TrainConfig cfg;
    cfg.max_epochs = 120;
    cfg.seed = 9;
    cfg.restarts = 2;
    Topology topo{3, {3}, 1};
    TrainResult a = train_rprop(Network::make(topo, 9), t, cfg);
    TrainResult b = train_rprop(Network::make(topo, 9), t, cfg);
    CHECK(a.optim.loss_trace == b.optim.loss_trace);
    CHECK(a.net.params() == b.net.params());
}

TEST_CASE("backprop divergence is reported, not clipped") {
    Rng rng(2);
    std::vector<std::vector<double>> x(10, std::vector<double>(2));
    std::vector<double> y(10);
    for (std::size_t r = 0; r < 10; ++r) {
        for (double& v : x[r]) v = rng.uniform(0.0, 4.0);
        y[r] = rng.uniform(0.0, 4.0);
    }
    Table t = tiny_table(x, y);
    Topology topo{2, {}, 1};  // linear layer diverges fast with a huge rate
    TrainConfig cfg;
    cfg.max_epochs = 100000;
    cfg.learning_rate = 10.0;
    CHECK_THROWS_WITH_AS(train_backprop(Network::make(topo, 4, 0.5), t, cfg),
                         doctest::Contains("diverged"), std::runtime_error);
}

TEST_CASE("rprop converges on the scalar quadratic and matches a hand simulation") {
    // loss (w-3)^2, gradient 2(w-3)
    Objective obj = [](const std::vector<double>& p, std::vector<double>& g) {
        g[0] = 2.0 * (p[0] - 3.0);
        return (p[0] - 3.0) * (p[0] - 3.0);
    };
    std::vector<double> w{0.0};
    OptimResult res = rprop(w, obj, 200, -std::numeric_limits<double>::infinity());
    CHECK(std::abs(w[0] - 3.0) < 1e-3);
    CHECK(res.delta_low >= 1e-6);
    CHECK(res.delta_high <= 50.0);

    // independent scalar simulation of the update rule
    double sw = 0.0, step = 0.1;
    int prev = 0;
    for (int epoch = 0; epoch < 200; ++epoch) {
        const double g = 2.0 * (sw - 3.0);
        const int s = g > 0 ? 1 : (g < 0 ? -1 : 0);
        if (prev * s > 0) {
            step = std::min(step * 1.2, 50.0);
            sw -= s * step;
            prev = s;
        } else if (prev * s < 0) {
            step = std::max(step * 0.5, 1e-6);
            prev = 0;
        } else {
            sw -= s * step;
            prev = s;
        }
    }
    CHECK(w[0] == doctest::Approx(sw).epsilon(1e-12));
}

TEST_CASE("rprop leaves parameters alone when the gradient is zero") {
    Objective obj = [](const std::vector<double>&, std::vector<double>& g) {
        g.assign(g.size(), 0.0);
        return 1.0;
    };
    std::vector<double> w{0.4, -0.7};
    rprop(w, obj, 50, -std::numeric_limits<double>::infinity());
    CHECK(w[0] == 0.4);
    CHECK(w[1] == -0.7);
}

TEST_CASE("persistent gradient sign grows steps geometrically to the cap") {
    // gradient fixed at +1: step after k updates is min(0.1 * 1.2^(k-1), 50)
    Objective obj = [](const std::vector<double>&, std::vector<double>& g) {
        g[0] = 1.0;
        return 1.0;
    };
    std::vector<double> w{0.0};
    double expected_w = 0.0, step = 0.1;
    for (int k = 1; k <= 60; ++k) {
        if (k > 1) step = std::min(step * 1.2, 50.0);
        expected_w -= step;
    }
    OptimResult res = rprop(w, obj, 60, -std::numeric_limits<double>::infinity());
    CHECK(w[0] == doctest::Approx(expected_w).epsilon(1e-12));
    CHECK(res.delta_high == doctest::Approx(50.0));
    CHECK(res.delta_high <= 50.0);
}

TEST_CASE("rprop step sizes stay inside the configured bounds") {
    Rng rng(31);
    Objective obj = [&rng](const std::vector<double>& p, std::vector<double>& g) {
        double loss = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            g[i] = 2.0 * p[i] + rng.uniform(-0.5, 0.5);
            loss += p[i] * p[i];
        }
        return loss;
    };
    std::vector<double> w{5.0, -3.0, 0.0};
    OptimResult res = rprop(w, obj, 500, -std::numeric_limits<double>::infinity());
    CHECK(res.delta_low >= 1e-6);
    CHECK(res.delta_high <= 50.0);
}

TEST_CASE("network json round-trips through save and load") {
    Topology topo{4, {3, 2}, 1};
    Network net = Network::make(topo, 77, 0.9);
    const auto path = (std::filesystem::temp_directory_path() / "net.json").string();
    save_network(net, path);
    Network back = load_network(path);
    CHECK(back.topology.hidden_sizes == net.topology.hidden_sizes);
    CHECK(back.params() == net.params());
    Rng rng(5);
    std::vector<double> x(4);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    CHECK(back.forward(x) == net.forward(x));
}

TEST_CASE("tanh hidden activation is available and differs from sigmoid") {
    Topology topo{2, {3}, 1};
    Network s = Network::make(topo, 8, 0.6, Activation::Sigmoid);
    Network h = Network::make(topo, 8, 0.6, Activation::Tanh);
    CHECK(s.params() == h.params());
    CHECK(s.forward({0.4, -0.2}) != h.forward({0.4, -0.2}));
}
