#include <doctest.h>

#include "ada/error.hpp"
#include "ada/net.hpp"
#include "ada/rng.hpp"
#include "test_helpers.hpp"

#include <cmath>

using namespace ada;

namespace {

Net hand_two_layer() {
    Net net;
    Layer l1;
    l1.in = 2;
    l1.out = 2;
    l1.w = {1.0, -1.0, 0.5, 0.25};
    l1.b = {0.1, -0.2};
    l1.act = Activation::relu;
    Layer l2;
    l2.in = 2;
    l2.out = 2;
    l2.w = {0.3, 0.7, -0.4, 0.6};
    l2.b = {0.0, 0.05};
    l2.act = Activation::sigmoid;
    net.layers = {l1, l2};
    return net;
}

std::vector<Sample> random_batch(Rng& rng, std::size_t n, std::size_t in_dim,
                                 std::size_t out_dim, std::vector<std::vector<double>>& storage,
                                 bool onehot_targets) {
    std::vector<Sample> batch;
    for (std::size_t i = 0; i < n; ++i) {
        storage.push_back({});
        std::vector<double>& input = storage.back();
        input.resize(in_dim);
        for (double& x : input) x = 2.0 * rng.uniform() - 1.0;
        Sample s;
        s.input = InputView::of(std::span<const double>(input));
        if (onehot_targets) {
            s.target.assign(out_dim, 0.0);
            s.target[static_cast<std::size_t>(rng.below(out_dim))] = 1.0;
        } else {
            s.target.resize(out_dim);
            for (double& t : s.target) t = rng.uniform();
        }
        batch.push_back(std::move(s));
    }
    return batch;
}

} // namespace

TEST_CASE("init_net shapes, determinism, and zero-mean weights") {
    Net net = init_net({4, 3}, {Activation::identity}, 0);
    CHECK(net.layers.size() == 1);
    CHECK(net.layers[0].w.size() == 12);
    for (double b : net.layers[0].b) CHECK(b == 0.0);

    Net again = init_net({4, 3}, {Activation::identity}, 0);
    CHECK(net.layers[0].w == again.layers[0].w);

    // 10k draws: mean within 3 standard errors of 0
    Net big = init_net({100, 100}, {Activation::identity}, 7);
    double mean = 0.0;
    for (double w : big.layers[0].w) mean += w;
    mean /= 10000.0;
    double scale = 1.0 / std::sqrt(100.0);            // uniform(-scale, scale)
    double se = scale / std::sqrt(3.0) / std::sqrt(10000.0);
    CHECK(std::abs(mean) < 3.0 * se);

    CHECK_THROWS_AS(init_net({4}, {}, 0), Error);
    CHECK_THROWS_AS(init_net({4, 3, 2}, {Activation::relu}, 0), Error);
    CHECK_THROWS_AS(init_net({4, 3, 2}, {Activation::softmax, Activation::relu}, 0), Error);
}

TEST_CASE("forward: identity net reproduces its input") {
    Net net;
    Layer l;
    l.in = 3;
    l.out = 3;
    l.w = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    l.b = {0, 0, 0};
    l.act = Activation::identity;
    net.layers = {l};
    std::vector<double> x{0.5, -1.25, 3.0};
    CHECK(forward(net, InputView::of(x)) == x);
}

TEST_CASE("forward: softmax head sums to one") {
    Net net = init_net({6, 8, 4}, {Activation::relu, Activation::softmax}, 3);
    Rng rng(9);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> x(6);
        for (double& v : x) v = 4.0 * rng.uniform() - 2.0;
        std::vector<double> out = forward(net, InputView::of(x));
        double total = 0.0;
        for (double p : out) {
            CHECK(p >= 0.0);
            total += p;
        }
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }
}

TEST_CASE("forward: hand-computed two-layer regression") {
    Net net = hand_two_layer();
    std::vector<double> x{1.0, 0.0};
    std::vector<double> out = forward(net, InputView::of(x));
    // independent recomputation of the same arithmetic
    double z1a = 1.0 * 1.0 + (-1.0) * 0.0 + 0.1;
    double z1b = 0.5 * 1.0 + 0.25 * 0.0 - 0.2;
    double h1a = std::max(0.0, z1a), h1b = std::max(0.0, z1b);
    double z2a = 0.3 * h1a + 0.7 * h1b + 0.0;
    double z2b = -0.4 * h1a + 0.6 * h1b + 0.05;
    double e2a = 1.0 / (1.0 + std::exp(-z2a));
    double e2b = 1.0 / (1.0 + std::exp(-z2b));
    CHECK(std::abs(out[0] - e2a) < 1e-12);
    CHECK(std::abs(out[1] - e2b) < 1e-12);
}

TEST_CASE("forward: sparse one-hot inputs match dense inputs bitwise") {
    Net net = init_net({20, 16, 5}, {Activation::relu, Activation::softmax}, 21);
    for (std::size_t hot = 0; hot < 20; hot += 3) {
        std::vector<double> dense(20, 0.0);
        dense[hot] = 1.0;
        std::vector<double> a = forward(net, InputView::of(dense));
        std::vector<double> b = forward(net, InputView::onehot(20, hot));
        CHECK(a == b);
    }
    // two-hot form
    Net net2 = init_net({10, 8, 1}, {Activation::relu, Activation::sigmoid}, 22);
    std::vector<double> dense(10, 0.0);
    dense[2] = 1.0;
    dense[7] = 1.0;
    CHECK(forward(net2, InputView::of(dense)) == forward(net2, InputView::twohot(10, 2, 7)));
}

TEST_CASE("loss_and_grad: mse on perfect reconstruction leaves only the l1 term") {
    Net net;
    Layer l;
    l.in = 3;
    l.out = 3;
    l.w = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    l.b = {0, 0, 0};
    l.act = Activation::identity;
    net.layers = {l};
    std::vector<double> x{0.25, -0.5, 1.0};
    Sample s;
    s.input = InputView::of(x);
    s.target = x;
    double l1 = std::abs(x[0]) + std::abs(x[1]) + std::abs(x[2]);
    LossResult res = loss_and_grad(net, std::vector<Sample>{s}, LossKind::mse, 0.01, 0);
    CHECK(res.loss == doctest::Approx(0.01 * l1).epsilon(1e-12));
}

TEST_CASE("loss_and_grad: cross entropy vanishes on a confident correct prediction") {
    Net net;
    Layer l;
    l.in = 2;
    l.out = 2;
    l.w = {60.0, 0.0, 0.0, 60.0};
    l.b = {0, 0};
    l.act = Activation::softmax;
    net.layers = {l};
    Sample s;
    std::vector<double> x{1.0, 0.0};
    s.input = InputView::of(x);
    s.target = {1.0, 0.0};
    LossResult res = loss_and_grad(net, std::vector<Sample>{s}, LossKind::cross_entropy);
    CHECK(res.loss < 1e-10);

    // cross entropy demands a softmax head
    Net bad = init_net({2, 2}, {Activation::sigmoid}, 0);
    CHECK_THROWS_AS(loss_and_grad(bad, std::vector<Sample>{s}, LossKind::cross_entropy), Error);
}

TEST_CASE("gradients match central finite differences") {
    Rng rng(31);
    struct Case {
        std::vector<std::size_t> sizes;
        std::vector<Activation> acts;
        LossKind kind;
        double l1;
        std::optional<std::size_t> latent;
        bool onehot_targets;
    };
    std::vector<Case> cases = {
        {{5, 8, 4}, {Activation::relu, Activation::softmax}, LossKind::cross_entropy, 0.0,
         std::nullopt, true},
        {{7, 6, 1}, {Activation::relu, Activation::sigmoid}, LossKind::binary_target_mse, 0.0,
         std::nullopt, false},
        {{6, 8, 3, 8, 6},
         {Activation::relu, Activation::relu, Activation::relu, Activation::sigmoid},
         LossKind::mse, 0.01, 1, false},
    };
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
        const Case& c = cases[ci];
        for (int trial = 0; trial < 3; ++trial) {
            Net net = init_net(c.sizes, c.acts, 100 + 10 * ci + static_cast<std::uint64_t>(trial));
            std::vector<std::vector<double>> storage;
            std::vector<Sample> batch;
            for (int attempt = 0; attempt < 50; ++attempt) {
                storage.clear();
                batch = random_batch(rng, 4, c.sizes.front(), c.sizes.back(), storage,
                                     c.onehot_targets);
                if (!testutil::near_kink(net, batch, c.latent, 1e-4)) break;
            }
            REQUIRE(!testutil::near_kink(net, batch, c.latent, 1e-4));
            auto rep = testutil::fd_gradient_check(net, batch, c.kind, c.l1, c.latent, 60, rng);
            CHECK(rep.max_rel_err < 1e-4);
        }
    }
}

TEST_CASE("adam") {
    Net net = init_net({3, 2}, {Activation::identity}, 5);
    AdamState st = init_adam(net);
    Net before = net;
    Grads zero = Grads::zeros_like(net);
    adam_step(net, zero, st, 1e-3);
    CHECK(st.step_count == 1);
    CHECK(net.layers[0].w == before.layers[0].w);
    CHECK(net.layers[0].b == before.layers[0].b);

    // constant positive gradient pushes the parameter down
    Net one;
    Layer l;
    l.in = 1;
    l.out = 1;
    l.w = {0.0};
    l.b = {0.0};
    l.act = Activation::identity;
    one.layers = {l};
    AdamState ost = init_adam(one);
    Grads g = Grads::zeros_like(one);
    g.layers[0].w[0] = 2.5;
    for (int i = 0; i < 100; ++i) adam_step(one, g, ost, 1e-2);
    CHECK(one.layers[0].w[0] < 0.0);

    // non-finite gradients are rejected with the layer named
    g.layers[0].w[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(adam_step(one, g, ost, 1e-2),
                         doctest::Contains("layer 0"), Error);
}

TEST_CASE("adam drives a quadratic bowl below 1e-6") {
    // minimize 0.5*(w*1 + b - 0.7)^2 via the mse loss path
    Net net = init_net({1, 1}, {Activation::identity}, 77);
    AdamState st = init_adam(net);
    std::vector<double> x{1.0};
    Sample s;
    s.input = InputView::of(x);
    s.target = {0.7};
    std::vector<Sample> batch{s};
    double loss = 1.0;
    for (int i = 0; i < 5000 && loss > 1e-6; ++i) {
        LossResult res = loss_and_grad(net, batch, LossKind::mse);
        loss = res.loss;
        adam_step(net, res.grads, st, 1e-2);
    }
    CHECK(loss < 1e-6);
}

TEST_CASE("clip_grad_norm") {
    Net net = init_net({4, 4}, {Activation::identity}, 1);
    Grads g = Grads::zeros_like(net);

    // norm 0.25 stays untouched
    g.layers[0].w[0] = 0.25;
    Grads before = g;
    clip_grad_norm(g, 0.5);
    CHECK(g.layers[0].w == before.layers[0].w);

    // norm 5 scales by 0.1
    g.zero();
    g.layers[0].w[0] = 3.0;
    g.layers[0].w[1] = 4.0;
    clip_grad_norm(g, 0.5);
    CHECK(g.layers[0].w[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(g.layers[0].w[1] == doctest::Approx(0.4).epsilon(1e-12));

    // random sweep: post-clip norm bounded
    Rng rng(13);
    for (int i = 0; i < 50; ++i) {
        Grads r = Grads::zeros_like(net);
        for (double& w : r.layers[0].w) w = 10.0 * (2.0 * rng.uniform() - 1.0);
        for (double& b : r.layers[0].b) b = 10.0 * (2.0 * rng.uniform() - 1.0);
        clip_grad_norm(r, 0.5);
        CHECK(grad_norm(r) <= 0.5 + 1e-12);
    }
}

TEST_CASE("full-batch gradient descent never increases the loss") {
    Net net = init_net({5, 8, 5}, {Activation::relu, Activation::sigmoid}, 41);
    Rng rng(42);
    std::vector<std::vector<double>> storage;
    std::vector<Sample> batch = random_batch(rng, 8, 5, 5, storage, false);
    double prev = 1e300;
    for (int i = 0; i < 100; ++i) {
        LossResult res = loss_and_grad(net, batch, LossKind::mse);
        CHECK(res.loss <= prev + 1e-9);
        prev = res.loss;
        // plain gradient descent with a conservative step
        for (std::size_t li = 0; li < net.layers.size(); ++li) {
            for (std::size_t k = 0; k < net.layers[li].w.size(); ++k)
                net.layers[li].w[k] -= 1e-3 * res.grads.layers[li].w[k];
            for (std::size_t k = 0; k < net.layers[li].b.size(); ++k)
                net.layers[li].b[k] -= 1e-3 * res.grads.layers[li].b[k];
        }
    }
}

TEST_CASE("training is bitwise deterministic") {
    auto run = [] {
        Net net = init_net({4, 6, 2}, {Activation::relu, Activation::softmax}, 17);
        AdamState st = init_adam(net);
        Rng rng(55);
        std::vector<std::vector<double>> storage;
        std::vector<Sample> batch = random_batch(rng, 6, 4, 2, storage, true);
        for (int i = 0; i < 25; ++i) {
            LossResult res = loss_and_grad(net, batch, LossKind::cross_entropy);
            clip_grad_norm(res.grads, 0.5);
            adam_step(net, res.grads, st, 1e-3);
        }
        return net;
    };
    Net a = run();
    Net b = run();
    for (std::size_t li = 0; li < a.layers.size(); ++li) {
        CHECK(a.layers[li].w == b.layers[li].w);
        CHECK(a.layers[li].b == b.layers[li].b);
    }
}

TEST_CASE("sigmoid output clamps strictly inside (0,1)") {
    Net net;
    Layer l;
    l.in = 1;
    l.out = 2;
    l.w = {1000.0, -1000.0};
    l.b = {0, 0};
    l.act = Activation::sigmoid;
    net.layers = {l};
    std::vector<double> x{1.0};
    std::vector<double> out = forward(net, InputView::of(x));
    CHECK(out[0] < 1.0);
    CHECK(out[0] > 0.0);
    CHECK(out[1] > 0.0);
    CHECK(out[1] < 1.0);
}
