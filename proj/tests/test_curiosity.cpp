#include <doctest.h>

#include "ada/curiosity.hpp"
#include "ada/error.hpp"
#include "ada/rng.hpp"
#include "test_helpers.hpp"

#include <cmath>

using namespace ada;

namespace {

constexpr int kObsDim = 25; // 5x5 toy grid

CoarseFineModel trained_on_cell(int hot, int steps, double lambda, std::uint64_t seed) {
    CoarseFineModel model = make_coarse_fine_model(kObsDim, 16, 8, lambda, seed);
    std::vector<Observation> batch{Observation{kObsDim, hot}};
    for (int i = 0; i < steps; ++i)
        train_autoencoder(model, batch, 1e-2, 1.0, 0.5, static_cast<std::uint64_t>(i));
    return model;
}

} // namespace

TEST_CASE("intrinsic reward of a hand-built perfect reconstructor is zero") {
    // encoder passes the 2-dim input through; decoder maps latent to huge
    // logits so the sigmoid saturates at the clamp
    CoarseFineModel model;
    Layer enc;
    enc.in = 2;
    enc.out = 2;
    enc.w = {1, 0, 0, 1};
    enc.b = {0, 0};
    enc.act = Activation::relu;
    Layer dec;
    dec.in = 2;
    dec.out = 2;
    dec.w = {80.0, -80.0, -80.0, 80.0};
    dec.b = {-40.0, -40.0}; // hot unit -> +40, cold unit -> -40 (plus cross term)
    dec.act = Activation::sigmoid;
    model.net.layers = {enc, dec};
    model.latent_layer = 0;
    model.lambda_l1 = 0.0;

    IntrinsicReward r = intrinsic_reward(model, Observation{2, 0});
    CHECK(r.r_i >= 0.0);
    CHECK(r.r_i <= 1e-10);
    CHECK(r.recon_err <= 1e-10);
}

TEST_CASE("intrinsic reward is non-negative") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        CoarseFineModel model = make_coarse_fine_model(kObsDim, 12, 6, 0.01,
                                                       1000 + static_cast<std::uint64_t>(trial));
        IntrinsicReward r =
            intrinsic_reward(model, Observation{kObsDim, static_cast<int>(rng.below(kObsDim))});
        CHECK(r.r_i >= 0.0);
        CHECK(r.recon_err >= 0.0);
        CHECK(r.sparsity >= 0.0);
    }
}

TEST_CASE("training on one cell makes it the least novel") {
    CoarseFineModel model = trained_on_cell(12, 800, 0.01, 7);
    double trained = intrinsic_reward(model, Observation{kObsDim, 12}).r_i;
    for (int hot = 0; hot < kObsDim; ++hot) {
        if (hot == 12) continue;
        CHECK(trained < intrinsic_reward(model, Observation{kObsDim, hot}).r_i);
    }
}

TEST_CASE("train_autoencoder: reward on the trained cell decreases monotonically after warm-up") {
    CoarseFineModel model = make_coarse_fine_model(kObsDim, 16, 8, 0.01, 9);
    std::vector<Observation> batch{Observation{kObsDim, 4}};
    std::vector<double> rewards;
    for (int i = 0; i < 120; ++i) {
        train_autoencoder(model, batch, 1e-3, 1.0, 0.5, static_cast<std::uint64_t>(i));
        rewards.push_back(intrinsic_reward(model, batch[0]).r_i);
    }
    for (std::size_t i = 11; i < rewards.size(); ++i) CHECK(rewards[i] <= rewards[i - 1] + 1e-9);
}

TEST_CASE("subsample proportion arithmetic") {
    CHECK(subsample_count(0.25, 128) == 32);
    CHECK(subsample_count(1.0, 7) == 7);
    CHECK(subsample_count(0.25, 2) == 1); // never zero
    CHECK_THROWS_AS(subsample_count(0.0, 10), Error);
    CHECK_THROWS_AS(subsample_count(1.5, 10), Error);
}

TEST_CASE("train_autoencoder: zero learning rate leaves parameters untouched") {
    CoarseFineModel model = make_coarse_fine_model(kObsDim, 16, 8, 0.01, 10);
    CoarseFineModel before = model;
    std::vector<Observation> batch;
    for (int i = 0; i < 8; ++i) batch.push_back(Observation{kObsDim, i});
    train_autoencoder(model, batch, 0.0, 0.25, 0.5, 3);
    for (std::size_t li = 0; li < model.net.layers.size(); ++li)
        CHECK(model.net.layers[li].w == before.net.layers[li].w);

    std::vector<Observation> empty;
    CHECK(!train_autoencoder(model, empty, 1e-3, 0.25, 0.5, 0).has_value());
}

TEST_CASE("normalize_intrinsic") {
    // constant stream: std collapses to 0 and the 1e-8 floor saturates r_hat
    RunningNormalizer norm;
    double r_hat = 0.0;
    for (int i = 0; i < 100; ++i) r_hat = normalize_intrinsic(norm, 2.0);
    CHECK(r_hat == 2.0 / 1e-8);

    // warm-up withholds rewards
    RunningNormalizer warm;
    warm.warmup_count = 10;
    CHECK(normalize_intrinsic(warm, 5.0) == 0.0);
    for (int i = 0; i < 9; ++i) CHECK(normalize_intrinsic(warm, 1.0 + i) == 0.0);
    CHECK(normalize_intrinsic(warm, 3.0) != 0.0);

    // unit-variance stream: post-warm-up normalized sample std near 1
    RunningNormalizer unit;
    unit.warmup_count = 100;
    Rng rng(12);
    std::vector<double> normalized;
    for (int i = 0; i < 10000; ++i) {
        // uniform on [0, sqrt(12)) has variance 1
        double u = rng.uniform() * std::sqrt(12.0);
        double r_hat = normalize_intrinsic(unit, u);
        if (i >= 100) normalized.push_back(r_hat);
    }
    double mean = 0.0;
    for (double v : normalized) mean += v;
    mean /= static_cast<double>(normalized.size());
    double var = 0.0;
    for (double v : normalized) var += (v - mean) * (v - mean);
    var /= static_cast<double>(normalized.size());
    double sd = std::sqrt(var);
    CHECK(sd > 0.8);
    CHECK(sd < 1.25);
}

TEST_CASE("latent sparsity profile") {
    CoarseFineModel model = make_coarse_fine_model(kObsDim, 16, 8, 0.01, 15);
    std::vector<Observation> obs{Observation{kObsDim, 3}, Observation{kObsDim, 3},
                                 Observation{kObsDim, 9}};
    std::vector<double> prof = latent_sparsity_profile(model, obs);
    REQUIRE(prof.size() == 3);
    CHECK(prof[0] == prof[1]); // duplicates identical

    // all-zero input through the zero-bias relu encoder gives zero sparsity
    std::vector<double> zeros(kObsDim, 0.0);
    ForwardCache cache;
    forward(model.net, InputView::of(zeros), cache);
    double l1 = 0.0;
    for (double a : cache.post[model.latent_layer]) l1 += std::abs(a);
    CHECK(l1 == 0.0);
}

TEST_CASE("sparsity separates the trained cell, its neighbor, and a far cell") {
    // 5x5 grid: cell 12 is the center, 13 its neighbor, 24 the far corner
    CoarseFineModel model = trained_on_cell(12, 1500, 0.02, 21);
    std::vector<double> prof = latent_sparsity_profile(
        model, {Observation{kObsDim, 12}, Observation{kObsDim, 13}, Observation{kObsDim, 24}});
    CHECK(std::abs(prof[0] - prof[1]) > 1e-6);
    CHECK(std::abs(prof[0] - prof[2]) > 1e-6);
    CHECK(std::abs(prof[1] - prof[2]) > 1e-6);
}

TEST_CASE("intrinsic reward equals the training loss at identical parameters") {
    Rng rng(33);
    for (int trial = 0; trial < 100; ++trial) {
        double lambda = (trial % 3 == 0) ? 0.0 : 0.01 * (1 + trial % 5);
        CoarseFineModel model = make_coarse_fine_model(
            kObsDim, 12, 6, lambda, 5000 + static_cast<std::uint64_t>(trial));
        Observation obs{kObsDim, static_cast<int>(rng.below(kObsDim))};
        IntrinsicReward r = intrinsic_reward(model, obs);

        Sample s;
        s.input = InputView::onehot(kObsDim, static_cast<std::size_t>(obs.hot));
        s.target = obs.to_vector();
        std::optional<std::size_t> latent =
            lambda > 0.0 ? std::optional<std::size_t>(model.latent_layer) : std::nullopt;
        LossResult res =
            loss_and_grad(model.net, std::vector<Sample>{s}, LossKind::mse, lambda, latent);
        CHECK(std::abs(res.loss - r.r_i) <= 1e-10);
    }
}

TEST_CASE("autoencoder gradient (with l1 term) matches finite differences") {
    Rng rng(44);
    CoarseFineModel model = make_coarse_fine_model(10, 8, 4, 0.02, 91);
    std::vector<Sample> batch;
    for (int i = 0; i < 3; ++i) {
        Observation obs{10, i * 3};
        Sample s;
        s.input = InputView::onehot(10, static_cast<std::size_t>(obs.hot));
        s.target = obs.to_vector();
        batch.push_back(std::move(s));
    }
    REQUIRE(!testutil::near_kink(model.net, batch, model.latent_layer, 1e-4));
    auto rep = testutil::fd_gradient_check(model.net, batch, LossKind::mse, model.lambda_l1,
                                           model.latent_layer, 80, rng);
    CHECK(rep.max_rel_err < 1e-4);
}

TEST_CASE("novelty monotonicity: visited cells score below unvisited ones on average") {
    for (std::uint64_t seed : {0ull, 1ull, 2ull}) {
        CoarseFineModel model = make_coarse_fine_model(kObsDim, 16, 8, 0.01, 7000 + seed);
        // visited set: left half of the toy grid
        std::vector<Observation> visited;
        for (int hot = 0; hot < kObsDim; ++hot)
            if (hot % 5 < 2) visited.push_back(Observation{kObsDim, hot});
        for (int i = 0; i < 600; ++i)
            train_autoencoder(model, visited, 1e-2, 1.0, 0.5, seed * 1000 + static_cast<std::uint64_t>(i));

        double mean_seen = 0.0, mean_unseen = 0.0;
        int n_seen = 0, n_unseen = 0;
        for (int hot = 0; hot < kObsDim; ++hot) {
            double r = intrinsic_reward(model, Observation{kObsDim, hot}).r_i;
            if (hot % 5 < 2) {
                mean_seen += r;
                ++n_seen;
            } else {
                mean_unseen += r;
                ++n_unseen;
            }
        }
        CHECK(mean_seen / n_seen < mean_unseen / n_unseen);
    }
}
