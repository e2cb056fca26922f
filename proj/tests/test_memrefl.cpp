#include <doctest.h>

#include "ada/error.hpp"
#include "ada/grid.hpp"
#include "ada/memrefl.hpp"
#include "ada/rng.hpp"

#include <cmath>

using namespace ada;

namespace {

constexpr int kObsDim = 48;

Trajectory one_step_traj(int hot, int action) {
    return finalize_trajectory({TrajStep{Observation{kObsDim, hot}, action, -1.0}},
                               TerminalKind::goal);
}

} // namespace

TEST_CASE("train_prediction overfits a single stored transition") {
    MemoryBuffer mbuf(4);
    mbuf.offer(one_step_traj(11, 2));
    PredictionNet net = make_prediction_net(kObsDim, 4, 32, 5);
    auto loss = train_prediction(net, mbuf, 2000, 1, 1e-2, 0.5, 99);
    REQUIRE(loss.has_value());
    auto [action, dist] = predict_action(net, Observation{kObsDim, 11});
    CHECK(action == 2);
    CHECK(dist[2] > 0.9);
    CHECK(net.train_steps == 2000);
}

TEST_CASE("train_prediction: zero updates leave parameters untouched") {
    MemoryBuffer mbuf(4);
    mbuf.offer(one_step_traj(3, 1));
    PredictionNet net = make_prediction_net(kObsDim, 4, 16, 6);
    PredictionNet before = net;
    auto loss = train_prediction(net, mbuf, 0, 1, 1e-2, 0.5, 1);
    REQUIRE(loss.has_value());
    for (std::size_t li = 0; li < net.net.layers.size(); ++li)
        CHECK(net.net.layers[li].w == before.net.layers[li].w);

    MemoryBuffer empty(4);
    CHECK(!train_prediction(net, empty, 10, 1, 1e-2, 0.5, 1).has_value());
}

TEST_CASE("train_prediction: conflicting actions settle near a coin flip") {
    MemoryBuffer mbuf(4);
    mbuf.offer(one_step_traj(20, 0));
    // same state, different action, same (return, length): both stay stored
    Trajectory other = one_step_traj(20, 1);
    REQUIRE(mbuf.offer(other));
    REQUIRE(mbuf.size() == 2);

    PredictionNet net = make_prediction_net(kObsDim, 4, 32, 8);
    train_prediction(net, mbuf, 5000, 1, 1e-3, 0.5, 123);
    auto [action, dist] = predict_action(net, Observation{kObsDim, 20});
    CHECK(std::abs(dist[0] - 0.5) < 0.1);
    CHECK(std::abs(dist[1] - 0.5) < 0.1);
}

TEST_CASE("predict_action: distribution and tie-breaking") {
    PredictionNet net = make_prediction_net(kObsDim, 4, 16, 9);
    // exact logit ties: argmax resolves to the lowest index
    for (Layer& l : net.net.layers) {
        std::fill(l.w.begin(), l.w.end(), 0.0);
        std::fill(l.b.begin(), l.b.end(), 0.0);
    }
    auto [action, dist] = predict_action(net, Observation{kObsDim, 0});
    CHECK(action == 0);
    double total = 0.0;
    for (double p : dist) {
        CHECK(p >= 0.0);
        total += p;
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);

    // purity
    PredictionNet trained = make_prediction_net(kObsDim, 4, 16, 10);
    auto a = predict_action(trained, Observation{kObsDim, 5});
    auto b = predict_action(trained, Observation{kObsDim, 5});
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
}

TEST_CASE("train_reflection pushes M pairs toward 1 and R pairs toward 0") {
    MemoryBuffer mbuf(4);
    std::vector<TrajStep> steps;
    steps.push_back(TrajStep{Observation{kObsDim, 1}, 0, -1.0});
    steps.push_back(TrajStep{Observation{kObsDim, 2}, 1, -1.0});
    steps.push_back(TrajStep{Observation{kObsDim, 3}, 2, -1.0});
    mbuf.offer(finalize_trajectory(steps, TerminalKind::goal));

    FailureBuffer rbuf(16);
    rbuf.push(FailurePair{Observation{kObsDim, 30}, 3});
    rbuf.push(FailurePair{Observation{kObsDim, 31}, 0});
    rbuf.push(FailurePair{Observation{kObsDim, 32}, 1});

    ReflectionNet net = make_reflection_net(kObsDim, 4, 32, 11);
    auto loss = train_reflection(net, mbuf, rbuf, 3000, 1, 1e-2, 0.5, 3, 77);
    REQUIRE(loss.has_value());

    // kappa = 0.85 cleared on stored pairs, mirror bound on failures
    CHECK(confidence(net, Observation{kObsDim, 1}, 0) > 0.85);
    CHECK(confidence(net, Observation{kObsDim, 2}, 1) > 0.85);
    CHECK(confidence(net, Observation{kObsDim, 3}, 2) > 0.85);
    CHECK(confidence(net, Observation{kObsDim, 30}, 3) < 0.15);
    CHECK(confidence(net, Observation{kObsDim, 31}, 0) < 0.15);
    CHECK(confidence(net, Observation{kObsDim, 32}, 1) < 0.15);
}

TEST_CASE("train_reflection: M-only training raises confidence above 0.9") {
    MemoryBuffer mbuf(4);
    mbuf.offer(one_step_traj(9, 3));
    FailureBuffer rbuf(8); // empty
    ReflectionNet net = make_reflection_net(kObsDim, 4, 32, 12);
    train_reflection(net, mbuf, rbuf, 2000, 1, 1e-2, 0.5, 8, 3);
    CHECK(confidence(net, Observation{kObsDim, 9}, 3) > 0.9);
}

TEST_CASE("train_reflection: a pair in both buffers settles near 0.5") {
    MemoryBuffer mbuf(4);
    mbuf.offer(one_step_traj(15, 2));
    FailureBuffer rbuf(4);
    rbuf.push(FailurePair{Observation{kObsDim, 15}, 2});

    ReflectionNet net = make_reflection_net(kObsDim, 4, 32, 13);
    train_reflection(net, mbuf, rbuf, 4000, 1, 1e-3, 0.5, 1, 5);
    CHECK(std::abs(confidence(net, Observation{kObsDim, 15}, 2) - 0.5) < 0.1);
}

TEST_CASE("train_reflection: zero updates leave parameters untouched, empty buffers skip") {
    MemoryBuffer mbuf(4);
    mbuf.offer(one_step_traj(2, 2));
    FailureBuffer rbuf(4);
    ReflectionNet net = make_reflection_net(kObsDim, 4, 16, 14);
    ReflectionNet before = net;
    REQUIRE(train_reflection(net, mbuf, rbuf, 0, 1, 1e-2, 0.5, 4, 0).has_value());
    for (std::size_t li = 0; li < net.net.layers.size(); ++li)
        CHECK(net.net.layers[li].w == before.net.layers[li].w);

    MemoryBuffer empty_m(4);
    FailureBuffer empty_r(4);
    CHECK(!train_reflection(net, empty_m, empty_r, 5, 1, 1e-2, 0.5, 4, 0).has_value());
}

TEST_CASE("reflection loss is non-increasing under full-batch gradient descent") {
    // the exact Eq-style batch: stored pairs toward 1, failures toward 0
    ReflectionNet net = make_reflection_net(kObsDim, 4, 16, 15);
    std::vector<Sample> batch;
    for (int i = 0; i < 4; ++i) {
        Sample s;
        s.input = reflection_input(net, Observation{kObsDim, i}, i % 4);
        s.target = {1.0};
        batch.push_back(std::move(s));
    }
    for (int i = 0; i < 4; ++i) {
        Sample s;
        s.input = reflection_input(net, Observation{kObsDim, 40 + i}, (i + 2) % 4);
        s.target = {0.0};
        batch.push_back(std::move(s));
    }
    double prev = 1e300;
    for (int i = 0; i < 100; ++i) {
        LossResult res = loss_and_grad(net.net, batch, LossKind::binary_target_mse);
        CHECK(res.loss <= prev + 1e-9);
        prev = res.loss;
        for (std::size_t li = 0; li < net.net.layers.size(); ++li) {
            for (std::size_t k = 0; k < net.net.layers[li].w.size(); ++k)
                net.net.layers[li].w[k] -= 1e-2 * res.grads.layers[li].w[k];
            for (std::size_t k = 0; k < net.net.layers[li].b.size(); ++k)
                net.net.layers[li].b[k] -= 1e-2 * res.grads.layers[li].b[k];
        }
    }
}

TEST_CASE("with an empty failure buffer, mean stored-pair confidence climbs") {
    MemoryBuffer mbuf(4);
    std::vector<TrajStep> steps;
    for (int i = 0; i < 5; ++i) steps.push_back(TrajStep{Observation{kObsDim, 7 + i}, i % 4, 0.0});
    mbuf.offer(finalize_trajectory(steps, TerminalKind::truncated));
    FailureBuffer rbuf(8);

    ReflectionNet net = make_reflection_net(kObsDim, 4, 32, 16);
    auto mean_conf = [&] {
        double total = 0.0;
        for (int i = 0; i < 5; ++i) total += confidence(net, Observation{kObsDim, 7 + i}, i % 4);
        return total / 5.0;
    };
    double prev = mean_conf();
    for (int step_i = 0; step_i < 100; ++step_i) {
        train_reflection(net, mbuf, rbuf, 1, 1, 1e-3, 0.5, 8, 1000 + static_cast<std::uint64_t>(step_i));
        double cur = mean_conf();
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("prediction net replays a demonstrated cliff path greedily") {
    GridSpec cliff = make_env("cliff_walking");
    std::vector<GridAction> plan;
    plan.push_back(GridAction::up);
    for (int i = 0; i < 11; ++i) plan.push_back(GridAction::right);
    plan.push_back(GridAction::down);

    auto [state, obs] = reset(cliff, 0);
    std::vector<TrajStep> steps;
    for (GridAction a : plan) {
        StepResult res = step(state, cliff, a);
        steps.push_back(TrajStep{obs, static_cast<int>(a), res.reward});
        state = res.state;
        obs = res.obs;
    }
    REQUIRE(state.done);
    MemoryBuffer mbuf(10);
    REQUIRE(mbuf.offer(finalize_trajectory(steps, TerminalKind::goal)));

    PredictionNet net = make_prediction_net(static_cast<std::size_t>(cliff.n_cells()), 4, 64, 17);
    train_prediction(net, mbuf, 3000, 1, 1e-2, 0.5, 31);

    // greedy rollout from the start must reproduce the demonstration
    auto [s2, o2] = reset(cliff, 0);
    std::vector<GridAction> taken;
    while (!s2.done && taken.size() < 20) {
        auto [action, dist] = predict_action(net, o2);
        taken.push_back(static_cast<GridAction>(action));
        StepResult res = step(s2, cliff, static_cast<GridAction>(action));
        s2 = res.state;
        o2 = res.obs;
    }
    CHECK(taken == plan);
    CHECK(s2.position == *cliff.goal);
}
