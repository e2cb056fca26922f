#include "ada/memrefl.hpp"

#include "ada/error.hpp"
#include "ada/rng.hpp"

#include <string>

namespace ada {

PredictionNet make_prediction_net(std::size_t obs_dim, std::size_t n_actions,
                                  std::size_t hidden, std::uint64_t seed, double adam_eps) {
    PredictionNet net;
    net.net = init_net({obs_dim, hidden, hidden, n_actions},
                       {Activation::relu, Activation::relu, Activation::softmax}, seed);
    net.adam = init_adam(net.net, 0.9, 0.999, adam_eps);
    return net;
}

ReflectionNet make_reflection_net(std::size_t obs_dim, std::size_t n_actions,
                                  std::size_t hidden, std::uint64_t seed, double adam_eps) {
    ReflectionNet net;
    net.net = init_net({obs_dim + n_actions, hidden, hidden, 1},
                       {Activation::relu, Activation::relu, Activation::sigmoid}, seed);
    net.adam = init_adam(net.net, 0.9, 0.999, adam_eps);
    return net;
}

InputView reflection_input(const ReflectionNet& net, const Observation& obs, int action) {
    std::size_t in_dim = net.net.in_dim();
    std::size_t n_actions = in_dim - static_cast<std::size_t>(obs.dim);
    if (action < 0 || static_cast<std::size_t>(action) >= n_actions)
        throw validation_error("reflection_input: action index out of range");
    return InputView::twohot(in_dim, static_cast<std::size_t>(obs.hot),
                             static_cast<std::size_t>(obs.dim) + static_cast<std::size_t>(action));
}

std::optional<double> train_prediction(PredictionNet& net, const MemoryBuffer& mbuf,
                                       int updates, int traj_batch, double lr, double clip_norm,
                                       std::uint64_t rng_seed) {
    if (mbuf.empty()) return std::nullopt;
    const std::size_t n_actions = net.net.out_dim();
    double last_loss = 0.0;
    for (int u = 0; u < updates; ++u) {
        std::vector<Sample> batch;
        for (int tb = 0; tb < traj_batch; ++tb) {
            const Trajectory& traj = mbuf.sample(
                split_seed(rng_seed, "pred_update",
                           static_cast<std::uint64_t>(u) * static_cast<std::uint64_t>(traj_batch) + tb));
            for (const TrajStep& step : traj.steps) {
                Sample s;
                s.input = InputView::onehot(static_cast<std::size_t>(step.obs.dim),
                                            static_cast<std::size_t>(step.obs.hot));
                s.target.assign(n_actions, 0.0);
                s.target[static_cast<std::size_t>(step.action)] = 1.0;
                batch.push_back(std::move(s));
            }
        }
        LossResult lr_res = loss_and_grad(net.net, batch, LossKind::cross_entropy);
        clip_grad_norm(lr_res.grads, clip_norm);
        adam_step(net.net, lr_res.grads, net.adam, lr);
        net.train_steps += 1;
        last_loss = lr_res.loss;
    }
    return last_loss;
}

std::pair<int, std::vector<double>> predict_action(const PredictionNet& net,
                                                   const Observation& obs) {
    std::vector<double> dist = forward(
        net.net, InputView::onehot(static_cast<std::size_t>(obs.dim),
                                   static_cast<std::size_t>(obs.hot)));
    int best = 0;
    for (std::size_t a = 1; a < dist.size(); ++a)
        if (dist[a] > dist[best]) best = static_cast<int>(a);
    return {best, std::move(dist)};
}

std::optional<double> train_reflection(ReflectionNet& net, const MemoryBuffer& mbuf,
                                       const FailureBuffer& rbuf, int updates, int traj_batch,
                                       double lr, double clip_norm, std::size_t failure_batch,
                                       std::uint64_t rng_seed) {
    if (mbuf.empty() && rbuf.empty()) return std::nullopt;
    double last_loss = 0.0;
    for (int u = 0; u < updates; ++u) {
        std::vector<Sample> batch;
        if (!mbuf.empty()) {
            for (int tb = 0; tb < traj_batch; ++tb) {
                const Trajectory& traj = mbuf.sample(
                    split_seed(rng_seed, "refl_m_update",
                               static_cast<std::uint64_t>(u) * static_cast<std::uint64_t>(traj_batch) + tb));
                for (const TrajStep& step : traj.steps) {
                    Sample s;
                    s.input = reflection_input(net, step.obs, step.action);
                    s.target = {1.0};
                    batch.push_back(std::move(s));
                }
            }
        }
        if (!rbuf.empty() && failure_batch > 0) {
            std::vector<FailurePair> fails =
                rbuf.sample(failure_batch, split_seed(rng_seed, "refl_r_update", u));
            for (const FailurePair& f : fails) {
                Sample s;
                s.input = reflection_input(net, f.obs, f.action);
                s.target = {0.0};
                batch.push_back(std::move(s));
            }
        }
        LossResult lr_res = loss_and_grad(net.net, batch, LossKind::binary_target_mse);
        clip_grad_norm(lr_res.grads, clip_norm);
        adam_step(net.net, lr_res.grads, net.adam, lr);
        net.train_steps += 1;
        last_loss = lr_res.loss;
    }
    return last_loss;
}

double confidence(const ReflectionNet& net, const Observation& obs, int action) {
    return forward(net.net, reflection_input(net, obs, action))[0];
}

} // namespace ada
