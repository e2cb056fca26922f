#pragma once

#include "ada/memory.hpp"
#include "ada/net.hpp"

#include <cstdint>
#include <optional>
#include <utility>

namespace ada {

/// Supervised action predictor distilled from stored trajectories; softmax
/// head over the action set.
struct PredictionNet : TrainableNet {};

/// Confidence scorer over (state, action) pairs; sigmoid scalar head. Input
/// encoding is the observation concatenated with a one-hot action.
struct ReflectionNet : TrainableNet {};

PredictionNet make_prediction_net(std::size_t obs_dim, std::size_t n_actions,
                                  std::size_t hidden, std::uint64_t seed,
                                  double adam_eps = 1e-8);
ReflectionNet make_reflection_net(std::size_t obs_dim, std::size_t n_actions,
                                  std::size_t hidden, std::uint64_t seed,
                                  double adam_eps = 1e-8);

InputView reflection_input(const ReflectionNet& net, const Observation& obs, int action);

/// `updates` gradient steps, each on `traj_batch` uniformly sampled
/// trajectories, minimizing cross-entropy against the stored actions. Returns
/// the final step's mean loss, or nullopt when the buffer is empty (skipped).
std::optional<double> train_prediction(PredictionNet& net, const MemoryBuffer& mbuf,
                                       int updates, int traj_batch, double lr, double clip_norm,
                                       std::uint64_t rng_seed);

/// Greedy action (ties resolved to the lowest index) and the full distribution.
std::pair<int, std::vector<double>> predict_action(const PredictionNet& net,
                                                   const Observation& obs);

/// `updates` gradient steps on mixed minibatches: pairs of `traj_batch`
/// sampled trajectories with target 1 plus `failure_batch` failure pairs with
/// target 0. Returns the final step's mean loss; nullopt when both buffers
/// are empty.
std::optional<double> train_reflection(ReflectionNet& net, const MemoryBuffer& mbuf,
                                       const FailureBuffer& rbuf, int updates, int traj_batch,
                                       double lr, double clip_norm, std::size_t failure_batch,
                                       std::uint64_t rng_seed);

/// C(s, a) in (0, 1).
double confidence(const ReflectionNet& net, const Observation& obs, int action);

} // namespace ada
