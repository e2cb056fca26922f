#pragma once

#include "ada/grid.hpp"
#include "ada/net.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ada {

/// Autoencoder whose per-state loss is the intrinsic reward: reconstruction
/// error plus an l1 sparsity penalty on the latent code. Encoder and decoder
/// are stored stacked; `latent_layer` marks the encoder's output.
struct CoarseFineModel {
    Net net;                   // encoder layers then decoder layers
    std::size_t latent_layer = 0;
    double lambda_l1 = 0.0;
    AdamState adam;
    std::int64_t train_steps = 0;

    std::size_t obs_dim() const { return net.in_dim(); }
    std::size_t latent_dim() const { return net.layers[latent_layer].out; }
};

CoarseFineModel make_coarse_fine_model(std::size_t obs_dim, std::size_t hidden,
                                       std::size_t latent, double lambda_l1,
                                       std::uint64_t seed, double adam_eps = 1e-8);

struct IntrinsicReward {
    double r_i = 0.0;
    double recon_err = 0.0; // 0.5 * squared reconstruction error
    double sparsity = 0.0;  // l1 norm of the latent code
};

/// Evaluates the model loss at `obs` without touching parameters:
/// r_i = 0.5*||s - g(f(s))||^2 + lambda * ||f(s)||_1.
IntrinsicReward intrinsic_reward(const CoarseFineModel& model, const Observation& obs);

/// One gradient step on a uniformly chosen fraction of the batch. Returns the
/// mean loss over the subsample, or nullopt when the batch is empty.
std::optional<double> train_autoencoder(CoarseFineModel& model,
                                        const std::vector<Observation>& obs_batch, double lr,
                                        double proportion, double clip_norm,
                                        std::uint64_t rng_seed);

/// Number of samples a proportion selects from a batch of n (at least 1).
std::size_t subsample_count(double proportion, std::size_t n);

/// ||f(s)||_1 per observation, in input order.
std::vector<double> latent_sparsity_profile(const CoarseFineModel& model,
                                            const std::vector<Observation>& obs_list);

/// Welford running scale estimate for intrinsic rewards. Rewards are withheld
/// (normalized to 0) for the first `warmup_count` observations.
struct RunningNormalizer {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;
    double warmup_count = 0.0;

    double variance() const { return count > 0.0 ? m2 / count : 0.0; }
};

/// Updates the statistics with r_i and returns r_i / max(std, 1e-8), or 0
/// while still inside the warm-up window.
double normalize_intrinsic(RunningNormalizer& norm, double r_i);

} // namespace ada
