#include "ada/curiosity.hpp"

#include "ada/error.hpp"
#include "ada/rng.hpp"

#include <cmath>

namespace ada {

CoarseFineModel make_coarse_fine_model(std::size_t obs_dim, std::size_t hidden,
                                       std::size_t latent, double lambda_l1,
                                       std::uint64_t seed, double adam_eps) {
    if (lambda_l1 < 0.0) throw validation_error("lambda_l1 must be non-negative");
    CoarseFineModel model;
    model.net = init_net({obs_dim, hidden, latent, hidden, obs_dim},
                         {Activation::relu, Activation::relu, Activation::relu,
                          Activation::sigmoid},
                         seed);
    model.latent_layer = 1; // encoder output
    model.lambda_l1 = lambda_l1;
    model.adam = init_adam(model.net, 0.9, 0.999, adam_eps);
    return model;
}

IntrinsicReward intrinsic_reward(const CoarseFineModel& model, const Observation& obs) {
    if (static_cast<std::size_t>(obs.dim) != model.obs_dim())
        throw validation_error("intrinsic_reward: observation dimension mismatch");
    ForwardCache cache;
    const std::vector<double>& recon = forward(
        model.net, InputView::onehot(static_cast<std::size_t>(obs.dim),
                                     static_cast<std::size_t>(obs.hot)),
        cache);

    IntrinsicReward out;
    for (std::size_t i = 0; i < recon.size(); ++i) {
        double target = (static_cast<std::int64_t>(i) == static_cast<std::int64_t>(obs.hot)) ? 1.0 : 0.0;
        double d = recon[i] - target;
        out.recon_err += 0.5 * d * d;
    }
    const std::vector<double>& latent = cache.post[model.latent_layer];
    for (double a : latent) out.sparsity += std::abs(a);
    out.r_i = out.recon_err + model.lambda_l1 * out.sparsity;
    return out;
}

std::size_t subsample_count(double proportion, std::size_t n) {
    if (!(proportion > 0.0 && proportion <= 1.0))
        throw validation_error("proportion must be in (0, 1]");
    std::size_t k = static_cast<std::size_t>(std::lround(proportion * static_cast<double>(n)));
    if (k == 0) k = 1;
    if (k > n) k = n;
    return k;
}

std::optional<double> train_autoencoder(CoarseFineModel& model,
                                        const std::vector<Observation>& obs_batch, double lr,
                                        double proportion, double clip_norm,
                                        std::uint64_t rng_seed) {
    if (obs_batch.empty()) return std::nullopt;
    std::size_t k = subsample_count(proportion, obs_batch.size());
    Rng rng(split_seed(rng_seed, "ae_subsample"));
    std::vector<std::size_t> picks = sample_without_replacement(rng, obs_batch.size(), k);

    std::vector<Sample> batch;
    batch.reserve(k);
    for (std::size_t idx : picks) {
        const Observation& obs = obs_batch[idx];
        if (static_cast<std::size_t>(obs.dim) != model.obs_dim())
            throw validation_error("train_autoencoder: observation dimension mismatch");
        Sample s;
        s.input = InputView::onehot(static_cast<std::size_t>(obs.dim),
                                    static_cast<std::size_t>(obs.hot));
        s.target = obs.to_vector();
        batch.push_back(std::move(s));
    }

    std::optional<std::size_t> latent =
        model.lambda_l1 > 0.0 ? std::optional<std::size_t>(model.latent_layer) : std::nullopt;
    LossResult res = loss_and_grad(model.net, batch, LossKind::mse,
                                   model.lambda_l1, latent);
    clip_grad_norm(res.grads, clip_norm);
    adam_step(model.net, res.grads, model.adam, lr);
    model.train_steps += 1;
    return res.loss;
}

std::vector<double> latent_sparsity_profile(const CoarseFineModel& model,
                                            const std::vector<Observation>& obs_list) {
    std::vector<double> out;
    out.reserve(obs_list.size());
    ForwardCache cache;
    for (const Observation& obs : obs_list) {
        forward(model.net, InputView::onehot(static_cast<std::size_t>(obs.dim),
                                             static_cast<std::size_t>(obs.hot)),
                cache);
        double l1 = 0.0;
        for (double a : cache.post[model.latent_layer]) l1 += std::abs(a);
        out.push_back(l1);
    }
    return out;
}

double normalize_intrinsic(RunningNormalizer& norm, double r_i) {
    norm.count += 1.0;
    double delta = r_i - norm.mean;
    norm.mean += delta / norm.count;
    norm.m2 += delta * (r_i - norm.mean);
    if (norm.count <= norm.warmup_count) return 0.0;
    double std_dev = std::sqrt(norm.variance());
    return r_i / std::max(std_dev, 1e-8);
}

} // namespace ada
