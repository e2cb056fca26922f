#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ada {

enum class Activation : std::uint8_t { identity = 0, relu = 1, sigmoid = 2, softmax = 3 };

struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> w; // out x in, row-major
    std::vector<double> b; // out
    Activation act = Activation::identity;
};

/// A feed-forward stack. Layer dimensions chain; softmax only as the head.
struct Net {
    std::vector<Layer> layers;

    std::size_t in_dim() const { return layers.empty() ? 0 : layers.front().in; }
    std::size_t out_dim() const { return layers.empty() ? 0 : layers.back().out; }
    std::size_t param_count() const;
};

/// Network input: either a dense vector or a {0,1} vector given by one or two
/// hot indices. The sparse form produces the same floating-point results as
/// the equivalent dense vector and skips the first-layer matvec.
struct InputView {
    const double* dense = nullptr;
    std::size_t size = 0;
    std::array<std::int64_t, 2> hots{-1, -1};

    static InputView of(std::span<const double> v) {
        InputView in;
        in.dense = v.data();
        in.size = v.size();
        return in;
    }
    static InputView onehot(std::size_t dim, std::size_t index) {
        InputView in;
        in.size = dim;
        in.hots[0] = static_cast<std::int64_t>(index);
        return in;
    }
    static InputView twohot(std::size_t dim, std::size_t i, std::size_t j) {
        InputView in;
        in.size = dim;
        in.hots[0] = static_cast<std::int64_t>(i);
        in.hots[1] = static_cast<std::int64_t>(j);
        return in;
    }
    bool sparse() const { return dense == nullptr; }
};

struct ForwardCache {
    InputView input;                       // non-owning; valid until backward
    std::vector<std::vector<double>> pre;  // pre-activations per layer
    std::vector<std::vector<double>> post; // post-activations per layer
    const std::vector<double>& output() const { return post.back(); }
};

struct LayerGrad {
    std::vector<double> w;
    std::vector<double> b;
};

struct Grads {
    std::vector<LayerGrad> layers;

    static Grads zeros_like(const Net& net);
    void zero();
    void scale(double alpha);
};

struct AdamState {
    std::vector<LayerGrad> first_moment;
    std::vector<LayerGrad> second_moment;
    std::int64_t step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

enum class LossKind { cross_entropy, mse, binary_target_mse };

struct Sample {
    InputView input;
    std::vector<double> target;
};

/// Weights uniform in +-1/sqrt(fan_in), biases zero, deterministic per seed.
Net init_net(const std::vector<std::size_t>& layer_sizes,
             const std::vector<Activation>& activations, std::uint64_t seed);

/// Runs the stack, filling `cache`; returns the output activation.
const std::vector<double>& forward(const Net& net, const InputView& input, ForwardCache& cache);

/// Convenience overload allocating its own cache.
std::vector<double> forward(const Net& net, const InputView& input);

/// Distinguishes what the caller differentiated: the head's post-activation
/// output, or its pre-activation (used by the fused softmax/cross-entropy path).
enum class GradAt { output, preactivation };

/// Backpropagates `grad_head` through the cached forward pass, accumulating
/// parameter gradients into `grads`. When l1_coeff > 0, adds the subgradient
/// of l1_coeff * ||post[l1_layer]||_1 at that layer (sign(0) taken as 0).
/// Returns dLoss/dInput when `want_input_grad` is set (dense inputs only).
std::optional<std::vector<double>> backward(const Net& net, const ForwardCache& cache,
                                            std::span<const double> grad_head, GradAt at,
                                            Grads& grads, bool want_input_grad = false,
                                            std::size_t l1_layer = SIZE_MAX,
                                            double l1_coeff = 0.0);

struct LossResult {
    double loss = 0.0;
    Grads grads;
};

/// Mean over the batch of the per-example loss, plus l1 penalty on the
/// designated layer's activation when l1_latent_coeff > 0. Gradients are the
/// exact analytic gradients of the returned scalar.
LossResult loss_and_grad(const Net& net, std::span<const Sample> batch, LossKind kind,
                         double l1_latent_coeff = 0.0,
                         std::optional<std::size_t> latent_layer_index = std::nullopt);

AdamState init_adam(const Net& net, double beta1 = 0.9, double beta2 = 0.999,
                    double epsilon = 1e-8);

/// Bias-corrected Adam update in place. Throws numerical_error (naming the
/// layer) on non-finite gradients.
void adam_step(Net& net, const Grads& grads, AdamState& state, double lr);

double grad_norm(const Grads& grads);

/// Rescales grads so the global L2 norm is at most max_norm; returns the
/// pre-clip norm.
double clip_grad_norm(Grads& grads, double max_norm);

/// Parameters plus optimizer state; the unit every trainer owns.
struct TrainableNet {
    Net net;
    AdamState adam;
    std::int64_t train_steps = 0;
};

} // namespace ada
