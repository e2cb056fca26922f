#include "ada/net.hpp"

#include "ada/error.hpp"
#include "ada/kernels.hpp"
#include "ada/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ada {

namespace {

constexpr double kSigmoidClamp = 1e-12;
constexpr double kLogClamp = 1e-12;

void apply_activation(Activation act, const std::vector<double>& pre, std::vector<double>& post) {
    const std::size_t n = pre.size();
    post.resize(n);
    switch (act) {
        case Activation::identity:
            std::copy(pre.begin(), pre.end(), post.begin());
            break;
        case Activation::relu:
            for (std::size_t i = 0; i < n; ++i) post[i] = pre[i] > 0.0 ? pre[i] : 0.0;
            break;
        case Activation::sigmoid:
            for (std::size_t i = 0; i < n; ++i) {
                double s = 1.0 / (1.0 + std::exp(-pre[i]));
                post[i] = std::min(1.0 - kSigmoidClamp, std::max(kSigmoidClamp, s));
            }
            break;
        case Activation::softmax: {
            double m = *std::max_element(pre.begin(), pre.end());
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                post[i] = std::exp(pre[i] - m);
                total += post[i];
            }
            for (std::size_t i = 0; i < n; ++i) post[i] /= total;
            break;
        }
    }
}

// dL/dpre from dL/dpost for one layer
void activation_backward(Activation act, const std::vector<double>& pre,
                         const std::vector<double>& post, const std::vector<double>& dpost,
                         std::vector<double>& dpre) {
    const std::size_t n = pre.size();
    dpre.resize(n);
    switch (act) {
        case Activation::identity:
            std::copy(dpost.begin(), dpost.end(), dpre.begin());
            break;
        case Activation::relu:
            for (std::size_t i = 0; i < n; ++i) dpre[i] = pre[i] > 0.0 ? dpost[i] : 0.0;
            break;
        case Activation::sigmoid:
            for (std::size_t i = 0; i < n; ++i) dpre[i] = dpost[i] * post[i] * (1.0 - post[i]);
            break;
        case Activation::softmax: {
            double inner = kern::dot(dpost.data(), post.data(), n);
            for (std::size_t i = 0; i < n; ++i) dpre[i] = post[i] * (dpost[i] - inner);
            break;
        }
    }
}

void layer_forward(const Layer& layer, const InputView& in, std::vector<double>& pre) {
    pre.resize(layer.out);
    if (in.sparse()) {
        for (std::size_t r = 0; r < layer.out; ++r) {
            double acc = 0.0;
            for (std::int64_t h : in.hots)
                if (h >= 0) acc += layer.w[r * layer.in + static_cast<std::size_t>(h)];
            pre[r] = acc + layer.b[r];
        }
    } else {
        kern::matvec(layer.w.data(), layer.out, layer.in, in.dense, layer.b.data(), pre.data());
    }
}

} // namespace

std::size_t Net::param_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers) n += l.w.size() + l.b.size();
    return n;
}

Grads Grads::zeros_like(const Net& net) {
    Grads g;
    g.layers.resize(net.layers.size());
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        g.layers[i].w.assign(net.layers[i].w.size(), 0.0);
        g.layers[i].b.assign(net.layers[i].b.size(), 0.0);
    }
    return g;
}

void Grads::zero() {
    for (LayerGrad& l : layers) {
        std::fill(l.w.begin(), l.w.end(), 0.0);
        std::fill(l.b.begin(), l.b.end(), 0.0);
    }
}

void Grads::scale(double alpha) {
    for (LayerGrad& l : layers) {
        kern::scal(alpha, l.w.data(), l.w.size());
        kern::scal(alpha, l.b.data(), l.b.size());
    }
}

Net init_net(const std::vector<std::size_t>& layer_sizes,
             const std::vector<Activation>& activations, std::uint64_t seed) {
    if (layer_sizes.size() < 2)
        throw validation_error("init_net: need at least input and output sizes");
    if (activations.size() != layer_sizes.size() - 1)
        throw validation_error("init_net: one activation per layer required");
    for (std::size_t i = 0; i + 1 < activations.size(); ++i)
        if (activations[i] == Activation::softmax)
            throw validation_error("init_net: softmax only allowed as the final activation");

    Net net;
    Rng rng(split_seed(seed, "init_net"));
    for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
        Layer layer;
        layer.in = layer_sizes[i];
        layer.out = layer_sizes[i + 1];
        layer.act = activations[i];
        layer.w.resize(layer.in * layer.out);
        layer.b.assign(layer.out, 0.0);
        double scale = 1.0 / std::sqrt(static_cast<double>(layer.in));
        for (double& w : layer.w) w = (2.0 * rng.uniform() - 1.0) * scale;
        net.layers.push_back(std::move(layer));
    }
    return net;
}

const std::vector<double>& forward(const Net& net, const InputView& input, ForwardCache& cache) {
    if (net.layers.empty()) throw validation_error("forward: empty network");
    if (input.size != net.in_dim())
        throw validation_error("forward: input size " + std::to_string(input.size) +
                               " does not match network fan-in " + std::to_string(net.in_dim()));
    cache.input = input;
    cache.pre.resize(net.layers.size());
    cache.post.resize(net.layers.size());
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const Layer& layer = net.layers[i];
        InputView in = (i == 0)
                           ? input
                           : InputView::of(std::span<const double>(cache.post[i - 1]));
        layer_forward(layer, in, cache.pre[i]);
        apply_activation(layer.act, cache.pre[i], cache.post[i]);
    }
    return cache.post.back();
}

std::vector<double> forward(const Net& net, const InputView& input) {
    ForwardCache cache;
    forward(net, input, cache);
    return cache.post.back();
}

std::optional<std::vector<double>> backward(const Net& net, const ForwardCache& cache,
                                            std::span<const double> grad_head, GradAt at,
                                            Grads& grads, bool want_input_grad,
                                            std::size_t l1_layer, double l1_coeff) {
    const std::size_t L = net.layers.size();
    if (grads.layers.size() != L) throw validation_error("backward: grads shape mismatch");
    if (grad_head.size() != net.out_dim()) throw validation_error("backward: head grad size mismatch");

    std::vector<double> dpost(grad_head.begin(), grad_head.end());
    std::vector<double> dpre;
    std::vector<double> dinput;
    for (std::size_t li = L; li-- > 0;) {
        const Layer& layer = net.layers[li];
        if (l1_coeff > 0.0 && li == l1_layer) {
            // subgradient of l1_coeff * ||post||_1; sign(0) = 0
            for (std::size_t i = 0; i < layer.out; ++i) {
                double a = cache.post[li][i];
                if (a > 0.0) dpost[i] += l1_coeff;
                else if (a < 0.0) dpost[i] -= l1_coeff;
            }
        }
        if (li == L - 1 && at == GradAt::preactivation) {
            dpre = dpost;
        } else {
            activation_backward(layer.act, cache.pre[li], cache.post[li], dpost, dpre);
        }

        LayerGrad& lg = grads.layers[li];
        kern::axpy(1.0, dpre.data(), lg.b.data(), layer.out);
        if (li == 0 && cache.input.sparse()) {
            for (std::int64_t h : cache.input.hots) {
                if (h < 0) continue;
                double* col = lg.w.data() + static_cast<std::size_t>(h);
                for (std::size_t r = 0; r < layer.out; ++r) col[r * layer.in] += dpre[r];
            }
            if (want_input_grad)
                throw validation_error("backward: input gradient undefined for sparse inputs");
        } else {
            const double* x = (li == 0) ? cache.input.dense : cache.post[li - 1].data();
            kern::ger(1.0, dpre.data(), layer.out, x, layer.in, lg.w.data());
        }

        if (li > 0) {
            dpost.resize(layer.in);
            kern::matvec_t(layer.w.data(), layer.out, layer.in, dpre.data(), dpost.data());
        } else if (want_input_grad) {
            dinput.resize(layer.in);
            kern::matvec_t(layer.w.data(), layer.out, layer.in, dpre.data(), dinput.data());
        }
    }
    if (want_input_grad) return dinput;
    return std::nullopt;
}

LossResult loss_and_grad(const Net& net, std::span<const Sample> batch, LossKind kind,
                         double l1_latent_coeff, std::optional<std::size_t> latent_layer_index) {
    if (batch.empty()) throw validation_error("loss_and_grad: empty batch");
    if (l1_latent_coeff < 0.0) throw validation_error("loss_and_grad: negative l1 coefficient");
    if ((l1_latent_coeff > 0.0) != latent_layer_index.has_value())
        throw validation_error("loss_and_grad: latent layer index required iff l1 coefficient > 0");
    if (latent_layer_index && *latent_layer_index >= net.layers.size())
        throw validation_error("loss_and_grad: latent layer index out of range");
    if (kind == LossKind::cross_entropy && net.layers.back().act != Activation::softmax)
        throw contract_error("cross_entropy requires a softmax head");

    const double inv_b = 1.0 / static_cast<double>(batch.size());
    const std::size_t out_dim = net.out_dim();
    LossResult result;
    result.grads = Grads::zeros_like(net);

    ForwardCache cache;
    std::vector<double> grad_head(out_dim);
    for (const Sample& sample : batch) {
        if (sample.target.size() != out_dim)
            throw validation_error("loss_and_grad: target size mismatch");
        const std::vector<double>& out = forward(net, sample.input, cache);

        double example_loss = 0.0;
        GradAt at = GradAt::output;
        switch (kind) {
            case LossKind::cross_entropy: {
                for (std::size_t i = 0; i < out_dim; ++i) {
                    if (sample.target[i] != 0.0)
                        example_loss -= sample.target[i] * std::log(std::max(out[i], kLogClamp));
                    grad_head[i] = (out[i] - sample.target[i]) * inv_b;
                }
                at = GradAt::preactivation; // fused softmax + cross-entropy
                break;
            }
            case LossKind::mse: {
                for (std::size_t i = 0; i < out_dim; ++i) {
                    double d = out[i] - sample.target[i];
                    example_loss += 0.5 * d * d;
                    grad_head[i] = d * inv_b;
                }
                break;
            }
            case LossKind::binary_target_mse: {
                for (std::size_t i = 0; i < out_dim; ++i) {
                    double d = out[i] - sample.target[i];
                    example_loss += d * d;
                    grad_head[i] = 2.0 * d * inv_b;
                }
                break;
            }
        }
        if (l1_latent_coeff > 0.0) {
            const std::vector<double>& latent = cache.post[*latent_layer_index];
            double l1 = 0.0;
            for (double a : latent) l1 += std::abs(a);
            example_loss += l1_latent_coeff * l1;
        }
        result.loss += example_loss * inv_b;
        backward(net, cache, grad_head, at, result.grads, false,
                 latent_layer_index.value_or(SIZE_MAX), l1_latent_coeff * inv_b);
    }
    return result;
}

AdamState init_adam(const Net& net, double beta1, double beta2, double epsilon) {
    AdamState st;
    st.beta1 = beta1;
    st.beta2 = beta2;
    st.epsilon = epsilon;
    Grads z = Grads::zeros_like(net);
    st.first_moment = z.layers;
    st.second_moment = std::move(z.layers);
    return st;
}

void adam_step(Net& net, const Grads& grads, AdamState& state, double lr) {
    if (grads.layers.size() != net.layers.size())
        throw validation_error("adam_step: grads shape mismatch");
    for (std::size_t i = 0; i < grads.layers.size(); ++i) {
        for (double g : grads.layers[i].w)
            if (!std::isfinite(g))
                throw numerical_error("non-finite weight gradient in layer " + std::to_string(i));
        for (double g : grads.layers[i].b)
            if (!std::isfinite(g))
                throw numerical_error("non-finite bias gradient in layer " + std::to_string(i));
    }
    state.step_count += 1;
    double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
    double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        Layer& layer = net.layers[i];
        kern::adam(layer.w.data(), grads.layers[i].w.data(), state.first_moment[i].w.data(),
                   state.second_moment[i].w.data(), layer.w.size(), lr, state.beta1, state.beta2,
                   state.epsilon, bc1, bc2);
        kern::adam(layer.b.data(), grads.layers[i].b.data(), state.first_moment[i].b.data(),
                   state.second_moment[i].b.data(), layer.b.size(), lr, state.beta1, state.beta2,
                   state.epsilon, bc1, bc2);
    }
}

double grad_norm(const Grads& grads) {
    double total = 0.0;
    for (const LayerGrad& l : grads.layers) {
        total += kern::sumsq(l.w.data(), l.w.size());
        total += kern::sumsq(l.b.data(), l.b.size());
    }
    return std::sqrt(total);
}

double clip_grad_norm(Grads& grads, double max_norm) {
    if (!(max_norm > 0.0)) throw validation_error("clip_grad_norm: max_norm must be positive");
    double norm = grad_norm(grads);
    if (norm > max_norm) grads.scale(max_norm / norm);
    return norm;
}

} // namespace ada
