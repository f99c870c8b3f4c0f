#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "varl/numerics/matrix.hpp"

namespace varl::numerics {

enum class Activation { Identity, Tanh, Relu };

Activation parse_activation(std::string_view name);
std::string_view activation_name(Activation act);

/// Activations recorded by a batched forward pass, consumed by backward.
struct ForwardTape {
    // layers[0] is the input batch; layers[l + 1] is the output of layer l
    // after its activation.
    std::vector<Matrix> layers;

    const Matrix& input() const { return layers.front(); }
    const Matrix& output() const { return layers.back(); }
};

struct NetGradients {
    std::vector<double> parameters;
    std::vector<double> input;
};

/// Fully connected feed-forward network. Hidden layers share one activation;
/// the output layer is always linear.
///
/// All parameters live in one flat buffer laid out layer by layer as
/// [W_0 (out x in, row-major), b_0, W_1, b_1, ...], so optimizers, target
/// averaging and checkpoints treat a network as a single vector.
class DenseNet {
public:
    DenseNet() = default;

    /// Uniform fan-in initialization: every weight and bias of a layer with
    /// fan-in n is drawn from U(-1/sqrt(n), 1/sqrt(n)).
    DenseNet(std::vector<std::size_t> layer_sizes, Activation hidden, std::mt19937_64& rng);

    /// All parameters zero.
    DenseNet(std::vector<std::size_t> layer_sizes, Activation hidden);

    std::size_t input_size() const { return sizes_.front(); }
    std::size_t output_size() const { return sizes_.back(); }
    std::size_t layer_count() const { return sizes_.size() - 1; }
    const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
    Activation hidden_activation() const { return hidden_; }

    std::span<double> parameters() { return params_; }
    std::span<const double> parameters() const { return params_; }

    std::span<double> weights(std::size_t layer);
    std::span<const double> weights(std::size_t layer) const;
    std::span<double> bias(std::size_t layer);
    std::span<const double> bias(std::size_t layer) const;

    bool same_architecture(const DenseNet& other) const;

    std::vector<double> forward(std::span<const double> x) const;

    /// Batched forward; fills `tape` and returns its output.
    const Matrix& forward_batch(const Matrix& x, ForwardTape& tape) const;

    /// Accumulates dLoss/dParams into `param_grad` (which must have
    /// parameter_count() entries) for the batch recorded in `tape`. Returns
    /// dLoss/dInput when `want_input_grad`, otherwise an empty matrix.
    Matrix backward_batch(const ForwardTape& tape, const Matrix& upstream,
                          std::span<double> param_grad, bool want_input_grad = false) const;

    /// Single-sample gradients of <upstream, forward(x)>.
    NetGradients backward(std::span<const double> x, std::span<const double> upstream) const;

    bool operator==(const DenseNet&) const = default;

private:
    struct LayerOffsets {
        std::size_t weight;
        std::size_t bias;

        bool operator==(const LayerOffsets&) const = default;
    };

    void build_offsets();
    void activate(Matrix& m, bool last) const;

    std::vector<std::size_t> sizes_;
    Activation hidden_ = Activation::Tanh;
    std::vector<LayerOffsets> offsets_;
    std::vector<double> params_;
};

void require_finite(std::span<const double> values, std::string_view what);

}  // namespace varl::numerics
