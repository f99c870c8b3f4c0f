#include "varl/numerics/dense_net.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "varl/errors.hpp"
#include "varl/numerics/kernels.hpp"

namespace varl::numerics {

Activation parse_activation(std::string_view name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "relu") return Activation::Relu;
    if (name == "identity") return Activation::Identity;
    throw ConfigError("unknown activation '" + std::string(name) + "'");
}

std::string_view activation_name(Activation act) {
    switch (act) {
        case Activation::Tanh: return "tanh";
        case Activation::Relu: return "relu";
        case Activation::Identity: return "identity";
    }
    return "identity";
}

void require_finite(std::span<const double> values, std::string_view what) {
    for (double v : values) {
        if (!std::isfinite(v)) throw NumericError("non-finite value in " + std::string(what));
    }
}

DenseNet::DenseNet(std::vector<std::size_t> layer_sizes, Activation hidden)
    : sizes_(std::move(layer_sizes)), hidden_(hidden) {
    if (sizes_.size() < 2) throw DimensionError("a network needs at least an input and an output size");
    if (std::any_of(sizes_.begin(), sizes_.end(), [](std::size_t s) { return s == 0; })) {
        throw DimensionError("layer sizes must be positive");
    }
    build_offsets();
}

DenseNet::DenseNet(std::vector<std::size_t> layer_sizes, Activation hidden, std::mt19937_64& rng)
    : DenseNet(std::move(layer_sizes), hidden) {
    for (std::size_t l = 0; l < layer_count(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (double& w : weights(l)) w = dist(rng);
        for (double& b : bias(l)) b = dist(rng);
    }
}

void DenseNet::build_offsets() {
    offsets_.clear();
    std::size_t cursor = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const std::size_t w = cursor;
        cursor += sizes_[l] * sizes_[l + 1];
        offsets_.push_back({w, cursor});
        cursor += sizes_[l + 1];
    }
    params_.assign(cursor, 0.0);
}

std::span<double> DenseNet::weights(std::size_t layer) {
    return {params_.data() + offsets_.at(layer).weight, sizes_[layer] * sizes_[layer + 1]};
}
std::span<const double> DenseNet::weights(std::size_t layer) const {
    return {params_.data() + offsets_.at(layer).weight, sizes_[layer] * sizes_[layer + 1]};
}
std::span<double> DenseNet::bias(std::size_t layer) {
    return {params_.data() + offsets_.at(layer).bias, sizes_[layer + 1]};
}
std::span<const double> DenseNet::bias(std::size_t layer) const {
    return {params_.data() + offsets_.at(layer).bias, sizes_[layer + 1]};
}

bool DenseNet::same_architecture(const DenseNet& other) const {
    return sizes_ == other.sizes_ && hidden_ == other.hidden_;
}

void DenseNet::activate(Matrix& m, bool last) const {
    if (last) return;
    switch (hidden_) {
        case Activation::Tanh:
            for (double& v : m.values()) v = std::tanh(v);
            break;
        case Activation::Relu:
            for (double& v : m.values()) v = v > 0.0 ? v : 0.0;
            break;
        case Activation::Identity:
            break;
    }
}

std::vector<double> DenseNet::forward(std::span<const double> x) const {
    if (x.size() != input_size()) {
        throw DimensionError("forward: expected input of size " + std::to_string(input_size()) +
                             ", got " + std::to_string(x.size()));
    }
    require_finite(x, "network input");
    Matrix batch(1, x.size());
    std::copy(x.begin(), x.end(), batch.row(0).begin());
    ForwardTape tape;
    const Matrix& out = forward_batch(batch, tape);
    return {out.values().begin(), out.values().end()};
}

const Matrix& DenseNet::forward_batch(const Matrix& x, ForwardTape& tape) const {
    if (x.cols() != input_size()) {
        throw DimensionError("forward_batch: expected " + std::to_string(input_size()) +
                             " columns, got " + std::to_string(x.cols()));
    }
    const auto& k = kernels::active();
    const std::size_t batch = x.rows();
    tape.layers.resize(sizes_.size());
    tape.layers[0] = x;
    for (std::size_t l = 0; l < layer_count(); ++l) {
        const std::size_t in = sizes_[l];
        const std::size_t out = sizes_[l + 1];
        const Matrix& src = tape.layers[l];
        Matrix& dst = tape.layers[l + 1];
        if (dst.rows() != batch || dst.cols() != out) dst.resize(batch, out);
        const double* w = params_.data() + offsets_[l].weight;
        const double* b = params_.data() + offsets_[l].bias;
        for (std::size_t i = 0; i < batch; ++i) {
            const double* xi = src.row(i).data();
            double* yi = dst.row(i).data();
            for (std::size_t o = 0; o < out; ++o) yi[o] = b[o] + k.dot(w + o * in, xi, in);
        }
        activate(dst, l + 1 == layer_count());
    }
    return tape.layers.back();
}

Matrix DenseNet::backward_batch(const ForwardTape& tape, const Matrix& upstream,
                                std::span<double> param_grad, bool want_input_grad) const {
    if (tape.layers.size() != sizes_.size()) throw DimensionError("backward_batch: tape does not match network");
    const std::size_t batch = tape.input().rows();
    if (upstream.rows() != batch || upstream.cols() != output_size()) {
        throw DimensionError("backward_batch: upstream gradient shape mismatch");
    }
    if (param_grad.size() != params_.size()) {
        throw DimensionError("backward_batch: gradient buffer has wrong size");
    }
    const auto& k = kernels::active();
    Matrix delta = upstream;  // dLoss/d(pre-activation) of the current layer
    Matrix below;
    for (std::size_t l = layer_count(); l-- > 0;) {
        const std::size_t in = sizes_[l];
        const std::size_t out = sizes_[l + 1];
        const Matrix& src = tape.layers[l];
        const double* w = params_.data() + offsets_[l].weight;
        double* gw = param_grad.data() + offsets_[l].weight;
        double* gb = param_grad.data() + offsets_[l].bias;
        for (std::size_t i = 0; i < batch; ++i) {
            const double* xi = src.row(i).data();
            const double* di = delta.row(i).data();
            for (std::size_t o = 0; o < out; ++o) {
                if (di[o] == 0.0) continue;
                k.axpy(di[o], xi, gw + o * in, in);
                gb[o] += di[o];
            }
        }
        if (l == 0 && !want_input_grad) break;
        below.resize(batch, in);
        for (std::size_t i = 0; i < batch; ++i) {
            const double* di = delta.row(i).data();
            double* bi = below.row(i).data();
            for (std::size_t o = 0; o < out; ++o) {
                if (di[o] == 0.0) continue;
                k.axpy(di[o], w + o * in, bi, in);
            }
        }
        if (l > 0) {
            // Chain through the hidden activation that produced src.
            switch (hidden_) {
                case Activation::Tanh: {
                    auto bv = below.values();
                    auto sv = src.values();
                    for (std::size_t j = 0; j < bv.size(); ++j) bv[j] *= 1.0 - sv[j] * sv[j];
                    break;
                }
                case Activation::Relu: {
                    auto bv = below.values();
                    auto sv = src.values();
                    for (std::size_t j = 0; j < bv.size(); ++j) {
                        if (!(sv[j] > 0.0)) bv[j] = 0.0;
                    }
                    break;
                }
                case Activation::Identity:
                    break;
            }
        }
        std::swap(delta, below);
    }
    if (!want_input_grad) return {};
    return delta;
}

NetGradients DenseNet::backward(std::span<const double> x, std::span<const double> upstream) const {
    if (x.size() != input_size()) throw DimensionError("backward: input size mismatch");
    if (upstream.size() != output_size()) throw DimensionError("backward: upstream size mismatch");
    Matrix batch(1, x.size());
    std::copy(x.begin(), x.end(), batch.row(0).begin());
    Matrix up(1, upstream.size());
    std::copy(upstream.begin(), upstream.end(), up.row(0).begin());
    ForwardTape tape;
    forward_batch(batch, tape);
    NetGradients grads;
    grads.parameters.assign(params_.size(), 0.0);
    Matrix dx = backward_batch(tape, up, grads.parameters, true);
    grads.input.assign(dx.values().begin(), dx.values().end());
    return grads;
}

}  // namespace varl::numerics
