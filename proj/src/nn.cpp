#include "nws/nn.hpp"

#include "nws/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nws::nn {

Linear::Linear(std::size_t in, std::size_t out, std::span<const float> weight, std::span<const float> bias)
    : in_(in), out_(out), weight_t_(in * out), bias_(bias.begin(), bias.end())
{
    if (weight.size() != in * out || bias.size() != out) throw SchemaError("Linear: weight/bias size mismatch");
    for (std::size_t o = 0; o < out; ++o)
        for (std::size_t i = 0; i < in; ++i) weight_t_[i * out + o] = weight[o * in + i];
}

Linear Linear::from_store(const TensorStore& store, const std::string& prefix)
{
    const auto& w = store.get(prefix + ".weight");
    const auto& b = store.get(prefix + ".bias");
    if (w.shape.size() != 2 || b.shape.size() != 1 || b.shape[0] != w.shape[0])
        throw SchemaError("tensor " + prefix + ".weight/.bias have inconsistent shapes");
    return Linear(static_cast<std::size_t>(w.shape[1]), static_cast<std::size_t>(w.shape[0]), w.data, b.data);
}

void Linear::forward(std::span<const float> x, std::span<float> y) const
{
    std::copy(bias_.begin(), bias_.end(), y.begin());
    const float* w = weight_t_.data();
    float* out = y.data();
    for (std::size_t i = 0; i < in_; ++i) {
        const float xi = x[i];
        const float* row = w + i * out_;
        for (std::size_t o = 0; o < out_; ++o) out[o] += row[o] * xi;
    }
}

LayerNorm::LayerNorm(std::span<const float> gain, std::span<const float> bias)
    : gain_(gain.begin(), gain.end()), bias_(bias.begin(), bias.end())
{
    if (gain.size() != bias.size()) throw SchemaError("LayerNorm: gain/bias size mismatch");
}

LayerNorm LayerNorm::from_store(const TensorStore& store, const std::string& prefix)
{
    return LayerNorm(store.get(prefix + ".weight").data, store.get(prefix + ".bias").data);
}

void LayerNorm::forward(std::span<float> x) const
{
    const std::size_t n = gain_.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x[i];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + static_cast<double>(kEps));
    for (std::size_t i = 0; i < n; ++i)
        x[i] = static_cast<float>((x[i] - mean) * inv) * gain_[i] + bias_[i];
}

Mlp Mlp::from_store(const TensorStore& store, const std::string& prefix, int depth)
{
    Mlp mlp;
    for (int j = 0; j < depth; ++j) {
        mlp.layers_.push_back(Linear::from_store(store, prefix + ".layer" + std::to_string(j)));
        if (j < depth - 1) mlp.norms_.push_back(LayerNorm::from_store(store, prefix + ".norm" + std::to_string(j)));
    }
    return mlp;
}

void Mlp::forward(std::span<const float> x, std::span<float> y, std::vector<float>& scratch) const
{
    std::size_t widest = 0;
    for (const auto& l : layers_) widest = std::max(widest, l.out_features());
    scratch.resize(2 * widest);
    std::span<float> a(scratch.data(), widest);
    std::span<float> b(scratch.data() + widest, widest);

    std::span<const float> in = x;
    for (std::size_t j = 0; j < layers_.size(); ++j) {
        const auto& layer = layers_[j];
        if (j + 1 == layers_.size()) {
            layer.forward(in, y);
            return;
        }
        auto out = a.first(layer.out_features());
        layer.forward(in, out);
        norms_[j].forward(out);
        for (auto& v : out) v = std::max(v, 0.0f);
        in = out;
        std::swap(a, b);
    }
}

} // namespace nws::nn
