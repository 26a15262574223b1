#pragma once

// Small dense-network kernels used by the control encoder and the two
// frame-rate MLPs. Evaluation is one frame at a time with a fixed
// accumulation order, so results never depend on how frames are batched.

#include "nws/weights.hpp"

#include <span>
#include <string>
#include <vector>

namespace nws::nn {

class Linear {
public:
    Linear() = default;
    /// `weight` is row-major [out, in] as stored in the model file.
    Linear(std::size_t in, std::size_t out, std::span<const float> weight, std::span<const float> bias);
    static Linear from_store(const TensorStore& store, const std::string& prefix);

    std::size_t in_features() const { return in_; }
    std::size_t out_features() const { return out_; }

    /// y = W x + b
    void forward(std::span<const float> x, std::span<float> y) const;

private:
    std::size_t in_ = 0;
    std::size_t out_ = 0;
    std::vector<float> weight_t_; // [in, out]
    std::vector<float> bias_;
};

class LayerNorm {
public:
    static constexpr float kEps = 1e-5f;

    LayerNorm() = default;
    LayerNorm(std::span<const float> gain, std::span<const float> bias);
    static LayerNorm from_store(const TensorStore& store, const std::string& prefix);

    void forward(std::span<float> x) const;

private:
    std::vector<float> gain_;
    std::vector<float> bias_;
};

/// Linear -> LayerNorm -> ReLU for every layer but the last, which is linear.
class Mlp {
public:
    Mlp() = default;
    static Mlp from_store(const TensorStore& store, const std::string& prefix, int depth);

    std::size_t in_features() const { return layers_.front().in_features(); }
    std::size_t out_features() const { return layers_.back().out_features(); }

    /// Evaluates one frame. `scratch` is resized as needed.
    void forward(std::span<const float> x, std::span<float> y, std::vector<float>& scratch) const;

private:
    std::vector<Linear> layers_;
    std::vector<LayerNorm> norms_;
};

} // namespace nws::nn
