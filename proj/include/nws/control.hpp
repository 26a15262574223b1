#pragma once

// Control encoder: standardized (f0, loudness) frames -> causal GRU ->
// time-distributed dense layer -> control embedding z.

#include "nws/nn.hpp"
#include "nws/signal.hpp"
#include "nws/weights.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nws {

/// Framewise control signals at the hop-size frame rate.
struct ControlTrack {
    std::vector<float> f0_hz;
    std::vector<float> loudness_db;
    std::optional<std::vector<float>> confidence;
    int hop_size = 128;

    std::size_t num_frames() const { return f0_hz.size(); }
    /// Frames [begin, begin + count).
    ControlTrack slice(std::size_t begin, std::size_t count) const;
};

/// Embedding z, num_frames x width, row-major.
struct ControlEmbedding {
    std::vector<float> z;
    std::size_t width = 0;

    std::size_t num_frames() const { return width ? z.size() / width : 0; }
    std::span<const float> frame(std::size_t k) const { return {z.data() + k * width, width}; }
};

struct GruState {
    std::vector<float> h;

    static GruState zeros(std::size_t hidden) { return GruState{std::vector<float>(hidden, 0.0f)}; }
};

/// Two-channel standardization: (value - mean) / std per channel.
FrameSeries standardize(const ControlTrack& track, const NormalizationStats& stats);

/// GRU cell weights. Gate rows are packed (reset, update, candidate);
/// input-to-hidden and hidden-to-hidden matrices are separate, each with its
/// own bias.
struct GruWeights {
    std::size_t input = kControlChannels;
    std::size_t hidden = 0;
    std::vector<float> w_ih; // [3H, input]
    std::vector<float> w_hh; // [3H, H]
    std::vector<float> b_ih; // [3H]
    std::vector<float> b_hh; // [3H]

    static GruWeights from_store(const TensorStore& store);
};

/// One GRU step:
///   r  = sigmoid(W_r x + b_ir + U_r h + b_hr)
///   u  = sigmoid(W_u x + b_iu + U_u h + b_hu)
///   n  = tanh(W_n x + b_in + r * (U_n h + b_hn))
///   h' = (1 - u) * n + u * h
GruState gru_step(std::span<const float> x, const GruState& state, const GruWeights& weights);

class ControlEncoder {
public:
    ControlEncoder() = default;
    ControlEncoder(GruWeights gru, nn::Linear dense);
    static ControlEncoder from_store(const TensorStore& store);

    std::size_t width() const { return dense_.out_features(); }
    std::size_t hidden() const { return gru_.hidden; }

    /// Encodes frames in order and advances `state`. Splitting a sequence
    /// across calls gives bit-identical output to a single call.
    ControlEmbedding encode(const FrameSeries& frames, GruState& state) const;

private:
    GruWeights gru_;
    nn::Linear dense_;
};

/// Reads a control CSV with header `frame,f0_hz,loudness_db[,confidence]`.
/// Throws InvalidInput (message includes the 1-based line number) on any
/// malformed, missing or non-finite value, or on non-positive f0.
ControlTrack parse_control_csv(const std::string& text, int hop_size = 128);
ControlTrack read_control_csv(const std::string& path, int hop_size = 128);
std::string format_control_csv(const ControlTrack& track);

} // namespace nws
