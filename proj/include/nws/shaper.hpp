#pragma once

// The neural waveshaping unit (NEWT).
//
// Each of the C channels applies a learned shaping function f between two
// affine transforms whose parameters come from the control embedding:
//
//   x_i[n] = alpha_N f_i(alpha_a y_i[n] + beta_a) + beta_N
//
// and the channels are summed to mono in channel order. f_i is either a
// small sine-activated MLP or, for FastNEWT, a linearly interpolated lookup
// table sampled from that MLP.

#include "nws/control.hpp"
#include "nws/nn.hpp"
#include "nws/weights.hpp"

#include <span>
#include <vector>

namespace nws {

inline constexpr std::size_t kDefaultTableSize = 4096;
inline constexpr float kDefaultTableLo = -3.0f;
inline constexpr float kDefaultTableHi = 3.0f;

/// Affine parameter planes, each num_frames x channels (frame-major).
struct AffineParams {
    std::size_t channels = 0;
    std::vector<float> alpha_a;
    std::vector<float> beta_a;
    std::vector<float> alpha_n;
    std::vector<float> beta_n;

    std::size_t num_frames() const { return channels ? alpha_a.size() / channels : 0; }
};

/// Audio-rate affine parameters, each plane channels x num_samples.
struct AudioRateParams {
    std::size_t channels = 0;
    std::size_t num_samples = 0;
    std::vector<float> alpha_a;
    std::vector<float> beta_a;
    std::vector<float> alpha_n;
    std::vector<float> beta_n;
};

/// Runs the affine MLP over every frame. Output columns are split into
/// contiguous planes (alpha_a, beta_a, alpha_N, beta_N), channels each.
AffineParams affine_mlp_forward(const ControlEmbedding& z, const nn::Mlp& mlp, std::size_t channels);

/// Upsamples each plane with dsp::upsample_linear. When `previous` holds one
/// frame, it is prepended and the trailing hold hop dropped, so hop k ramps
/// from frame k-1 to frame k and depends on no future frame.
AudioRateParams upsample_affine(const AffineParams& params, int hop_size, const AffineParams* previous = nullptr);

/// Bank of per-channel shaper MLPs (widths 1 -> hidden ... -> 1, sin after
/// every layer but the last).
class ShaperBank {
public:
    static constexpr std::size_t kMaxHidden = 64;

    struct Layer {
        std::size_t in = 0;
        std::size_t out = 0;
        std::vector<float> weight; // [out, in]
        std::vector<float> bias;
    };

    ShaperBank() = default;
    explicit ShaperBank(std::vector<std::vector<Layer>> channels);
    static ShaperBank from_store(const TensorStore& store, int channels, int depth);

    std::size_t channels() const { return channels_.size(); }
    const std::vector<Layer>& layers(std::size_t channel) const { return channels_[channel]; }

    float eval(std::size_t channel, float x) const;

private:
    std::vector<std::vector<Layer>> channels_;
};

/// f_theta(x) for one channel.
inline float shaper_eval(float x, std::size_t channel, const ShaperBank& bank) { return bank.eval(channel, x); }

struct FastNewtTable {
    std::vector<float> samples;
    float lo = kDefaultTableLo;
    float hi = kDefaultTableHi;

    /// Linear interpolation; inputs outside [lo, hi] clamp to the endpoint values.
    float lookup(float x) const
    {
        const std::size_t last = samples.size() - 1;
        if (!(x > lo)) return samples.front();
        if (x >= hi) return samples[last];
        const float pos = (x - lo) * (static_cast<float>(last) / (hi - lo));
        auto i = static_cast<std::size_t>(pos);
        if (i >= last) i = last - 1;
        const float frac = pos - static_cast<float>(i);
        return samples[i] + frac * (samples[i + 1] - samples[i]);
    }
};

inline float table_lookup(float x, const FastNewtTable& table) { return table.lookup(x); }

/// table[j] = f(lo + j (hi - lo) / (size - 1)); both endpoints sampled exactly.
FastNewtTable bake_fastnewt(const ShaperBank& bank, std::size_t channel, std::size_t table_size = kDefaultTableSize,
                            float lo = kDefaultTableLo, float hi = kDefaultTableHi);

using TableBank = std::vector<FastNewtTable>;

TableBank bake_all(const ShaperBank& bank, std::size_t table_size = kDefaultTableSize, float lo = kDefaultTableLo,
                   float hi = kDefaultTableHi);
TableBank tables_from_file(const BakedTables& baked);
BakedTables tables_to_file(const TableBank& tables);

struct BakeError {
    double max_abs_error = 0.0;
    double output_range = 0.0; // max - min of the shaper over the probe grid
    double relative() const { return output_range > 0.0 ? max_abs_error / output_range : max_abs_error; }
};

/// Compares a table with its shaper on a grid `oversample` times denser than
/// the table over the table's domain.
BakeError measure_bake_error(const ShaperBank& bank, std::size_t channel, const FastNewtTable& table,
                             std::size_t oversample = 16);

/// Applies the NEWT to `exciter` (channels x samples) and sums to mono.
std::vector<float> newt_forward(std::span<const float> exciter, const AudioRateParams& params, const ShaperBank& bank);
std::vector<float> newt_forward(std::span<const float> exciter, const AudioRateParams& params, const TableBank& tables);

} // namespace nws
