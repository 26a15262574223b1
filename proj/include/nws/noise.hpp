#pragma once

// Filtered-noise residual: per-frame FIR magnitude responses from an MLP,
// turned into causal linear-phase impulse responses by the window-design
// method, applied to white noise with overlap-add across frames.

#include "nws/control.hpp"
#include "nws/fft.hpp"
#include "nws/nn.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace nws {

/// Nonnegative magnitude responses, num_frames x num_bins.
struct FilterFrameBank {
    std::vector<float> magnitudes;
    std::size_t num_bins = 0;

    std::size_t num_frames() const { return num_bins ? magnitudes.size() / num_bins : 0; }
    std::span<const float> frame(std::size_t k) const { return {magnitudes.data() + k * num_bins, num_bins}; }
};

/// 2 * sigmoid(x)^ln(10): bounded, smooth, strictly positive.
float scaled_sigmoid(float x);

FilterFrameBank noise_mlp_forward(const ControlEmbedding& z, const nn::Mlp& mlp);

/// Window-design FIR: inverse real DFT of a zero-phase magnitude response,
/// rotated by taps/2 into causal form, times a symmetric Hann window.
/// `magnitude.size()` must be taps/2 + 1.
std::vector<double> design_fir(std::span<const float> magnitude);

/// Counter-based white noise: uniform in [-1, 1) as a pure function of
/// (seed, index), using the splitmix64 finalizer. The top 24 bits of the
/// hash give u in [0, 1); the sample is 2u - 1.
float white_noise_sample(std::uint64_t seed, std::uint64_t index);

struct NoiseState {
    std::vector<double> tail; // pending overlap-add output, taps - 1 samples
    std::uint64_t seed = 0;
    std::uint64_t counter = 0; // noise samples drawn so far

    static NoiseState fresh(std::size_t taps, std::uint64_t seed)
    {
        return NoiseState{std::vector<double>(taps - 1, 0.0), seed, 0};
    }
};

/// Stateful noise renderer for one filter length. Holds FFT scratch; the
/// per-stream state lives in NoiseState.
class NoiseSynth {
public:
    NoiseSynth(std::size_t taps, std::size_t hop);

    std::size_t taps() const { return taps_; }
    std::size_t hop() const { return hop_; }

    /// Renders num_frames * hop samples and advances `state`.
    std::vector<float> render(const FilterFrameBank& bank, NoiseState& state);

private:
    std::size_t taps_;
    std::size_t hop_;
    dsp::RealFft fft_;
    std::vector<double> noise_;
    std::vector<double> conv_;
    std::vector<std::complex<double>> noise_spec_;
    std::vector<std::complex<double>> ir_spec_;
    dsp::RealFft ir_fft_;
    std::vector<double> window_;
    std::vector<double> ir_;
    std::vector<std::complex<double>> design_spec_;
    std::vector<double> zero_phase_;
};

/// One-shot convenience wrapper around NoiseSynth.
AudioBuffer render_noise(const FilterFrameBank& bank, int hop, NoiseState& state, int sample_rate = 16000);

} // namespace nws
