#pragma once

// Foundational signal containers and DSP primitives shared by every stage of
// the synthesizer: windowing, STFT magnitudes, FFT convolution and the
// frame-rate to audio-rate interpolator.

#include <cstddef>
#include <span>
#include <vector>

namespace nws {

/// Mono audio at a fixed sample rate.
struct AudioBuffer {
    std::vector<float> samples;
    int sample_rate = 16000;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }
};

/// Frame-rate matrix (num_frames x channels, row-major) aligned to a hop grid.
struct FrameSeries {
    std::vector<float> values;
    std::size_t channels = 1;
    int hop_size = 128;
    int sample_rate = 16000;

    std::size_t num_frames() const noexcept { return channels ? values.size() / channels : 0; }
    float at(std::size_t frame, std::size_t channel) const { return values[frame * channels + channel]; }
};

/// Magnitude STFT (num_frames x num_bins, row-major), num_bins = window/2 + 1.
struct Spectrogram {
    std::vector<double> magnitudes;
    std::size_t num_frames = 0;
    std::size_t num_bins = 0;
    std::size_t window_length = 0;

    double at(std::size_t frame, std::size_t bin) const { return magnitudes[frame * num_bins + bin]; }
};

namespace dsp {

/// Hann window. The symmetric form is 0.5 - 0.5 cos(2 pi n / (L - 1)); the
/// periodic form divides by L instead. A length-1 window is {1}.
std::vector<double> hann_window(std::size_t length, bool symmetric = true);

/// Hann-windowed magnitude STFT without padding or centering.
/// Frame count is floor((len - window) / hop) + 1.
Spectrogram stft_magnitude(std::span<const float> x, std::size_t window_length, std::size_t hop);
Spectrogram stft_magnitude(const AudioBuffer& x, std::size_t window_length, std::size_t hop);

/// Full linear convolution via FFT; output length len(x) + len(h) - 1.
std::vector<double> fft_convolve(std::span<const double> x, std::span<const double> h);
AudioBuffer fft_convolve(const AudioBuffer& x, std::span<const double> h);

/// Piecewise-linear frame-to-sample interpolation.
///
/// Returns channels x (num_frames * hop) row-major. Sample k*hop equals
/// frame k; samples between frame anchors are interpolated and the final hop
/// holds the last frame.
std::vector<float> upsample_linear(const FrameSeries& frames);

} // namespace dsp
} // namespace nws
