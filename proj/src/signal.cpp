#include "nws/signal.hpp"

#include "nws/errors.hpp"
#include "nws/fft.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace nws::dsp {

std::vector<double> hann_window(std::size_t length, bool symmetric)
{
    if (length == 0) throw InvalidArgument("hann_window: length must be >= 1");
    if (length == 1) return {1.0};
    std::vector<double> w(length);
    const double denom = static_cast<double>(symmetric ? length - 1 : length);
    for (std::size_t n = 0; n < length; ++n)
        w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / denom);
    if (symmetric) {
        // Mirror so the symmetry holds bit-exactly.
        for (std::size_t n = 0; n < length / 2; ++n) w[length - 1 - n] = w[n];
        if (length % 2 == 1) w[length / 2] = 1.0;
    }
    return w;
}

Spectrogram stft_magnitude(std::span<const float> x, std::size_t window_length, std::size_t hop)
{
    if (window_length < 2) throw InvalidArgument("stft_magnitude: window length must be >= 2");
    if (hop == 0 || hop > window_length)
        throw InvalidArgument("stft_magnitude: hop must be in [1, window_length]");
    if (x.size() < window_length)
        throw InvalidInput("stft_magnitude: signal shorter than one analysis window (empty spectrogram)");

    Spectrogram spec;
    spec.window_length = window_length;
    spec.num_bins = window_length / 2 + 1;
    spec.num_frames = (x.size() - window_length) / hop + 1;
    spec.magnitudes.resize(spec.num_frames * spec.num_bins);

    const auto window = hann_window(window_length);
    RealFft fft(window_length);
    std::vector<double> frame(window_length);
    std::vector<std::complex<double>> bins(spec.num_bins);
    for (std::size_t f = 0; f < spec.num_frames; ++f) {
        const std::size_t start = f * hop;
        for (std::size_t n = 0; n < window_length; ++n)
            frame[n] = static_cast<double>(x[start + n]) * window[n];
        fft.forward(frame, bins);
        for (std::size_t b = 0; b < spec.num_bins; ++b)
            spec.magnitudes[f * spec.num_bins + b] = std::abs(bins[b]);
    }
    return spec;
}

Spectrogram stft_magnitude(const AudioBuffer& x, std::size_t window_length, std::size_t hop)
{
    return stft_magnitude(std::span<const float>(x.samples), window_length, hop);
}

std::vector<double> fft_convolve(std::span<const double> x, std::span<const double> h)
{
    if (x.empty() || h.empty()) throw InvalidArgument("fft_convolve: inputs must be nonempty");
    const std::size_t out_len = x.size() + h.size() - 1;
    std::size_t n = 2;
    while (n < out_len) n <<= 1;

    RealFft fft(n);
    std::vector<std::complex<double>> xs(fft.bins());
    std::vector<std::complex<double>> hs(fft.bins());
    fft.forward(x, xs);
    fft.forward(h, hs);
    for (std::size_t b = 0; b < xs.size(); ++b) xs[b] *= hs[b];
    std::vector<double> y(n);
    fft.inverse(xs, y);
    y.resize(out_len);
    return y;
}

AudioBuffer fft_convolve(const AudioBuffer& x, std::span<const double> h)
{
    const std::vector<double> xd(x.samples.begin(), x.samples.end());
    const auto y = fft_convolve(xd, h);
    AudioBuffer out;
    out.sample_rate = x.sample_rate;
    out.samples.assign(y.begin(), y.end());
    return out;
}

std::vector<float> upsample_linear(const FrameSeries& frames)
{
    const std::size_t num_frames = frames.num_frames();
    if (num_frames == 0) throw InvalidArgument("upsample_linear: need at least one frame");
    if (frames.hop_size <= 0) throw InvalidArgument("upsample_linear: hop size must be positive");

    const auto hop = static_cast<std::size_t>(frames.hop_size);
    const std::size_t len = num_frames * hop;
    const float inv_hop = 1.0f / static_cast<float>(hop);
    std::vector<float> out(frames.channels * len);
    for (std::size_t c = 0; c < frames.channels; ++c) {
        float* row = out.data() + c * len;
        for (std::size_t k = 0; k < num_frames; ++k) {
            const float a = frames.at(k, c);
            const float b = k + 1 < num_frames ? frames.at(k + 1, c) : a;
            const float delta = b - a;
            for (std::size_t t = 0; t < hop; ++t)
                row[k * hop + t] = a + delta * (static_cast<float>(t) * inv_hop);
        }
    }
    return out;
}

} // namespace nws::dsp
