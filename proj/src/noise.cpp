#include "nws/noise.hpp"

#include "nws/errors.hpp"
#include "nws/signal.hpp"

#include <cmath>
#include <numbers>

namespace nws {

float scaled_sigmoid(float x)
{
    const double s = 1.0 / (1.0 + std::exp(-static_cast<double>(x)));
    return static_cast<float>(2.0 * std::pow(s, std::numbers::ln10));
}

FilterFrameBank noise_mlp_forward(const ControlEmbedding& z, const nn::Mlp& mlp)
{
    if (z.width != mlp.in_features()) throw SchemaError("noise_mlp_forward: embedding width does not match the MLP");
    FilterFrameBank bank;
    bank.num_bins = mlp.out_features();
    bank.magnitudes.resize(z.num_frames() * bank.num_bins);
    std::vector<float> scratch;
    for (std::size_t k = 0; k < z.num_frames(); ++k) {
        std::span<float> row(bank.magnitudes.data() + k * bank.num_bins, bank.num_bins);
        mlp.forward(z.frame(k), row, scratch);
        for (auto& v : row) v = scaled_sigmoid(v);
    }
    return bank;
}

namespace detail {

void design_fir_into(std::span<const float> magnitude, dsp::RealFft& fft, std::span<const double> window,
                     std::vector<std::complex<double>>& spec, std::vector<double>& zero_phase, std::span<double> ir)
{
    const std::size_t taps = fft.size();
    spec.assign(magnitude.begin(), magnitude.end());
    zero_phase.resize(taps);
    fft.inverse(spec, zero_phase);
    const std::size_t shift = taps / 2;
    for (std::size_t n = 0; n < taps; ++n) ir[n] = zero_phase[(n + shift) % taps] * window[n];
}

} // namespace detail

std::vector<double> design_fir(std::span<const float> magnitude)
{
    if (magnitude.size() < 2) throw InvalidArgument("design_fir: need at least two bins");
    const std::size_t taps = 2 * (magnitude.size() - 1);
    dsp::RealFft fft(taps);
    const auto window = dsp::hann_window(taps);
    std::vector<std::complex<double>> spec;
    std::vector<double> zero_phase;
    std::vector<double> ir(taps);
    detail::design_fir_into(magnitude, fft, window, spec, zero_phase, ir);
    return ir;
}

float white_noise_sample(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    const double u = static_cast<double>(z >> 40) * 0x1.0p-24;
    return static_cast<float>(2.0 * u - 1.0);
}

namespace {
std::size_t conv_fft_size(std::size_t taps, std::size_t hop)
{
    std::size_t n = 2;
    while (n < taps + hop - 1) n <<= 1;
    return n;
}
} // namespace

NoiseSynth::NoiseSynth(std::size_t taps, std::size_t hop)
    : taps_(taps), hop_(hop), fft_(conv_fft_size(taps, hop)), noise_(hop), conv_(fft_.size()),
      noise_spec_(fft_.bins()), ir_spec_(fft_.bins()), ir_fft_(taps), window_(dsp::hann_window(taps)), ir_(taps)
{
    if (taps < 2 || taps % 2 != 0) throw InvalidArgument("NoiseSynth: taps must be even and >= 2");
    if (hop == 0) throw InvalidArgument("NoiseSynth: hop must be positive");
}

std::vector<float> NoiseSynth::render(const FilterFrameBank& bank, NoiseState& state)
{
    if (bank.num_bins != taps_ / 2 + 1) throw SchemaError("render_noise: filter bank width does not match taps");
    if (state.tail.size() != taps_ - 1) throw SchemaError("render_noise: noise state has the wrong tail length");

    const std::size_t F = bank.num_frames();
    const std::size_t span_len = hop_ + taps_ - 1;
    std::vector<float> out(F * hop_);
    std::vector<double> acc(span_len);
    for (std::size_t k = 0; k < F; ++k) {
        for (std::size_t t = 0; t < hop_; ++t)
            noise_[t] = white_noise_sample(state.seed, state.counter++);
        detail::design_fir_into(bank.frame(k), ir_fft_, window_, design_spec_, zero_phase_, ir_);

        fft_.forward(noise_, noise_spec_);
        fft_.forward(ir_, ir_spec_);
        for (std::size_t b = 0; b < noise_spec_.size(); ++b) noise_spec_[b] *= ir_spec_[b];
        fft_.inverse(noise_spec_, conv_);

        std::copy(state.tail.begin(), state.tail.end(), acc.begin());
        for (std::size_t t = taps_ - 1; t < span_len; ++t) acc[t] = 0.0;
        for (std::size_t t = 0; t < span_len; ++t) acc[t] += conv_[t];
        for (std::size_t t = 0; t < hop_; ++t) out[k * hop_ + t] = static_cast<float>(acc[t]);
        std::copy(acc.begin() + static_cast<std::ptrdiff_t>(hop_), acc.end(), state.tail.begin());
    }
    return out;
}

AudioBuffer render_noise(const FilterFrameBank& bank, int hop, NoiseState& state, int sample_rate)
{
    if (bank.num_frames() == 0) throw InvalidArgument("render_noise: filter bank is empty");
    NoiseSynth synth(2 * (bank.num_bins - 1), static_cast<std::size_t>(hop));
    AudioBuffer out;
    out.sample_rate = sample_rate;
    out.samples = synth.render(bank, state);
    return out;
}

} // namespace nws
