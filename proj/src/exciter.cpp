#include "nws/exciter.hpp"

#include "nws/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nws {

ExciterWeights ExciterWeights::from_store(const TensorStore& store)
{
    const auto& w = store.get("exciter.mixer.weight");
    const auto& b = store.get("exciter.mixer.bias");
    if (w.shape.size() != 2 || b.shape.size() != 1 || b.shape[0] != w.shape[0])
        throw SchemaError("exciter.mixer tensors have inconsistent shapes");
    ExciterWeights out;
    out.channels = static_cast<std::size_t>(w.shape[0]);
    out.harmonics = static_cast<std::size_t>(w.shape[1]);
    out.weight = w.data;
    out.bias = b.data;
    return out;
}

std::vector<std::uint8_t> antialias_mask(std::span<const float> f0_hz, int k, int sample_rate)
{
    const double nyquist = 0.5 * sample_rate;
    std::vector<std::uint8_t> mask(f0_hz.size());
    for (std::size_t n = 0; n < f0_hz.size(); ++n)
        mask[n] = static_cast<double>(k) * static_cast<double>(f0_hz[n]) < nyquist ? 1 : 0;
    return mask;
}

std::size_t active_harmonics(double f0_hz, int sample_rate, std::size_t max_k)
{
    const double nyquist = 0.5 * sample_rate;
    // Largest k with k * f0 < nyquist; the loops guard against rounding in the division.
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor(nyquist / f0_hz)));
    while (k > 0 && static_cast<double>(k) * f0_hz >= nyquist) --k;
    while (static_cast<double>(k + 1) * f0_hz < nyquist) ++k;
    return std::min(k, max_k);
}

std::vector<float> render_exciter(std::span<const float> f0_hz, const ExciterWeights& weights, OscillatorState& state,
                                  int sample_rate)
{
    const std::size_t C = weights.channels;
    const std::size_t K = weights.harmonics;
    const std::size_t N = f0_hz.size();
    if (weights.weight.size() != C * K || weights.bias.size() != C)
        throw SchemaError("render_exciter: mixer weights do not match their dimensions");

    // Transposed mixer [K, C] so the per-sample mix runs across channels.
    std::vector<float> w_t(K * C);
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t k = 0; k < K; ++k) w_t[k * C + c] = weights.weight[c * K + k];

    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<float> out(C * N);
    std::vector<float> harm(K);
    std::vector<float> mix(C);
    double phase = state.phase;
    for (std::size_t n = 0; n < N; ++n) {
        const double f0 = f0_hz[n];
        if (!(f0 > 0.0) || !std::isfinite(f0))
            throw InvalidInput("render_exciter: f0 must be positive and finite (sample " + std::to_string(n) + ")");
        phase += two_pi * f0 / sample_rate;
        if (phase >= two_pi) phase = std::fmod(phase, two_pi);

        // cos(k phi) by the Chebyshev recurrence.
        const std::size_t active = active_harmonics(f0, sample_rate, K);
        const double c1 = std::cos(phase);
        double prev = 1.0;
        double cur = c1;
        for (std::size_t k = 0; k < active; ++k) {
            harm[k] = static_cast<float>(cur);
            const double next = 2.0 * c1 * cur - prev;
            prev = cur;
            cur = next;
        }

        std::copy(weights.bias.begin(), weights.bias.end(), mix.begin());
        for (std::size_t k = 0; k < active; ++k) {
            const float h = harm[k];
            const float* row = w_t.data() + k * C;
            for (std::size_t c = 0; c < C; ++c) mix[c] += row[c] * h;
        }
        for (std::size_t c = 0; c < C; ++c) out[c * N + n] = mix[c];
    }
    state.phase = phase;
    return out;
}

} // namespace nws
