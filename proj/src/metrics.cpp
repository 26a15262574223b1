#include "nws/metrics.hpp"

#include "nws/errors.hpp"
#include "nws/fft.hpp"

#include <algorithm>
#include <cmath>

namespace nws {

void MrStftConfig::validate() const
{
    if (window_lengths.empty()) throw InvalidArgument("mr-STFT: no window lengths");
    for (std::size_t i = 0; i < window_lengths.size(); ++i) {
        const std::size_t m = window_lengths[i];
        if (m < 4 || (m & (m - 1)) != 0) throw InvalidArgument("mr-STFT: window lengths must be powers of two >= 4");
        if (i > 0 && m <= window_lengths[i - 1]) throw InvalidArgument("mr-STFT: window lengths must ascend");
    }
    if (!(epsilon > 0.0)) throw InvalidArgument("mr-STFT: epsilon must be positive");
}

namespace {

void check_pair(std::span<const float> x, std::span<const float> y)
{
    if (x.size() != y.size())
        throw InvalidArgument("metric inputs differ in length (" + std::to_string(x.size()) + " vs " +
                              std::to_string(y.size()) + ")");
}

double sc_from(const Spectrogram& a, const Spectrogram& b)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.magnitudes.size(); ++i) {
        const double d = a.magnitudes[i] - b.magnitudes[i];
        num += d * d;
        den += a.magnitudes[i] * a.magnitudes[i];
    }
    if (!(den > 0.0)) throw UndefinedMetric("spectral convergence is undefined for a silent reference");
    return std::sqrt(num) / std::sqrt(den);
}

double lm_from(const Spectrogram& a, const Spectrogram& b, std::size_t m, double eps)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < a.magnitudes.size(); ++i)
        sum += std::abs(std::log(std::max(a.magnitudes[i], eps)) - std::log(std::max(b.magnitudes[i], eps)));
    return sum / static_cast<double>(m);
}

} // namespace

double spectral_convergence(std::span<const float> x, std::span<const float> y, std::size_t m)
{
    check_pair(x, y);
    const std::size_t hop = MrStftConfig::hop_for(m);
    return sc_from(dsp::stft_magnitude(x, m, hop), dsp::stft_magnitude(y, m, hop));
}

double spectral_convergence(const AudioBuffer& x, const AudioBuffer& y, std::size_t m)
{
    return spectral_convergence(std::span<const float>(x.samples), std::span<const float>(y.samples), m);
}

double log_magnitude_distance(std::span<const float> x, std::span<const float> y, std::size_t m, double epsilon)
{
    check_pair(x, y);
    const std::size_t hop = MrStftConfig::hop_for(m);
    return lm_from(dsp::stft_magnitude(x, m, hop), dsp::stft_magnitude(y, m, hop), m, epsilon);
}

double log_magnitude_distance(const AudioBuffer& x, const AudioBuffer& y, std::size_t m, double epsilon)
{
    return log_magnitude_distance(std::span<const float>(x.samples), std::span<const float>(y.samples), m, epsilon);
}

MrStftResult mr_stft(std::span<const float> x, std::span<const float> y, const MrStftConfig& cfg)
{
    cfg.validate();
    check_pair(x, y);
    MrStftResult result;
    for (const std::size_t m : cfg.window_lengths) {
        const std::size_t hop = MrStftConfig::hop_for(m);
        const auto a = dsp::stft_magnitude(x, m, hop);
        const auto b = dsp::stft_magnitude(y, m, hop);
        ScaleLoss s{m, sc_from(a, b), lm_from(a, b, m, cfg.epsilon)};
        result.total += s.spectral_convergence + s.log_magnitude;
        result.scales.push_back(s);
    }
    result.total /= static_cast<double>(result.scales.size());
    return result;
}

double mr_stft_loss(const AudioBuffer& x, const AudioBuffer& y, const MrStftConfig& cfg)
{
    return mr_stft(x.samples, y.samples, cfg).total;
}

std::vector<double> whole_signal_spectrum_db(std::span<const float> x)
{
    if (x.size() < 2) throw InvalidInput("spectrum: need at least two samples");
    const auto window = dsp::hann_window(x.size(), false);
    std::vector<double> frame(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) frame[n] = static_cast<double>(x[n]) * window[n];
    dsp::RealFft fft(x.size());
    std::vector<std::complex<double>> bins(fft.bins());
    fft.forward(frame, bins);
    std::vector<double> db(bins.size());
    double peak = 0.0;
    for (const auto& b : bins) peak = std::max(peak, std::abs(b));
    if (!(peak > 0.0)) throw UndefinedMetric("spectrum: signal is silent");
    for (std::size_t i = 0; i < bins.size(); ++i) db[i] = 20.0 * std::log10(std::max(std::abs(bins[i]) / peak, 1e-300));
    return db;
}

std::set<int> harmonic_peak_set(const AudioBuffer& x, double f0_hz, int max_k, double threshold_db)
{
    if (!(f0_hz > 0.0)) throw InvalidArgument("harmonic_peak_set: f0 must be positive");
    const auto db = whole_signal_spectrum_db(x.samples);
    const double bin_hz = static_cast<double>(x.sample_rate) / static_cast<double>(x.size());
    const double nyquist = 0.5 * x.sample_rate;

    std::vector<std::pair<int, double>> peaks;
    double strongest = -1e300;
    for (int k = 1; k <= max_k; ++k) {
        const double f = k * f0_hz;
        if (f >= nyquist) break;
        const auto centre = static_cast<long>(std::lround(f / bin_hz));
        double best = -1e300;
        for (long b = centre - 2; b <= centre + 2; ++b)
            if (b >= 0 && b < static_cast<long>(db.size())) best = std::max(best, db[static_cast<std::size_t>(b)]);
        peaks.emplace_back(k, best);
        strongest = std::max(strongest, best);
    }
    std::set<int> out;
    for (const auto& [k, level] : peaks)
        if (level >= strongest + threshold_db) out.insert(k);
    return out;
}

} // namespace nws
