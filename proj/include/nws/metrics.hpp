#pragma once

// Spectral distances between two renders.
//
//   L_sc = || |X| - |Y| ||_F / || |X| ||_F
//   L_m  = (1/m) || log max(|X|, eps) - log max(|Y|, eps) ||_1
//
// with Hann-windowed STFTs of window m and hop m/4. The multi-resolution
// loss is the mean over window lengths of L_sc + L_m.

#include "nws/signal.hpp"

#include <set>
#include <span>
#include <vector>

namespace nws {

struct MrStftConfig {
    std::vector<std::size_t> window_lengths{512, 1024, 2048};
    double epsilon = 1e-7;

    /// Throws InvalidArgument unless windows are ascending powers of two.
    void validate() const;
    static std::size_t hop_for(std::size_t m) { return m / 4; }
};

/// Throws UndefinedMetric when the reference is silent, InvalidArgument on a
/// length mismatch.
double spectral_convergence(std::span<const float> x, std::span<const float> y, std::size_t m);
double spectral_convergence(const AudioBuffer& x, const AudioBuffer& y, std::size_t m);

double log_magnitude_distance(std::span<const float> x, std::span<const float> y, std::size_t m,
                              double epsilon = 1e-7);
double log_magnitude_distance(const AudioBuffer& x, const AudioBuffer& y, std::size_t m, double epsilon = 1e-7);

struct ScaleLoss {
    std::size_t window = 0;
    double spectral_convergence = 0.0;
    double log_magnitude = 0.0;
};

struct MrStftResult {
    std::vector<ScaleLoss> scales;
    double total = 0.0;
};

MrStftResult mr_stft(std::span<const float> x, std::span<const float> y, const MrStftConfig& cfg = {});
double mr_stft_loss(const AudioBuffer& x, const AudioBuffer& y, const MrStftConfig& cfg = {});

/// Harmonic indices k in [1, max_k] below Nyquist whose spectral peak is
/// within `threshold_db` of the strongest harmonic peak. Uses one
/// Hann-windowed DFT over the whole (constant-f0) signal.
std::set<int> harmonic_peak_set(const AudioBuffer& x, double f0_hz, int max_k, double threshold_db = -40.0);

/// Magnitude spectrum in dB of one Hann-windowed DFT over the whole signal,
/// normalized so the largest bin is 0 dB. Bin b is at b * sr / len Hz.
std::vector<double> whole_signal_spectrum_db(std::span<const float> x);

} // namespace nws
