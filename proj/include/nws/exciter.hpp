#pragma once

// Harmonic exciter: an antialiased bank of harmonic cosines mixed into one
// weighted mixture per NEWT channel.
//
//   y_i[n] = sum_k A(k f0[n]) w_ik cos(k phi[n]) + b_i
//   phi[n] = phi[n-1] + 2 pi f0[n] / sr,  phi[-1] = 0
//
// A is a hard mask: 1 when k f0 < sr / 2, otherwise 0.

#include "nws/weights.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace nws {

struct OscillatorState {
    double phase = 0.0; // radians, kept in [0, 2 pi)
};

struct ExciterWeights {
    std::size_t channels = 0;
    std::size_t harmonics = 0;
    std::vector<float> weight; // [channels, harmonics]
    std::vector<float> bias;   // [channels]

    static ExciterWeights from_store(const TensorStore& store);
};

/// Per-sample mask for harmonic k (1-based): 1 where k * f0 < sr / 2.
std::vector<std::uint8_t> antialias_mask(std::span<const float> f0_hz, int k, int sample_rate);

/// Number of harmonics that pass the mask at this f0, capped at `max_k`.
std::size_t active_harmonics(double f0_hz, int sample_rate, std::size_t max_k);

/// Renders channels x num_samples (row-major) and advances `state`.
/// Throws InvalidInput on a non-positive or non-finite f0 sample.
std::vector<float> render_exciter(std::span<const float> f0_hz, const ExciterWeights& weights, OscillatorState& state,
                                  int sample_rate);

} // namespace nws
