#pragma once

// Learnable convolution reverb: out = x + (c * x), c[0] = 0.
//
// Streaming uses zero-latency uniformly partitioned convolution on a fixed
// partition grid. The first partition of the IR is applied directly in the
// time domain, sample by sample; the remaining partitions go through a
// frequency-domain delay line that is advanced once per completed input
// partition. Because the grid never depends on how the caller splits the
// input, every block partition produces bit-identical output.

#include "nws/fft.hpp"
#include "nws/signal.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace nws {

inline constexpr std::size_t kDefaultReverbPartition = 128;

struct ReverbIr {
    std::vector<float> c;
};

/// c[0] = 0; c[n >= 1] ~ N(0, variance 1e-6), deterministic per seed.
ReverbIr init_reverb_ir(std::size_t length, std::uint64_t seed);

/// Immutable, shareable IR spectra for one impulse response.
class ReverbKernel {
public:
    ReverbKernel() = default;
    ReverbKernel(std::span<const float> ir, std::size_t partition = kDefaultReverbPartition);

    std::size_t partition() const { return partition_; }
    std::size_t ir_length() const { return ir_length_; }
    std::size_t segments() const { return segments_.size() + 1; }

    const std::vector<double>& head() const { return head_; }
    const std::vector<std::complex<double>>& segment(std::size_t s) const { return segments_[s - 1]; }
    std::size_t bins() const { return partition_ + 1; }

private:
    std::size_t partition_ = kDefaultReverbPartition;
    std::size_t ir_length_ = 0;
    std::vector<double> head_; // c[0 .. P)
    std::vector<std::vector<std::complex<double>>> segments_; // spectra of c[sP .. (s+1)P), s >= 1
};

/// Per-stream convolution state.
struct ReverbState {
    std::vector<double> prev;  // last completed input partition
    std::vector<double> cur;   // partition being filled
    std::size_t pos = 0;       // samples in `cur`
    std::vector<std::vector<std::complex<double>>> fdl; // input spectra, ring
    std::size_t fdl_head = 0;  // index of the most recent spectrum
    std::vector<double> wet;   // delay-line output for the current partition
    dsp::RealFft fft;
    std::vector<double> frame;
    std::vector<std::complex<double>> accum;

    static ReverbState fresh(const ReverbKernel& kernel);
};

/// Processes any number of samples; see the file comment for the scheme.
void apply_reverb(std::span<const float> in, std::span<float> out, const ReverbKernel& kernel, ReverbState& state);
AudioBuffer apply_reverb(const AudioBuffer& x, const ReverbKernel& kernel, ReverbState& state);

} // namespace nws
