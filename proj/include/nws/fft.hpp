#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace nws::dsp {

/// Real-input FFT of a fixed size, backed by an FFTW plan.
///
/// Each instance owns its plan and aligned work buffers, so distinct
/// instances may be executed concurrently. Plan creation and destruction
/// are serialized internally because the FFTW planner is not reentrant.
class RealFft {
public:
    explicit RealFft(std::size_t size);
    ~RealFft();

    RealFft(RealFft&&) noexcept;
    RealFft& operator=(RealFft&&) noexcept;
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    std::size_t size() const noexcept { return size_; }
    std::size_t bins() const noexcept { return size_ / 2 + 1; }

    /// Forward transform. `in` may be shorter than size(); the rest is zero.
    void forward(std::span<const double> in, std::span<std::complex<double>> out);

    /// Inverse transform including the 1/size normalization.
    void inverse(std::span<const std::complex<double>> in, std::span<double> out);

private:
    struct Impl;
    std::size_t size_ = 0;
    std::unique_ptr<Impl> impl_;
};

} // namespace nws::dsp
