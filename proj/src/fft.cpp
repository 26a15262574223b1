#include "nws/fft.hpp"

#include "nws/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

namespace nws::dsp {

namespace {
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}
} // namespace

struct RealFft::Impl {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;

    ~Impl()
    {
        std::lock_guard lock(planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
        fftw_free(real);
        fftw_free(spec);
    }
};

RealFft::RealFft(std::size_t size) : size_(size), impl_(std::make_unique<Impl>())
{
    if (size < 2) throw InvalidArgument("RealFft: size must be at least 2");
    const int n = static_cast<int>(size);
    std::lock_guard lock(planner_mutex());
    impl_->real = fftw_alloc_real(size);
    impl_->spec = fftw_alloc_complex(size / 2 + 1);
    impl_->fwd = fftw_plan_dft_r2c_1d(n, impl_->real, impl_->spec, FFTW_ESTIMATE);
    impl_->inv = fftw_plan_dft_c2r_1d(n, impl_->spec, impl_->real, FFTW_ESTIMATE);
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out)
{
    if (in.size() > size_ || out.size() < bins())
        throw InvalidArgument("RealFft::forward: buffer size mismatch");
    std::copy(in.begin(), in.end(), impl_->real);
    std::fill(impl_->real + in.size(), impl_->real + size_, 0.0);
    fftw_execute(impl_->fwd);
    const auto* spec = reinterpret_cast<const std::complex<double>*>(impl_->spec);
    std::copy(spec, spec + bins(), out.begin());
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out)
{
    if (in.size() < bins() || out.size() < size_)
        throw InvalidArgument("RealFft::inverse: buffer size mismatch");
    auto* spec = reinterpret_cast<std::complex<double>*>(impl_->spec);
    std::copy(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(bins()), spec);
    // c2r destroys its input, which is our private copy.
    fftw_execute(impl_->inv);
    const double scale = 1.0 / static_cast<double>(size_);
    for (std::size_t i = 0; i < size_; ++i) out[i] = impl_->real[i] * scale;
}

} // namespace nws::dsp
