#include "nws/reverb.hpp"

#include "nws/errors.hpp"

#include <algorithm>
#include <random>

namespace nws {

ReverbIr init_reverb_ir(std::size_t length, std::uint64_t seed)
{
    if (length == 0) throw InvalidArgument("init_reverb_ir: length must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1e-3);
    ReverbIr ir;
    ir.c.resize(length);
    ir.c[0] = 0.0f;
    for (std::size_t n = 1; n < length; ++n) ir.c[n] = static_cast<float>(dist(rng));
    return ir;
}

ReverbKernel::ReverbKernel(std::span<const float> ir, std::size_t partition) : partition_(partition), ir_length_(ir.size())
{
    if (partition < 1) throw InvalidArgument("ReverbKernel: partition must be positive");
    if (ir.empty()) throw InvalidArgument("ReverbKernel: impulse response is empty");
    const std::size_t P = partition;
    head_.assign(P, 0.0);
    for (std::size_t j = 0; j < std::min(P, ir.size()); ++j) head_[j] = ir[j];

    const std::size_t count = (ir.size() + P - 1) / P;
    if (count > 1) {
        dsp::RealFft fft(2 * P);
        std::vector<double> seg(P);
        for (std::size_t s = 1; s < count; ++s) {
            std::fill(seg.begin(), seg.end(), 0.0);
            for (std::size_t j = 0; j < P && s * P + j < ir.size(); ++j) seg[j] = ir[s * P + j];
            std::vector<std::complex<double>> spec(P + 1);
            fft.forward(seg, spec);
            segments_.push_back(std::move(spec));
        }
    }
}

ReverbState ReverbState::fresh(const ReverbKernel& kernel)
{
    const std::size_t P = kernel.partition();
    ReverbState s{
        std::vector<double>(P, 0.0),
        std::vector<double>(P, 0.0),
        0,
        std::vector<std::vector<std::complex<double>>>(kernel.segments() - 1,
                                                       std::vector<std::complex<double>>(kernel.bins())),
        0,
        std::vector<double>(P, 0.0),
        dsp::RealFft(std::max<std::size_t>(2 * P, 2)),
        std::vector<double>(2 * P),
        std::vector<std::complex<double>>(kernel.bins()),
    };
    return s;
}

namespace {

// Called once `cur` is full: pushes its spectrum into the delay line and
// computes the delay-line output for the next partition.
void complete_partition(const ReverbKernel& kernel, ReverbState& st)
{
    const std::size_t P = kernel.partition();
    const std::size_t ring = st.fdl.size();
    if (ring > 0) {
        std::copy(st.prev.begin(), st.prev.end(), st.frame.begin());
        std::copy(st.cur.begin(), st.cur.end(), st.frame.begin() + static_cast<std::ptrdiff_t>(P));
        st.fdl_head = (st.fdl_head + 1) % ring;
        st.fft.forward(st.frame, st.fdl[st.fdl_head]);

        // Overlap-save: segment s pairs with the spectrum pushed s - 1 partitions ago.
        std::fill(st.accum.begin(), st.accum.end(), std::complex<double>{});
        for (std::size_t s = 1; s <= ring; ++s) {
            const auto& x = st.fdl[(st.fdl_head + ring - (s - 1)) % ring];
            const auto& h = kernel.segment(s);
            for (std::size_t b = 0; b < st.accum.size(); ++b) st.accum[b] += x[b] * h[b];
        }
        st.fft.inverse(st.accum, st.frame);
        std::copy(st.frame.begin() + static_cast<std::ptrdiff_t>(P), st.frame.end(), st.wet.begin());
    }
    std::swap(st.prev, st.cur);
    st.pos = 0;
}

} // namespace

void apply_reverb(std::span<const float> in, std::span<float> out, const ReverbKernel& kernel, ReverbState& st)
{
    if (out.size() != in.size()) throw InvalidArgument("apply_reverb: output size must match input");
    const std::size_t P = kernel.partition();
    const auto& head = kernel.head();
    for (std::size_t n = 0; n < in.size(); ++n) {
        const double x = in[n];
        const std::size_t p = st.pos;
        st.cur[p] = x;
        double direct = 0.0;
        for (std::size_t j = 0; j <= p; ++j) direct += head[j] * st.cur[p - j];
        for (std::size_t j = p + 1; j < P; ++j) direct += head[j] * st.prev[P + p - j];
        out[n] = static_cast<float>(x + (st.wet[p] + direct));
        st.pos = p + 1;
        if (st.pos == P) complete_partition(kernel, st);
    }
}

AudioBuffer apply_reverb(const AudioBuffer& x, const ReverbKernel& kernel, ReverbState& state)
{
    AudioBuffer out;
    out.sample_rate = x.sample_rate;
    out.samples.resize(x.size());
    apply_reverb(x.samples, out.samples, kernel, state);
    return out;
}

} // namespace nws
