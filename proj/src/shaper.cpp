#include "nws/shaper.hpp"

#include "nws/errors.hpp"
#include "nws/signal.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace nws {

AffineParams affine_mlp_forward(const ControlEmbedding& z, const nn::Mlp& mlp, std::size_t channels)
{
    if (z.width != mlp.in_features()) throw SchemaError("affine_mlp_forward: embedding width does not match the MLP");
    if (mlp.out_features() != 4 * channels) throw SchemaError("affine_mlp_forward: MLP must output 4 x channels values");

    const std::size_t F = z.num_frames();
    AffineParams p;
    p.channels = channels;
    p.alpha_a.resize(F * channels);
    p.beta_a.resize(F * channels);
    p.alpha_n.resize(F * channels);
    p.beta_n.resize(F * channels);
    std::vector<float> out(4 * channels);
    std::vector<float> scratch;
    for (std::size_t k = 0; k < F; ++k) {
        mlp.forward(z.frame(k), out, scratch);
        const auto row = static_cast<std::ptrdiff_t>(k * channels);
        const auto C = static_cast<std::ptrdiff_t>(channels);
        std::copy(out.begin(), out.begin() + C, p.alpha_a.begin() + row);
        std::copy(out.begin() + C, out.begin() + 2 * C, p.beta_a.begin() + row);
        std::copy(out.begin() + 2 * C, out.begin() + 3 * C, p.alpha_n.begin() + row);
        std::copy(out.begin() + 3 * C, out.begin() + 4 * C, p.beta_n.begin() + row);
    }
    return p;
}

AudioRateParams upsample_affine(const AffineParams& params, int hop_size, const AffineParams* previous)
{
    const std::size_t C = params.channels;
    const std::size_t F = params.num_frames();
    if (previous && (previous->channels != C || previous->num_frames() != 1))
        throw InvalidArgument("upsample_affine: previous must hold exactly one frame of the same width");

    AudioRateParams out;
    out.channels = C;
    out.num_samples = F * static_cast<std::size_t>(hop_size);
    if (F == 0) return out;

    auto plane = [&](const std::vector<float>& frames, const std::vector<float>* prev) {
        FrameSeries series;
        series.channels = C;
        series.hop_size = hop_size;
        if (prev) series.values = *prev;
        series.values.insert(series.values.end(), frames.begin(), frames.end());
        auto up = dsp::upsample_linear(series);
        if (!prev) return up;
        // Drop the held final hop of every channel row.
        const std::size_t full = (F + 1) * static_cast<std::size_t>(hop_size);
        std::vector<float> trimmed(C * out.num_samples);
        for (std::size_t c = 0; c < C; ++c)
            std::copy_n(up.begin() + static_cast<std::ptrdiff_t>(c * full), out.num_samples,
                        trimmed.begin() + static_cast<std::ptrdiff_t>(c * out.num_samples));
        return trimmed;
    };
    out.alpha_a = plane(params.alpha_a, previous ? &previous->alpha_a : nullptr);
    out.beta_a = plane(params.beta_a, previous ? &previous->beta_a : nullptr);
    out.alpha_n = plane(params.alpha_n, previous ? &previous->alpha_n : nullptr);
    out.beta_n = plane(params.beta_n, previous ? &previous->beta_n : nullptr);
    return out;
}

ShaperBank::ShaperBank(std::vector<std::vector<Layer>> channels) : channels_(std::move(channels))
{
    for (const auto& layers : channels_) {
        if (layers.empty()) throw SchemaError("shaper: need at least one layer");
        std::size_t width = 1;
        for (const auto& l : layers) {
            if (l.in != width || l.weight.size() != l.in * l.out || l.bias.size() != l.out)
                throw SchemaError("shaper: layer widths are inconsistent");
            if (l.out > kMaxHidden) throw SchemaError("shaper: hidden width exceeds " + std::to_string(kMaxHidden));
            width = l.out;
        }
        if (width != 1) throw SchemaError("shaper: final layer must have one output");
    }
}

ShaperBank ShaperBank::from_store(const TensorStore& store, int channels, int depth)
{
    std::vector<std::vector<Layer>> all(static_cast<std::size_t>(channels));
    for (int i = 0; i < channels; ++i) {
        for (int j = 0; j < depth; ++j) {
            const std::string prefix = "newt.shaper." + std::to_string(i) + ".layer" + std::to_string(j);
            const auto& w = store.get(prefix + ".weight");
            const auto& b = store.get(prefix + ".bias");
            if (w.shape.size() != 2) throw SchemaError("tensor " + prefix + ".weight must be two-dimensional");
            Layer l;
            l.out = static_cast<std::size_t>(w.shape[0]);
            l.in = static_cast<std::size_t>(w.shape[1]);
            l.weight = w.data;
            l.bias = b.data;
            all[static_cast<std::size_t>(i)].push_back(std::move(l));
        }
    }
    return ShaperBank(std::move(all));
}

float ShaperBank::eval(std::size_t channel, float x) const
{
    const auto& layers = channels_[channel];
    std::array<float, kMaxHidden> a{};
    std::array<float, kMaxHidden> b{};
    a[0] = x;
    for (std::size_t j = 0; j < layers.size(); ++j) {
        const auto& l = layers[j];
        const bool last = j + 1 == layers.size();
        for (std::size_t o = 0; o < l.out; ++o) {
            float acc = l.bias[o];
            const float* row = l.weight.data() + o * l.in;
            for (std::size_t i = 0; i < l.in; ++i) acc += row[i] * a[i];
            b[o] = last ? acc : std::sin(acc);
        }
        std::swap(a, b);
    }
    return a[0];
}

FastNewtTable bake_fastnewt(const ShaperBank& bank, std::size_t channel, std::size_t table_size, float lo, float hi)
{
    if (table_size < 2) throw InvalidArgument("bake_fastnewt: table size must be >= 2");
    if (!(lo < hi)) throw InvalidArgument("bake_fastnewt: domain requires lo < hi");
    if (channel >= bank.channels()) throw InvalidArgument("bake_fastnewt: channel out of range");

    FastNewtTable t;
    t.lo = lo;
    t.hi = hi;
    t.samples.resize(table_size);
    const double step = (static_cast<double>(hi) - lo) / static_cast<double>(table_size - 1);
    for (std::size_t j = 0; j < table_size; ++j) {
        const float x = j + 1 == table_size ? hi : static_cast<float>(lo + step * static_cast<double>(j));
        t.samples[j] = bank.eval(channel, x);
    }
    return t;
}

TableBank bake_all(const ShaperBank& bank, std::size_t table_size, float lo, float hi)
{
    TableBank tables;
    tables.reserve(bank.channels());
    for (std::size_t i = 0; i < bank.channels(); ++i) tables.push_back(bake_fastnewt(bank, i, table_size, lo, hi));
    return tables;
}

TableBank tables_from_file(const BakedTables& baked)
{
    if (baked.table_size < 2 || !(baked.lo < baked.hi)) throw SchemaError("invalid FastNEWT table specification");
    TableBank tables;
    for (const auto& row : baked.channels) {
        if (row.size() != baked.table_size) throw SchemaError("FastNEWT table has the wrong length");
        tables.push_back(FastNewtTable{row, baked.lo, baked.hi});
    }
    return tables;
}

BakedTables tables_to_file(const TableBank& tables)
{
    if (tables.empty()) throw InvalidArgument("tables_to_file: empty table bank");
    BakedTables out;
    out.table_size = tables.front().samples.size();
    out.lo = tables.front().lo;
    out.hi = tables.front().hi;
    for (const auto& t : tables) {
        if (t.samples.size() != out.table_size || t.lo != out.lo || t.hi != out.hi)
            throw InvalidArgument("tables_to_file: all tables must share size and domain");
        out.channels.push_back(t.samples);
    }
    return out;
}

BakeError measure_bake_error(const ShaperBank& bank, std::size_t channel, const FastNewtTable& table,
                             std::size_t oversample)
{
    const std::size_t intervals = (table.samples.size() - 1) * oversample;
    const double step = (static_cast<double>(table.hi) - table.lo) / static_cast<double>(intervals);
    BakeError err;
    float lo_val = 0.0f;
    float hi_val = 0.0f;
    for (std::size_t t = 0; t <= intervals; ++t) {
        const float x = t == intervals ? table.hi : static_cast<float>(table.lo + step * static_cast<double>(t));
        const float exact = bank.eval(channel, x);
        const float approx = table.lookup(x);
        err.max_abs_error = std::max(err.max_abs_error, static_cast<double>(std::fabs(exact - approx)));
        if (t == 0) {
            lo_val = hi_val = exact;
        } else {
            lo_val = std::min(lo_val, exact);
            hi_val = std::max(hi_val, exact);
        }
    }
    err.output_range = static_cast<double>(hi_val) - lo_val;
    return err;
}

namespace {

template <typename Shape>
std::vector<float> apply_newt(std::span<const float> exciter, const AudioRateParams& p, std::size_t channels,
                              Shape&& shape)
{
    const std::size_t N = p.num_samples;
    if (p.channels != channels || exciter.size() != channels * N || p.alpha_a.size() != channels * N ||
        p.beta_a.size() != channels * N || p.alpha_n.size() != channels * N || p.beta_n.size() != channels * N)
        throw Error("newt_forward: exciter and upsampled parameters disagree in length (internal consistency)");

    std::vector<float> out(N, 0.0f);
    for (std::size_t c = 0; c < channels; ++c) {
        const float* y = exciter.data() + c * N;
        const float* aa = p.alpha_a.data() + c * N;
        const float* ba = p.beta_a.data() + c * N;
        const float* an = p.alpha_n.data() + c * N;
        const float* bn = p.beta_n.data() + c * N;
        for (std::size_t n = 0; n < N; ++n) out[n] += an[n] * shape(c, aa[n] * y[n] + ba[n]) + bn[n];
    }
    return out;
}

} // namespace

std::vector<float> newt_forward(std::span<const float> exciter, const AudioRateParams& params, const ShaperBank& bank)
{
    return apply_newt(exciter, params, bank.channels(), [&bank](std::size_t c, float x) { return bank.eval(c, x); });
}

std::vector<float> newt_forward(std::span<const float> exciter, const AudioRateParams& params, const TableBank& tables)
{
    return apply_newt(exciter, params, tables.size(),
                      [&tables](std::size_t c, float x) { return tables[c].lookup(x); });
}

} // namespace nws
