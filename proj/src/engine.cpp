#include "nws/engine.hpp"

#include "nws/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

namespace nws {

EngineState EngineState::fresh(const Model& model, const RenderOptions& opts)
{
    const auto taps = static_cast<std::size_t>(model.config.noise_fir_taps);
    const auto hop = static_cast<std::size_t>(model.config.hop_size);
    return EngineState{
        GruState::zeros(model.encoder.hidden()),
        OscillatorState{},
        NoiseState::fresh(taps, opts.noise_seed),
        ReverbState::fresh(model.reverb),
        std::nullopt,
        std::nullopt,
        0,
        NoiseSynth(taps, hop),
    };
}

namespace {

AffineParams last_frame(const AffineParams& p)
{
    const std::size_t C = p.channels;
    const std::size_t off = (p.num_frames() - 1) * C;
    auto tail = [&](const std::vector<float>& v) {
        return std::vector<float>(v.begin() + static_cast<std::ptrdiff_t>(off), v.begin() + static_cast<std::ptrdiff_t>(off + C));
    };
    return AffineParams{C, tail(p.alpha_a), tail(p.beta_a), tail(p.alpha_n), tail(p.beta_n)};
}

AffineParams first_frame(const AffineParams& p)
{
    const std::size_t C = p.channels;
    auto head = [&](const std::vector<float>& v) { return std::vector<float>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(C)); };
    return AffineParams{C, head(p.alpha_a), head(p.beta_a), head(p.alpha_n), head(p.beta_n)};
}

} // namespace

std::vector<float> process_chunk(const Model& model, const ControlTrack& chunk, const RenderOptions& opts,
                                 EngineState& state)
{
    const int hop = model.config.hop_size;
    if (chunk.hop_size != hop)
        throw AlignmentError("control chunk hop size " + std::to_string(chunk.hop_size) + " does not match model hop " +
                             std::to_string(hop));
    if (chunk.loudness_db.size() != chunk.f0_hz.size())
        throw AlignmentError("control chunk has mismatched f0 and loudness frame counts");
    const std::size_t F = chunk.num_frames();
    if (F == 0) return {};
    if (opts.use_fastnewt && !model.has_tables())
        throw InvalidArgument("FastNEWT requested but the model has no baked tables");
    if (!opts.use_fastnewt && !model.has_shapers())
        throw InvalidArgument("model holds only FastNEWT tables; enable FastNEWT to render it");

    const auto C = static_cast<std::size_t>(model.config.n_newt_channels);
    const std::size_t N = F * static_cast<std::size_t>(hop);

    const ControlEmbedding z = model.encoder.encode(standardize(chunk, model.stats), state.gru);

    const AffineParams affine = affine_mlp_forward(z, model.affine_mlp, C);
    const AffineParams prev = state.prev_affine ? *state.prev_affine : first_frame(affine);
    const AudioRateParams params = upsample_affine(affine, hop, &prev);
    state.prev_affine = last_frame(affine);

    FrameSeries f0_frames;
    f0_frames.channels = 1;
    f0_frames.hop_size = hop;
    f0_frames.sample_rate = model.config.sample_rate;
    f0_frames.values.reserve(F + 1);
    f0_frames.values.push_back(state.prev_f0 ? *state.prev_f0 : chunk.f0_hz.front());
    f0_frames.values.insert(f0_frames.values.end(), chunk.f0_hz.begin(), chunk.f0_hz.end());
    std::vector<float> f0_audio = dsp::upsample_linear(f0_frames);
    f0_audio.resize(N);
    state.prev_f0 = chunk.f0_hz.back();

    const std::vector<float> excitation = render_exciter(f0_audio, model.exciter, state.osc, model.config.sample_rate);
    std::vector<float> out = opts.use_fastnewt ? newt_forward(excitation, params, *model.tables)
                                               : newt_forward(excitation, params, *model.shapers);

    const FilterFrameBank filters = noise_mlp_forward(z, model.noise_mlp);
    const std::vector<float> noise = state.noise_synth.render(filters, state.noise);
    for (std::size_t n = 0; n < N; ++n) out[n] += noise[n];

    if (opts.enable_reverb) apply_reverb(out, out, model.reverb, state.reverb);
    state.frames_consumed += F;
    return out;
}

AudioBuffer render(const Model& model, const ControlTrack& track, const RenderOptions& opts)
{
    if (track.num_frames() == 0) throw InvalidArgument("render: control track is empty");
    EngineState state = EngineState::fresh(model, opts);
    return AudioBuffer{process_chunk(model, track, opts, state), model.config.sample_rate};
}

AudioBuffer render_streaming(const Model& model, const ControlTrack& track, const RenderOptions& opts)
{
    const auto hop = static_cast<std::size_t>(model.config.hop_size);
    if (opts.block_size == 0 || opts.block_size % hop != 0)
        throw AlignmentError("block size " + std::to_string(opts.block_size) + " is not a positive multiple of hop " +
                             std::to_string(hop));
    if (track.num_frames() == 0) throw InvalidArgument("render_streaming: control track is empty");
    const std::size_t frames_per_block = opts.block_size / hop;
    EngineState state = EngineState::fresh(model, opts);
    AudioBuffer out;
    out.sample_rate = model.config.sample_rate;
    out.samples.reserve(track.num_frames() * hop);
    for (std::size_t begin = 0; begin < track.num_frames(); begin += frames_per_block) {
        const std::size_t count = std::min(frames_per_block, track.num_frames() - begin);
        const auto block = process_chunk(model, track.slice(begin, count), opts, state);
        out.samples.insert(out.samples.end(), block.begin(), block.end());
    }
    return out;
}

std::vector<AudioBuffer> render_streaming(const Model& model, std::span<const ControlTrack> chunks,
                                          const RenderOptions& opts, EngineState& state)
{
    std::vector<AudioBuffer> out;
    out.reserve(chunks.size());
    for (const auto& chunk : chunks)
        out.push_back(AudioBuffer{process_chunk(model, chunk, opts, state), model.config.sample_rate});
    return out;
}

double percentile(std::vector<double> values, double q)
{
    if (values.empty()) throw InvalidArgument("percentile of an empty set");
    if (!(q >= 0.0 && q <= 100.0)) throw InvalidArgument("percentile must be in [0, 100]");
    std::sort(values.begin(), values.end());
    const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

RtfStats summarize_rtf(std::vector<double> runs)
{
    RtfStats s;
    s.mean = std::accumulate(runs.begin(), runs.end(), 0.0) / static_cast<double>(runs.size());
    s.p50 = percentile(runs, 50.0);
    s.p90 = percentile(runs, 90.0);
    s.min = *std::min_element(runs.begin(), runs.end());
    s.max = *std::max_element(runs.begin(), runs.end());
    s.runs = std::move(runs);
    return s;
}

RtfStats measure_rtf(const Model& model, double duration_s, const RenderOptions& opts, std::size_t repetitions,
                     bool streaming)
{
    if (!(duration_s > 0.0)) throw InvalidArgument("measure_rtf: duration must be positive");
    if (repetitions < 1) throw InvalidArgument("measure_rtf: need at least one repetition");
    const int hop = model.config.hop_size;
    const auto frames = static_cast<std::size_t>(std::ceil(duration_s * model.config.sample_rate / hop));
    const ControlTrack track = demo_control_track(frames, hop, model.config.sample_rate);
    const double t_i = static_cast<double>(frames * static_cast<std::size_t>(hop)) / model.config.sample_rate;

    std::vector<double> runs;
    runs.reserve(repetitions);
    for (std::size_t r = 0; r < repetitions; ++r) {
        const auto start = std::chrono::steady_clock::now();
        const AudioBuffer out = streaming ? render_streaming(model, track, opts) : render(model, track, opts);
        const auto stop = std::chrono::steady_clock::now();
        if (out.samples.empty()) throw Error("measure_rtf: render produced no output");
        runs.push_back(std::chrono::duration<double>(stop - start).count() / t_i);
    }
    return summarize_rtf(std::move(runs));
}

ControlTrack demo_control_track(std::size_t num_frames, int hop_size, int sample_rate)
{
    ControlTrack t;
    t.hop_size = hop_size;
    t.f0_hz.resize(num_frames);
    t.loudness_db.resize(num_frames);
    const double frame_rate = static_cast<double>(sample_rate) / hop_size;
    const double span = num_frames > 1 ? static_cast<double>(num_frames - 1) : 1.0;
    for (std::size_t k = 0; k < num_frames; ++k) {
        const double u = static_cast<double>(k) / span;
        const double time = static_cast<double>(k) / frame_rate;
        const double glide = 220.0 * std::pow(2.0, u);
        t.f0_hz[k] = static_cast<float>(glide * (1.0 + 0.01 * std::sin(2.0 * std::numbers::pi * 5.0 * time)));
        t.loudness_db[k] = static_cast<float>(-60.0 + 40.0 * std::sin(std::numbers::pi * u));
    }
    return t;
}

} // namespace nws
