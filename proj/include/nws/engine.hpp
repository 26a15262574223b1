#pragma once

// Full synthesis graph:
//   standardize -> GRU encoder -> {affine MLP, noise MLP} at frame rate
//   -> upsample -> harmonic exciter -> NEWT -> + filtered noise -> reverb
//
// Every stage is causal and carries its own state, so a control track can be
// fed in chunks of whole frames and the concatenated output equals a
// one-shot render sample for sample. Frame-rate parameters are interpolated
// from the previous frame to the current one across each hop, which delays
// them by one hop but never looks ahead.

#include "nws/model.hpp"
#include "nws/noise.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace nws {

struct RenderOptions {
    bool use_fastnewt = false;
    std::uint64_t noise_seed = 0;
    bool enable_reverb = true;
    std::size_t block_size = 256; // samples, streaming only; a positive multiple of hop_size
};

struct EngineState {
    GruState gru;
    OscillatorState osc;
    NoiseState noise;
    ReverbState reverb;
    std::optional<float> prev_f0;
    std::optional<AffineParams> prev_affine;
    std::size_t frames_consumed = 0;
    NoiseSynth noise_synth; // scratch only

    static EngineState fresh(const Model& model, const RenderOptions& opts);
    void reset(const Model& model, const RenderOptions& opts) { *this = fresh(model, opts); }
};

/// Renders one chunk of whole frames and advances `state`.
/// Returns chunk.num_frames() * hop_size samples.
std::vector<float> process_chunk(const Model& model, const ControlTrack& chunk, const RenderOptions& opts,
                                 EngineState& state);

/// Offline render of a whole track from the initial state.
AudioBuffer render(const Model& model, const ControlTrack& track, const RenderOptions& opts = {});

/// Splits `track` into blocks of opts.block_size samples and renders them
/// through process_chunk. Throws AlignmentError unless block_size is a
/// positive multiple of the hop size.
AudioBuffer render_streaming(const Model& model, const ControlTrack& track, const RenderOptions& opts);

/// Renders pre-split chunks in order with caller-owned state.
std::vector<AudioBuffer> render_streaming(const Model& model, std::span<const ControlTrack> chunks,
                                          const RenderOptions& opts, EngineState& state);

struct RtfStats {
    std::vector<double> runs; // t_p / t_i per run
    double mean = 0.0;
    double p50 = 0.0;
    double p90 = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// Percentile with linear interpolation between order statistics.
double percentile(std::vector<double> values, double q);

RtfStats summarize_rtf(std::vector<double> runs);

/// Times `repetitions` renders of a synthetic `duration_s` track. With
/// `streaming` set, each run goes through render_streaming at
/// opts.block_size; otherwise it is a single forward pass.
RtfStats measure_rtf(const Model& model, double duration_s, const RenderOptions& opts, std::size_t repetitions,
                     bool streaming = false);

/// Deterministic test track: a 220 -> 440 Hz glide with 5 Hz vibrato and a
/// swelling loudness envelope.
ControlTrack demo_control_track(std::size_t num_frames, int hop_size = 128, int sample_rate = 16000);

} // namespace nws
