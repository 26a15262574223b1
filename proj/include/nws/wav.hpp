#pragma once

// Mono RIFF/WAVE I/O: 16-bit PCM (saturating) or 32-bit IEEE float.

#include "nws/signal.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nws {

enum class WavFormat { Pcm16, Float32 };

/// round(x * 32767) clamped to [-32768, 32767]; NaN maps to 0.
std::int16_t quantize_pcm16(float x);

std::vector<std::uint8_t> encode_wav(const AudioBuffer& audio, WavFormat format = WavFormat::Pcm16);
/// Accepts mono or multichannel PCM16 / float32; multichannel input keeps channel 0.
AudioBuffer decode_wav(const std::vector<std::uint8_t>& bytes);

void write_wav(const std::string& path, const AudioBuffer& audio, WavFormat format = WavFormat::Pcm16);
AudioBuffer read_wav(const std::string& path);

} // namespace nws
