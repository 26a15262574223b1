#include "nws/wav.hpp"

#include "nws/errors.hpp"
#include "nws/weights.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

namespace nws {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v)
{
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

std::uint32_t get_u32(const std::vector<std::uint8_t>& b, std::size_t at)
{
    if (at + 4 > b.size()) throw FormatError("WAV truncated");
    return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
           (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint16_t get_u16(const std::vector<std::uint8_t>& b, std::size_t at)
{
    if (at + 2 > b.size()) throw FormatError("WAV truncated");
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

} // namespace

std::int16_t quantize_pcm16(float x)
{
    if (std::isnan(x)) return 0;
    const double v = std::round(static_cast<double>(x) * 32767.0);
    return static_cast<std::int16_t>(std::clamp(v, -32768.0, 32767.0));
}

std::vector<std::uint8_t> encode_wav(const AudioBuffer& audio, WavFormat format)
{
    const bool is_float = format == WavFormat::Float32;
    const std::uint16_t bits = is_float ? 32 : 16;
    const std::uint32_t bytes_per_sample = bits / 8;
    const auto data_bytes = static_cast<std::uint32_t>(audio.size() * bytes_per_sample);

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_bytes);
    put_tag(out, "RIFF");
    put_u32(out, 36 + data_bytes);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, is_float ? 3 : 1);
    put_u16(out, 1);
    put_u32(out, static_cast<std::uint32_t>(audio.sample_rate));
    put_u32(out, static_cast<std::uint32_t>(audio.sample_rate) * bytes_per_sample);
    put_u16(out, static_cast<std::uint16_t>(bytes_per_sample));
    put_u16(out, bits);
    put_tag(out, "data");
    put_u32(out, data_bytes);
    for (float x : audio.samples) {
        if (is_float)
            put_u32(out, std::bit_cast<std::uint32_t>(x));
        else
            put_u16(out, static_cast<std::uint16_t>(quantize_pcm16(x)));
    }
    return out;
}

AudioBuffer decode_wav(const std::vector<std::uint8_t>& b)
{
    if (b.size() < 12 || std::memcmp(b.data(), "RIFF", 4) != 0 || std::memcmp(b.data() + 8, "WAVE", 4) != 0)
        throw FormatError("not a RIFF/WAVE file");
    std::size_t at = 12;
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    while (at + 8 <= b.size()) {
        const std::string tag(reinterpret_cast<const char*>(b.data() + at), 4);
        const std::uint32_t size = get_u32(b, at + 4);
        const std::size_t body = at + 8;
        if (body + size > b.size()) throw FormatError("WAV chunk " + tag + " truncated");
        if (tag == "fmt ") {
            format = get_u16(b, body);
            channels = get_u16(b, body + 2);
            rate = get_u32(b, body + 4);
            bits = get_u16(b, body + 14);
            have_fmt = true;
        } else if (tag == "data") {
            if (!have_fmt) throw FormatError("WAV data chunk before fmt chunk");
            if (channels == 0) throw FormatError("WAV has zero channels");
            AudioBuffer audio;
            audio.sample_rate = static_cast<int>(rate);
            if (format == 1 && bits == 16) {
                const std::size_t frames = size / (2u * channels);
                audio.samples.resize(frames);
                for (std::size_t i = 0; i < frames; ++i)
                    audio.samples[i] = static_cast<float>(static_cast<std::int16_t>(get_u16(b, body + 2 * i * channels))) / 32767.0f;
            } else if (format == 3 && bits == 32) {
                const std::size_t frames = size / (4u * channels);
                audio.samples.resize(frames);
                for (std::size_t i = 0; i < frames; ++i)
                    audio.samples[i] = std::bit_cast<float>(get_u32(b, body + 4 * i * channels));
            } else {
                throw FormatError("unsupported WAV encoding (format " + std::to_string(format) + ", " +
                                  std::to_string(bits) + " bits)");
            }
            return audio;
        }
        at = body + size + (size & 1);
    }
    throw FormatError("WAV has no data chunk");
}

void write_wav(const std::string& path, const AudioBuffer& audio, WavFormat format)
{
    write_file_bytes(path, encode_wav(audio, format));
}

AudioBuffer read_wav(const std::string& path) { return decode_wav(read_file_bytes(path)); }

} // namespace nws
