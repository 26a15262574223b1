#include "support.hpp"

#include "nws/errors.hpp"
#include "nws/wav.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <limits>

using namespace nws;

TEST_CASE("pcm16 quantization saturates")
{
    CHECK(quantize_pcm16(0.0f) == 0);
    CHECK(quantize_pcm16(1.0f) == 32767);
    CHECK(quantize_pcm16(-1.0f) == -32767);
    CHECK(quantize_pcm16(5.0f) == 32767);
    CHECK(quantize_pcm16(-5.0f) == -32768);
    CHECK(quantize_pcm16(std::numeric_limits<float>::quiet_NaN()) == 0);
    CHECK(quantize_pcm16(0.6f / 32767.0f) == 1);
}

TEST_CASE("wav round trips")
{
    AudioBuffer a{{0.0f, 0.25f, -0.5f, 0.999f, -2.0f}, 22050};
    const auto f = decode_wav(encode_wav(a, WavFormat::Float32));
    CHECK(f.samples == a.samples);
    CHECK(f.sample_rate == 22050);

    const auto p = decode_wav(encode_wav(a, WavFormat::Pcm16));
    REQUIRE(p.size() == a.size());
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(p.samples[i] - a.samples[i]) <= 0.5f / 32767.0f + 1e-7f);
    CHECK(p.samples[4] == -32768.0f / 32767.0f);

    const auto bytes = encode_wav(a);
    CHECK(bytes.size() == 44 + 2 * a.size());
    CHECK(encode_wav(a) == bytes);
}

TEST_CASE("wav decode errors")
{
    CHECK_THROWS_AS(decode_wav({1, 2, 3}), FormatError);
    auto bytes = encode_wav(AudioBuffer{{0.1f}, 16000});
    bytes.resize(40);
    CHECK_THROWS_AS(decode_wav(bytes), FormatError);
}
