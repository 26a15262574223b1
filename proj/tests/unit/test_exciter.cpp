#include "support.hpp"

#include "nws/errors.hpp"
#include "nws/exciter.hpp"
#include "nws/metrics.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace nws;

namespace {

ExciterWeights uniform_weights(std::size_t channels, std::size_t harmonics)
{
    ExciterWeights w;
    w.channels = channels;
    w.harmonics = harmonics;
    w.weight.assign(channels * harmonics, 1.0f);
    w.bias.assign(channels, 0.0f);
    return w;
}

} // namespace

TEST_CASE("exciter matches the numpy cosine bank")
{
    const auto& o = test::oracles()["exciter"];
    ExciterWeights w;
    w.channels = o["channels"].get<std::size_t>();
    w.harmonics = o["harmonics"].get<std::size_t>();
    w.weight = test::floats(o["weight"]);
    w.bias = test::floats(o["bias"]);
    const auto f0 = test::floats(o["f0"]);
    OscillatorState st;
    const auto y = render_exciter(f0, w, st, 16000);
    const auto expect = test::doubles(o["y"]);
    REQUIRE(y.size() == expect.size());
    CHECK(test::max_abs_diff(y, expect) < 1e-5);
}

TEST_CASE("antialias mask and active harmonic count")
{
    const std::vector<float> f0{1000.0f, 1000.0f, 2000.0f};
    CHECK(antialias_mask(f0, 7, 16000) == std::vector<std::uint8_t>{1, 1, 0});
    CHECK(antialias_mask(f0, 8, 16000) == std::vector<std::uint8_t>{0, 0, 0});
    CHECK(antialias_mask(f0, 4, 16000) == std::vector<std::uint8_t>{1, 1, 0});
    CHECK(active_harmonics(1000.0, 16000, 101) == 7);
    CHECK(active_harmonics(1100.0, 16000, 101) == 7);
    CHECK(active_harmonics(50.0, 16000, 101) == 101);
    CHECK(active_harmonics(7999.0, 16000, 101) == 1);
    CHECK(active_harmonics(8000.0, 16000, 101) == 0);
}

TEST_CASE("masked exciter keeps harmonics 1..7 at 1 kHz")
{
    const auto w = uniform_weights(1, 101);
    const std::vector<float> f0(16000, 1000.0f);
    OscillatorState st;
    const AudioBuffer y{render_exciter(f0, w, st, 16000), 16000};
    CHECK(harmonic_peak_set(y, 1000.0, 101) == std::set<int>{1, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("exciter phase carries across calls")
{
    const auto w = uniform_weights(2, 5);
    std::vector<float> f0(300);
    for (std::size_t i = 0; i < f0.size(); ++i) f0[i] = 200.0f + static_cast<float>(i);
    OscillatorState a;
    const auto once = render_exciter(f0, w, a, 16000);

    OscillatorState b;
    const auto first = render_exciter(std::span<const float>(f0).first(123), w, b, 16000);
    const auto second = render_exciter(std::span<const float>(f0).subspan(123), w, b, 16000);
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t n = 0; n < 123; ++n) CHECK(first[c * 123 + n] == once[c * 300 + n]);
        for (std::size_t n = 0; n < 177; ++n) CHECK(second[c * 177 + n] == once[c * 300 + 123 + n]);
    }
    CHECK(a.phase == b.phase);
    CHECK(a.phase >= 0.0);
    CHECK(a.phase < 2.0 * std::numbers::pi);
}

TEST_CASE("exciter rejects non-positive f0")
{
    const auto w = uniform_weights(1, 3);
    OscillatorState st;
    const std::vector<float> f0{100.0f, 0.0f};
    CHECK_THROWS_AS(render_exciter(f0, w, st, 16000), InvalidInput);
}
