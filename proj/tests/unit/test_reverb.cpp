#include "support.hpp"

#include "nws/errors.hpp"
#include "nws/reverb.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace nws;

namespace {

std::vector<float> run(std::span<const float> x, const ReverbKernel& k, std::span<const std::size_t> blocks)
{
    auto st = ReverbState::fresh(k);
    std::vector<float> out(x.size());
    std::size_t at = 0, i = 0;
    while (at < x.size()) {
        const std::size_t n = std::min(blocks[i++ % blocks.size()], x.size() - at);
        apply_reverb(x.subspan(at, n), std::span<float>(out).subspan(at, n), k, st);
        at += n;
    }
    return out;
}

std::vector<double> direct(std::span<const float> x, std::span<const float> ir)
{
    std::vector<double> y(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        double acc = 0.0;
        for (std::size_t j = 0; j < ir.size() && j <= n; ++j) acc += static_cast<double>(ir[j]) * x[n - j];
        y[n] = static_cast<double>(x[n]) + acc;
    }
    return y;
}

} // namespace

TEST_CASE("zero IR is an exact dry passthrough")
{
    const std::vector<float> ir(1000, 0.0f);
    ReverbKernel k(ir);
    std::vector<float> x(777);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.1f * static_cast<float>(i)) * 3.0f;
    const std::size_t blocks[] = {777};
    CHECK(run(x, k, blocks) == x);
}

TEST_CASE("unit delay IR adds the previous sample")
{
    std::vector<float> ir(300, 0.0f);
    ir[1] = 1.0f;
    ReverbKernel k(ir);
    const std::vector<float> x{1.0f, 2.0f, 4.0f, 8.0f};
    const std::size_t blocks[] = {1};
    CHECK(run(x, k, blocks) == std::vector<float>{1.0f, 3.0f, 6.0f, 12.0f});
}

TEST_CASE("reverb matches the direct-convolution oracle")
{
    const auto& o = test::oracles()["reverb"];
    const auto x = test::floats(o["x"]);
    const auto ir = test::floats(o["ir"]);
    ReverbKernel k(ir);
    const std::size_t blocks[] = {512};
    CHECK(test::max_abs_diff(run(x, k, blocks), test::doubles(o["y"])) < 1e-5);
}

TEST_CASE("every block partition gives identical output")
{
    std::mt19937 rng(17);
    std::normal_distribution<float> d(0.0f, 1.0f);
    std::vector<float> ir(1500), x(3000);
    for (auto& v : ir) v = 0.01f * d(rng);
    ir[0] = 0.0f;
    for (auto& v : x) v = d(rng);
    ReverbKernel k(ir);
    const std::size_t whole[] = {3000};
    const auto ref = run(x, k, whole);
    CHECK(test::max_abs_diff(ref, direct(x, ir)) < 1e-5);
    const std::vector<std::vector<std::size_t>> partitions{{1}, {7, 128, 3}, {128}, {256}, {1000, 1}, {129}};
    for (const auto& p : partitions) CHECK(run(x, k, p) == ref);
}

TEST_CASE("reverb is linear in its input")
{
    std::mt19937 rng(2);
    std::normal_distribution<float> d(0.0f, 1.0f);
    std::vector<float> ir(400), x(900), x4(900);
    for (auto& v : ir) v = 0.05f * d(rng);
    ir[0] = 0.0f;
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = d(rng);
        x4[i] = 4.0f * x[i];
    }
    ReverbKernel k(ir);
    const std::size_t blocks[] = {100};
    const auto y = run(x, k, blocks);
    const auto y4 = run(x4, k, blocks);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y4[i] == 4.0f * y[i]);
}

TEST_CASE("IR initialization")
{
    const auto a = init_reverb_ir(32000, 9);
    CHECK(a.c[0] == 0.0f);
    CHECK(init_reverb_ir(32000, 9).c == a.c);
    CHECK(init_reverb_ir(32000, 10).c != a.c);
    double sq = 0.0;
    for (std::size_t n = 1; n < a.c.size(); ++n) sq += static_cast<double>(a.c[n]) * a.c[n];
    const double var = sq / static_cast<double>(a.c.size() - 1);
    CHECK(var > 0.8e-6);
    CHECK(var < 1.2e-6);
    CHECK(init_reverb_ir(1, 0).c == std::vector<float>{0.0f});
    CHECK_THROWS_AS(init_reverb_ir(0, 0), InvalidArgument);
}
