#include "support.hpp"

#include "nws/engine.hpp"
#include "nws/errors.hpp"
#include "nws/wav.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace nws;

namespace {

const Model& fixture_model()
{
    static const Model m = Model::from_file(load_model_file(test::data_path("fixture_model.newt")));
    return m;
}

const ControlTrack& fixture_track()
{
    static const ControlTrack t = read_control_csv(test::data_path("fixture_control.csv"));
    return t;
}

const Model& small_model()
{
    static const Model m = [] {
        auto file = make_random_model(test::small_config(), 21);
        bake_model_tables(file, 256);
        return Model::from_file(file);
    }();
    return m;
}

} // namespace

TEST_CASE("golden renders from the reference implementation")
{
    const auto seed = test::oracles()["golden"]["noise_seed"].get<std::uint64_t>();
    struct Case {
        const char* file;
        bool fastnewt;
        bool reverb;
    };
    for (const Case c : {Case{"golden_nws.wav", false, true}, Case{"golden_nws_fn.wav", true, true},
                         Case{"golden_nws_dry.wav", false, false}}) {
        INFO(c.file);
        RenderOptions opts;
        opts.noise_seed = seed;
        opts.use_fastnewt = c.fastnewt;
        opts.enable_reverb = c.reverb;
        const auto out = render(fixture_model(), fixture_track(), opts);
        const auto golden = read_wav(test::data_path(c.file));
        REQUIRE(out.size() == golden.size());
        CHECK(out.size() == 64000);
        CHECK(test::max_abs_diff(out.samples, golden.samples) < 1e-4);
    }
}

TEST_CASE("streaming equals offline for several block sizes")
{
    const auto track = demo_control_track(70);
    for (bool fn : {false, true}) {
        RenderOptions opts;
        opts.use_fastnewt = fn;
        opts.noise_seed = 5;
        const auto once = render(small_model(), track, opts);
        for (std::size_t b : {128u, 256u, 384u, 1024u, 8960u, 32768u}) {
            opts.block_size = b;
            CHECK(render_streaming(small_model(), track, opts).samples == once.samples);
        }
    }
}

TEST_CASE("caller-split chunks with carried state")
{
    const auto track = demo_control_track(30);
    RenderOptions opts;
    const auto once = render(small_model(), track, opts);
    std::vector<ControlTrack> chunks{track.slice(0, 1), track.slice(1, 12), track.slice(13, 17)};
    auto state = EngineState::fresh(small_model(), opts);
    std::vector<float> joined;
    for (const auto& b : render_streaming(small_model(), chunks, opts, state))
        joined.insert(joined.end(), b.samples.begin(), b.samples.end());
    CHECK(joined == once.samples);
    CHECK(state.frames_consumed == 30);

    state.reset(small_model(), opts);
    CHECK(state.frames_consumed == 0);
    CHECK(process_chunk(small_model(), track, opts, state) == once.samples);
}

TEST_CASE("truncating the control track truncates the output")
{
    const auto track = demo_control_track(40);
    const auto full = render(small_model(), track, {});
    for (std::size_t k : {1u, 9u, 25u}) {
        const auto part = render(small_model(), track.slice(0, k), {});
        CHECK(part.samples == std::vector<float>(full.samples.begin(), full.samples.begin() + static_cast<std::ptrdiff_t>(k * 128)));
    }
}

TEST_CASE("seed determinism")
{
    const auto track = demo_control_track(20);
    RenderOptions a;
    a.noise_seed = 1;
    RenderOptions b;
    b.noise_seed = 2;
    CHECK(render(small_model(), track, a).samples == render(small_model(), track, a).samples);
    CHECK(render(small_model(), track, a).samples != render(small_model(), track, b).samples);
}

TEST_CASE("untrained default-size model renders finite audio")
{
    const auto model = Model::from_file(make_random_model(ModelConfig{}, 4));
    ControlTrack track;
    track.f0_hz.assign(500, 220.0f);
    track.loudness_db.assign(500, -120.0f);
    const auto out = render(model, track, {});
    CHECK(out.size() == 64000);
    CHECK(std::all_of(out.samples.begin(), out.samples.end(), [](float x) { return std::isfinite(x); }));
}

TEST_CASE("alignment and option errors")
{
    const auto track = demo_control_track(10);
    RenderOptions opts;
    opts.block_size = 200;
    CHECK_THROWS_AS(render_streaming(small_model(), track, opts), AlignmentError);
    opts.block_size = 0;
    CHECK_THROWS_AS(render_streaming(small_model(), track, opts), AlignmentError);

    auto wrong_hop = track;
    wrong_hop.hop_size = 64;
    CHECK_THROWS_AS(render(small_model(), wrong_hop, {}), AlignmentError);
    CHECK_THROWS_AS(render(small_model(), ControlTrack{}, {}), InvalidArgument);

    auto no_tables = make_random_model(test::small_config(), 3);
    const auto m = Model::from_file(no_tables);
    RenderOptions fn;
    fn.use_fastnewt = true;
    CHECK_THROWS_AS(render(m, track, fn), InvalidArgument);
}

TEST_CASE("RTF statistics")
{
    CHECK(percentile({1.0, 2.0, 3.0, 4.0}, 50.0) == 2.5);
    CHECK(percentile({5.0}, 90.0) == 5.0);
    CHECK(percentile({0.0, 10.0}, 90.0) == Catch::Approx(9.0));
    CHECK_THROWS_AS(percentile({}, 50.0), InvalidArgument);

    // t_p = 2 s for t_i = 4 s.
    const auto s = summarize_rtf({2.0 / 4.0});
    CHECK(s.mean == 0.5);
    CHECK(s.p90 == 0.5);

    const auto m = measure_rtf(small_model(), 0.1, {}, 3);
    CHECK(m.runs.size() == 3);
    CHECK(m.mean > 0.0);
    CHECK(m.p90 >= m.min);
    CHECK_THROWS_AS(measure_rtf(small_model(), 0.0, {}, 3), InvalidArgument);
    CHECK_THROWS_AS(measure_rtf(small_model(), 1.0, {}, 0), InvalidArgument);
}
