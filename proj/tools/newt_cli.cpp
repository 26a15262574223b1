// newt: render, benchmark, bake, verify and compare neural waveshaping models.

#include "nws/engine.hpp"
#include "nws/errors.hpp"
#include "nws/metrics.hpp"
#include "nws/model.hpp"
#include "nws/verify.hpp"
#include "nws/wav.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

namespace {

using nlohmann::ordered_json;

constexpr int kReportSchemaVersion = 1;
constexpr int kExitFailure = 1;
constexpr int kExitModel = 2;
constexpr int kExitControl = 3;

struct ExitCode {
    int code;
    std::string message;
};

nws::ModelFile load_or_exit(const std::string& path)
{
    try {
        return nws::load_model_file(path);
    } catch (const std::exception& e) {
        throw ExitCode{kExitModel, "cannot load model " + path + ": " + e.what()};
    }
}

nws::Model build_or_exit(const nws::ModelFile& file, const std::string& path)
{
    try {
        return nws::Model::from_file(file);
    } catch (const std::exception& e) {
        throw ExitCode{kExitModel, "cannot load model " + path + ": " + e.what()};
    }
}

// Renders with FastNEWT on a model without tables by baking defaults in memory.
nws::Model with_tables(nws::ModelFile file, const std::string& path)
{
    if (!file.tables) {
        std::cerr << "note: " << path << " has no FastNEWT tables; baking defaults in memory\n";
        nws::bake_model_tables(file);
    }
    return build_or_exit(file, path);
}

void emit_json(const ordered_json& report, const std::string& out_path)
{
    const std::string text = report.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw ExitCode{kExitFailure, "cannot write " + out_path};
    f << text;
}

struct RenderArgs {
    std::string model, control, out;
    bool fastnewt = false;
    std::uint64_t seed = 0;
    bool no_reverb = false;
    bool float32 = false;
    std::size_t block_size = 0;
};

int cmd_render(const RenderArgs& a)
{
    const auto file = load_or_exit(a.model);
    nws::ControlTrack track;
    try {
        track = nws::read_control_csv(a.control, file.config.hop_size);
    } catch (const std::exception& e) {
        throw ExitCode{kExitControl, e.what()};
    }
    if (track.num_frames() == 0) throw ExitCode{kExitControl, "control file " + a.control + " has no frames"};
    const nws::Model model = a.fastnewt ? with_tables(file, a.model) : build_or_exit(file, a.model);

    nws::RenderOptions opts;
    opts.use_fastnewt = a.fastnewt;
    opts.noise_seed = a.seed;
    opts.enable_reverb = !a.no_reverb;
    if (a.block_size) opts.block_size = a.block_size;

    const auto start = std::chrono::steady_clock::now();
    const nws::AudioBuffer audio = a.block_size ? nws::render_streaming(model, track, opts) : nws::render(model, track, opts);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    nws::write_wav(a.out, audio, a.float32 ? nws::WavFormat::Float32 : nws::WavFormat::Pcm16);

    const double duration = static_cast<double>(audio.size()) / audio.sample_rate;
    std::cout << "rendered " << audio.size() << " samples (" << duration << " s) to " << a.out << " in " << seconds
              << " s, RTF " << seconds / duration << "\n";
    return 0;
}

struct BenchArgs {
    std::string model, out;
    double duration = 4.0;
    std::size_t runs = 100;
    bool sweep = false;
    bool fastnewt = false;
};

ordered_json stats_json(const nws::RtfStats& s)
{
    return ordered_json{{"mean_rtf", s.mean}, {"p50_rtf", s.p50}, {"p90_rtf", s.p90}, {"min_rtf", s.min}, {"max_rtf", s.max}};
}

int cmd_bench(const BenchArgs& a)
{
    if (!(a.duration > 0.0)) throw ExitCode{kExitFailure, "--duration must be positive"};
    if (a.runs < 1) throw ExitCode{kExitFailure, "--runs must be at least 1"};
    const auto file = load_or_exit(a.model);
    const nws::Model model = a.fastnewt ? with_tables(file, a.model) : build_or_exit(file, a.model);

    std::vector<bool> variants;
    if (model.has_shapers()) variants.push_back(false);
    if (a.fastnewt || !model.has_shapers()) variants.push_back(true);

    ordered_json report;
    report["schema_version"] = kReportSchemaVersion;
    report["duration_s"] = a.duration;
    report["runs"] = a.runs;
    report["variants"] = ordered_json::array();
    for (const bool fn : variants) {
        nws::RenderOptions opts;
        opts.use_fastnewt = fn;
        auto entry = stats_json(nws::measure_rtf(model, a.duration, opts, a.runs));
        entry["variant"] = fn ? "nws-fn" : "nws";
        report["variants"].push_back(entry);
        std::cerr << (fn ? "nws-fn" : "nws") << ": mean RTF " << entry["mean_rtf"].get<double>() << ", p90 "
                  << entry["p90_rtf"].get<double>() << "\n";
    }
    if (a.sweep) {
        report["buffer_sweep"] = ordered_json::array();
        for (const bool fn : variants) {
            for (std::size_t b = 256; b <= 32768; b *= 2) {
                nws::RenderOptions opts;
                opts.use_fastnewt = fn;
                opts.block_size = b;
                auto entry = stats_json(nws::measure_rtf(model, a.duration, opts, a.runs, true));
                entry["variant"] = fn ? "nws-fn" : "nws";
                entry["block_size"] = b;
                report["buffer_sweep"].push_back(entry);
            }
        }
    }
    emit_json(report, a.out);
    return 0;
}

struct BakeArgs {
    std::string model, out;
    std::size_t table_size = nws::kDefaultTableSize;
    std::vector<float> domain{nws::kDefaultTableLo, nws::kDefaultTableHi};
};

int cmd_bake(const BakeArgs& a)
{
    if (a.table_size < 2) throw ExitCode{kExitFailure, "--table-size must be at least 2"};
    if (a.domain.size() != 2 || !(a.domain[0] < a.domain[1]))
        throw ExitCode{kExitFailure, "--domain needs two values lo < hi"};
    auto file = load_or_exit(a.model);
    if (!file.tensors.contains("newt.shaper.0.layer0.weight")) {
        std::cerr << "warning: " << a.model << " holds only FastNEWT tables; nothing to bake\n";
        return 0;
    }
    nws::bake_model_tables(file, a.table_size, a.domain[0], a.domain[1]);
    const auto bank = nws::ShaperBank::from_store(file.tensors, file.config.n_newt_channels, file.config.shaper_depth);
    const auto tables = nws::tables_from_file(*file.tables);
    double worst = 0.0;
    for (std::size_t c = 0; c < tables.size(); ++c) {
        const auto err = nws::measure_bake_error(bank, c, tables[c]);
        worst = std::max(worst, err.relative());
        std::cout << "channel " << c << ": max abs error " << err.max_abs_error << ", relative " << err.relative()
                  << "\n";
    }
    nws::write_file_bytes(a.out, nws::save_model(file));
    std::cout << "baked " << tables.size() << " tables of " << a.table_size << " samples over [" << a.domain[0] << ", "
              << a.domain[1] << "] to " << a.out << "; worst relative error " << worst << "\n";
    return 0;
}

int cmd_verify(const std::string& path, bool as_json)
{
    std::vector<std::uint8_t> bytes;
    try {
        bytes = nws::read_file_bytes(path);
    } catch (const std::exception& e) {
        throw ExitCode{kExitModel, e.what()};
    }
    const auto results = nws::verify_model(bytes);
    if (as_json) {
        ordered_json report;
        report["schema_version"] = kReportSchemaVersion;
        report["checks"] = ordered_json::array();
        for (const auto& r : results)
            report["checks"].push_back(
                {{"module", r.module}, {"invariant", r.invariant}, {"passed", r.passed}, {"detail", r.detail}});
        report["passed"] = nws::all_passed(results);
        std::cout << report.dump(2) << "\n";
    } else {
        for (const auto& r : results)
            std::cout << (r.passed ? "PASS " : "FAIL ") << r.module << "/" << r.invariant << ": " << r.detail << "\n";
    }
    return nws::all_passed(results) ? 0 : kExitFailure;
}

int cmd_compare(const std::string& a_path, const std::string& b_path, const std::string& out)
{
    const auto a = nws::read_wav(a_path);
    const auto b = nws::read_wav(b_path);
    if (a.sample_rate != b.sample_rate) throw ExitCode{kExitFailure, "sample rates differ"};
    const auto result = nws::mr_stft(a.samples, b.samples);
    ordered_json report;
    report["schema_version"] = kReportSchemaVersion;
    report["scales"] = ordered_json::array();
    for (const auto& s : result.scales)
        report["scales"].push_back(
            {{"window", s.window}, {"spectral_convergence", s.spectral_convergence}, {"log_magnitude", s.log_magnitude}});
    report["mr_stft_loss"] = result.total;
    emit_json(report, out);
    return 0;
}

int cmd_init(const std::string& out, std::uint64_t seed, bool bake)
{
    auto file = nws::make_random_model(nws::ModelConfig{}, seed);
    if (bake) nws::bake_model_tables(file);
    nws::write_file_bytes(out, nws::save_model(file));
    const auto manifest = nws::required_manifest(file.config);
    std::cout << "wrote untrained model to " << out << " (" << nws::count_parameters(manifest)
              << " trainable parameters)\n";
    return 0;
}

int cmd_info(const std::string& path)
{
    const auto bytes = nws::read_file_bytes(path);
    const auto file = nws::parse_model(bytes);
    auto manifest = nws::read_manifest(bytes);
    std::erase_if(manifest, [](const nws::ManifestEntry& e) { return e.name.starts_with("newt.table."); });
    const auto& c = file.config;
    ordered_json report;
    report["schema_version"] = kReportSchemaVersion;
    report["config"] = {{"sample_rate", c.sample_rate},     {"hop_size", c.hop_size},
                        {"n_harmonics", c.n_harmonics},     {"n_newt_channels", c.n_newt_channels},
                        {"shaper_depth", c.shaper_depth},   {"shaper_hidden", c.shaper_hidden},
                        {"control_dim", c.control_dim},     {"mlp_depth", c.mlp_depth},
                        {"mlp_hidden", c.mlp_hidden},       {"noise_fir_taps", c.noise_fir_taps},
                        {"reverb_length", c.reverb_length}};
    report["trainable_parameters"] = nws::count_parameters(manifest);
    report["fastnewt_tables"] = file.tables ? static_cast<int>(file.tables->channels.size()) : 0;
    std::cout << report.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Real-time neural waveshaping synthesis"};
    app.require_subcommand(1);

    RenderArgs render_args;
    auto* render = app.add_subcommand("render", "Render a control CSV to a WAV file");
    render->add_option("model", render_args.model, "Model file (.newt)")->required();
    render->add_option("control", render_args.control, "Control CSV (frame,f0_hz,loudness_db[,confidence])")->required();
    render->add_option("out", render_args.out, "Output WAV path")->required();
    render->add_flag("--fastnewt", render_args.fastnewt, "Use FastNEWT lookup tables");
    render->add_option("--seed", render_args.seed, "Noise seed");
    render->add_flag("--no-reverb", render_args.no_reverb, "Bypass the reverb");
    render->add_flag("--float32", render_args.float32, "Write IEEE float samples instead of 16-bit PCM");
    render->add_option("--block-size", render_args.block_size, "Render in streaming blocks of this many samples");

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "Measure the real-time factor");
    bench->add_option("model", bench_args.model)->required();
    bench->add_option("--duration", bench_args.duration, "Seconds of audio per run");
    bench->add_option("--runs", bench_args.runs, "Runs per configuration");
    bench->add_flag("--buffer-sweep", bench_args.sweep, "Also stream at block sizes 256..32768");
    bench->add_flag("--fastnewt", bench_args.fastnewt, "Include the FastNEWT variant");
    bench->add_option("--out", bench_args.out, "Write the JSON report here instead of stdout");

    BakeArgs bake_args;
    auto* bake = app.add_subcommand("bake", "Bake FastNEWT lookup tables into a model");
    bake->add_option("model", bake_args.model)->required();
    bake->add_option("out", bake_args.out)->required();
    bake->add_option("--table-size", bake_args.table_size, "Samples per table");
    bake->add_option("--domain", bake_args.domain, "Table domain lo hi")->expected(2)->allow_extra_args(false);

    std::string verify_path;
    bool verify_json = false;
    auto* verify = app.add_subcommand("verify", "Check a model's invariants");
    verify->add_option("model", verify_path)->required();
    verify->add_flag("--json", verify_json, "Emit a JSON report");

    std::string cmp_a, cmp_b, cmp_out;
    auto* compare = app.add_subcommand("compare", "Multi-resolution STFT distance between two WAV files");
    compare->add_option("reference", cmp_a)->required();
    compare->add_option("candidate", cmp_b)->required();
    compare->add_option("--out", cmp_out, "Write the JSON report here instead of stdout");

    std::string init_out;
    std::uint64_t init_seed = 0;
    bool init_bake = false;
    auto* init = app.add_subcommand("init", "Write an untrained model with the default configuration");
    init->add_option("out", init_out)->required();
    init->add_option("--seed", init_seed, "Initialization seed");
    init->add_flag("--bake", init_bake, "Also bake FastNEWT tables");

    std::string info_path;
    auto* info = app.add_subcommand("info", "Print a model's configuration and parameter count");
    info->add_option("model", info_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*render) return cmd_render(render_args);
        if (*bench) return cmd_bench(bench_args);
        if (*bake) return cmd_bake(bake_args);
        if (*verify) return cmd_verify(verify_path, verify_json);
        if (*compare) return cmd_compare(cmp_a, cmp_b, cmp_out);
        if (*init) return cmd_init(init_out, init_seed, init_bake);
        if (*info) return cmd_info(info_path);
    } catch (const ExitCode& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
