#include "nws/verify.hpp"

#include "nws/engine.hpp"
#include "nws/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nws {

namespace {

bool all_finite(const std::vector<float>& v)
{
    return std::all_of(v.begin(), v.end(), [](float x) { return std::isfinite(x); });
}

} // namespace

std::vector<CheckResult> verify_model(std::span<const std::uint8_t> bytes)
{
    std::vector<CheckResult> out;
    ModelFile file;
    try {
        file = parse_model(bytes);
        out.push_back({"weights-io", "schema", true, "manifest matches the configuration"});
    } catch (const Error& e) {
        out.push_back({"weights-io", "schema", false, e.what()});
        return out;
    }

    const auto issues = check_model_invariants(file);
    for (const auto& issue : issues) out.push_back({issue.module, issue.invariant, false, issue.detail});
    if (issues.empty()) out.push_back({"weights-io", "numeric-invariants", true, "all tensors finite, reverb causal"});

    Model model;
    try {
        model = Model::from_file(file);
        out.push_back({"engine", "construct", true, "all modules built"});
    } catch (const Error& e) {
        out.push_back({"engine", "construct", false, e.what()});
        return out;
    }

    if (model.has_shapers() && model.has_tables()) {
        double worst = 0.0;
        std::size_t worst_channel = 0;
        for (std::size_t c = 0; c < model.tables->size(); ++c) {
            const double rel = measure_bake_error(*model.shapers, c, (*model.tables)[c]).relative();
            if (rel > worst) {
                worst = rel;
                worst_channel = c;
            }
        }
        std::ostringstream detail;
        detail << "worst relative bake error " << worst << " (channel " << worst_channel << ")";
        out.push_back({"newt", "bake-fidelity", worst < kBakeTolerance, detail.str()});
    }
    if (!issues.empty()) return out;

    const ControlTrack track = demo_control_track(125, model.config.hop_size, model.config.sample_rate);
    std::vector<RenderOptions> variants;
    if (model.has_shapers()) variants.push_back(RenderOptions{});
    if (model.has_tables()) variants.push_back(RenderOptions{.use_fastnewt = true});
    for (const auto& opts : variants) {
        const std::string name = opts.use_fastnewt ? "nws-fn" : "nws";
        try {
            const AudioBuffer once = render(model, track, opts);
            out.push_back({"engine", "finite-output-" + name, all_finite(once.samples),
                           std::to_string(once.size()) + " samples rendered"});
            RenderOptions streamed = opts;
            streamed.block_size = 256;
            const AudioBuffer blocks = render_streaming(model, track, streamed);
            const bool same = blocks.samples == once.samples;
            out.push_back({"engine", "streaming-equivalence-" + name, same,
                           same ? "256-sample blocks match the one-shot render" : "block render differs from one-shot"});
        } catch (const Error& e) {
            out.push_back({"engine", "render-" + name, false, e.what()});
        }
    }
    return out;
}

bool all_passed(const std::vector<CheckResult>& results)
{
    return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

} // namespace nws
