#include "nws/model.hpp"

#include "nws/errors.hpp"

#include <cmath>
#include <map>
#include <random>

namespace nws {

namespace {

void expect_shape(const TensorStore& store, const ManifestEntry& entry)
{
    const auto& t = store.get(entry.name);
    if (t.shape != entry.shape) throw SchemaError("tensor " + entry.name + " has an unexpected shape");
}

} // namespace

Model Model::from_file(const ModelFile& file)
{
    validate_config(file.config);
    const auto& store = file.tensors;
    const bool with_mlps = store.contains("newt.shaper.0.layer0.weight");
    if (!with_mlps && !file.tables) throw SchemaError("model has neither shaper MLPs nor FastNEWT tables");
    for (const auto& entry : required_manifest(file.config, with_mlps)) expect_shape(store, entry);

    Model m;
    m.config = file.config;
    m.stats = file.stats;
    m.encoder = ControlEncoder::from_store(store);
    m.exciter = ExciterWeights::from_store(store);
    m.affine_mlp = nn::Mlp::from_store(store, "newt.affine_mlp", file.config.mlp_depth);
    m.noise_mlp = nn::Mlp::from_store(store, "noise.mlp", file.config.mlp_depth);
    if (with_mlps) m.shapers = ShaperBank::from_store(store, file.config.n_newt_channels, file.config.shaper_depth);
    if (file.tables) {
        if (file.tables->channels.size() != static_cast<std::size_t>(file.config.n_newt_channels))
            throw SchemaError("FastNEWT table count does not match n_newt_channels");
        m.tables = tables_from_file(*file.tables);
    }
    m.reverb = ReverbKernel(store.get("reverb.ir").data);
    return m;
}

ModelFile make_random_model(const ModelConfig& config, std::uint64_t seed)
{
    validate_config(config);
    ModelFile file;
    file.config = config;
    file.stats.mean = {330.0f, -40.0f};
    file.stats.std = {110.0f, 15.0f};

    std::mt19937_64 rng(seed);
    const auto manifest = required_manifest(config, true);
    std::map<std::string, double> fan_in_of;
    for (const auto& e : manifest)
        if (e.shape.size() == 2) fan_in_of[e.name] = static_cast<double>(e.shape[1]);
    for (const auto& entry : manifest) {
        Tensor t;
        t.shape = entry.shape;
        t.data.assign(t.numel(), 0.0f);
        const std::string& name = entry.name;
        const bool is_norm = name.find(".norm") != std::string::npos;
        const bool is_bias = name.ends_with(".bias") || name.ends_with(".b_ih") || name.ends_with(".b_hh");
        if (name == "reverb.ir") {
            t.data = init_reverb_ir(t.numel(), seed ^ 0x5eedULL).c;
        } else if (is_norm) {
            if (name.ends_with(".weight")) t.data.assign(t.numel(), 1.0f);
        } else {
            // Fan-in of the layer this tensor belongs to; biases share their weight's bound.
            double fan_in = static_cast<double>(config.control_dim);
            if (!name.starts_with("control_gru.")) {
                const std::string weight = is_bias ? name.substr(0, name.size() - 4) + "weight" : name;
                fan_in = fan_in_of.at(weight);
            }
            const double bound = 1.0 / std::sqrt(fan_in);
            std::uniform_real_distribution<double> dist(-bound, bound);
            for (auto& v : t.data) v = static_cast<float>(dist(rng));
        }
        file.tensors.insert(name, std::move(t));
    }
    return file;
}

void bake_model_tables(ModelFile& file, std::size_t table_size, float lo, float hi)
{
    const auto bank =
        ShaperBank::from_store(file.tensors, file.config.n_newt_channels, file.config.shaper_depth);
    file.tables = tables_to_file(bake_all(bank, table_size, lo, hi));
}

} // namespace nws
