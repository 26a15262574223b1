#pragma once

// A loaded, immutable synthesis model. One Model can serve any number of
// concurrent streams; all per-stream state lives in the engine.

#include "nws/control.hpp"
#include "nws/exciter.hpp"
#include "nws/nn.hpp"
#include "nws/reverb.hpp"
#include "nws/shaper.hpp"
#include "nws/weights.hpp"

#include <cstdint>
#include <optional>

namespace nws {

struct Model {
    ModelConfig config;
    NormalizationStats stats;
    ControlEncoder encoder;
    ExciterWeights exciter;
    nn::Mlp affine_mlp;
    std::optional<ShaperBank> shapers;
    std::optional<TableBank> tables;
    nn::Mlp noise_mlp;
    ReverbKernel reverb;

    /// Builds every module from a parsed file. Throws SchemaError when a
    /// required tensor is missing or has the wrong shape.
    static Model from_file(const ModelFile& file);

    bool has_shapers() const { return shapers.has_value(); }
    bool has_tables() const { return tables.has_value(); }
};

/// An untrained model with framework-default initialization: linear and GRU
/// weights uniform in +-1/sqrt(fan_in), unit layer-norm gains, and a reverb
/// IR from init_reverb_ir. Deterministic per seed.
ModelFile make_random_model(const ModelConfig& config, std::uint64_t seed);

/// Adds FastNEWT tables baked from the file's shaper MLPs.
void bake_model_tables(ModelFile& file, std::size_t table_size = kDefaultTableSize, float lo = kDefaultTableLo,
                       float hi = kDefaultTableHi);

} // namespace nws
