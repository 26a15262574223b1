#pragma once

// The portable .newt model file.
//
// Layout (all integers little-endian):
//   bytes 0..3   magic "NEWT"
//   bytes 4..7   format version (uint32, currently 1)
//   bytes 8..11  metadata length N (uint32)
//   next N bytes UTF-8 JSON: config, normalization stats, optional FastNEWT
//                table spec and the tensor manifest [{name, shape}, ...]
//   remainder    float32 payloads concatenated in manifest order
//
// See docs/model-format.md for the tensor name schema.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nws {

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr int kControlChannels = 2; // standardized f0, loudness

struct ModelConfig {
    int sample_rate = 16000;
    int hop_size = 128;
    int n_harmonics = 101;
    int n_newt_channels = 64;
    int shaper_depth = 4;   // linear layers per shaper, widths 1 -> hidden ... -> 1
    int shaper_hidden = 8;
    int control_dim = 128;  // GRU hidden size and embedding width
    int mlp_depth = 4;      // linear layers per MLP, layer norm on all but the last
    int mlp_hidden = 128;
    int noise_fir_taps = 256;
    int reverb_length = 32000;

    int noise_bins() const { return noise_fir_taps / 2 + 1; }
    int affine_outputs() const { return 4 * n_newt_channels; }

    bool operator==(const ModelConfig&) const = default;
};

/// Throws SchemaError if any field is out of range.
void validate_config(const ModelConfig& config);

struct Tensor {
    std::vector<std::int64_t> shape;
    std::vector<float> data;

    std::size_t numel() const;
};

/// Name -> tensor map. Names are unique; iteration is in name order.
class TensorStore {
public:
    /// Throws SchemaError on a duplicate name or a shape/data size mismatch.
    void insert(std::string name, Tensor tensor);
    /// Replaces or inserts.
    void set(std::string name, Tensor tensor);
    /// Throws SchemaError naming the tensor if absent.
    const Tensor& get(const std::string& name) const;
    Tensor& get_mut(const std::string& name);
    bool contains(const std::string& name) const { return entries_.count(name) != 0; }
    void erase(const std::string& name) { entries_.erase(name); }

    const std::map<std::string, Tensor>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, Tensor> entries_;
};

struct NormalizationStats {
    std::vector<float> mean{0.0f, 0.0f};
    std::vector<float> std{1.0f, 1.0f};
};

/// FastNEWT lookup tables as stored in the file (one row per NEWT channel).
struct BakedTables {
    std::size_t table_size = 4096;
    float lo = -3.0f;
    float hi = 3.0f;
    std::vector<std::vector<float>> channels;
};

struct ModelFile {
    ModelConfig config;
    TensorStore tensors;
    NormalizationStats stats;
    std::optional<BakedTables> tables;
};

struct ManifestEntry {
    std::string name;
    std::vector<std::int64_t> shape;
};

/// Tensors the forward graph needs. Shaper MLP tensors are included only
/// when `with_shaper_mlps` is set; a table-only model omits them.
std::vector<ManifestEntry> required_manifest(const ModelConfig& config, bool with_shaper_mlps = true);

/// Total element count of a manifest.
std::size_t count_parameters(std::span<const ManifestEntry> manifest);

std::string table_tensor_name(std::size_t channel);

/// Serializes a model. Throws SchemaError naming any missing, misshapen or
/// unexpected tensor.
std::vector<std::uint8_t> save_model(const ModelFile& model);

/// Parses bytes and checks the schema (magic, version, truncation, shapes)
/// without checking numeric invariants. Used by `verify` to report every
/// problem instead of stopping at the first.
ModelFile parse_model(std::span<const std::uint8_t> bytes);

/// Manifest recorded in a file, in payload order.
std::vector<ManifestEntry> read_manifest(std::span<const std::uint8_t> bytes);

struct InvariantIssue {
    std::string module;
    std::string invariant;
    std::string detail;
};

/// Numeric invariants: finite tensors, causal reverb (ir[0] == 0),
/// positive normalization std, finite tables.
std::vector<InvariantIssue> check_model_invariants(const ModelFile& model);

/// parse_model followed by check_model_invariants; the first issue is thrown
/// as a SchemaError.
ModelFile load_model(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes);
ModelFile load_model_file(const std::string& path);

} // namespace nws
