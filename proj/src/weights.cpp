#include "nws/weights.hpp"

#include "nws/errors.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

namespace nws {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'N', 'E', 'W', 'T'};

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xffu));
}

std::uint32_t read_u32(std::span<const std::uint8_t> bytes, std::size_t offset)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[offset + i]) << (8 * i);
    return v;
}

std::string shape_str(const std::vector<std::int64_t>& shape)
{
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

void add_mlp(std::vector<ManifestEntry>& m, const std::string& prefix, int depth, int in, int hidden, int out,
             bool layer_norm)
{
    for (int j = 0; j < depth; ++j) {
        const int fan_in = j == 0 ? in : hidden;
        const int fan_out = j == depth - 1 ? out : hidden;
        const std::string layer = prefix + ".layer" + std::to_string(j);
        m.push_back({layer + ".weight", {fan_out, fan_in}});
        m.push_back({layer + ".bias", {fan_out}});
        if (layer_norm && j < depth - 1) {
            const std::string norm = prefix + ".norm" + std::to_string(j);
            m.push_back({norm + ".weight", {fan_out}});
            m.push_back({norm + ".bias", {fan_out}});
        }
    }
}

json config_to_json(const ModelConfig& c)
{
    return json{{"sample_rate", c.sample_rate},       {"hop_size", c.hop_size},
                {"n_harmonics", c.n_harmonics},       {"n_newt_channels", c.n_newt_channels},
                {"shaper_depth", c.shaper_depth},     {"shaper_hidden", c.shaper_hidden},
                {"control_dim", c.control_dim},       {"mlp_depth", c.mlp_depth},
                {"mlp_hidden", c.mlp_hidden},         {"noise_fir_taps", c.noise_fir_taps},
                {"reverb_length", c.reverb_length}};
}

ModelConfig config_from_json(const json& j)
{
    ModelConfig c;
    c.sample_rate = j.at("sample_rate").get<int>();
    c.hop_size = j.at("hop_size").get<int>();
    c.n_harmonics = j.at("n_harmonics").get<int>();
    c.n_newt_channels = j.at("n_newt_channels").get<int>();
    c.shaper_depth = j.at("shaper_depth").get<int>();
    c.shaper_hidden = j.at("shaper_hidden").get<int>();
    c.control_dim = j.at("control_dim").get<int>();
    c.mlp_depth = j.at("mlp_depth").get<int>();
    c.mlp_hidden = j.at("mlp_hidden").get<int>();
    c.noise_fir_taps = j.at("noise_fir_taps").get<int>();
    c.reverb_length = j.at("reverb_length").get<int>();
    return c;
}

std::vector<double> to_doubles(const std::vector<float>& v) { return {v.begin(), v.end()}; }

std::vector<float> to_floats(const json& j)
{
    std::vector<float> out;
    for (const auto& v : j) out.push_back(static_cast<float>(v.get<double>()));
    return out;
}

// Expected manifest for this model: required tensors plus table tensors.
std::vector<ManifestEntry> full_manifest(const ModelFile& model, bool with_mlps)
{
    auto m = required_manifest(model.config, with_mlps);
    if (model.tables) {
        for (int i = 0; i < model.config.n_newt_channels; ++i)
            m.push_back({table_tensor_name(static_cast<std::size_t>(i)),
                         {static_cast<std::int64_t>(model.tables->table_size)}});
    }
    return m;
}

bool has_shaper_mlps(const TensorStore& tensors) { return tensors.contains("newt.shaper.0.layer0.weight"); }

void check_tables_spec(const BakedTables& t, int channels)
{
    if (t.table_size < 2) throw SchemaError("fastnewt: table_size must be >= 2");
    if (!(t.lo < t.hi)) throw SchemaError("fastnewt: table domain requires lo < hi");
    if (static_cast<int>(t.channels.size()) != channels)
        throw SchemaError("fastnewt: expected " + std::to_string(channels) + " tables, got " +
                          std::to_string(t.channels.size()));
    for (std::size_t i = 0; i < t.channels.size(); ++i)
        if (t.channels[i].size() != t.table_size)
            throw SchemaError("fastnewt: " + table_tensor_name(i) + " has wrong length");
}

// Verifies the tensor store against the expected manifest.
void check_schema(const ModelFile& model)
{
    validate_config(model.config);
    if (model.stats.mean.size() != kControlChannels || model.stats.std.size() != kControlChannels)
        throw SchemaError("normalization: expected 2 channels of mean/std");
    const bool with_mlps = has_shaper_mlps(model.tensors);
    if (!with_mlps && !model.tables)
        throw SchemaError("missing required tensor: newt.shaper.0.layer0.weight (and no FastNEWT tables)");
    if (model.tables) check_tables_spec(*model.tables, model.config.n_newt_channels);

    const auto manifest = required_manifest(model.config, with_mlps);
    std::set<std::string> expected;
    for (const auto& e : manifest) {
        expected.insert(e.name);
        if (!model.tensors.contains(e.name)) throw SchemaError("missing required tensor: " + e.name);
        const auto& t = model.tensors.get(e.name);
        if (t.shape != e.shape)
            throw SchemaError("tensor " + e.name + " has shape " + shape_str(t.shape) + ", expected " +
                              shape_str(e.shape));
    }
    for (const auto& [name, _] : model.tensors.entries())
        if (!expected.count(name)) throw SchemaError("unexpected tensor: " + name);
}

} // namespace

void validate_config(const ModelConfig& c)
{
    const std::pair<const char*, int> fields[] = {
        {"sample_rate", c.sample_rate},     {"hop_size", c.hop_size},         {"n_harmonics", c.n_harmonics},
        {"n_newt_channels", c.n_newt_channels}, {"shaper_depth", c.shaper_depth}, {"shaper_hidden", c.shaper_hidden},
        {"control_dim", c.control_dim},     {"mlp_depth", c.mlp_depth},       {"mlp_hidden", c.mlp_hidden},
        {"noise_fir_taps", c.noise_fir_taps}, {"reverb_length", c.reverb_length}};
    for (const auto& [name, value] : fields)
        if (value < 1) throw SchemaError(std::string("config.") + name + " must be >= 1");
    if (c.noise_fir_taps < 2 || c.noise_fir_taps % 2 != 0)
        throw SchemaError("config.noise_fir_taps must be even and >= 2");
}

std::size_t Tensor::numel() const
{
    std::size_t n = 1;
    for (auto d : shape) n *= static_cast<std::size_t>(d);
    return n;
}

void TensorStore::insert(std::string name, Tensor tensor)
{
    if (entries_.count(name)) throw SchemaError("duplicate tensor name: " + name);
    set(std::move(name), std::move(tensor));
}

void TensorStore::set(std::string name, Tensor tensor)
{
    for (auto d : tensor.shape)
        if (d < 0) throw SchemaError("tensor " + name + " has a negative dimension");
    if (tensor.numel() != tensor.data.size())
        throw SchemaError("tensor " + name + ": shape " + shape_str(tensor.shape) + " does not match " +
                          std::to_string(tensor.data.size()) + " values");
    entries_[std::move(name)] = std::move(tensor);
}

const Tensor& TensorStore::get(const std::string& name) const
{
    auto it = entries_.find(name);
    if (it == entries_.end()) throw SchemaError("missing required tensor: " + name);
    return it->second;
}

Tensor& TensorStore::get_mut(const std::string& name)
{
    auto it = entries_.find(name);
    if (it == entries_.end()) throw SchemaError("missing required tensor: " + name);
    return it->second;
}

std::vector<ManifestEntry> required_manifest(const ModelConfig& c, bool with_shaper_mlps)
{
    const std::int64_t h = c.control_dim;
    std::vector<ManifestEntry> m;
    m.push_back({"control_gru.w_ih", {3 * h, kControlChannels}});
    m.push_back({"control_gru.w_hh", {3 * h, h}});
    m.push_back({"control_gru.b_ih", {3 * h}});
    m.push_back({"control_gru.b_hh", {3 * h}});
    m.push_back({"control_dense.weight", {h, h}});
    m.push_back({"control_dense.bias", {h}});
    m.push_back({"exciter.mixer.weight", {c.n_newt_channels, c.n_harmonics}});
    m.push_back({"exciter.mixer.bias", {c.n_newt_channels}});
    add_mlp(m, "newt.affine_mlp", c.mlp_depth, c.control_dim, c.mlp_hidden, c.affine_outputs(), true);
    if (with_shaper_mlps) {
        for (int i = 0; i < c.n_newt_channels; ++i)
            add_mlp(m, "newt.shaper." + std::to_string(i), c.shaper_depth, 1, c.shaper_hidden, 1, false);
    }
    add_mlp(m, "noise.mlp", c.mlp_depth, c.control_dim, c.mlp_hidden, c.noise_bins(), true);
    m.push_back({"reverb.ir", {c.reverb_length}});
    return m;
}

std::size_t count_parameters(std::span<const ManifestEntry> manifest)
{
    std::size_t n = 0;
    for (const auto& e : manifest) {
        std::size_t k = 1;
        for (auto d : e.shape) k *= static_cast<std::size_t>(d);
        n += k;
    }
    return n;
}

std::string table_tensor_name(std::size_t channel) { return "newt.table." + std::to_string(channel); }

std::vector<std::uint8_t> save_model(const ModelFile& model)
{
    check_schema(model);
    const auto manifest = full_manifest(model, has_shaper_mlps(model.tensors));

    json meta;
    meta["config"] = config_to_json(model.config);
    meta["normalization"] = json{{"channels", {"f0_hz", "loudness_db"}},
                                 {"mean", to_doubles(model.stats.mean)},
                                 {"std", to_doubles(model.stats.std)}};
    if (model.tables) {
        meta["fastnewt"] = json{{"table_size", model.tables->table_size},
                                {"domain", {static_cast<double>(model.tables->lo),
                                            static_cast<double>(model.tables->hi)}}};
    } else {
        meta["fastnewt"] = nullptr;
    }
    json tensors = json::array();
    for (const auto& e : manifest) tensors.push_back(json{{"name", e.name}, {"shape", e.shape}});
    meta["tensors"] = std::move(tensors);
    const std::string text = meta.dump();

    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    append_u32(out, kFormatVersion);
    append_u32(out, static_cast<std::uint32_t>(text.size()));
    out.insert(out.end(), text.begin(), text.end());

    auto append_floats = [&out](std::span<const float> values) {
        for (float v : values) append_u32(out, std::bit_cast<std::uint32_t>(v));
    };
    std::size_t table_index = 0;
    for (const auto& e : manifest) {
        if (e.name.rfind("newt.table.", 0) == 0) {
            append_floats(model.tables->channels[table_index++]);
        } else {
            append_floats(model.tensors.get(e.name).data);
        }
    }
    return out;
}

namespace {

json parse_header(std::span<const std::uint8_t> bytes, std::size_t& payload_offset)
{
    if (bytes.size() < 12) throw FormatError("model file truncated: header incomplete");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad magic: not a .newt model file");
    const auto version = read_u32(bytes, 4);
    if (version != kFormatVersion)
        throw FormatError("unsupported format version " + std::to_string(version) + " (expected " +
                          std::to_string(kFormatVersion) + ")");
    const std::size_t meta_len = read_u32(bytes, 8);
    if (bytes.size() < 12 + meta_len) throw FormatError("model file truncated: metadata incomplete");
    const std::string text(reinterpret_cast<const char*>(bytes.data() + 12), meta_len);
    payload_offset = 12 + meta_len;
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("metadata is not valid JSON: ") + e.what());
    }
}

std::vector<ManifestEntry> manifest_from_json(const json& meta)
{
    std::vector<ManifestEntry> manifest;
    for (const auto& t : meta.at("tensors")) {
        ManifestEntry e{t.at("name").get<std::string>(), t.at("shape").get<std::vector<std::int64_t>>()};
        for (auto d : e.shape)
            if (d < 0) throw FormatError("tensor " + e.name + " has a negative dimension");
        manifest.push_back(std::move(e));
    }
    return manifest;
}

} // namespace

std::vector<ManifestEntry> read_manifest(std::span<const std::uint8_t> bytes)
{
    std::size_t offset = 0;
    const json meta = parse_header(bytes, offset);
    try {
        return manifest_from_json(meta);
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed tensor manifest: ") + e.what());
    }
}

ModelFile parse_model(std::span<const std::uint8_t> bytes)
{
    std::size_t offset = 0;
    const json meta = parse_header(bytes, offset);

    ModelFile model;
    std::vector<ManifestEntry> manifest;
    try {
        model.config = config_from_json(meta.at("config"));
        const auto& norm = meta.at("normalization");
        model.stats.mean = to_floats(norm.at("mean"));
        model.stats.std = to_floats(norm.at("std"));
        const auto& fast = meta.at("fastnewt");
        if (!fast.is_null()) {
            BakedTables t;
            t.table_size = fast.at("table_size").get<std::size_t>();
            const auto& domain = fast.at("domain");
            if (domain.size() != 2) throw FormatError("fastnewt.domain must have two entries");
            t.lo = static_cast<float>(domain.at(0).get<double>());
            t.hi = static_cast<float>(domain.at(1).get<double>());
            model.tables = std::move(t);
        }
        manifest = manifest_from_json(meta);
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed metadata: ") + e.what());
    }

    std::size_t total = 0;
    for (const auto& e : manifest) {
        std::size_t n = 1;
        for (auto d : e.shape) n *= static_cast<std::size_t>(d);
        total += n;
    }
    const std::size_t payload = bytes.size() - offset;
    if (payload < total * 4)
        throw FormatError("model file truncated: payload has " + std::to_string(payload) + " bytes, manifest needs " +
                          std::to_string(total * 4));
    if (payload > total * 4) throw FormatError("model file has trailing bytes after the tensor payload");

    for (const auto& e : manifest) {
        Tensor t;
        t.shape = e.shape;
        t.data.resize(t.numel());
        for (auto& v : t.data) {
            v = std::bit_cast<float>(read_u32(bytes, offset));
            offset += 4;
        }
        if (e.name.rfind("newt.table.", 0) == 0) {
            if (!model.tables) throw SchemaError("table tensor " + e.name + " present without fastnewt metadata");
            if (e.shape.size() != 1) throw SchemaError("table tensor " + e.name + " must be one-dimensional");
            if (e.name != table_tensor_name(model.tables->channels.size()))
                throw SchemaError("table tensors out of order at " + e.name);
            model.tables->channels.push_back(std::move(t.data));
        } else {
            model.tensors.insert(e.name, std::move(t));
        }
    }
    check_schema(model);
    return model;
}

std::vector<InvariantIssue> check_model_invariants(const ModelFile& model)
{
    std::vector<InvariantIssue> issues;
    for (const auto& [name, t] : model.tensors.entries()) {
        for (std::size_t i = 0; i < t.data.size(); ++i) {
            if (!std::isfinite(t.data[i])) {
                const auto module = name.substr(0, name.find('.'));
                issues.push_back({module, "finite-weights",
                                  "tensor " + name + " has a non-finite value at index " + std::to_string(i)});
                break;
            }
        }
    }
    if (model.tensors.contains("reverb.ir")) {
        const auto& ir = model.tensors.get("reverb.ir").data;
        if (!ir.empty() && ir[0] != 0.0f)
            issues.push_back({"reverb", "causal-ir",
                              "reverb.ir[0] must be exactly 0 (c[0] = 0, trainable only for n >= 1); found " +
                                  std::to_string(ir[0])});
    }
    for (std::size_t c = 0; c < model.stats.std.size(); ++c) {
        if (!(model.stats.std[c] > 0.0f) || !std::isfinite(model.stats.std[c]))
            issues.push_back({"control-encoder", "positive-std",
                              "normalization std[" + std::to_string(c) + "] must be finite and > 0"});
        if (c < model.stats.mean.size() && !std::isfinite(model.stats.mean[c]))
            issues.push_back({"control-encoder", "finite-mean",
                              "normalization mean[" + std::to_string(c) + "] is not finite"});
    }
    if (model.tables) {
        for (std::size_t i = 0; i < model.tables->channels.size(); ++i) {
            for (float v : model.tables->channels[i]) {
                if (!std::isfinite(v)) {
                    issues.push_back({"newt", "finite-tables", "tensor " + table_tensor_name(i) + " has a non-finite value"});
                    break;
                }
            }
        }
    }
    return issues;
}

ModelFile load_model(std::span<const std::uint8_t> bytes)
{
    auto model = parse_model(bytes);
    const auto issues = check_model_invariants(model);
    if (!issues.empty()) throw SchemaError(issues.front().module + ": " + issues.front().detail);
    return model;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed writing " + path);
}

ModelFile load_model_file(const std::string& path) { return load_model(read_file_bytes(path)); }

} // namespace nws
