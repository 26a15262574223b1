#include "nws/control.hpp"

#include "nws/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nws {

ControlTrack ControlTrack::slice(std::size_t begin, std::size_t count) const
{
    if (begin + count > num_frames()) throw InvalidArgument("ControlTrack::slice: range out of bounds");
    auto cut = [&](const std::vector<float>& v) {
        return std::vector<float>(v.begin() + static_cast<std::ptrdiff_t>(begin),
                                  v.begin() + static_cast<std::ptrdiff_t>(begin + count));
    };
    ControlTrack out;
    out.hop_size = hop_size;
    out.f0_hz = cut(f0_hz);
    out.loudness_db = cut(loudness_db);
    if (confidence) out.confidence = cut(*confidence);
    return out;
}

FrameSeries standardize(const ControlTrack& track, const NormalizationStats& stats)
{
    if (stats.mean.size() != kControlChannels || stats.std.size() != kControlChannels)
        throw InvalidArgument("standardize: stats must have two channels");
    for (float s : stats.std)
        if (!(s > 0.0f)) throw InvalidArgument("standardize: std must be > 0");
    if (track.loudness_db.size() != track.f0_hz.size() ||
        (track.confidence && track.confidence->size() != track.f0_hz.size()))
        throw InvalidInput("standardize: control sequences differ in length");

    FrameSeries out;
    out.channels = kControlChannels;
    out.hop_size = track.hop_size;
    out.values.resize(track.num_frames() * kControlChannels);
    for (std::size_t k = 0; k < track.num_frames(); ++k) {
        const float f0 = track.f0_hz[k];
        const float loud = track.loudness_db[k];
        if (!std::isfinite(f0) || !std::isfinite(loud))
            throw InvalidInput("standardize: non-finite control value at frame " + std::to_string(k));
        out.values[2 * k] = (f0 - stats.mean[0]) / stats.std[0];
        out.values[2 * k + 1] = (loud - stats.mean[1]) / stats.std[1];
    }
    return out;
}

GruWeights GruWeights::from_store(const TensorStore& store)
{
    GruWeights w;
    const auto& w_ih = store.get("control_gru.w_ih");
    const auto& w_hh = store.get("control_gru.w_hh");
    if (w_hh.shape.size() != 2 || w_hh.shape[0] != 3 * w_hh.shape[1])
        throw SchemaError("tensor control_gru.w_hh must have shape [3H, H]");
    w.hidden = static_cast<std::size_t>(w_hh.shape[1]);
    if (w_ih.shape != std::vector<std::int64_t>{3 * w_hh.shape[1], kControlChannels})
        throw SchemaError("tensor control_gru.w_ih must have shape [3H, 2]");
    w.w_ih = w_ih.data;
    w.w_hh = w_hh.data;
    w.b_ih = store.get("control_gru.b_ih").data;
    w.b_hh = store.get("control_gru.b_hh").data;
    if (w.b_ih.size() != 3 * w.hidden || w.b_hh.size() != 3 * w.hidden)
        throw SchemaError("GRU bias tensors must have length 3H");
    return w;
}

namespace {
inline float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }
} // namespace

GruState gru_step(std::span<const float> x, const GruState& state, const GruWeights& w)
{
    const std::size_t H = w.hidden;
    if (x.size() != w.input || state.h.size() != H || w.w_ih.size() != 3 * H * w.input ||
        w.w_hh.size() != 3 * H * H || w.b_ih.size() != 3 * H || w.b_hh.size() != 3 * H)
        throw SchemaError("gru_step: input, state or weight shapes do not match");

    std::vector<float> gi(3 * H);
    std::vector<float> gh(3 * H);
    for (std::size_t r = 0; r < 3 * H; ++r) {
        float acc = w.b_ih[r];
        const float* row = w.w_ih.data() + r * w.input;
        for (std::size_t i = 0; i < w.input; ++i) acc += row[i] * x[i];
        gi[r] = acc;
        float acc_h = w.b_hh[r];
        const float* hrow = w.w_hh.data() + r * H;
        for (std::size_t j = 0; j < H; ++j) acc_h += hrow[j] * state.h[j];
        gh[r] = acc_h;
    }

    GruState next;
    next.h.resize(H);
    for (std::size_t j = 0; j < H; ++j) {
        const float r = sigmoid(gi[j] + gh[j]);
        const float u = sigmoid(gi[H + j] + gh[H + j]);
        const float n = std::tanh(gi[2 * H + j] + r * gh[2 * H + j]);
        next.h[j] = (1.0f - u) * n + u * state.h[j];
    }
    return next;
}

ControlEncoder::ControlEncoder(GruWeights gru, nn::Linear dense) : gru_(std::move(gru)), dense_(std::move(dense))
{
    if (dense_.in_features() != gru_.hidden) throw SchemaError("control_dense input width must equal GRU hidden size");
}

ControlEncoder ControlEncoder::from_store(const TensorStore& store)
{
    return ControlEncoder(GruWeights::from_store(store), nn::Linear::from_store(store, "control_dense"));
}

ControlEmbedding ControlEncoder::encode(const FrameSeries& frames, GruState& state) const
{
    if (frames.channels != static_cast<std::size_t>(kControlChannels))
        throw SchemaError("encode: expected 2 control channels");
    if (state.h.size() != gru_.hidden) throw SchemaError("encode: GRU state has wrong width");

    ControlEmbedding out;
    out.width = width();
    out.z.resize(frames.num_frames() * out.width);
    for (std::size_t k = 0; k < frames.num_frames(); ++k) {
        std::span<const float> x(frames.values.data() + k * kControlChannels, kControlChannels);
        state = gru_step(x, state, gru_);
        dense_.forward(state.h, std::span<float>(out.z.data() + k * out.width, out.width));
    }
    return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_number(const std::string& s, std::size_t line, const char* column)
{
    auto fail = [&](const std::string& why) {
        return InvalidInput("control CSV line " + std::to_string(line) + ": " + column + " " + why);
    };
    if (s.empty()) throw fail("is missing");
    double v = 0.0;
    const char* first = s.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw fail("is not a number ('" + s + "')");
    if (!std::isfinite(v)) throw fail("is not finite");
    return v;
}

} // namespace

ControlTrack parse_control_csv(const std::string& text, int hop_size)
{
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    bool has_conf = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto header = split_fields(line);
        const bool base = header.size() >= 3 && header[0] == "frame" && header[1] == "f0_hz" &&
                          header[2] == "loudness_db";
        if (!base || header.size() > 4 || (header.size() == 4 && header[3] != "confidence"))
            throw InvalidInput("control CSV line " + std::to_string(line_no) +
                               ": expected header 'frame,f0_hz,loudness_db[,confidence]'");
        has_conf = header.size() == 4;
        break;
    }
    if (line_no == 0) throw InvalidInput("control CSV is empty");

    ControlTrack track;
    track.hop_size = hop_size;
    if (has_conf) track.confidence.emplace();
    const std::size_t expected = has_conf ? 4 : 3;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_fields(line);
        if (fields.size() != expected)
            throw InvalidInput("control CSV line " + std::to_string(line_no) + ": expected " +
                               std::to_string(expected) + " fields, got " + std::to_string(fields.size()));
        const double frame = parse_number(fields[0], line_no, "frame");
        if (frame != static_cast<double>(track.num_frames()))
            throw InvalidInput("control CSV line " + std::to_string(line_no) + ": frame index " + fields[0] +
                               " out of sequence (expected " + std::to_string(track.num_frames()) + ")");
        const double f0 = parse_number(fields[1], line_no, "f0_hz");
        if (f0 <= 0.0) throw InvalidInput("control CSV line " + std::to_string(line_no) + ": f0_hz must be > 0");
        track.f0_hz.push_back(static_cast<float>(f0));
        track.loudness_db.push_back(static_cast<float>(parse_number(fields[2], line_no, "loudness_db")));
        if (has_conf) {
            const double c = parse_number(fields[3], line_no, "confidence");
            if (c < 0.0 || c > 1.0)
                throw InvalidInput("control CSV line " + std::to_string(line_no) + ": confidence outside [0, 1]");
            track.confidence->push_back(static_cast<float>(c));
        }
    }
    return track;
}

ControlTrack read_control_csv(const std::string& path, int hop_size)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open control file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_control_csv(ss.str(), hop_size);
}

std::string format_control_csv(const ControlTrack& track)
{
    std::ostringstream out;
    out.precision(9);
    out << "frame,f0_hz,loudness_db" << (track.confidence ? ",confidence" : "") << '\n';
    for (std::size_t k = 0; k < track.num_frames(); ++k) {
        out << k << ',' << track.f0_hz[k] << ',' << track.loudness_db[k];
        if (track.confidence) out << ',' << (*track.confidence)[k];
        out << '\n';
    }
    return out.str();
}

} // namespace nws
