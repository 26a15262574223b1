#pragma once

#include "nws/weights.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace test {

inline std::string data_path(const std::string& name) { return std::string(NWS_TEST_DATA_DIR) + "/" + name; }

inline const nlohmann::json& oracles()
{
    static const nlohmann::json j = [] {
        std::ifstream f(data_path("oracles.json"));
        return nlohmann::json::parse(f);
    }();
    return j;
}

inline std::vector<float> floats(const nlohmann::json& j) { return j.get<std::vector<float>>(); }
inline std::vector<double> doubles(const nlohmann::json& j) { return j.get<std::vector<double>>(); }

template <class A, class B>
double max_abs_diff(const A& a, const B& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
        m = std::max(m, std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i])));
    return m;
}

/// Tensor store from {"name": {"shape": [...], "data": [...]}}.
inline nws::TensorStore store_from_json(const nlohmann::json& j)
{
    nws::TensorStore s;
    for (const auto& [name, t] : j.items())
        s.insert(name, nws::Tensor{t.at("shape").get<std::vector<std::int64_t>>(), floats(t.at("data"))});
    return s;
}

inline nws::ModelConfig small_config()
{
    nws::ModelConfig c;
    c.n_harmonics = 16;
    c.n_newt_channels = 4;
    c.control_dim = 16;
    c.mlp_hidden = 16;
    c.noise_fir_taps = 32;
    c.reverb_length = 600;
    return c;
}

} // namespace test
