#pragma once

// Invariant suite run by `newt verify` against a model file.

#include "nws/weights.hpp"

#include <span>
#include <string>
#include <vector>

namespace nws {

struct CheckResult {
    std::string module;
    std::string invariant;
    bool passed = false;
    std::string detail;
};

/// Relative bake error (max abs error / shaper output range) allowed per channel.
inline constexpr double kBakeTolerance = 1e-2;

/// Runs, in order: schema parse, numeric invariants, module construction,
/// bake fidelity (when tables and MLPs are both present), a finiteness probe
/// render and a streaming-equivalence smoke test. Later checks are skipped
/// once the model cannot be built.
std::vector<CheckResult> verify_model(std::span<const std::uint8_t> bytes);

bool all_passed(const std::vector<CheckResult>& results);

} // namespace nws
