#pragma once

#include <string>

#include "orient/rotor.hpp"

namespace orient {

/// State documents (JSON):
///   {"basis": "m", "m_max": [a, b, g], "coefficients": [[[m_alpha, m_beta, m_gamma], re, im], ...]}
///   {"basis": "jkm", "j_max": J, "block": [K, M], "coefficients": [[[J, K, M], re, im], ...]}
/// "block" is optional. A density matrix replaces "coefficients" by
///   "density": [[[row triple], [col triple], re, im], ...]
/// Optional "normalize": true rescales a pure state. Unknown fields are rejected.
RotorState parse_state(const std::string& text, const std::string& origin = "state");
RotorState read_state(const std::string& path);

/// Nonzero entries only, 17 significant digits.
std::string serialize_state(const RotorState& state);
void write_state(const RotorState& state, const std::string& path);

}  // namespace orient
