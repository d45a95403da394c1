#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace orient {

struct VerifyOptions {
    std::uint64_t seed = 1;
    int quadrature_order = 0;  // 0 keeps the automatic orders; otherwise >= 32
};

struct VerifyCheck {
    std::string name;
    bool passed = false;
    double residual = 0.0;
    double tolerance = 0.0;
    bool operator==(const VerifyCheck&) const = default;
};

struct VerifyReport {
    std::uint64_t seed = 1;
    int quadrature_order = 0;
    std::vector<VerifyCheck> checks;

    bool passed() const;
    bool operator==(const VerifyReport&) const = default;
};

/// Runs the invariant suites of every module on randomized inputs drawn from `seed`.
VerifyReport run_verify(const VerifyOptions& options);

std::string serialize_verify_report(const VerifyReport& report);
VerifyReport parse_verify_report(const std::string& text);

}  // namespace orient
