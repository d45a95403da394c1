#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "orient/phase_space.hpp"

namespace orient {

/// Shortest round-trip formatting with 17 significant digits.
std::string format_real(double x);

/// 64-bit FNV-1a digest as 16 hex digits.
std::string content_hash(const std::string& text);

/// Table header, fixed column order.
inline constexpr const char* kGridColumns = "alpha\tbeta\tgamma\tm_alpha\tm_beta\tm_gamma\tW";

/// Metadata document: grid spec, momentum window, quadrature orders, source hash, diagnostics.
std::string grid_metadata(const PhaseSpaceGrid& grid, const std::string& source_hash);

/// One row per (momentum, angle), momentum-major, tab separated, header first.
void write_grid_table(const PhaseSpaceGrid& grid, std::ostream& out);

/// Writes `<stem>.json` and `<stem>.tsv`.
void write_grid(const PhaseSpaceGrid& grid, const std::string& stem, const std::string& source_hash);

/// Reads a pair written by write_grid; throws ParseError on any mismatch.
PhaseSpaceGrid read_grid(const std::string& stem);

}  // namespace orient
