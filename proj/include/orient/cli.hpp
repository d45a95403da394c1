#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "orient/dynamics.hpp"
#include "orient/phase_space.hpp"

namespace orient {

/// Process exit codes of the rotorwig tool.
enum class ExitCode : int {
    ok = 0,
    usage = 1,        // bad flags, out-of-range overrides, invalid configuration values
    parse = 2,        // malformed state, spec, config or init file
    tolerance = 3,    // tolerance breach or integrator failure
    singularity = 4,  // pole or coordinate singularity
    truncation = 5,   // basis truncation too small for the requested run
    io = 6,           // unreadable input or unwritable output
};

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Angle literal: a number, or k*pi written as "pi", "-pi", "2pi", "pi/2", "3pi/4".
double parse_angle(const std::string& text);

/// "NaxNbxNg".
AngleGrid parse_grid(const std::string& text);

/// "a,b,c" with non-negative entries.
std::array<int, 3> parse_window(const std::string& text);

struct AlignRun {
    AlignmentConfig config;                // config.times holds the signal times
    std::vector<double> snapshot_times;    // times with Wigner grids
    bool initial_grid = false;             // also a grid of the initial state
    AngleGrid grid{1, 128, 1};
    int m_beta_max = 48;
    bool signal = true;
    bool states = false;                   // also write each snapshot as a state file
};

/// Alignment config document; `preset` is "" or "fig3", the document's fields override the preset.
AlignRun parse_align_config(const std::string& text, const std::string& preset, const std::string& origin = "config");
AlignRun align_preset(const std::string& preset);

}  // namespace orient
