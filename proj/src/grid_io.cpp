#include "orient/grid_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "json_util.hpp"
#include "orient/error.hpp"

namespace orient {

using nlohmann::json;

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string content_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string grid_metadata(const PhaseSpaceGrid& grid, const std::string& source_hash) {
    const GridSpec& s = grid.spec();
    const GridDiagnostics& d = grid.diagnostics;
    json j;
    j["format"] = "orient-grid-1";
    j["columns"] = {"alpha", "beta", "gamma", "m_alpha", "m_beta", "m_gamma", "W"};
    j["angles"] = {{"n_alpha", s.angles.n_alpha}, {"n_beta", s.angles.n_beta}, {"n_gamma", s.angles.n_gamma}};
    j["momenta"] = {{"lo", s.momenta.lo}, {"hi", s.momenta.hi}};
    j["quadrature"] = {{"alpha", d.alpha_order}, {"beta", d.beta_order}, {"gamma", d.gamma_order}};
    j["source"] = d.source;
    j["source_hash"] = source_hash;
    j["method"] = d.method;
    j["diagnostics"] = {{"max_imag_residue", d.max_imag_residue},
                        {"captured_norm", d.captured_norm},
                        {"warnings", d.warnings}};
    return detail::dump_json(j);
}

void write_grid_table(const PhaseSpaceGrid& grid, std::ostream& out) {
    const GridSpec& s = grid.spec();
    out << kGridColumns << '\n';
    for (std::size_t m = 0; m < grid.n_momenta(); ++m) {
        const MomentumTriple k = s.momenta.at(m);
        for (std::size_t a = 0; a < grid.n_angles(); ++a) {
            const auto j = s.angles.split(a);
            out << format_real(s.angles.point(Axis::alpha, j[0])) << '\t'
                << format_real(s.angles.point(Axis::beta, j[1])) << '\t'
                << format_real(s.angles.point(Axis::gamma, j[2])) << '\t' << k.m_alpha << '\t' << k.m_beta << '\t'
                << k.m_gamma << '\t' << format_real(grid.at(a, m)) << '\n';
        }
    }
}

void write_grid(const PhaseSpaceGrid& grid, const std::string& stem, const std::string& source_hash) {
    std::ofstream meta(stem + ".json");
    std::ofstream table(stem + ".tsv");
    if (!meta || !table) {
        throw IoError("cannot open " + stem + ".json/.tsv for writing");
    }
    meta << grid_metadata(grid, source_hash);
    write_grid_table(grid, table);
    if (!meta || !table) {
        throw IoError("write failed for " + stem);
    }
}

PhaseSpaceGrid read_grid(const std::string& stem) {
    std::ifstream meta_in(stem + ".json");
    if (!meta_in) {
        throw ParseError(stem + ".json: cannot open");
    }
    json j;
    try {
        j = json::parse(meta_in);
    } catch (const json::exception& e) {
        throw ParseError(stem + ".json: " + e.what());
    }
    GridSpec spec;
    try {
        if (j.at("format").get<std::string>() != "orient-grid-1") {
            throw ParseError(stem + ".json: unknown format");
        }
        spec.angles.n_alpha = j.at("angles").at("n_alpha").get<int>();
        spec.angles.n_beta = j.at("angles").at("n_beta").get<int>();
        spec.angles.n_gamma = j.at("angles").at("n_gamma").get<int>();
        spec.momenta.lo = j.at("momenta").at("lo").get<std::array<int, 3>>();
        spec.momenta.hi = j.at("momenta").at("hi").get<std::array<int, 3>>();
    } catch (const json::exception& e) {
        throw ParseError(stem + ".json: " + e.what());
    }
    PhaseSpaceGrid grid(spec);
    const auto& d = j.at("diagnostics");
    grid.diagnostics.source = j.value("source", "");
    grid.diagnostics.method = j.value("method", "");
    grid.diagnostics.max_imag_residue = d.value("max_imag_residue", 0.0);
    grid.diagnostics.captured_norm = d.value("captured_norm", 1.0);
    grid.diagnostics.warnings = d.value("warnings", std::vector<std::string>{});
    grid.diagnostics.alpha_order = j.at("quadrature").value("alpha", 0);
    grid.diagnostics.beta_order = j.at("quadrature").value("beta", 0);
    grid.diagnostics.gamma_order = j.at("quadrature").value("gamma", 0);

    std::ifstream table(stem + ".tsv");
    if (!table) {
        throw ParseError(stem + ".tsv: cannot open");
    }
    std::string line;
    std::getline(table, line);
    if (line != kGridColumns) {
        throw ParseError(stem + ".tsv:1: unexpected header");
    }
    std::size_t row = 0;
    const std::size_t expected = grid.n_angles() * grid.n_momenta();
    while (std::getline(table, line)) {
        if (line.empty()) continue;
        if (row >= expected) {
            throw ParseError(stem + ".tsv:" + std::to_string(row + 2) + ": extra row");
        }
        std::istringstream ss(line);
        double al, be, ga, w;
        int ma, mb, mg;
        if (!(ss >> al >> be >> ga >> ma >> mb >> mg >> w)) {
            throw ParseError(stem + ".tsv:" + std::to_string(row + 2) + ": malformed row");
        }
        const std::size_t m = row / grid.n_angles();
        const std::size_t a = row % grid.n_angles();
        if (!(spec.momenta.at(m) == MomentumTriple{ma, mb, mg})) {
            throw ParseError(stem + ".tsv:" + std::to_string(row + 2) + ": momentum out of order");
        }
        grid.at(a, m) = w;
        ++row;
    }
    if (row != expected) {
        throw ParseError(stem + ".tsv: expected " + std::to_string(expected) + " rows, found " + std::to_string(row));
    }
    return grid;
}

}  // namespace orient
