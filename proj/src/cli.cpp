#include "orient/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "json_util.hpp"
#include "orient/classical.hpp"
#include "orient/grid_io.hpp"
#include "orient/state_io.hpp"
#include "orient/states.hpp"
#include "orient/verify.hpp"

namespace orient {

using detail::json;
using detail::ordered_json;
namespace fs = std::filesystem;

double parse_angle(const std::string& text) {
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size() || !std::isfinite(v)) {
            throw ConfigError("malformed angle '" + text + "'");
        }
        return v;
    };
    const auto p = text.find("pi");
    if (p == std::string::npos) {
        return number(text);
    }
    const std::string pre = text.substr(0, p);
    const std::string post = text.substr(p + 2);
    double factor = pre.empty() ? 1.0 : pre == "-" ? -1.0 : pre == "+" ? 1.0 : number(pre);
    if (!post.empty()) {
        if (post[0] != '/') throw ConfigError("malformed angle '" + text + "'");
        const double d = number(post.substr(1));
        if (d == 0.0) throw ConfigError("malformed angle '" + text + "'");
        factor /= d;
    }
    return factor * kPi;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

int parse_int(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) {
        throw ConfigError("malformed " + what + " '" + s + "'");
    }
    return v;
}

}  // namespace

AngleGrid parse_grid(const std::string& text) {
    const auto parts = split(text, 'x');
    if (parts.size() != 3) throw ConfigError("grid must look like NaxNbxNg, got '" + text + "'");
    AngleGrid g{parse_int(parts[0], "grid"), parse_int(parts[1], "grid"), parse_int(parts[2], "grid")};
    if (g.n_alpha < 1 || g.n_beta < 1 || g.n_gamma < 1) throw ConfigError("grid counts must be positive");
    return g;
}

std::array<int, 3> parse_window(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 3) throw ConfigError("window must look like a,b,c, got '" + text + "'");
    std::array<int, 3> w{};
    for (int i = 0; i < 3; ++i) {
        w[i] = parse_int(parts[i], "window");
        if (w[i] < 0) throw ConfigError("window entries must be non-negative");
    }
    return w;
}

AlignRun align_preset(const std::string& preset) {
    AlignRun run;
    run.config.pulse.duration = 1e-3;
    run.config.pulse.strength = -10.0 / PulseConfig{1.0, 1e-3}.area();
    if (preset.empty()) {
        return run;
    }
    if (preset != "fig3") {
        throw ConfigError("unknown preset '" + preset + "'");
    }
    const int n = 629;
    for (int i = 0; i < n; ++i) {
        run.config.times.push_back(2.0 * kPi * i / (n - 1));
    }
    run.snapshot_times = {0.05, 0.09, 0.13, 1.44, kPi};
    run.initial_grid = true;
    return run;
}

namespace {

double json_angle(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        try {
            return parse_angle(v.get<std::string>());
        } catch (const ConfigError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    throw ParseError(where + ": expected a number or an angle string");
}

std::vector<double> json_times(const json& v, const std::string& where) {
    std::vector<double> t;
    if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) t.push_back(json_angle(v[i], where + "/" + std::to_string(i)));
    } else if (v.is_object()) {
        detail::expect_keys(v, {"start", "stop", "count"}, where);
        const double a = json_angle(v.at("start"), where + "/start");
        const double b = json_angle(v.at("stop"), where + "/stop");
        const int n = detail::get_field<int>(v, "count", where);
        if (n < 2) throw ParseError(where + "/count: needs at least 2");
        for (int i = 0; i < n; ++i) t.push_back(a + (b - a) * i / (n - 1));
    } else {
        throw ParseError(where + ": expected a list or {start, stop, count}");
    }
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) throw ParseError(where + ": times must be strictly increasing");
    }
    return t;
}

TopConstants json_constants(const json& v, const std::string& where) {
    detail::expect_keys(v, {"A", "C"}, where);
    TopConstants k;
    k.A = detail::get_field_or<double>(v, "A", k.A, where);
    k.C = detail::get_field_or<double>(v, "C", k.C, where);
    try {
        k.check();
    } catch (const DomainError& e) {
        throw ParseError(where + ": " + e.what());
    }
    return k;
}

}  // namespace

AlignRun parse_align_config(const std::string& text, const std::string& preset, const std::string& origin) {
    AlignRun run = align_preset(preset);
    const json j = detail::parse_json(text, origin);
    detail::expect_keys(j, {"constants", "pulse", "initial", "j_max", "tolerance", "times", "outputs"}, origin);
    AlignmentConfig& c = run.config;
    if (j.contains("constants")) c.constants = json_constants(j.at("constants"), origin + "/constants");
    if (j.contains("pulse")) {
        const json& p = j.at("pulse");
        const std::string where = origin + "/pulse";
        detail::expect_keys(p, {"kick_area", "strength", "duration", "center_time"}, where);
        if (p.contains("kick_area") && p.contains("strength")) {
            throw ParseError(where + ": give either kick_area or strength");
        }
        c.pulse.duration = detail::get_field_or<double>(p, "duration", c.pulse.duration, where);
        c.pulse.center_time = detail::get_field_or<double>(p, "center_time", c.pulse.center_time, where);
        if (!(c.pulse.duration > 0.0)) throw ParseError(where + "/duration: must be positive");
        if (p.contains("strength")) {
            c.pulse.strength = detail::get_field<double>(p, "strength", where);
        } else {
            const double area = detail::get_field_or<double>(p, "kick_area", -10.0, where);
            c.pulse.strength = area / PulseConfig{1.0, c.pulse.duration}.area();
        }
    }
    if (j.contains("initial")) {
        const auto q = detail::get_field<std::array<int, 3>>(j, "initial", origin);
        c.initial = {q[0], q[1], q[2]};
    }
    c.j_max = detail::get_field_or<int>(j, "j_max", c.j_max, origin);
    c.tol = detail::get_field_or<double>(j, "tolerance", c.tol, origin);
    if (j.contains("times")) c.times = json_times(j.at("times"), origin + "/times");
    if (j.contains("outputs")) {
        const json& o = j.at("outputs");
        const std::string where = origin + "/outputs";
        detail::expect_keys(o, {"signal", "snapshot_times", "initial_grid", "grid", "m_beta_max", "states"}, where);
        run.signal = detail::get_field_or<bool>(o, "signal", run.signal, where);
        run.states = detail::get_field_or<bool>(o, "states", run.states, where);
        if (o.contains("snapshot_times")) run.snapshot_times = json_times(o.at("snapshot_times"), where + "/snapshot_times");
        run.initial_grid = detail::get_field_or<bool>(o, "initial_grid", run.initial_grid, where);
        if (o.contains("grid")) {
            try {
                run.grid = parse_grid(detail::get_field<std::string>(o, "grid", where));
            } catch (const ConfigError& e) {
                throw ParseError(where + "/grid: " + e.what());
            }
        }
        run.m_beta_max = detail::get_field_or<int>(o, "m_beta_max", run.m_beta_max, where);
        if (run.m_beta_max < 0) throw ParseError(where + "/m_beta_max: negative");
    }
    const JKM& q = c.initial;
    if (q.J < 0 || std::abs(q.K) > q.J || std::abs(q.M) > q.J || q.J > c.j_max) {
        throw ParseError(origin + "/initial: need |K|, |M| <= J <= j_max");
    }
    if (!(c.tol > 0.0)) throw ParseError(origin + "/tolerance: must be positive");
    if (c.times.empty() && run.snapshot_times.empty()) throw ParseError(origin + ": no times requested");
    return run;
}

namespace {

/// Collects output files in memory and writes them only once the whole command has succeeded.
class Outputs {
public:
    explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

    void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

    void add_grid(const PhaseSpaceGrid& grid, const std::string& stem, const std::string& source_hash) {
        add(stem + ".json", grid_metadata(grid, source_hash));
        std::ostringstream table;
        write_grid_table(grid, table);
        add(stem + ".tsv", table.str());
    }

    void commit(std::ostream& log) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
        std::vector<fs::path> staged;
        for (const auto& [name, content] : files_) {
            const fs::path tmp = dir_ / (name + ".partial");
            std::ofstream out(tmp, std::ios::binary);
            out << content;
            out.close();
            if (!out) {
                for (const auto& p : staged) fs::remove(p, ec);
                fs::remove(tmp, ec);
                throw IoError("cannot write " + tmp.string());
            }
            staged.push_back(tmp);
        }
        for (const auto& [name, content] : files_) {
            fs::rename(dir_ / (name + ".partial"), dir_ / name, ec);
            if (ec) throw IoError("cannot rename into " + (dir_ / name).string() + ": " + ec.message());
            log << "wrote " << (dir_ / name).string() << '\n';
        }
    }

private:
    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Gnuplot script for the first varying angle and momentum axes of a grid table.
std::string plot_script(const PhaseSpaceGrid& grid, const std::string& stem) {
    const GridSpec& s = grid.spec();
    int angle_col = 1, momentum_col = 4;
    for (Axis a : kAxes) {
        if (s.angles.count(a) > 1) {
            angle_col = axis_index(a) + 1;
            break;
        }
    }
    for (Axis a : kAxes) {
        if (s.momenta.count(a) > 1) {
            momentum_col = axis_index(a) + 4;
            break;
        }
    }
    const char* names[] = {"alpha", "beta", "gamma", "m_alpha", "m_beta", "m_gamma"};
    std::ostringstream os;
    os << "# gnuplot script; other axes are overplotted\n"
       << "set terminal pngcairo size 900,700\n"
       << "set output '" << stem << ".png'\n"
       << "set xlabel '" << names[angle_col - 1] << "'\n"
       << "set ylabel '" << names[momentum_col - 1] << "'\n"
       << "set view map\n"
       << "set palette defined (-1 'blue', 0 'white', 1 'red')\n"
       << "stats '" << stem << ".tsv' using 7 nooutput\n"
       << "set cbrange [-(abs(STATS_min) > abs(STATS_max) ? abs(STATS_min) : abs(STATS_max)):"
       << "(abs(STATS_min) > abs(STATS_max) ? abs(STATS_min) : abs(STATS_max))]\n"
       << "splot '" << stem << ".tsv' using " << angle_col << ':' << momentum_col
       << ":7 with points pointtype 5 pointsize 0.6 palette notitle\n";
    return os.str();
}

/// m-basis reference density |<m|psi>|^2 (or diag rho) on the grid's momentum window.
std::vector<double> momentum_reference(const RotorState& state, const MomentumWindow& w) {
    std::vector<double> ref(w.size(), 0.0);
    if (is_m_basis(state.basis())) {
        const MBasisSpec& b = state.m_basis();
        const CMatrix rho = state.density();
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (const auto i = b.find(w.at(k))) {
                const auto ii = static_cast<Eigen::Index>(*i);
                ref[k] = rho(ii, ii).real();
            }
        }
        return ref;
    }
    std::array<int, 3> reach{};
    for (Axis a : kAxes) {
        const int i = axis_index(a);
        reach[i] = std::max(std::abs(w.lo[i]), std::abs(w.hi[i]));
    }
    const MBasisSpec target(reach[0], reach[1], reach[2]);
    const BasisConversion conv = jkm_to_m_matrix(state.jkm_basis(), target);
    const CMatrix rho_m = conv.matrix * state.density() * conv.matrix.adjoint();
    for (std::size_t k = 0; k < w.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(target.index(w.at(k)));
        ref[k] = rho_m(i, i).real();
    }
    return ref;
}

struct WignerSummary {
    ordered_json report;
    double normalization_error = 0.0;
};

WignerSummary wigner_report(const PhaseSpaceGrid& W, const RotorState* state, double tolerance) {
    const GridSpec& s = W.spec();
    WignerSummary out;
    ordered_json& r = out.report;
    r["format"] = "orient-wigner-report-1";
    r["source"] = W.diagnostics.source;
    r["method"] = W.diagnostics.method;
    const double norm = normalization(W);
    out.normalization_error = std::abs(norm - 1.0);
    r["normalization"] = norm;
    r["normalization_error"] = out.normalization_error;
    r["tolerance"] = tolerance;
    r["max_imag_residue"] = W.diagnostics.max_imag_residue;
    r["captured_norm"] = W.diagnostics.captured_norm;
    const NegativityReport neg = negativity_volume(W);
    r["negativity"] = {{"volume", neg.volume}, {"min_over_max", neg.min_over_max}};
    std::size_t best = 0;
    for (std::size_t i = 1; i < W.values().size(); ++i) {
        if (W.values()[i] > W.values()[best]) best = i;
    }
    const std::size_t bm = best / W.n_angles();
    const std::size_t ba = best % W.n_angles();
    const EulerAngles pa = s.angles.at(ba);
    const MomentumTriple pm = s.momenta.at(bm);
    r["peak"] = {{"alpha", pa.alpha()}, {"beta", pa.beta()}, {"gamma", pa.gamma()}, {"m_alpha", pm.m_alpha},
                 {"m_beta", pm.m_beta},  {"m_gamma", pm.m_gamma}, {"W", W.values()[best]}};
    if (state) {
        const Marginals mg = marginals(W);
        double angle_res = 0.0, angle_raw_res = 0.0;
        for (std::size_t a = 0; a < W.n_angles(); ++a) {
            const double want = angle_density(*state, s.angles.at(a));
            angle_res = std::max(angle_res, std::abs(mg.angle[a] - want));
            angle_raw_res = std::max(angle_raw_res, std::abs(mg.angle_raw[a] - want));
        }
        const std::vector<double> ref = momentum_reference(*state, s.momenta);
        double mom_res = 0.0;
        for (std::size_t k = 0; k < ref.size(); ++k) mom_res = std::max(mom_res, std::abs(mg.momentum[k] - ref[k]));
        r["marginals"] = {{"angle_residual", angle_res},
                          {"angle_residual_raw", angle_raw_res},
                          {"angle_extrapolated_points", mg.extrapolated_points},
                          {"angle_uncertainty", mg.angle_uncertainty},
                          {"momentum_residual", mom_res}};
    }
    r["warnings"] = W.diagnostics.warnings;
    r["passed"] = out.normalization_error <= tolerance && W.diagnostics.max_imag_residue <= 1e-10;
    return out;
}

struct CommonOptions {
    std::string out_dir = ".";
    std::string name;
    bool plot = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, const std::string& default_name) {
    o.name = default_name;
    cmd->add_option("--out", o.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--name", o.name, "file stem for outputs")->capture_default_str();
    cmd->add_flag("--plot", o.plot, "also write a gnuplot script per grid");
}

void check_name(const std::string& name) {
    if (name.empty() || name.find('/') != std::string::npos) throw ConfigError("--name must be a plain file stem");
}

MomentumWindow window_from(const std::array<int, 3>& w) {
    return MomentumWindow::symmetric(w[0], w[1], w[2]);
}

void emit_grid(Outputs& files, const PhaseSpaceGrid& W, const std::string& stem, const std::string& hash,
               bool plot) {
    files.add_grid(W, stem, hash);
    if (plot) files.add(stem + ".gp", plot_script(W, stem));
}

/// Exit code for a report whose tolerance check failed.
int finish_with_report(const WignerSummary& s, std::ostream& err) {
    if (s.report["passed"].get<bool>()) return static_cast<int>(ExitCode::ok);
    err << "rotorwig: tolerance: normalization error " << format_real(s.normalization_error) << " exceeds "
        << format_real(s.report["tolerance"].get<double>()) << " or imaginary residue "
        << format_real(s.report["max_imag_residue"].get<double>()) << " exceeds 1e-10\n";
    return static_cast<int>(ExitCode::tolerance);
}

// ---- wigner --------------------------------------------------------------------------------------

struct WignerOptions {
    CommonOptions common;
    std::string state_path;
    std::string grid = "16x16x16";
    std::string mwin;
    std::string method = "auto";
    int order = 0;
    int convert_m_beta = 128;
    double tolerance = 1e-6;
};

int run_wigner(const WignerOptions& o, std::ostream& out, std::ostream& err) {
    check_name(o.common.name);
    if (o.order != 0 && o.order < 32) throw ConfigError("--order must be at least 32");
    if (!(o.tolerance > 0.0)) throw ConfigError("--tolerance must be positive");
    const AngleGrid grid = parse_grid(o.grid);
    const std::string text = read_text(o.state_path);
    const RotorState state = parse_state(text, o.state_path);
    const std::string hash = content_hash(text);

    std::array<int, 3> mw{};
    if (!o.mwin.empty()) {
        mw = parse_window(o.mwin);
    } else if (is_m_basis(state.basis())) {
        const MBasisSpec& b = state.m_basis();
        mw = {b.m_max(Axis::alpha), b.m_max(Axis::beta), b.m_max(Axis::gamma)};
    } else {
        throw ConfigError("--mwin is required for jkm states");
    }
    const GridSpec spec{grid, window_from(mw)};
    std::string method = o.method;
    if (method == "auto") method = is_m_basis(state.basis()) ? "momentum" : "angle";
    PhaseSpaceGrid W;
    if (method == "momentum") {
        if (o.order != 0) throw ConfigError("--order applies to the angle method only");
        if (is_m_basis(state.basis())) {
            W = wigner_from_m_basis(state, spec);
        } else {
            const int j = state.jkm_basis().j_max();
            double captured = 1.0;
            const RotorState m_state =
                convert_to_m_basis(state, MBasisSpec(j, std::max(o.convert_m_beta, mw[1]), j), 0, &captured);
            W = wigner_from_m_basis(m_state, spec);
            W.diagnostics.captured_norm = captured;
        }
    } else if (method == "angle") {
        AngleQuadrature quad;
        if (o.order != 0) quad.order = o.order;
        W = wigner_from_angle_basis(state, spec, quad);
    } else {
        throw ConfigError("--method must be auto, momentum or angle");
    }
    W.diagnostics.source = o.state_path;
    const WignerSummary summary = wigner_report(W, &state, o.tolerance);
    Outputs files(o.common.out_dir);
    emit_grid(files, W, o.common.name, hash, o.common.plot);
    files.add(o.common.name + "_report.json", detail::dump_json(summary.report));
    files.commit(out);
    out << "normalization " << format_real(summary.report["normalization"].get<double>()) << '\n';
    return finish_with_report(summary, err);
}

// ---- coherent ------------------------------------------------------------------------------------

struct CoherentOptions {
    CommonOptions common;
    double sigma = 7.0;
    std::string center = "pi,10";
    std::string axis = "alpha";
    std::string bystander = "0,0,0";
    int m_max = 0;
    std::string grid = "128x1x1";
    std::string mwin;
    double tolerance = 1e-6;
};

std::pair<double, int> parse_center(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 2) throw ConfigError("--center must look like angle,m");
    return {parse_angle(parts[0]), parse_int(parts[1], "center momentum")};
}

std::array<int, 3> parse_signed_triple(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 3) throw ConfigError("expected a,b,c, got '" + text + "'");
    return {parse_int(parts[0], "momentum"), parse_int(parts[1], "momentum"), parse_int(parts[2], "momentum")};
}

MBasisSpec coherent_basis(Axis axis, int need, const std::array<int, 3>& bystander) {
    std::array<int, 3> mm{};
    for (Axis a : kAxes) {
        const int i = axis_index(a);
        mm[i] = a == axis ? need : std::abs(bystander[i]);
    }
    return MBasisSpec(mm[0], mm[1], mm[2]);
}

std::string describe(const CoherentSpec& c) {
    std::ostringstream os;
    os << "coherent axis=" << axis_name(c.axis) << " sigma=" << format_real(c.sigma)
       << " center=(" << format_real(c.center_angle) << "," << c.center_m << ")";
    return os.str();
}

int run_coherent(const CoherentOptions& o, std::ostream& out, std::ostream& err) {
    check_name(o.common.name);
    if (!(o.tolerance > 0.0)) throw ConfigError("--tolerance must be positive");
    CoherentSpec c;
    c.sigma = o.sigma;
    std::tie(c.center_angle, c.center_m) = parse_center(o.center);
    c.axis = parse_axis(o.axis);
    c.bystander = parse_signed_triple(o.bystander);
    const int need = std::max(o.m_max, required_window(c));
    const MBasisSpec basis = coherent_basis(c.axis, need, c.bystander);
    const RotorState state = coherent_state(c, basis);
    const std::array<int, 3> mw =
        o.mwin.empty() ? std::array<int, 3>{basis.m_max(Axis::alpha), basis.m_max(Axis::beta), basis.m_max(Axis::gamma)}
                       : parse_window(o.mwin);
    PhaseSpaceGrid W = wigner_from_m_basis(state, {parse_grid(o.grid), window_from(mw)});
    W.diagnostics.source = describe(c);
    const std::string state_text = serialize_state(state);
    const std::string hash = content_hash(state_text);
    const WignerSummary summary = wigner_report(W, &state, o.tolerance);
    Outputs files(o.common.out_dir);
    files.add(o.common.name + "_state.json", state_text);
    emit_grid(files, W, o.common.name, hash, o.common.plot);
    files.add(o.common.name + "_report.json", detail::dump_json(summary.report));
    files.commit(out);
    return finish_with_report(summary, err);
}

// ---- superpose -----------------------------------------------------------------------------------

struct SuperposeOptions {
    CommonOptions common;
    std::string spec_path;
    double tolerance = 1e-6;
};

int run_superpose(const SuperposeOptions& o, std::ostream& out, std::ostream& err) {
    check_name(o.common.name);
    if (!(o.tolerance > 0.0)) throw ConfigError("--tolerance must be positive");
    const std::string origin = o.spec_path;
    const std::string text = read_text(o.spec_path);
    const json j = detail::parse_json(text, origin);
    detail::expect_keys(j, {"axis", "sigma", "bystander", "m_max", "components", "grid", "window", "fringe_slice"},
                        origin);
    Axis axis = Axis::alpha;
    if (j.contains("axis")) {
        try {
            axis = parse_axis(detail::get_field<std::string>(j, "axis", origin));
        } catch (const DomainError& e) {
            throw ParseError(origin + "/axis: " + e.what());
        }
    }
    const double sigma = detail::get_field_or<double>(j, "sigma", 1.0, origin);
    const auto bystander = detail::get_field_or<std::array<int, 3>>(j, "bystander", {0, 0, 0}, origin);
    if (!j.contains("components") || !j.at("components").is_array() || j.at("components").empty()) {
        throw ParseError(origin + "/components: expected a non-empty list");
    }
    struct Component {
        std::optional<CoherentSpec> coherent;
        std::optional<RotorState> state;
        cplx weight = 1.0;
    };
    std::vector<Component> parts;
    const fs::path base_dir = fs::path(o.spec_path).parent_path();
    int need = 0;
    std::optional<Basis> file_basis;
    const json& list = j.at("components");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = origin + "/components/" + std::to_string(i);
        const json& e = list[i];
        detail::expect_keys(e, {"center", "sigma", "weight", "state"}, where);
        Component comp;
        if (e.contains("weight")) {
            const auto w = detail::get_field<std::array<double, 2>>(e, "weight", where);
            comp.weight = cplx(w[0], w[1]);
        }
        if (e.contains("state") == e.contains("center")) {
            throw ParseError(where + ": give exactly one of center or state");
        }
        if (e.contains("state")) {
            if (e.contains("sigma")) throw ParseError(where + "/sigma: not used with state");
            const fs::path p = base_dir / detail::get_field<std::string>(e, "state", where);
            comp.state = read_state(p.string());
            if (file_basis && !(*file_basis == comp.state->basis())) {
                throw ParseError(where + "/state: basis differs from the other components");
            }
            file_basis = comp.state->basis();
        } else {
            const json& c = e.at("center");
            if (!c.is_array() || c.size() != 2 || !c[1].is_number_integer()) {
                throw ParseError(where + "/center: expected [angle, integer m]");
            }
            CoherentSpec spec;
            spec.axis = axis;
            spec.sigma = detail::get_field_or<double>(e, "sigma", sigma, where);
            if (!(spec.sigma > 0.0)) throw ParseError(where + "/sigma: must be positive");
            spec.center_angle = json_angle(c[0], where + "/center/0");
            spec.center_m = c[1].get<int>();
            spec.bystander = bystander;
            need = std::max(need, required_window(spec));
            comp.coherent = spec;
        }
        parts.push_back(std::move(comp));
    }
    MBasisSpec basis = coherent_basis(axis, need, bystander);
    if (j.contains("m_max")) {
        const auto mm = detail::get_field<std::array<int, 3>>(j, "m_max", origin);
        basis = MBasisSpec(mm[0], mm[1], mm[2]);
    } else if (file_basis) {
        if (!is_m_basis(*file_basis)) throw ParseError(origin + ": state components must use basis m");
        basis = std::get<MBasisSpec>(*file_basis);
    }
    if (file_basis && !(Basis(basis) == *file_basis)) {
        throw ParseError(origin + "/m_max: state components live on a different window");
    }
    std::vector<RotorState> states;
    std::vector<cplx> weights;
    for (const Component& c : parts) {
        states.push_back(c.state ? *c.state : coherent_state(*c.coherent, basis));
        weights.push_back(c.weight);
    }
    const RotorState state = superpose(states, weights);

    AngleGrid grid{256, 1, 1};
    if (j.contains("grid")) {
        try {
            grid = parse_grid(detail::get_field<std::string>(j, "grid", origin));
        } catch (const ConfigError& e) {
            throw ParseError(origin + "/grid: " + e.what());
        }
    }
    std::array<int, 3> mw{basis.m_max(Axis::alpha), basis.m_max(Axis::beta), basis.m_max(Axis::gamma)};
    if (j.contains("window")) mw = detail::get_field<std::array<int, 3>>(j, "window", origin);
    for (int v : mw) {
        if (v < 0) throw ParseError(origin + "/window: negative entry");
    }
    PhaseSpaceGrid W = wigner_from_m_basis(state, {grid, window_from(mw)});
    W.diagnostics.source = "superposition of " + std::to_string(parts.size()) + " states from " + o.spec_path;

    MomentumTriple slice{bystander[0], bystander[1], bystander[2]};
    if (j.contains("fringe_slice")) {
        const auto f = detail::get_field<std::array<int, 3>>(j, "fringe_slice", origin);
        slice = {f[0], f[1], f[2]};
    } else {
        double mean = 0.0;
        int n = 0;
        for (const Component& c : parts) {
            if (c.coherent) {
                mean += c.coherent->center_m;
                ++n;
            }
        }
        slice[axis] = n ? static_cast<int>(std::lround(mean / n)) : 0;
    }
    const std::string state_text = serialize_state(state);
    WignerSummary summary = wigner_report(W, &state, o.tolerance);
    if (W.spec().momenta.find(slice)) {
        summary.report["fringes"] = {{"slice", {slice.m_alpha, slice.m_beta, slice.m_gamma}},
                                     {"count", count_fringes(W, slice)}};
    }
    Outputs files(o.common.out_dir);
    files.add(o.common.name + "_state.json", state_text);
    emit_grid(files, W, o.common.name, content_hash(state_text), o.common.plot);
    files.add(o.common.name + "_report.json", detail::dump_json(summary.report));
    files.commit(out);
    if (summary.report.contains("fringes")) {
        out << "fringes " << summary.report["fringes"]["count"].get<int>() << '\n';
    }
    return finish_with_report(summary, err);
}

// ---- align ---------------------------------------------------------------------------------------

struct AlignOptions {
    CommonOptions common;
    std::string config_path;
    std::string preset;
};

int run_align(const AlignOptions& o, std::ostream& out, std::ostream& err) {
    check_name(o.common.name);
    if (o.config_path.empty() && o.preset.empty()) throw ConfigError("align needs --config or --preset");
    AlignRun run = o.config_path.empty()
                       ? align_preset(o.preset)
                       : parse_align_config(read_text(o.config_path), o.preset, o.config_path);
    AlignmentConfig& cfg = run.config;
    if (cfg.times.empty() && run.snapshot_times.empty()) throw ConfigError("no times requested");

    const std::vector<double> signal_times = cfg.times;
    std::vector<double> all = signal_times;
    all.insert(all.end(), run.snapshot_times.begin(), run.snapshot_times.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    cfg.times = all;
    const AlignmentResult res = run_alignment(cfg);
    for (const std::string& w : res.kick.warnings) err << "rotorwig: warning: " << w << '\n';
    if (res.kick.top_shell_population > 1e-3) {
        throw TruncationError("population " + format_real(res.kick.top_shell_population) +
                              " in the two highest J shells exceeds 1e-3; raise j_max");
    }
    std::map<double, std::size_t> at;
    for (std::size_t i = 0; i < res.times.size(); ++i) at[res.times[i]] = i;

    const JKM& q = cfg.initial;
    const JKMBasisSpec basis(cfg.j_max, std::pair{q.K, q.M});
    MomentumWindow w;
    w.lo = {q.M, -run.m_beta_max, q.K};
    w.hi = {q.M, run.m_beta_max, q.K};
    const GridSpec spec{run.grid, w};

    ordered_json report;
    report["format"] = "orient-align-report-1";
    report["initial"] = {q.J, q.K, q.M};
    report["j_max"] = cfg.j_max;
    report["constants"] = {{"A", cfg.constants.A}, {"C", cfg.constants.C}};
    report["pulse"] = {{"strength", cfg.pulse.strength},
                       {"duration", cfg.pulse.duration},
                       {"center_time", cfg.pulse.center_time},
                       {"kick_area", cfg.pulse.area()}};
    report["tolerance"] = cfg.tol;
    report["pre_kick_signal"] = res.pre_kick_signal;
    report["post_kick_signal"] = res.post_kick_signal;
    report["kick"] = {{"norm_drift", res.kick.norm_drift},
                      {"steps", res.kick.steps},
                      {"rejected", res.kick.rejected},
                      {"top_shell_population", res.kick.top_shell_population},
                      {"renormalized", res.kick.renormalized},
                      {"warnings", res.kick.warnings}};

    Outputs files(o.common.out_dir);
    if (run.signal && !signal_times.empty()) {
        std::ostringstream tsv;
        tsv << "t\tcos2beta\n";
        for (double t : signal_times) tsv << format_real(t) << '\t' << format_real(res.signal[at.at(t)]) << '\n';
        files.add(o.common.name + "_signal.tsv", tsv.str());
    }
    ordered_json grids = ordered_json::array();
    auto snapshot = [&](const RotorState& s, double t, const std::string& stem) {
        PhaseSpaceGrid W = wigner_from_angle_basis(s, spec);
        std::ostringstream src;
        src << "align |" << q.J << q.K << q.M << "> t=" << format_real(t);
        W.diagnostics.source = src.str();
        const std::string state_text = serialize_state(s);
        emit_grid(files, W, stem, content_hash(state_text), o.common.plot);
        if (run.states) files.add(stem + "_state.json", state_text);
        grids.push_back({{"t", t}, {"stem", stem}, {"normalization", normalization(W)}});
    };
    if (run.initial_grid) {
        CVector c = CVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
        c[static_cast<Eigen::Index>(basis.index(q))] = 1.0;
        snapshot(RotorState::pure(basis, c), cfg.pulse.start(), o.common.name + "_initial");
    }
    for (std::size_t i = 0; i < run.snapshot_times.size(); ++i) {
        const double t = run.snapshot_times[i];
        snapshot(res.snapshots[at.at(t)], t, o.common.name + "_t" + std::to_string(i));
    }
    report["grids"] = grids;
    files.add(o.common.name + "_report.json", detail::dump_json(report));
    files.commit(out);
    out << "pre-kick " << format_real(res.pre_kick_signal) << " post-kick " << format_real(res.post_kick_signal)
        << '\n';
    return static_cast<int>(ExitCode::ok);
}

// ---- classical -----------------------------------------------------------------------------------

struct ClassicalOptions {
    CommonOptions common;
    std::string init_path;
    double t_span = 10.0;
};

int run_classical(const ClassicalOptions& o, std::ostream& out, std::ostream&) {
    check_name(o.common.name);
    if (!(o.t_span > 0.0)) throw ConfigError("--tspan must be positive");
    const std::string origin = o.init_path;
    const json j = detail::parse_json(read_text(o.init_path), origin);
    detail::expect_keys(j, {"constants", "tolerance", "trajectories"}, origin);
    const TopConstants k = j.contains("constants") ? json_constants(j.at("constants"), origin + "/constants")
                                                   : TopConstants{};
    const double tol = detail::get_field_or<double>(j, "tolerance", 1e-12, origin);
    if (!(tol > 0.0)) throw ParseError(origin + "/tolerance: must be positive");
    if (!j.contains("trajectories") || !j.at("trajectories").is_array() || j.at("trajectories").empty()) {
        throw ParseError(origin + "/trajectories: expected a non-empty list");
    }
    std::vector<ClassicalState> initial;
    const json& list = j.at("trajectories");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = origin + "/trajectories/" + std::to_string(i);
        const json& e = list[i];
        detail::expect_keys(e, {"alpha", "beta", "gamma", "p_alpha", "p_beta", "p_gamma"}, where);
        ClassicalState s;
        s.alpha = json_angle(e.contains("alpha") ? e.at("alpha") : json(), where + "/alpha");
        s.beta = json_angle(e.contains("beta") ? e.at("beta") : json(), where + "/beta");
        s.gamma = json_angle(e.contains("gamma") ? e.at("gamma") : json(), where + "/gamma");
        s.p_alpha = detail::get_field<double>(e, "p_alpha", where);
        s.p_beta = detail::get_field<double>(e, "p_beta", where);
        s.p_gamma = detail::get_field<double>(e, "p_gamma", where);
        initial.push_back(s);
    }
    std::ostringstream tsv;
    tsv << "trajectory\tt\talpha\tbeta\tgamma\tp_alpha\tp_beta\tp_gamma\tenergy\n";
    ordered_json paths = ordered_json::array();
    for (std::size_t i = 0; i < initial.size(); ++i) {
        const ClassicalPath p = classical_trajectory(initial[i], o.t_span, k, tol);
        for (std::size_t n = 0; n < p.t.size(); ++n) {
            const ClassicalState& s = p.states[n];
            tsv << i << '\t' << format_real(p.t[n]) << '\t' << format_real(s.alpha) << '\t' << format_real(s.beta)
                << '\t' << format_real(s.gamma) << '\t' << format_real(s.p_alpha) << '\t' << format_real(s.p_beta)
                << '\t' << format_real(s.p_gamma) << '\t' << format_real(classical_hamiltonian(s, k)) << '\n';
        }
        paths.push_back({{"index", i},
                         {"samples", p.t.size()},
                         {"t_end", p.t.empty() ? 0.0 : p.t.back()},
                         {"truncated_at_pole", p.truncated},
                         {"max_energy_drift", p.max_energy_drift}});
    }
    ordered_json report;
    report["format"] = "orient-classical-report-1";
    report["constants"] = {{"A", k.A}, {"C", k.C}};
    report["t_span"] = o.t_span;
    report["tolerance"] = tol;
    report["trajectories"] = paths;
    Outputs files(o.common.out_dir);
    files.add(o.common.name + ".tsv", tsv.str());
    files.add(o.common.name + "_report.json", detail::dump_json(report));
    files.commit(out);
    return static_cast<int>(ExitCode::ok);
}

// ---- verify --------------------------------------------------------------------------------------

struct VerifyCliOptions {
    CommonOptions common;
    std::uint64_t seed = 1;
    int quadrature_order = 0;
};

int run_verify_cmd(const VerifyCliOptions& o, std::ostream& out, std::ostream& err) {
    check_name(o.common.name);
    if (o.quadrature_order != 0 && o.quadrature_order < 32) {
        throw ConfigError("--quadrature-order must be at least 32");
    }
    const VerifyReport r = run_verify({o.seed, o.quadrature_order});
    const std::string text = serialize_verify_report(r);
    Outputs files(o.common.out_dir);
    files.add(o.common.name + ".json", text);
    files.commit(out);
    for (const VerifyCheck& c : r.checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << " residual " << format_real(c.residual) << " tolerance "
            << format_real(c.tolerance) << '\n';
    }
    if (!r.passed()) {
        err << "rotorwig: tolerance: verification failed\n";
        return static_cast<int>(ExitCode::tolerance);
    }
    return static_cast<int>(ExitCode::ok);
}

int fail(std::ostream& err, ExitCode code, const char* kind, const std::exception& e) {
    err << "rotorwig: " << kind << ": " << e.what() << '\n';
    return static_cast<int>(code);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Wigner functions and alignment dynamics of rigid rotors", "rotorwig"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "rotorwig 1.0");

    WignerOptions wo;
    auto* wig = app.add_subcommand("wigner", "Wigner function of a state file on a phase-space grid");
    add_common(wig, wo.common, "wigner");
    wig->add_option("--state", wo.state_path, "state file")->required();
    wig->add_option("--grid", wo.grid, "angle samples NaxNbxNg")->capture_default_str();
    wig->add_option("--mwin", wo.mwin, "momentum window a,b,c (default: the state's window)");
    wig->add_option("--method", wo.method, "auto, momentum or angle")->capture_default_str();
    wig->add_option("--order", wo.order, "minimum beta' quadrature order per piece (>= 32)");
    wig->add_option("--convert-mbeta", wo.convert_m_beta, "m_beta window for converting jkm states")
        ->capture_default_str();
    wig->add_option("--tolerance", wo.tolerance, "normalization tolerance")->capture_default_str();

    CoherentOptions co;
    auto* coh = app.add_subcommand("coherent", "Coherent state and its Wigner function");
    add_common(coh, co.common, "coherent");
    coh->add_option("--sigma", co.sigma, "Gaussian width in m")->capture_default_str();
    coh->add_option("--center", co.center, "centre angle,m")->capture_default_str();
    coh->add_option("--axis", co.axis, "alpha, beta or gamma")->capture_default_str();
    coh->add_option("--bystander", co.bystander, "momenta on the other axes")->capture_default_str();
    coh->add_option("--mmax", co.m_max, "momentum window on the coherent axis (at least the required one)");
    coh->add_option("--grid", co.grid, "angle samples NaxNbxNg")->capture_default_str();
    coh->add_option("--mwin", co.mwin, "grid momentum window a,b,c (default: the basis window)");
    coh->add_option("--tolerance", co.tolerance, "normalization tolerance")->capture_default_str();

    SuperposeOptions so;
    auto* sup = app.add_subcommand("superpose", "Superposition of coherent states or state files");
    add_common(sup, so.common, "superpose");
    sup->add_option("--spec", so.spec_path, "superposition spec file")->required();
    sup->add_option("--tolerance", so.tolerance, "normalization tolerance")->capture_default_str();

    AlignOptions ao;
    auto* ali = app.add_subcommand("align", "Laser-kicked symmetric-top alignment");
    add_common(ali, ao.common, "align");
    ali->add_option("--config", ao.config_path, "run config file");
    ali->add_option("--preset", ao.preset, "preset run (fig3)");

    ClassicalOptions clo;
    auto* cla = app.add_subcommand("classical", "Classical characteristics of the free top");
    add_common(cla, clo.common, "classical");
    cla->add_option("--init", clo.init_path, "initial conditions file")->required();
    cla->add_option("--tspan", clo.t_span, "integration span in reduced time")->capture_default_str();

    VerifyCliOptions vo;
    auto* ver = app.add_subcommand("verify", "Randomized invariant suites");
    add_common(ver, vo.common, "verify");
    ver->add_option("--seed", vo.seed, "random seed")->capture_default_str();
    ver->add_option("--quadrature-order", vo.quadrature_order, "angle quadrature order override (>= 32)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : static_cast<int>(ExitCode::usage);
    }

    try {
        if (wig->parsed()) return run_wigner(wo, out, err);
        if (coh->parsed()) return run_coherent(co, out, err);
        if (sup->parsed()) return run_superpose(so, out, err);
        if (ali->parsed()) return run_align(ao, out, err);
        if (cla->parsed()) return run_classical(clo, out, err);
        if (ver->parsed()) return run_verify_cmd(vo, out, err);
    } catch (const ParseError& e) {
        return fail(err, ExitCode::parse, "parse error", e);
    } catch (const ConfigError& e) {
        return fail(err, ExitCode::usage, "configuration", e);
    } catch (const DomainError& e) {
        return fail(err, ExitCode::usage, "invalid input", e);
    } catch (const ToleranceError& e) {
        return fail(err, ExitCode::tolerance, "tolerance", e);
    } catch (const IntegrationError& e) {
        return fail(err, ExitCode::tolerance, "integration", e);
    } catch (const PoleError& e) {
        return fail(err, ExitCode::singularity, "pole", e);
    } catch (const SingularityError& e) {
        return fail(err, ExitCode::singularity, "singularity", e);
    } catch (const TruncationError& e) {
        return fail(err, ExitCode::truncation, "truncation", e);
    } catch (const IoError& e) {
        return fail(err, ExitCode::io, "io", e);
    } catch (const std::exception& e) {
        return fail(err, ExitCode::usage, "error", e);
    }
    return static_cast<int>(ExitCode::usage);
}

}  // namespace orient
