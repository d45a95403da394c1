#include "orient/state_io.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "orient/grid_io.hpp"

namespace orient {

using detail::json;

namespace {

std::size_t entry_index(const Basis& basis, const json& t, const std::string& where) {
    if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_number_integer() ||
        !t[2].is_number_integer()) {
        throw ParseError(where + ": expected an integer triple");
    }
    const int a = t[0].get<int>(), b = t[1].get<int>(), c = t[2].get<int>();
    if (const auto* mb = std::get_if<MBasisSpec>(&basis)) {
        const auto i = mb->find({a, b, c});
        if (!i) throw ParseError(where + ": momentum outside the window");
        return *i;
    }
    const auto& jb = std::get<JKMBasisSpec>(basis);
    const auto i = jb.find({a, b, c});
    if (!i) throw ParseError(where + ": (J, K, M) not in the basis");
    return *i;
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ParseError(where + ": expected a number");
    return v.get<double>();
}

}  // namespace

RotorState parse_state(const std::string& text, const std::string& origin) {
    const json j = detail::parse_json(text, origin);
    detail::expect_keys(j, {"basis", "m_max", "j_max", "block", "coefficients", "density", "normalize"}, origin);
    const std::string kind = detail::get_field<std::string>(j, "basis", origin);
    Basis basis;
    if (kind == "m") {
        if (j.contains("j_max") || j.contains("block")) throw ParseError(origin + ": j_max/block need basis jkm");
        const auto mm = detail::get_field<std::array<int, 3>>(j, "m_max", origin);
        try {
            basis = MBasisSpec(mm[0], mm[1], mm[2]);
        } catch (const DomainError& e) {
            throw ParseError(origin + "/m_max: " + e.what());
        }
    } else if (kind == "jkm") {
        if (j.contains("m_max")) throw ParseError(origin + ": m_max needs basis m");
        const int jmax = detail::get_field<int>(j, "j_max", origin);
        if (jmax < 0) throw ParseError(origin + "/j_max: negative");
        std::optional<std::pair<int, int>> block;
        if (j.contains("block")) {
            const auto b = detail::get_field<std::array<int, 2>>(j, "block", origin);
            if (std::abs(b[0]) > jmax || std::abs(b[1]) > jmax) throw ParseError(origin + "/block: exceeds j_max");
            block = std::pair{b[0], b[1]};
        }
        basis = JKMBasisSpec(jmax, block);
    } else {
        throw ParseError(origin + "/basis: expected \"m\" or \"jkm\", got \"" + kind + "\"");
    }
    const bool normalize = detail::get_field_or<bool>(j, "normalize", false, origin);
    const auto n = static_cast<Eigen::Index>(basis_dimension(basis));
    if (j.contains("coefficients") == j.contains("density")) {
        throw ParseError(origin + ": exactly one of coefficients/density is required");
    }
    try {
        if (j.contains("coefficients")) {
            const json& list = j.at("coefficients");
            if (!list.is_array()) throw ParseError(origin + "/coefficients: expected a list");
            CVector c = CVector::Zero(n);
            for (std::size_t i = 0; i < list.size(); ++i) {
                const std::string where = origin + "/coefficients/" + std::to_string(i);
                const json& e = list[i];
                if (!e.is_array() || e.size() != 3) throw ParseError(where + ": expected [triple, re, im]");
                const auto idx = static_cast<Eigen::Index>(entry_index(basis, e[0], where + "/0"));
                c[idx] += cplx(number(e[1], where + "/1"), number(e[2], where + "/2"));
            }
            return normalize ? RotorState::normalized(basis, std::move(c)) : RotorState::pure(basis, std::move(c));
        }
        if (normalize) throw ParseError(origin + "/normalize: only for pure states");
        const json& list = j.at("density");
        if (!list.is_array()) throw ParseError(origin + "/density: expected a list");
        CMatrix rho = CMatrix::Zero(n, n);
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string where = origin + "/density/" + std::to_string(i);
            const json& e = list[i];
            if (!e.is_array() || e.size() != 4) throw ParseError(where + ": expected [row, col, re, im]");
            const auto r = static_cast<Eigen::Index>(entry_index(basis, e[0], where + "/0"));
            const auto c = static_cast<Eigen::Index>(entry_index(basis, e[1], where + "/1"));
            rho(r, c) += cplx(number(e[2], where + "/2"), number(e[3], where + "/3"));
        }
        return RotorState::mixed(basis, std::move(rho));
    } catch (const DomainError& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

RotorState read_state(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(path + ": cannot open");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_state(ss.str(), path);
}

namespace {

std::string triple_text(const Basis& basis, std::size_t i) {
    std::ostringstream os;
    if (const auto* mb = std::get_if<MBasisSpec>(&basis)) {
        const MomentumTriple t = mb->triple(i);
        os << '[' << t.m_alpha << ", " << t.m_beta << ", " << t.m_gamma << ']';
    } else {
        const JKM& q = std::get<JKMBasisSpec>(basis).entry(i);
        os << '[' << q.J << ", " << q.K << ", " << q.M << ']';
    }
    return os.str();
}

}  // namespace

std::string serialize_state(const RotorState& state) {
    std::ostringstream os;
    const Basis& b = state.basis();
    os << "{\n";
    if (const auto* mb = std::get_if<MBasisSpec>(&b)) {
        os << "  \"basis\": \"m\",\n  \"m_max\": [" << mb->m_max(Axis::alpha) << ", " << mb->m_max(Axis::beta)
           << ", " << mb->m_max(Axis::gamma) << "],\n";
    } else {
        const auto& jb = std::get<JKMBasisSpec>(b);
        os << "  \"basis\": \"jkm\",\n  \"j_max\": " << jb.j_max() << ",\n";
        if (jb.fixed_km()) {
            os << "  \"block\": [" << jb.fixed_km()->first << ", " << jb.fixed_km()->second << "],\n";
        }
    }
    bool first = true;
    auto sep = [&] {
        os << (first ? "\n" : ",\n");
        first = false;
    };
    if (state.is_pure()) {
        os << "  \"coefficients\": [";
        const CVector& c = state.coefficients();
        for (Eigen::Index i = 0; i < c.size(); ++i) {
            if (c[i] == 0.0) continue;
            sep();
            os << "    [" << triple_text(b, static_cast<std::size_t>(i)) << ", " << format_real(c[i].real()) << ", "
               << format_real(c[i].imag()) << ']';
        }
    } else {
        os << "  \"density\": [";
        const CMatrix rho = state.density();
        for (Eigen::Index r = 0; r < rho.rows(); ++r) {
            for (Eigen::Index c = 0; c < rho.cols(); ++c) {
                if (rho(r, c) == 0.0) continue;
                sep();
                os << "    [" << triple_text(b, static_cast<std::size_t>(r)) << ", "
                   << triple_text(b, static_cast<std::size_t>(c)) << ", " << format_real(rho(r, c).real()) << ", "
                   << format_real(rho(r, c).imag()) << ']';
            }
        }
    }
    os << "\n  ]\n}\n";
    return os.str();
}

void write_state(const RotorState& state, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    out << serialize_state(state);
}

}  // namespace orient
