#include "orient/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "json_util.hpp"
#include "orient/canonical.hpp"
#include "orient/classical.hpp"
#include "orient/dynamics.hpp"
#include "orient/grid_io.hpp"
#include "orient/state_io.hpp"
#include "orient/states.hpp"

namespace orient {

bool VerifyReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

EulerAngles random_angles(Rng& rng) {
    return {uniform(rng, 0.0, 2 * kPi), uniform(rng, 0.0, kPi), uniform(rng, 0.0, 2 * kPi)};
}

CVector random_vector(Rng& rng, Eigen::Index n) {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = cplx(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
    }
    return v / v.norm();
}

double max_abs(const CMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

class Suite {
public:
    explicit Suite(VerifyReport& r) : report_(r) {}

    void check(const std::string& name, double tolerance, const std::function<double()>& body) {
        double residual;
        try {
            residual = body();
        } catch (const std::exception&) {
            residual = NAN;
        }
        report_.checks.push_back({name, std::isfinite(residual) && residual <= tolerance, residual, tolerance});
    }

private:
    VerifyReport& report_;
};

double kernel_hermiticity(Rng& rng) {
    const MBasisSpec basis(3, 2, 3);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const MomentumTriple m{uniform_int(rng, -3, 3), uniform_int(rng, -2, 2), uniform_int(rng, -3, 3)};
        worst = std::max(worst, kernel(random_angles(rng), m, basis).hermiticity_residual());
    }
    return worst;
}

double kernel_trace(Rng& rng) {
    const MBasisSpec basis(4, 4, 4);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const MomentumTriple m{uniform_int(rng, -3, 3), uniform_int(rng, -3, 3), uniform_int(rng, -3, 3)};
        worst = std::max(worst, std::abs(kernel(random_angles(rng), m, basis).matrix().trace() - 1.0));
    }
    return worst;
}

double momentum_eigenstate(Rng& rng) {
    const MBasisSpec basis(2, 2, 2);
    const MomentumTriple m0{uniform_int(rng, -2, 2), uniform_int(rng, -2, 2), uniform_int(rng, -2, 2)};
    CVector c = CVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
    c[static_cast<Eigen::Index>(basis.index(m0))] = 1.0;
    const GridSpec spec{{4, 4, 4}, MomentumWindow::symmetric(3, 3, 3)};
    const PhaseSpaceGrid W = wigner_from_m_basis(RotorState::pure(basis, c), spec);
    const double peak = 1.0 / (4 * kPi * kPi * kPi);
    double worst = 0.0;
    for (std::size_t k = 0; k < W.n_momenta(); ++k) {
        const double want = spec.momenta.at(k) == m0 ? peak : 0.0;
        for (std::size_t a = 0; a < W.n_angles(); ++a) {
            worst = std::max(worst, std::abs(W.at(a, k) - want) / peak);
        }
    }
    return worst;
}

double normalization_and_realness(Rng& rng, double* imag) {
    const MBasisSpec basis(2, 1, 2);
    const RotorState s = RotorState::pure(basis, random_vector(rng, static_cast<Eigen::Index>(basis.dimension())));
    const PhaseSpaceGrid W = wigner_from_m_basis(s, {{8, 8, 8}, MomentumWindow::symmetric(6, 4, 6)});
    *imag = W.diagnostics.max_imag_residue;
    return std::abs(normalization(W) - 1.0);
}

double path_agreement(Rng& rng) {
    const MBasisSpec basis(1, 1, 1);
    const RotorState s = RotorState::pure(basis, random_vector(rng, static_cast<Eigen::Index>(basis.dimension())));
    const GridSpec spec{{3, 3, 3}, MomentumWindow::symmetric(2, 2, 2)};
    const PhaseSpaceGrid a = wigner_from_m_basis(s, spec);
    const PhaseSpaceGrid b = wigner_from_angle_basis(s, spec);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
    }
    return worst;
}

struct JkmMarginals {
    double momentum = 0.0;
    double angle = 0.0;
};

JkmMarginals jkm_marginals(int quadrature_order) {
    const JKM q{2, 1, 1};
    const RotorState s = RotorState::pure(JKMBasisSpec(2, std::pair{1, 1}), CVector::Unit(2, 1));
    AngleQuadrature quad;
    if (quadrature_order > 0) {
        quad.order = quadrature_order;
    }
    auto window = [](int l) {
        MomentumWindow w;
        w.lo = {1, -l, 1};
        w.hi = {1, l, 1};
        return w;
    };
    JkmMarginals out;
    const int l = 20;
    const PhaseSpaceGrid Wm = wigner_from_angle_basis(s, {{1, 64, 1}, window(l)}, quad);
    const Marginals mm = marginals(Wm);
    const auto column = basis_overlap_column(q, l);
    for (std::size_t k = 0; k < Wm.n_momenta(); ++k) {
        const double want = std::norm(column[static_cast<std::size_t>(Wm.spec().momenta.at(k).m_beta + l)]);
        out.momentum = std::max(out.momentum, std::abs(mm.momentum[k] - want));
    }
    // The angle sums converge like l^-1.5 at some beta, hence the wide window.
    const PhaseSpaceGrid Wa = wigner_from_angle_basis(s, {{1, 8, 1}, window(400)}, quad);
    const Marginals ma = marginals(Wa);
    for (std::size_t a = 0; a < Wa.n_angles(); ++a) {
        out.angle = std::max(out.angle, std::abs(ma.angle[a] - angle_density(s, Wa.spec().angles.at(a))));
    }
    return out;
}

double inverse_round_trip(Rng& rng) {
    const MBasisSpec basis(2, 2, 2);
    const MBasisSpec inner(1, 1, 1);
    const auto n = static_cast<Eigen::Index>(basis.dimension());
    CMatrix A = CMatrix::Zero(n, n);
    for (std::size_t r = 0; r < inner.dimension(); ++r) {
        for (std::size_t c = 0; c < inner.dimension(); ++c) {
            A(static_cast<Eigen::Index>(basis.index(inner.triple(r))),
              static_cast<Eigen::Index>(basis.index(inner.triple(c)))) = cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
        }
    }
    A = (A + A.adjoint()).eval();
    const OperatorMatrix op(basis, A, true);
    const PhaseSpaceGrid W = weyl_symbol_grid(op, {{9, 9, 9}, MomentumWindow::symmetric(2, 2, 2)});
    return max_abs(inverse_weyl(W, basis).matrix() - A);
}

double covariance(Rng& rng) {
    const MBasisSpec basis(3, 3, 3);
    const MBasisSpec inner(1, 1, 1);
    const auto n = static_cast<Eigen::Index>(basis.dimension());
    double worst = 0.0;
    for (int pair = 0; pair < 20; ++pair) {
        CMatrix A = CMatrix::Zero(n, n);
        for (std::size_t r = 0; r < inner.dimension(); ++r) {
            for (std::size_t c = 0; c < inner.dimension(); ++c) {
                A(static_cast<Eigen::Index>(basis.index(inner.triple(r))),
                  static_cast<Eigen::Index>(basis.index(inner.triple(c)))) =
                    cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
            }
        }
        const DisplacementSpec shift{random_angles(rng),
                                     {uniform_int(rng, -1, 1), uniform_int(rng, -1, 1), uniform_int(rng, -1, 1)}};
        const CMatrix D = displacement_matrix(shift, basis).matrix();
        const OperatorMatrix op(basis, A);
        const OperatorMatrix moved(basis, D * A * D.adjoint());
        const EulerAngles omega = random_angles(rng);
        const MomentumTriple m{uniform_int(rng, -1, 1), uniform_int(rng, -1, 1), uniform_int(rng, -1, 1)};
        const cplx before = weyl_symbol(op, omega, m);
        const cplx after = weyl_symbol(moved, omega.translated(shift.omega), m + shift.m);
        worst = std::max(worst, std::abs(before - after));
    }
    return worst;
}

double theta_series() {
    const double q = std::exp(-1.0 / 49.0);
    double direct = 1.0;
    for (int n = 1; n <= 1'000'000; ++n) {
        direct += 2.0 * std::pow(q, static_cast<double>(n) * n);
    }
    return std::abs(theta3(q) - direct);
}

double fringe_count(int k) {
    const MBasisSpec basis(k + 6, 0, 0);
    CoherentSpec plus;
    plus.sigma = 1.0;
    plus.center_angle = kPi;
    plus.center_m = k;
    CoherentSpec minus = plus;
    minus.center_m = -k;
    const RotorState s = superpose({coherent_state(plus, basis), coherent_state(minus, basis)}, {1.0, 1.0});
    const PhaseSpaceGrid W = wigner_from_m_basis(s, {{256, 1, 1}, MomentumWindow::symmetric(0, 0, 0)});
    return std::abs(count_fringes(W, {0, 0, 0}) - 2.0 * k);
}

double cos2_against_cg(Rng& rng) {
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        const int K = uniform_int(rng, -4, 4);
        const int M = uniform_int(rng, -4, 4);
        const JKMBasisSpec basis(12, std::pair{K, M});
        const OperatorMatrix c2 = cos2beta_matrix(basis);
        for (std::size_t r = 0; r < basis.dimension(); ++r) {
            for (std::size_t c = 0; c < basis.dimension(); ++c) {
                const double want = cos2beta_element(basis.entry(r).J, basis.entry(c).J, K, M);
                worst = std::max(worst, std::abs(c2.matrix()(static_cast<Eigen::Index>(r),
                                                             static_cast<Eigen::Index>(c)) - want));
            }
        }
    }
    return worst;
}

double free_recurrence(Rng& rng) {
    const JKMBasisSpec basis(6);
    const RotorState s = RotorState::pure(basis, random_vector(rng, static_cast<Eigen::Index>(basis.dimension())));
    return std::abs(1.0 - fidelity(s, free_propagate(s, 2 * kPi, TopConstants{})));
}

double kick_drift() {
    PulseConfig pulse;
    pulse.strength = -10.0 / PulseConfig{1.0, pulse.duration}.area();
    KickReport rep;
    const RotorState s = RotorState::pure(JKMBasisSpec(20, std::pair{3, 3}),
                                          CVector::Unit(18, 0));
    propagate_kick(s, pulse, TopConstants{}, 1e-10, &rep);
    return rep.norm_drift;
}

double vector_field_fd(Rng& rng) {
    const TopConstants k{0.5, 0.8};
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        ClassicalState s;
        s.alpha = uniform(rng, 0, 2 * kPi);
        s.beta = uniform(rng, 0.3, kPi - 0.3);
        s.gamma = uniform(rng, 0, 2 * kPi);
        s.p_alpha = uniform(rng, -4, 4);
        s.p_beta = uniform(rng, -4, 4);
        s.p_gamma = uniform(rng, -4, 4);
        const ClassicalDerivative d = classical_vector_field(s, k);
        auto partial = [&](double ClassicalState::*field) {
            const double h = 2e-4;
            auto at = [&](double off) {
                ClassicalState t = s;
                t.*field += off;
                return classical_hamiltonian(t, k);
            };
            return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
        };
        const double want[4] = {partial(&ClassicalState::p_alpha), partial(&ClassicalState::p_beta),
                                partial(&ClassicalState::p_gamma), -partial(&ClassicalState::beta)};
        const double got[4] = {d.alpha, d.beta, d.gamma, d.p_beta};
        for (int c = 0; c < 4; ++c) {
            worst = std::max(worst, std::abs(got[c] - want[c]) / std::max(1.0, std::abs(want[c])));
        }
        worst = std::max({worst, std::abs(d.p_alpha), std::abs(d.p_gamma)});
    }
    return worst;
}

double classical_conservation(Rng& rng) {
    const TopConstants k{0.5, 0.8};
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        ClassicalState s;
        s.beta = uniform(rng, 1.0, 2.0);
        s.p_alpha = uniform(rng, -2, 2);
        s.p_beta = uniform(rng, -2, 2);
        s.p_gamma = uniform(rng, -2, 2);
        const ClassicalPath path = classical_trajectory(s, 10.0, k);
        worst = std::max(worst, path.max_energy_drift);
        for (const ClassicalState& x : path.states) {
            worst = std::max({worst, std::abs(x.p_alpha - s.p_alpha), std::abs(x.p_gamma - s.p_gamma)});
        }
    }
    return worst;
}

double state_file_round_trip(Rng& rng) {
    const MBasisSpec basis(1, 2, 1);
    const RotorState s = RotorState::pure(basis, random_vector(rng, static_cast<Eigen::Index>(basis.dimension())));
    const RotorState back = parse_state(serialize_state(s));
    return (back.basis() == s.basis()) ? max_abs(back.coefficients() - s.coefficients()) : INFINITY;
}

}  // namespace

VerifyReport run_verify(const VerifyOptions& options) {
    VerifyReport report;
    report.seed = options.seed;
    report.quadrature_order = options.quadrature_order;
    Rng rng(options.seed);
    Suite suite(report);
    suite.check("kernel.hermiticity", 1e-12, [&] { return kernel_hermiticity(rng); });
    suite.check("kernel.trace", 1e-12, [&] { return kernel_trace(rng); });
    suite.check("wigner.momentum_eigenstate", 1e-13, [&] { return momentum_eigenstate(rng); });
    double imag = NAN;
    suite.check("wigner.normalization", 1e-6, [&] { return normalization_and_realness(rng, &imag); });
    suite.check("wigner.realness", 1e-10, [&] { return imag; });
    suite.check("wigner.path_agreement", 1e-6, [&] { return path_agreement(rng); });
    JkmMarginals jm{NAN, NAN};
    suite.check("marginal.momentum", 1e-6, [&] {
        jm = jkm_marginals(options.quadrature_order);
        return jm.momentum;
    });
    suite.check("marginal.angle", 1e-6, [&] { return jm.angle; });
    suite.check("weyl.inverse_round_trip", 1e-8, [&] { return inverse_round_trip(rng); });
    suite.check("weyl.covariance", 1e-8, [&] { return covariance(rng); });
    suite.check("states.theta3", 1e-13, [] { return theta_series(); });
    suite.check("states.fringes_k2", 0.0, [] { return fringe_count(2); });
    suite.check("states.fringes_k4", 0.0, [] { return fringe_count(4); });
    suite.check("dynamics.cos2_matrix", 1e-12, [&] { return cos2_against_cg(rng); });
    suite.check("dynamics.recurrence", 1e-10, [&] { return free_recurrence(rng); });
    suite.check("dynamics.kick_norm_drift", 1e-8, [] { return kick_drift(); });
    suite.check("classical.vector_field", 1e-9, [&] { return vector_field_fd(rng); });
    suite.check("classical.conservation", 1e-9, [&] { return classical_conservation(rng); });
    suite.check("io.state_round_trip", 0.0, [&] { return state_file_round_trip(rng); });
    return report;
}

std::string serialize_verify_report(const VerifyReport& report) {
    std::ostringstream os;
    auto num = [](double x) { return std::isfinite(x) ? format_real(x) : std::string("null"); };
    os << "{\n  \"format\": \"orient-verify-1\",\n  \"seed\": " << report.seed
       << ",\n  \"quadrature_order\": " << report.quadrature_order
       << ",\n  \"passed\": " << (report.passed() ? "true" : "false") << ",\n  \"checks\": [";
    for (std::size_t i = 0; i < report.checks.size(); ++i) {
        const VerifyCheck& c = report.checks[i];
        os << (i ? ",\n" : "\n") << "    {\"name\": \"" << c.name << "\", \"passed\": " << (c.passed ? "true" : "false")
           << ", \"residual\": " << num(c.residual) << ", \"tolerance\": " << num(c.tolerance) << '}';
    }
    os << "\n  ]\n}\n";
    return os.str();
}

VerifyReport parse_verify_report(const std::string& text) {
    using detail::json;
    const json j = detail::parse_json(text, "report");
    detail::expect_keys(j, {"format", "seed", "quadrature_order", "passed", "checks"}, "report");
    if (detail::get_field<std::string>(j, "format", "report") != "orient-verify-1") {
        throw ParseError("report/format: unsupported");
    }
    VerifyReport r;
    r.seed = detail::get_field<std::uint64_t>(j, "seed", "report");
    r.quadrature_order = detail::get_field<int>(j, "quadrature_order", "report");
    const json& checks = j.at("checks");
    if (!checks.is_array()) throw ParseError("report/checks: expected a list");
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const std::string where = "report/checks/" + std::to_string(i);
        const json& c = checks[i];
        detail::expect_keys(c, {"name", "passed", "residual", "tolerance"}, where);
        auto real = [&](const char* key) {
            if (!c.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
            const json& v = c.at(key);
            if (v.is_null()) return static_cast<double>(NAN);
            if (!v.is_number()) throw ParseError(where + "/" + key + ": expected a number");
            return v.get<double>();
        };
        r.checks.push_back({detail::get_field<std::string>(c, "name", where), detail::get_field<bool>(c, "passed", where),
                            real("residual"), real("tolerance")});
    }
    if (detail::get_field<bool>(j, "passed", "report") != r.passed()) {
        throw ParseError("report/passed: inconsistent with the checks");
    }
    return r;
}

}  // namespace orient
