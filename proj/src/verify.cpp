#include "rslab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace rslab::verify {

namespace el = rslab::elliptic;
using rmat::classical_r;
using rmat::kron;
using rmat::swap_spaces;

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_c(cplx z) {
    return fmt(z.real()) + (z.imag() < 0 ? "" : "+") + fmt(z.imag()) + "i";
}

std::string digest_for(const std::string& check, const ModelParams& P,
                       const PhasePoint* x, cplx u, cplx v,
                       const std::string& extra = {}) {
    std::ostringstream s;
    s << check << "|n=" << P.n << "|tau=" << fmt_c(P.tau.value())
      << "|gamma=" << fmt_c(P.gamma) << "|hbar=" << fmt(P.hbar)
      << "|u=" << fmt_c(u) << "|v=" << fmt_c(v);
    if (x) {
        s << "|q=";
        for (int i = 0; i < x->n(); ++i) s << fmt(x->q[i]) << ";";
        s << "|p=";
        for (int i = 0; i < x->n(); ++i) s << fmt_c(x->p[i]) << ";";
    }
    if (!extra.empty()) s << "|" << extra;
    return config::digest(s.str());
}

double tol_of(const std::string& name) {
    return config::default_tolerances().at(name);
}

Matrix doubled(const Matrix& L, int n, bool first) {
    return first ? kron(L, Matrix::Identity(n, n)) : kron(Matrix::Identity(n, n), L);
}

// dA/dq_m from the entrywise u-derivative matrix.
Matrix q_deriv(const Matrix& Aprime, int m) {
    Matrix d = -Aprime;
    d.col(m) += static_cast<double>(Aprime.rows()) * Aprime.col(m);
    return d;
}

} // namespace

double sklyanin_residual(const Matrix& r_tensor, cplx u, cplx v,
                         const PhasePoint& x, const ModelParams& P,
                         const phase::BracketMethod& m) {
    const int n = P.n;
    Matrix lhs = phase::bracket_matrix(lax::factorized_field(u, P),
                                       lax::factorized_field(v, P), x, m);
    Matrix LL = doubled(lax::lax_factorized(u, x, P).entries, n, true) *
                doubled(lax::lax_factorized(v, x, P).entries, n, false);
    Matrix rhs = LL * r_tensor - r_tensor * LL;
    return (lhs - rhs).norm() / std::max(lhs.norm(), rhs.norm());
}

ResidualReport check_sklyanin(cplx u, cplx v, const PhasePoint& x,
                              const ModelParams& P, const phase::BracketMethod& m) {
    const int n = P.n;
    Matrix lhs = phase::bracket_matrix(lax::factorized_field(u, P),
                                       lax::factorized_field(v, P), x, m);
    Matrix r = classical_r(u - v, P).data;
    Matrix LL = doubled(lax::lax_factorized(u, x, P).entries, n, true) *
                doubled(lax::lax_factorized(v, x, P).entries, n, false);
    Matrix rhs = LL * r - r * LL;
    const bool fd = m.mode == phase::BracketMode::finite_difference;
    const std::string name = fd ? "sklyanin_fd" : "sklyanin_analytic";
    return make_report(name, (lhs - rhs).norm(), std::max(lhs.norm(), rhs.norm()),
                       tol_of(name), digest_for(name, P, &x, u, v),
                       fd ? "finite-difference brackets" : "analytic brackets");
}

namespace {

const char* variant_name(rmat::S12Variant v) {
    switch (v) {
        case rmat::S12Variant::a: return "a";
        case rmat::S12Variant::b: return "b";
        case rmat::S12Variant::c: return "c";
    }
    return "?";
}

double qua1_residual(cplx u, cplx v, const PhasePoint& x, const ModelParams& P,
                     rmat::S12Variant variant, const phase::BracketMethod& m) {
    Matrix lhs = phase::bracket_matrix(lax::nijhoff_field(u, P),
                                       lax::nijhoff_field(v, P), x, m);
    auto q_uv = rmat::dynamical_quadruple(u, v, x, P, variant, true);
    auto q_vu = rmat::dynamical_quadruple(v, u, x, P, variant, false);
    Matrix rhs = rmat::quadratic_bracket_rhs(lax::lax_nijhoff(u, x, P).entries,
                                             lax::lax_nijhoff(v, x, P).entries,
                                             q_uv, q_vu, P.n);
    return (lhs - rhs).norm() / std::max(lhs.norm(), rhs.norm());
}

} // namespace

ResidualReport check_dynamical_quadratic(cplx u, cplx v, const PhasePoint& x,
                                         const ModelParams& P,
                                         rmat::S12Variant variant,
                                         const phase::BracketMethod& m) {
    double res = qua1_residual(u, v, x, P, variant, m);
    std::string notes = std::string("s12 variant ") + variant_name(variant);
    return make_report("dynamical_quadratic", res, 1.0,
                       tol_of("dynamical_quadratic"),
                       digest_for("dynamical_quadratic", P, &x, u, v,
                                  std::string("variant=") + variant_name(variant)),
                       notes);
}

ResidualReport check_dynamical_quadratic_auto(cplx u, cplx v, const PhasePoint& x,
                                              const ModelParams& P,
                                              const phase::BracketMethod& m) {
    double best = 1e300, second = 1e300;
    rmat::S12Variant best_v = rmat::S12Variant::a;
    std::ostringstream notes;
    for (auto var : {rmat::S12Variant::a, rmat::S12Variant::b, rmat::S12Variant::c}) {
        double res = qua1_residual(u, v, x, P, var, m);
        notes << "variant " << variant_name(var) << ": " << std::scientific << res << "; ";
        if (res < best) {
            second = best;
            best = res;
            best_v = var;
        } else {
            second = std::min(second, res);
        }
    }
    notes << "selected " << variant_name(best_v)
          << " (discrimination x" << std::scientific << second / std::max(best, 1e-300) << ")";
    if (best > tol_of("dynamical_quadratic"))
        notes << "; no reading closes the printed quadruple (transcription defect)";
    return make_report("dynamical_quadratic", best, 1.0,
                       tol_of("dynamical_quadratic"),
                       digest_for("dynamical_quadratic", P, &x, u, v, "variant=auto"),
                       notes.str());
}

ResidualReport check_skew_conditions(cplx u, cplx v, const PhasePoint& x,
                                     const ModelParams& P, rmat::S12Variant variant) {
    const int n = P.n;
    auto q_uv = rmat::dynamical_quadruple(u, v, x, P, variant);
    auto q_vu = rmat::dynamical_quadruple(v, u, x, P, variant);
    const double scale = q_uv.r_minus.data.norm();
    double worst = (swap_spaces(q_vu.r_minus.data, n) + q_uv.r_minus.data).norm();
    worst = std::max(worst, (swap_spaces(q_vu.r_plus.data, n) + q_uv.r_plus.data).norm());
    worst = std::max(worst, (swap_spaces(q_vu.s_plus.data, n) - q_uv.s_minus.data).norm());
    worst = std::max(worst, ((q_uv.r_plus.data - q_uv.s_plus.data) -
                             (q_uv.r_minus.data - q_uv.s_minus.data)).norm());
    return make_report("skew_conditions", worst, scale, tol_of("skew_conditions"),
                       digest_for("skew_conditions", P, &x, u, v),
                       std::string("variant ") + variant_name(variant));
}

ResidualReport check_linear_cm(cplx u, cplx v, const PhasePoint& x_prime, double s,
                               const ModelParams& P, const phase::BracketMethod& m) {
    const int n = P.n;
    Matrix lhs = phase::bracket_matrix(lax::cm_field(u, s, P), lax::cm_field(v, s, P),
                                       x_prime, m);
    Matrix r = classical_r(u - v, P).data;
    Matrix S = doubled(lax::lax_cm(u, x_prime, s, P).entries, n, true) +
               doubled(lax::lax_cm(v, x_prime, s, P).entries, n, false);
    Matrix rhs = S * r - r * S;
    return make_report("linear_cm", (lhs - rhs).norm(),
                       std::max(lhs.norm(), rhs.norm()), tol_of("linear_cm"),
                       digest_for("linear_cm", P, &x_prime, u, v, "s=" + fmt(s)));
}

ResidualReport check_lemma1(cplx u, cplx v, const PhasePoint& x,
                            const ModelParams& P) {
    const int n = P.n;
    const cplx ng = static_cast<double>(n) * P.gamma;
    const cplx sg = el::sigma(P.gamma, P.tau, P.series);

    // left side: commutator as printed, with the classical r-matrix
    Matrix r = classical_r(u - v, P).data;
    Matrix LL = doubled(lax::lax_factorized(u, x, P).entries, n, true) *
                doubled(lax::lax_factorized(v, x, P).entries, n, false);
    Matrix lhs = r * LL - LL * r;

    // right side: the double sum over intertwiner products, assembled from
    // scratch with analytic position derivatives
    Matrix Bu = lax::intertwiner_A(u + ng, x, P);
    Matrix Bup = lax::intertwiner_A(u + ng, x, P, 1);
    Matrix Cu = lax::intertwiner_A(u, x, P);
    Matrix Cup = lax::intertwiner_A(u, x, P, 1);
    Matrix Bv = lax::intertwiner_A(v + ng, x, P);
    Matrix Bvp = lax::intertwiner_A(v + ng, x, P, 1);
    Matrix Cv = lax::intertwiner_A(v, x, P);
    Matrix Cvp = lax::intertwiner_A(v, x, P, 1);
    Matrix Cui = Cu.inverse();
    Matrix Cvi = Cv.inverse();
    Eigen::VectorXcd ep(n);
    for (int k = 0; k < n; ++k) ep[k] = std::exp(x.p[k]);

    Matrix rhs = Matrix::Zero(n * n, n * n);
    for (int i = 0; i < n; ++i) {
        Matrix Gu_i = Bu.col(i) * Cui.row(i);
        Matrix Gv_i = Bv.col(i) * Cvi.row(i);
        Matrix dBv = q_deriv(Bvp, i);
        Matrix dCvi = -Cvi * q_deriv(Cvp, i) * Cvi;
        Matrix Hv_i = dBv * ep.asDiagonal() * Cvi + Bv * ep.asDiagonal() * dCvi;
        Matrix dBu = q_deriv(Bup, i);
        Matrix dCui = -Cui * q_deriv(Cup, i) * Cui;
        Matrix Hu_i = dBu * ep.asDiagonal() * Cui + Bu * ep.asDiagonal() * dCui;
        rhs += ep[i] * (kron(Gu_i, Hv_i) - kron(Hu_i, Gv_i));
    }
    rhs /= sg * sg;

    return make_report("lemma1", (lhs - rhs).norm(), std::max(lhs.norm(), rhs.norm()),
                       tol_of("lemma1"), digest_for("lemma1", P, &x, u, v));
}

ResidualReport check_tg_identity(cplx u, cplx v, const PhasePoint& x, double hbar,
                                 const ModelParams& P) {
    const int n = P.n;
    const cplx ih{0.0, hbar};
    const cplx ng = static_cast<double>(n) * P.gamma;
    Matrix R = rmat::quantum_R(u - v, hbar, P).data;

    Matrix Bu = lax::intertwiner_A(u + ng, x, P);
    Matrix Cui = lax::intertwiner_A(u, x, P).inverse();
    Matrix Bv = lax::intertwiner_A(v + ng, x, P);
    Matrix Cvi = lax::intertwiner_A(v, x, P).inverse();
    std::vector<Matrix> Bu_s(n), Cui_s(n), Bv_s(n), Cvi_s(n);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXcd qs = x.q.cast<cplx>();
        qs[i] -= ih; // the shift operator acting on explicit functions
        Bu_s[i] = lax::intertwiner_A(u + ng, qs, P);
        Cui_s[i] = lax::intertwiner_A(u, qs, P).inverse();
        Bv_s[i] = lax::intertwiner_A(v + ng, qs, P);
        Cvi_s[i] = lax::intertwiner_A(v, qs, P).inverse();
    }
    auto pair_u = [&](int col, int shift) -> Matrix {
        if (shift < 0) return Bu.col(col) * Cui.row(col);
        return Bu_s[shift].col(col) * Cui_s[shift].row(col);
    };
    auto pair_v = [&](int col, int shift) -> Matrix {
        if (shift < 0) return Bv.col(col) * Cvi.row(col);
        return Bv_s[shift].col(col) * Cvi_s[shift].row(col);
    };

    double worst = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Matrix X, Z;
            if (i == j) {
                X = kron(pair_u(i, -1), pair_v(i, i));
                Z = kron(pair_u(i, i), pair_v(i, -1));
            } else {
                X = kron(pair_u(i, -1), pair_v(j, i)) + kron(pair_u(j, -1), pair_v(i, j));
                Z = kron(pair_u(j, i), pair_v(i, -1)) + kron(pair_u(i, j), pair_v(j, -1));
            }
            Matrix T = R * X;
            Matrix G = Z * R;
            worst = std::max(worst, (T - G).cwiseAbs().maxCoeff());
            scale = std::max({scale, T.cwiseAbs().maxCoeff(), G.cwiseAbs().maxCoeff()});
        }
    return make_report("tg_identity", worst, scale, tol_of("tg_identity"),
                       digest_for("tg_identity", P, &x, u, v, "hbar=" + fmt(hbar)),
                       "hbar=" + fmt(hbar));
}

ResidualReport check_involution(cplx u, cplx v, int l, int m, const PhasePoint& x,
                                const ModelParams& P) {
    auto f = lax::trace_power_observable(u, l, P);
    auto g = lax::trace_power_observable(v, m, P);
    cplx br = phase::poisson_bracket(f, g, x);
    std::ostringstream notes;
    notes << "l=" << l << " m=" << m;
    return make_report("involution", std::abs(br), 0.0, tol_of("involution"),
                       digest_for("involution", P, &x, u, v,
                                  "l=" + std::to_string(l) + ";m=" + std::to_string(m)),
                       notes.str());
}

ResidualReport check_hamiltonian_involution(cplx u, int l, const PhasePoint& x,
                                            const ModelParams& P) {
    // H pairs with the traces of its own representation: the square-root
    // weights of the Hamiltonian and of the Ruijsenaars operator live in the
    // same canonical frame, while the factorized/Nijhoff traces sit on the
    // other side of the momentum-shift Poisson map.
    auto H = lax::hamiltonian_observable(P);
    auto f = lax::trace_power_observable(u, l, P, lax::LaxKind::Ruijsenaars);
    cplx br = phase::poisson_bracket(H, f, x);
    return make_report("hamiltonian_involution", std::abs(br), 0.0,
                       tol_of("hamiltonian_involution"),
                       digest_for("hamiltonian_involution", P, &x, u, 0.0,
                                  "l=" + std::to_string(l)),
                       "l=" + std::to_string(l) + " (Ruijsenaars traces)");
}

ResidualReport check_prop3(cplx u, const PhasePoint& x, const ModelParams& P) {
    Matrix g = lax::gauge_g(u, x, P);
    Matrix conj = g * lax::lax_nijhoff(u, x, P).entries * g.inverse();
    Matrix L = lax::lax_factorized(u, x, P).entries;
    return make_report("prop3_factorization", (conj - L).norm(), L.norm(),
                       tol_of("prop3_factorization"),
                       digest_for("prop3_factorization", P, &x, u, 0.0));
}

ResidualReport check_poisson_map(const PhasePoint& x, const ModelParams& P) {
    auto map = [&](const PhasePoint& y) {
        return phase::poisson_map(y, P.gamma, P.tau, P.series);
    };
    double res = phase::symplectic_residual(map, x);
    return make_report("poisson_map_symplectic", res, 0.0,
                       tol_of("poisson_map_symplectic"),
                       digest_for("poisson_map_symplectic", P, &x, 0.0, 0.0));
}

ResidualReport check_vandermonde(const ModelParams& P, Rng& rng, int tuples) {
    const int n = P.n;
    double worst = 0.0;
    for (int t = 0; t < tuples; ++t) {
        std::vector<cplx> u(n);
        for (int k = 0; k < n; ++k)
            u[k] = cplx(0.1 * k + rng.uniform(0.01, 0.09), rng.uniform(0.01, 0.05));
        worst = std::max(worst, lax::vandermonde_check(u, P));
    }
    // calibration-point independence
    std::vector<cplx> b1(n), b2(n);
    for (int k = 0; k < n; ++k) {
        b1[k] = 0.1 * (k + 1) + 0.05;
        b2[k] = cplx(0.09 * (k + 1) + 0.11, 0.02);
    }
    double calib = std::abs(lax::vandermonde_const(b1, P) / lax::vandermonde_const(b2, P) - 1.0);
    worst = std::max(worst, calib);
    return make_report("vandermonde", worst, 1.0, tol_of("vandermonde"),
                       digest_for("vandermonde", P, nullptr, 0.0, 0.0,
                                  "tuples=" + std::to_string(tuples)),
                       "includes calibration independence " + fmt(calib));
}

ResidualReport check_cm_limit_slope(cplx u, const PhasePoint& x_prime, double s,
                                    const ModelParams& P) {
    Matrix analytic = lax::lax_cm(u, x_prime, s, P).entries;
    const std::vector<double> betas{1e-2, 1e-3, 1e-4};
    std::vector<double> dist;
    for (double b : betas)
        dist.push_back((lax::lax_cm_limit(u, x_prime, s, b, P).entries - analytic).norm());
    double slope = std::log(dist.front() / dist.back()) /
                   std::log(betas.front() / betas.back());
    std::ostringstream notes;
    notes << "slope " << fmt(slope);
    return make_report("cm_limit_slope", std::abs(slope - 1.0), 1.0,
                       tol_of("cm_limit_slope"),
                       digest_for("cm_limit_slope", P, &x_prime, u, 0.0, "s=" + fmt(s)),
                       notes.str());
}

ResidualReport check_cybe(cplx v1, cplx v2, cplx v3, const ModelParams& P) {
    const int n = P.n;
    Matrix r12 = rmat::embed12(classical_r(v1 - v2, P).data, n);
    Matrix r13 = rmat::embed13(classical_r(v1 - v3, P).data, n);
    Matrix r23 = rmat::embed23(classical_r(v2 - v3, P).data, n);
    Matrix c = r12 * r13 - r13 * r12 + r12 * r23 - r23 * r12 + r13 * r23 - r23 * r13;
    double scale = std::max({r12.norm(), r13.norm(), r23.norm()});
    return make_report("cybe", c.norm(), scale, tol_of("cybe"),
                       digest_for("cybe", P, nullptr, v1 - v2, v2 - v3));
}

ResidualReport check_qybe(cplx v1, cplx v2, cplx v3, const ModelParams& P) {
    const int n = P.n;
    Matrix R12 = rmat::embed12(rmat::quantum_R(v1 - v2, P).data, n);
    Matrix R13 = rmat::embed13(rmat::quantum_R(v1 - v3, P).data, n);
    Matrix R23 = rmat::embed23(rmat::quantum_R(v2 - v3, P).data, n);
    Matrix lhs = R12 * R13 * R23;
    Matrix rhs = R23 * R13 * R12;
    double tol = tol_of("qybe") * (n >= 4 ? 10.0 : 1.0);
    ResidualReport r = make_report("qybe", (lhs - rhs).norm(),
                                   std::max(lhs.norm(), rhs.norm()), tol,
                                   digest_for("qybe", P, nullptr, v1 - v2, v2 - v3),
                                   n >= 4 ? "tolerance relaxed x10 for n>=4" : "");
    return r;
}

ResidualReport check_r_antisymmetry(cplx v, const ModelParams& P) {
    const int n = P.n;
    Matrix r = classical_r(v, P).data;
    Matrix rn = classical_r(-v, P).data;
    return make_report("r_antisymmetry", (swap_spaces(-rn, n) - r).norm(), r.norm(),
                       tol_of("r_antisymmetry"),
                       digest_for("r_antisymmetry", P, nullptr, v, 0.0));
}

ResidualReport check_zn_symmetry_r(cplx v, const ModelParams& P) {
    const int n = P.n;
    Matrix r = classical_r(v, P).data;
    rmat::ClockShift cs = rmat::clock_shift(n);
    double worst = 0.0;
    for (const Matrix& a : {cs.g, cs.h}) {
        Matrix aa = kron(a, a);
        worst = std::max(worst, (aa * r * aa.inverse() - r).norm());
    }
    return make_report("zn_symmetry_r", worst, r.norm(), tol_of("zn_symmetry_r"),
                       digest_for("zn_symmetry_r", P, nullptr, v, 0.0));
}

ResidualReport check_zn_symmetry_R(cplx v, const ModelParams& P) {
    const int n = P.n;
    Matrix R = rmat::quantum_R(v, P).data;
    rmat::ClockShift cs = rmat::clock_shift(n);
    double worst = 0.0;
    for (const Matrix& a : {cs.g, cs.h}) {
        Matrix aa = kron(a, a);
        worst = std::max(worst, (aa * R * aa.inverse() - R).norm());
    }
    return make_report("zn_symmetry_R", worst, R.norm(), tol_of("zn_symmetry_R"),
                       digest_for("zn_symmetry_R", P, nullptr, v, 0.0));
}

ResidualReport check_classical_limit(cplx v, const ModelParams& P) {
    std::vector<double> hs;
    for (int k = 0; k < 13; ++k) hs.push_back(std::pow(10.0, -1.0 - 0.25 * k));
    double slope = rmat::classical_limit_slope(v, hs, P);
    return make_report("classical_limit", std::abs(slope - 2.0), 1.0,
                       tol_of("classical_limit"),
                       digest_for("classical_limit", P, nullptr, v, 0.0),
                       "slope " + fmt(slope));
}

std::vector<ResidualReport> check_corollary1(cplx u, cplx v,
                                             const std::vector<PhasePoint>& xs,
                                             const ModelParams& P) {
    const int n = P.n;
    Matrix r = classical_r(u - v, P).data;
    double s_worst = 0.0, agree_worst = 0.0, variance = 0.0;
    Matrix h_first;
    for (const auto& x : xs) {
        rmat::TwistedQuadruple tq = rmat::twisted_quadruple(u, v, x, P);
        rmat::TwistedQuadruple tq_vu = rmat::twisted_quadruple(v, u, x, P);
        s_worst = std::max({s_worst, tq.s_plus.data.norm(), tq.s_minus.data.norm()});
        Matrix h = tq.r_minus.data;
        Matrix left = swap_spaces(tq_vu.r_plus.data, n);
        agree_worst = std::max({agree_worst, (h - r).norm(), (left - r).norm()});
        if (h_first.size() == 0)
            h_first = h;
        else
            variance = std::max(variance, (h - h_first).norm());
    }
    std::string base = digest_for("corollary1", P, nullptr, u, v,
                                  "points=" + std::to_string(xs.size()));
    std::vector<ResidualReport> out;
    out.push_back(make_report("corollary1_s_vanish", s_worst, r.norm(),
                              tol_of("corollary1_s_vanish"), base,
                              "twisted s-tensors on the derived quadruple"));
    out.push_back(make_report("corollary1_h_invariance", variance, r.norm(),
                              tol_of("corollary1_h_invariance"), base,
                              "variance across " + std::to_string(xs.size()) + " points"));
    out.push_back(make_report("corollary1_h_matches_r", agree_worst, r.norm(),
                              tol_of("corollary1_h_matches_r"), base,
                              "both r-assemblies against classical_r"));
    return out;
}

namespace {

struct Keyed {
    std::string name;
    int n;
    std::uint64_t seed;
    int point;
    ResidualReport rep;
};

} // namespace

std::vector<ResidualReport> run_suite(const config::ScenarioConfig& cfg) {
    std::vector<Keyed> keyed;
    auto enabled = [&](const std::string& name) {
        return std::find(cfg.checks.begin(), cfg.checks.end(), name) != cfg.checks.end();
    };
    auto push = [&](int n, std::uint64_t seed, int point, ResidualReport r) {
        if (auto it = cfg.tolerances.find(r.check_name); it != cfg.tolerances.end()) {
            // re-evaluate pass against the configured tolerance, keeping any
            // n-dependent relaxation already encoded in the report
            double scale = r.tolerance / config::default_tolerances().at(r.check_name);
            r.tolerance = it->second * scale;
            double basis = r.rel_residual;
            r.passed = basis <= r.tolerance;
        }
        std::ostringstream ctx;
        ctx << "n=" << n << " seed=" << seed << " point=" << point;
        r.notes = r.notes.empty() ? ctx.str() : ctx.str() + "; " + r.notes;
        keyed.push_back({r.check_name, n, seed, point, std::move(r)});
    };
    auto guarded = [&](int n, std::uint64_t seed, int point, const std::string& name,
                       auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            ResidualReport r;
            r.check_name = name;
            r.abs_residual = r.rel_residual = std::numeric_limits<double>::infinity();
            r.tolerance = 0.0;
            r.passed = false;
            r.notes = std::string("error: ") + e.what();
            r.inputs_digest = config::digest(name + "|error");
            push(n, seed, point, std::move(r));
        }
    };

    for (int n : cfg.suite_n) {
        ModelParams P(n, el::ModularParam(cfg.tau), cfg.gamma, cfg.hbar, cfg.mc2);
        P.series = cfg.series;

        if (enabled("classical_limit"))
            guarded(n, 0, 0, "classical_limit", [&] {
                push(n, 0, 0, check_classical_limit(cplx(0.27, 0.08), P));
            });

        std::vector<PhasePoint> seed_points;
        for (std::uint64_t seed : cfg.seeds) {
            Rng rng(seed);
            PhasePoint x = phase::draw_phase_point(n, rng);
            PhasePoint xp = phase::draw_phase_point(n, rng); // CM point
            seed_points.push_back(x);
            cplx v1{rng.uniform(0.1, 0.3), rng.uniform(0.05, 0.2)};
            cplx v2{rng.uniform(-0.3, -0.1), rng.uniform(-0.2, -0.05)};
            cplx v3{rng.uniform(0.4, 0.6), rng.uniform(0.25, 0.4)};

            if (enabled("poisson_map_symplectic"))
                guarded(n, seed, 0, "poisson_map_symplectic",
                        [&] { push(n, seed, 0, check_poisson_map(x, P)); });
            if (enabled("vandermonde"))
                guarded(n, seed, 0, "vandermonde",
                        [&] { push(n, seed, 0, check_vandermonde(P, rng)); });
            if (enabled("cm_limit_slope"))
                guarded(n, seed, 0, "cm_limit_slope", [&] {
                    push(n, seed, 0,
                         check_cm_limit_slope(cplx(0.24, 0.06), xp, cfg.cm_s, P));
                });
            if (enabled("cybe"))
                guarded(n, seed, 0, "cybe",
                        [&] { push(n, seed, 0, check_cybe(v1, v2, v3, P)); });
            if (enabled("qybe"))
                guarded(n, seed, 0, "qybe",
                        [&] { push(n, seed, 0, check_qybe(v1, v2, v3, P)); });
            if (enabled("r_antisymmetry"))
                guarded(n, seed, 0, "r_antisymmetry",
                        [&] { push(n, seed, 0, check_r_antisymmetry(v1, P)); });
            if (enabled("zn_symmetry_r"))
                guarded(n, seed, 0, "zn_symmetry_r",
                        [&] { push(n, seed, 0, check_zn_symmetry_r(v1, P)); });
            if (enabled("zn_symmetry_R"))
                guarded(n, seed, 0, "zn_symmetry_R",
                        [&] { push(n, seed, 0, check_zn_symmetry_R(v1, P)); });

            for (size_t pt = 0; pt < cfg.spectral_points.size(); ++pt) {
                const auto [u, v] = cfg.spectral_points[pt];
                const int ip = static_cast<int>(pt);
                if (enabled("prop3_factorization"))
                    guarded(n, seed, ip, "prop3_factorization",
                            [&] { push(n, seed, ip, check_prop3(u, x, P)); });
                if (enabled("sklyanin_analytic"))
                    guarded(n, seed, ip, "sklyanin_analytic",
                            [&] { push(n, seed, ip, check_sklyanin(u, v, x, P)); });
                if (enabled("sklyanin_fd"))
                    guarded(n, seed, ip, "sklyanin_fd", [&] {
                        phase::BracketMethod fd;
                        fd.mode = phase::BracketMode::finite_difference;
                        push(n, seed, ip, check_sklyanin(u, v, x, P, fd));
                    });
                if (enabled("dynamical_quadratic"))
                    guarded(n, seed, ip, "dynamical_quadratic", [&] {
                        using config::S12Mode;
                        if (cfg.s12_variant == S12Mode::auto_select) {
                            push(n, seed, ip, check_dynamical_quadratic_auto(u, v, x, P));
                        } else {
                            rmat::S12Variant var =
                                cfg.s12_variant == S12Mode::a   ? rmat::S12Variant::a
                                : cfg.s12_variant == S12Mode::b ? rmat::S12Variant::b
                                                                : rmat::S12Variant::c;
                            push(n, seed, ip, check_dynamical_quadratic(u, v, x, P, var));
                        }
                    });
                if (enabled("skew_conditions"))
                    guarded(n, seed, ip, "skew_conditions",
                            [&] { push(n, seed, ip, check_skew_conditions(u, v, x, P)); });
                if (enabled("lemma1"))
                    guarded(n, seed, ip, "lemma1",
                            [&] { push(n, seed, ip, check_lemma1(u, v, x, P)); });
                if (enabled("tg_identity"))
                    guarded(n, seed, ip, "tg_identity", [&] {
                        push(n, seed, ip, check_tg_identity(u, v, x, cfg.hbar, P));
                    });
                if (enabled("linear_cm"))
                    guarded(n, seed, ip, "linear_cm", [&] {
                        push(n, seed, ip, check_linear_cm(u, v, xp, cfg.cm_s, P));
                    });
                if (enabled("involution"))
                    guarded(n, seed, ip, "involution",
                            [&] { push(n, seed, ip, check_involution(u, v, 2, 3, x, P)); });
                if (enabled("hamiltonian_involution"))
                    guarded(n, seed, ip, "hamiltonian_involution", [&] {
                        push(n, seed, ip, check_hamiltonian_involution(u, 2, x, P));
                    });
            }
        }

        const bool want_cor1 = enabled("corollary1_s_vanish") ||
                               enabled("corollary1_h_invariance") ||
                               enabled("corollary1_h_matches_r");
        if (want_cor1 && !cfg.spectral_points.empty()) {
            const auto [u, v] = cfg.spectral_points.front();
            guarded(n, 0, 0, "corollary1_s_vanish", [&] {
                for (auto& r : check_corollary1(u, v, seed_points, P))
                    if (enabled(r.check_name)) push(n, 0, 0, std::move(r));
            });
        }
    }

    std::stable_sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
        if (a.name != b.name) return a.name < b.name;
        if (a.n != b.n) return a.n < b.n;
        if (a.seed != b.seed) return a.seed < b.seed;
        return a.point < b.point;
    });
    std::vector<ResidualReport> out;
    out.reserve(keyed.size());
    for (auto& k : keyed) out.push_back(std::move(k.rep));
    return out;
}

} // namespace rslab::verify
