#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rslab/verify.hpp"

using namespace rslab;
using namespace rslab::verify;
using lax::ModelParams;
using phase::PhasePoint;

namespace {

const cplx I{0.0, 1.0};

ModelParams params(int n) {
    return ModelParams(n, elliptic::ModularParam(I), cplx{0.21, 0.13}, 0.1);
}

PhasePoint point(int n, std::uint64_t seed) {
    Rng rng(seed);
    return phase::draw_phase_point(n, rng);
}

std::pair<cplx, cplx> spectral(std::uint64_t seed) {
    Rng rng(seed);
    return phase::draw_spectral_pair(rng);
}

} // namespace

TEST_CASE("sklyanin bracket residual, analytic and finite differences") {
    for (int n : {2, 5}) {
        ModelParams P = params(n);
        PhasePoint x = point(n, 5 + n);
        auto [u, v] = spectral(11 + n);
        ResidualReport ra = check_sklyanin(u, v, x, P);
        CHECK(ra.passed);
        CHECK(ra.rel_residual < (n <= 4 ? 1e-9 : 1e-8));

        phase::BracketMethod fd;
        fd.mode = phase::BracketMode::finite_difference;
        ResidualReport rf = check_sklyanin(u, v, x, P, fd);
        CHECK(rf.passed);
        CHECK(rf.rel_residual < 1e-6);
        // FD and analytic agree on pass/fail for tolerances >= 1e-6
        CHECK((ra.rel_residual <= 1e-6) == (rf.rel_residual <= 1e-6));
    }
}

TEST_CASE("adding identity multiples to the r-matrix leaves the residual unchanged") {
    const int n = 2;
    ModelParams P = params(n);
    PhasePoint x = point(n, 17);
    auto [u, v] = spectral(19);
    Matrix r = rmat::classical_r(u - v, P).data;
    double r0 = sklyanin_residual(r, u, v, x, P);
    Matrix shifted = r + cplx(1.7, -0.4) * Matrix::Identity(n * n, n * n);
    double r1 = sklyanin_residual(shifted, u, v, x, P);
    CHECK(std::abs(r0 - r1) < 1e-12);
    // and a wrong tensor is loudly wrong
    CHECK(sklyanin_residual(2.0 * r, u, v, x, P) > 1e-2);
}

TEST_CASE("dynamical quadratic bracket: faithful failure and covariance") {
    const int n = 2;
    ModelParams P = params(n);
    PhasePoint x = point(n, 23);
    auto [u, v] = spectral(29);

    ResidualReport sweep = check_dynamical_quadratic_auto(u, v, x, P);
    CHECK_FALSE(sweep.passed);
    CHECK(sweep.notes.find("no reading closes") != std::string::npos);

    // p-translation covariance: both sides are homogeneous of degree two in
    // e^p, so the relative residual is unchanged (variant b is p-free)
    ResidualReport a = check_dynamical_quadratic(u, v, x, P, rmat::S12Variant::b);
    PhasePoint xs = x;
    for (int i = 0; i < n; ++i) xs.p[i] += 0.37;
    ResidualReport b = check_dynamical_quadratic(u, v, xs, P, rmat::S12Variant::b);
    CHECK(std::abs(a.rel_residual - b.rel_residual) < 1e-10);
}

TEST_CASE("skew conditions hold for the printed quadruple") {
    for (int n : {2, 3}) {
        ModelParams P = params(n);
        PhasePoint x = point(n, 31 + n);
        auto [u, v] = spectral(37 + n);
        ResidualReport r = check_skew_conditions(u, v, x, P);
        CHECK(r.passed);
        CHECK(r.rel_residual < 1e-10);
    }
}

TEST_CASE("linear CM bracket") {
    for (int n : {2, 3}) {
        ModelParams P = params(n);
        PhasePoint x = point(n, 41 + n);
        auto [u, v] = spectral(43 + n);
        ResidualReport r = check_linear_cm(u, v, x, 1.3, P);
        CHECK(r.passed);
        CHECK(r.rel_residual < 1e-8);
    }
    // degenerate coupling
    ModelParams P = params(2);
    PhasePoint x = point(2, 47);
    auto [u, v] = spectral(53);
    ResidualReport r0 = check_linear_cm(u, v, x, 0.0, P);
    CHECK(r0.rel_residual < 1e-10);
    // coincident spectral points hit the r-matrix pole
    CHECK_THROWS_AS(check_linear_cm(u, u, x, 1.3, P), SpectralPole);
}

TEST_CASE("lemma 1: printed algebraic relation") {
    for (int n : {2, 3}) {
        ModelParams P = params(n);
        PhasePoint x = point(n, 59 + n);
        auto [u, v] = spectral(61 + n);
        ResidualReport r = check_lemma1(u, v, x, P);
        CHECK(r.passed);
        CHECK(r.rel_residual < 1e-9);

        // homogeneity: shifting all momenta scales both sides equally
        PhasePoint xs = x;
        for (int i = 0; i < n; ++i) xs.p[i] += 0.51;
        ResidualReport rs = check_lemma1(u, v, xs, P);
        CHECK(std::abs(r.rel_residual - rs.rel_residual) < 1e-10);

        // swapped arguments satisfy the same relation
        CHECK(check_lemma1(v, u, x, P).passed);
    }
}

TEST_CASE("T = G exchange identity at finite shifts") {
    for (int n : {2, 3}) {
        ModelParams P = params(n);
        PhasePoint x = point(n, 67 + n);
        auto [u, v] = spectral(71 + n);
        for (double hb : {0.05, 0.1, 0.2}) {
            ResidualReport r = check_tg_identity(u, v, x, hb, P);
            CHECK(r.passed);
            CHECK(r.rel_residual < 1e-9);
        }
        // the identity degenerates smoothly as the shift closes
        CHECK(check_tg_identity(u, v, x, 1e-6, P).rel_residual < 1e-9);
    }
}

TEST_CASE("T and G first-order coefficients match the expansion") {
    // (T - T0)/(i hbar) approaches the r-coupled first-order expression as
    // hbar -> 0; same for G with the right-acting r-matrix.
    const int n = 2;
    ModelParams P = params(n);
    PhasePoint x = point(n, 73);
    auto [u, v] = spectral(79);
    const cplx ng = static_cast<double>(n) * P.gamma;
    Matrix r = rmat::classical_r(u - v, P).data;

    Matrix Bu = lax::intertwiner_A(u + ng, x, P);
    Matrix Bup = lax::intertwiner_A(u + ng, x, P, 1);
    Matrix Cu = lax::intertwiner_A(u, x, P);
    Matrix Cup = lax::intertwiner_A(u, x, P, 1);
    Matrix Bv = lax::intertwiner_A(v + ng, x, P);
    Matrix Bvp = lax::intertwiner_A(v + ng, x, P, 1);
    Matrix Cv = lax::intertwiner_A(v, x, P);
    Matrix Cvp = lax::intertwiner_A(v, x, P, 1);
    Matrix Cui = Cu.inverse(), Cvi = Cv.inverse();

    auto q_deriv = [&](const Matrix& Ap, int m) {
        Matrix d = -Ap;
        d.col(m) += static_cast<double>(n) * Ap.col(m);
        return d;
    };
    auto pair_u = [&](int col) -> Matrix { return Bu.col(col) * Cui.row(col); };
    auto pair_v = [&](int col) -> Matrix { return Bv.col(col) * Cvi.row(col); };
    auto dpair_u = [&](int col, int m) -> Matrix {
        Matrix dB = q_deriv(Bup, m);
        Matrix dCi = -Cui * q_deriv(Cup, m) * Cui;
        return dB.col(col) * Cui.row(col) + Bu.col(col) * dCi.row(col);
    };
    auto dpair_v = [&](int col, int m) -> Matrix {
        Matrix dB = q_deriv(Bvp, m);
        Matrix dCi = -Cvi * q_deriv(Cvp, m) * Cvi;
        return dB.col(col) * Cvi.row(col) + Bv.col(col) * dCi.row(col);
    };

    auto expansion_error = [&](double hb) {
        const cplx ih{0.0, hb};
        Matrix Rm = rmat::quantum_R(u - v, hb, P).data;
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Matrix X0, X1, Z0, Z1;
                if (i == j) {
                    X0 = rmat::kron(pair_u(i), pair_v(i));
                    X1 = rmat::kron(pair_u(i), dpair_v(i, i));
                    Z0 = X0;
                    Z1 = rmat::kron(dpair_u(i, i), pair_v(i));
                } else {
                    X0 = rmat::kron(pair_u(i), pair_v(j)) + rmat::kron(pair_u(j), pair_v(i));
                    X1 = rmat::kron(pair_u(i), dpair_v(j, i)) +
                         rmat::kron(pair_u(j), dpair_v(i, j));
                    Z0 = X0;
                    Z1 = rmat::kron(dpair_u(j, i), pair_v(i)) +
                         rmat::kron(dpair_u(i, j), pair_v(j));
                }
                // shifted-argument tensors at finite hbar
                Eigen::VectorXcd qs_i = x.q.cast<cplx>();
                qs_i[i] -= ih;
                Eigen::VectorXcd qs_j = x.q.cast<cplx>();
                qs_j[j] -= ih;
                auto spair_v = [&](int col, const Eigen::VectorXcd& qs) -> Matrix {
                    return lax::intertwiner_A(v + ng, qs, P).col(col) *
                           lax::intertwiner_A(v, qs, P).inverse().row(col);
                };
                auto spair_u = [&](int col, const Eigen::VectorXcd& qs) -> Matrix {
                    return lax::intertwiner_A(u + ng, qs, P).col(col) *
                           lax::intertwiner_A(u, qs, P).inverse().row(col);
                };
                Matrix T, G;
                if (i == j) {
                    T = Rm * rmat::kron(pair_u(i), spair_v(i, qs_i));
                    G = rmat::kron(spair_u(i, qs_i), pair_v(i)) * Rm;
                } else {
                    T = Rm * (rmat::kron(pair_u(i), spair_v(j, qs_i)) +
                              rmat::kron(pair_u(j), spair_v(i, qs_j)));
                    G = (rmat::kron(spair_u(j, qs_i), pair_v(i)) +
                         rmat::kron(spair_u(i, qs_j), pair_v(j))) * Rm;
                }
                Matrix T1 = r * X0 - X1;  // first-order coefficient, cases I-II
                Matrix G1 = Z0 * r - Z1;  // cases III-IV
                worst = std::max(worst, ((T - X0) / ih - T1).cwiseAbs().maxCoeff());
                worst = std::max(worst, ((G - Z0) / ih - G1).cwiseAbs().maxCoeff());
            }
        return worst;
    };
    double e1 = expansion_error(1e-3);
    double e2 = expansion_error(1e-4);
    CHECK(e1 < 1e-1);
    CHECK(e2 < e1 / 5.0); // shrinks linearly in hbar
}

TEST_CASE("involution of trace invariants") {
    ModelParams P2 = params(2);
    PhasePoint x2 = point(2, 83);
    auto [u, v] = spectral(89);
    ResidualReport r11 = check_involution(u, v, 1, 1, x2, P2);
    CHECK(r11.passed);
    CHECK(r11.abs_residual < 1e-8);

    ModelParams P3 = params(3);
    PhasePoint x3 = point(3, 97);
    ResidualReport r23 = check_involution(u, v, 2, 3, x3, P3);
    CHECK(r23.passed);
    CHECK(r23.abs_residual < 1e-7);

    // bracket of an observable with itself vanishes to round-off
    ResidualReport same = check_involution(u, u, 1, 1, x2, P2);
    CHECK(same.abs_residual < 1e-12);
}

TEST_CASE("hamiltonian involution") {
    ModelParams P = params(2);
    PhasePoint x = point(2, 101);
    auto [u, v] = spectral(103);
    (void)v;
    for (int l : {1, 2}) {
        ResidualReport r = check_hamiltonian_involution(u, l, x, P);
        CHECK(r.passed);
        CHECK(r.abs_residual < 1e-7);
    }

    // frame contrast: against the factorized traces (the other side of the
    // momentum-shift map) the bracket is visibly nonzero
    cplx cross = phase::poisson_bracket(lax::hamiltonian_observable(P),
                                        lax::trace_power_observable(u, 1, P), x);
    CHECK(std::abs(cross) > 1e-3);

    // relabeling particles leaves the residual unchanged
    PhasePoint xp = x;
    std::swap(xp.q[0], xp.q[1]);
    std::swap(xp.p[0], xp.p[1]);
    ResidualReport ra = check_hamiltonian_involution(u, 1, x, P);
    ResidualReport rb = check_hamiltonian_involution(u, 1, xp, P);
    CHECK(std::abs(ra.abs_residual - rb.abs_residual) < 1e-12);

    // free limit: for small gamma the Hamiltonian commutes with symmetric
    // momentum functions
    ModelParams Pfree(2, elliptic::ModularParam(I), cplx(1e-5, 0.0), 0.1);
    phase::Observable sym;
    sym.evaluator = [](const PhasePoint& y) {
        cplx s{};
        for (int i = 0; i < y.n(); ++i) s += std::exp(2.0 * y.p[i]);
        return s;
    };
    sym.analytic_grad = [](const PhasePoint& y) {
        phase::Gradient g;
        g.dq = Eigen::VectorXcd::Zero(y.n());
        g.dp = Eigen::VectorXcd::Zero(y.n());
        for (int i = 0; i < y.n(); ++i) g.dp[i] = 2.0 * std::exp(2.0 * y.p[i]);
        return g;
    };
    cplx br = phase::poisson_bracket(lax::hamiltonian_observable(Pfree), sym, x);
    CHECK(std::abs(br) < 1e-9);
}

TEST_CASE("corollary 1 conditions on the derived quadruple") {
    ModelParams P = params(2);
    auto [u, v] = spectral(107);
    std::vector<PhasePoint> xs;
    for (int t = 0; t < 3; ++t) xs.push_back(point(2, 109 + t));
    auto reports = check_corollary1(u, v, xs, P);
    REQUIRE(reports.size() == 3);
    for (const auto& r : reports) {
        CAPTURE(r.check_name);
        CHECK(r.passed);
    }
}

TEST_CASE("suite: default subset passes, order and determinism hold") {
    config::ScenarioConfig cfg = config::default_config();
    cfg.suite_n = {2};
    cfg.seeds = {1, 2};
    cfg.spectral_points = {{{0.17, 0.03}, {-0.23, -0.05}}};

    auto reports = run_suite(cfg);
    CHECK(reports.size() > 10);
    for (const auto& r : reports) {
        CAPTURE(r.check_name);
        CAPTURE(r.notes);
        if (r.check_name == "dynamical_quadratic")
            CHECK_FALSE(r.passed); // transcription defect, reported faithfully
        else
            CHECK(r.passed);
    }
    CHECK(std::is_sorted(reports.begin(), reports.end(),
                         [](const ResidualReport& a, const ResidualReport& b) {
                             return a.check_name < b.check_name;
                         }));

    // byte-identical emission across two runs
    auto again = run_suite(cfg);
    CHECK(config::emit_report(reports, config::Format::json) ==
          config::emit_report(again, config::Format::json));

    // zero tolerances fail everything (pass-logic sanity)
    config::ScenarioConfig zero = cfg;
    for (auto& [k, tol] : zero.tolerances) tol = 0.0;
    for (const auto& r : run_suite(zero)) CHECK_FALSE(r.passed);
}
