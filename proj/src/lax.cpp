#include "rslab/lax.hpp"

#include <cmath>

namespace rslab::lax {

namespace el = rslab::elliptic;

namespace {

constexpr double kPoleFloor = 1e-10;

void require_generic_positions(const Eigen::VectorXd& q, const ModelParams& P) {
    for (int i = 0; i < q.size(); ++i)
        for (int j = 0; j < q.size(); ++j) {
            if (i == j) continue;
            if (std::abs(el::sigma(q[i] - q[j], P.tau, P.series)) < kPoleFloor)
                throw SingularConfiguration("coincident positions: sigma(q_ij) ~ 0");
        }
}

void require_gamma_generic(const Eigen::VectorXd& q, const ModelParams& P) {
    for (int i = 0; i < q.size(); ++i)
        for (int j = 0; j < q.size(); ++j)
            if (std::abs(el::sigma(P.gamma + (q[j] - q[i]), P.tau, P.series)) < kPoleFloor)
                throw SingularConfiguration("sigma(gamma + q_ji) ~ 0");
}

void require_spectral(cplx u, const ModelParams& P) {
    if (std::abs(el::sigma(u, P.tau, P.series)) < kPoleFloor)
        throw SpectralPole("spectral parameter on the sigma zero lattice");
}

Eigen::VectorXcd to_complex(const Eigen::VectorXd& q) {
    return q.cast<cplx>();
}

// A(u;q) at argument order `deriv` in u.
Matrix build_A(cplx u, const Eigen::VectorXcd& q, const ModelParams& P, int deriv) {
    const int n = P.n;
    const cplx qsum = q.sum();
    Matrix A(n, n);
    for (int j = 0; j < n; ++j) {
        const cplx arg = u + static_cast<double>(n) * q[j] - qsum + 0.5 * (n - 1);
        for (int i = 0; i < n; ++i) {
            switch (deriv) {
                case 0: A(i, j) = el::theta_j(i, arg, n, P.tau, P.series); break;
                case 1: A(i, j) = el::d_theta_j(i, arg, n, P.tau, P.series); break;
                default: A(i, j) = el::d2_theta_j(i, arg, n, P.tau, P.series); break;
            }
        }
    }
    return A;
}

struct InverseWithCond {
    Matrix inv;
    double rcond;
};

InverseWithCond invert(const Matrix& M) {
    Eigen::PartialPivLU<Matrix> lu(M);
    InverseWithCond out;
    out.rcond = lu.rcond();
    if (out.rcond < 1e-12)
        throw IllConditioned("intertwiner inversion beyond condition bound");
    out.inv = lu.inverse();
    return out;
}

} // namespace

Matrix intertwiner_A(cplx u, const Eigen::VectorXcd& q, const ModelParams& P,
                     int deriv) {
    return build_A(u, q, P, deriv);
}

Matrix intertwiner_A(cplx u, const PhasePoint& x, const ModelParams& P, int deriv) {
    return build_A(u, to_complex(x.q), P, deriv);
}

Matrix gauge_g(cplx u, const PhasePoint& x, const ModelParams& P) {
    const int n = P.n;
    require_generic_positions(x.q, P);
    Matrix g = intertwiner_A(u, x, P);
    for (int j = 0; j < n; ++j) {
        cplx prod{1.0, 0.0};
        for (int l = 0; l < n; ++l)
            if (l != j) prod *= el::sigma(x.q[j] - x.q[l], P.tau, P.series);
        g.col(j) /= prod;
    }
    return g;
}

cplx rs_weight(int j, const Eigen::VectorXd& q, cplx gamma,
               const el::ModularParam& tau, const el::SeriesControl& ctl) {
    cplx prod{1.0, 0.0};
    for (int k = 0; k < q.size(); ++k) {
        if (k == j) continue;
        const double qjk = q[j] - q[k];
        const cplx s0 = el::sigma(qjk, tau, ctl);
        if (std::abs(s0) < kPoleFloor)
            throw SingularConfiguration("rs_weight: coincident positions");
        prod *= el::sigma(qjk + gamma, tau, ctl) * el::sigma(qjk - gamma, tau, ctl) / (s0 * s0);
    }
    return std::sqrt(prod); // principal branch of the full product
}

LaxMatrix lax_ruijsenaars(cplx u, const PhasePoint& x, const ModelParams& P) {
    const int n = P.n;
    require_spectral(u, P);
    require_gamma_generic(x.q, P);
    const cplx su = el::sigma(u, P.tau, P.series);
    Matrix L(n, n);
    for (int j = 0; j < n; ++j) {
        const cplx w = rs_weight(j, x.q, P.gamma, P.tau, P.series) * std::exp(x.p[j]);
        for (int i = 0; i < n; ++i) {
            const double qji = x.q[j] - x.q[i];
            L(i, j) = w * el::sigma(P.gamma + u + qji, P.tau, P.series) /
                      (el::sigma(P.gamma + qji, P.tau, P.series) * su);
        }
    }
    return {L, u, LaxKind::Ruijsenaars};
}

namespace {

Matrix nijhoff_value(cplx u, const PhasePoint& x, const ModelParams& P) {
    const int n = P.n;
    require_spectral(u, P);
    require_generic_positions(x.q, P);
    require_gamma_generic(x.q, P);
    const cplx su = el::sigma(u, P.tau, P.series);
    Matrix L(n, n);
    for (int j = 0; j < n; ++j) {
        cplx v{1.0, 0.0};
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            const double qjk = x.q[j] - x.q[k];
            v *= el::sigma(P.gamma + qjk, P.tau, P.series) / el::sigma(qjk, P.tau, P.series);
        }
        v *= std::exp(x.p[j]);
        for (int i = 0; i < n; ++i) {
            const double qji = x.q[j] - x.q[i];
            L(i, j) = v * el::sigma(P.gamma + u + qji, P.tau, P.series) /
                      (su * el::sigma(P.gamma + qji, P.tau, P.series));
        }
    }
    return L;
}

} // namespace

LaxMatrix lax_nijhoff(cplx u, const PhasePoint& x, const ModelParams& P) {
    return {nijhoff_value(u, x, P), u, LaxKind::Nijhoff};
}

LaxMatrix lax_factorized(cplx u, const PhasePoint& x, const ModelParams& P,
                         double* rcond_out) {
    const int n = P.n;
    require_spectral(u, P);
    require_generic_positions(x.q, P);
    const cplx sg = el::sigma(P.gamma, P.tau, P.series);
    if (std::abs(sg) < kPoleFloor)
        throw SingularConfiguration("coupling gamma on the sigma zero lattice");
    Matrix B = intertwiner_A(u + static_cast<double>(n) * P.gamma, x, P);
    Matrix C = intertwiner_A(u, x, P);
    InverseWithCond ic = invert(C);
    if (rcond_out) *rcond_out = ic.rcond;
    Eigen::VectorXcd ep(n);
    for (int k = 0; k < n; ++k) ep[k] = std::exp(x.p[k]);
    Matrix L = B * ep.asDiagonal() * ic.inv / sg;
    return {L, u, LaxKind::Factorized};
}

Matrix dgamma_nijhoff(cplx u, const PhasePoint& x, const ModelParams& P,
                      bool fd_check) {
    const int n = P.n;
    Matrix L = nijhoff_value(u, x, P);
    Matrix D(n, n);
    for (int j = 0; j < n; ++j) {
        cplx sum{};
        for (int k = 0; k < n; ++k)
            if (k != j) sum += el::xi(P.gamma + (x.q[j] - x.q[k]), P.tau, P.series);
        for (int i = 0; i < n; ++i) {
            const double qji = x.q[j] - x.q[i];
            D(i, j) = L(i, j) * (el::xi(P.gamma + u + qji, P.tau, P.series) -
                                 el::xi(P.gamma + qji, P.tau, P.series) + sum);
        }
    }
    if (fd_check) {
        const double h = 1e-5;
        auto at = [&](double eps) {
            ModelParams Q = P;
            Q.gamma = P.gamma + eps;
            return nijhoff_value(u, x, Q);
        };
        Matrix fd = (at(h) - at(-h)) / (2.0 * h);
        Matrix fd2 = (at(h / 2) - at(-h / 2)) / h;
        fd = (4.0 * fd2 - fd) / 3.0;
        const double scale = std::max(1.0, D.cwiseAbs().maxCoeff());
        if ((D - fd).cwiseAbs().maxCoeff() > 1e-8 * scale)
            throw DerivativeMismatch("dgamma_nijhoff: analytic vs finite difference");
    }
    return D;
}

MatrixField nijhoff_field(cplx u, const ModelParams& P) {
    MatrixField F;
    F.n = P.n;
    F.value = [u, P](const PhasePoint& x) { return nijhoff_value(u, x, P); };
    F.grad = [u, P](const PhasePoint& x) {
        const int n = P.n;
        phase::FieldEval e;
        e.value = nijhoff_value(u, x, P);
        e.dq.assign(n, Matrix::Zero(n, n));
        e.dp.assign(n, Matrix::Zero(n, n));
        // xi tables for the logarithmic q-derivative
        Matrix xi_pair(n, n), xi_gpair(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (a == b) continue;
                const double qab = x.q[a] - x.q[b];
                xi_pair(a, b) = el::xi(qab, P.tau, P.series);
                xi_gpair(a, b) = el::xi(P.gamma + qab, P.tau, P.series);
            }
        Eigen::VectorXcd S = Eigen::VectorXcd::Zero(n);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (k != j) S[j] += xi_gpair(j, k) - xi_pair(j, k);
        for (int m = 0; m < n; ++m) {
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) {
                    const double qji = x.q[j] - x.q[i];
                    const cplx c1 = el::xi(P.gamma + u + qji, P.tau, P.series) -
                                    ((i == j) ? cplx{} : xi_gpair(j, i));
                    double sel = (m == j ? 1.0 : 0.0) - (m == i ? 1.0 : 0.0);
                    cplx coeff = c1 * sel;
                    if (m == j)
                        coeff += S[j];
                    else
                        coeff -= xi_gpair(j, m) - xi_pair(j, m);
                    e.dq[m](i, j) = e.value(i, j) * coeff;
                }
                if (m == j) e.dp[m].col(j) = e.value.col(j);
            }
        }
        return e;
    };
    return F;
}

namespace {

// dA[m] = -A' + n * (column m scaled), with A' the entrywise u-derivative.
Matrix q_derivative(const Matrix& Aprime, int m) {
    Matrix d = -Aprime;
    d.col(m) += static_cast<double>(Aprime.rows()) * Aprime.col(m);
    return d;
}

} // namespace

MatrixField factorized_field(cplx u, const ModelParams& P) {
    MatrixField F;
    F.n = P.n;
    F.value = [u, P](const PhasePoint& x) { return lax_factorized(u, x, P).entries; };
    F.grad = [u, P](const PhasePoint& x) {
        const int n = P.n;
        require_spectral(u, P);
        require_generic_positions(x.q, P);
        const cplx sg = el::sigma(P.gamma, P.tau, P.series);
        const cplx ug = u + static_cast<double>(n) * P.gamma;
        Matrix B = intertwiner_A(ug, x, P);
        Matrix Bp = intertwiner_A(ug, x, P, 1);
        Matrix C = intertwiner_A(u, x, P);
        Matrix Cp = intertwiner_A(u, x, P, 1);
        Matrix Cinv = invert(C).inv;
        Eigen::VectorXcd ep(n);
        for (int k = 0; k < n; ++k) ep[k] = std::exp(x.p[k]);

        phase::FieldEval e;
        e.value = B * ep.asDiagonal() * Cinv / sg;
        e.dq.assign(n, Matrix());
        e.dp.assign(n, Matrix());
        Matrix BD = B * ep.asDiagonal();
        for (int m = 0; m < n; ++m) {
            Matrix dB = q_derivative(Bp, m);
            Matrix dC = q_derivative(Cp, m);
            e.dq[m] = (dB * ep.asDiagonal() * Cinv - BD * Cinv * dC * Cinv) / sg;
            e.dp[m] = (B.col(m) * ep[m]) * Cinv.row(m) / sg;
        }
        return e;
    };
    return F;
}

MatrixField ruijsenaars_field(cplx u, const ModelParams& P) {
    MatrixField F;
    F.n = P.n;
    F.value = [u, P](const PhasePoint& x) { return lax_ruijsenaars(u, x, P).entries; };
    F.grad = [u, P](const PhasePoint& x) {
        const int n = P.n;
        phase::FieldEval e;
        e.value = lax_ruijsenaars(u, x, P).entries;
        e.dq.assign(n, Matrix::Zero(n, n));
        e.dp.assign(n, Matrix::Zero(n, n));
        // pair-potential log-derivative tables
        Matrix wlog(n, n); // wlog(j,k) = xi(q_jk+g) + xi(q_jk-g) - 2 xi(q_jk)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                if (j == k) continue;
                const double qjk = x.q[j] - x.q[k];
                wlog(j, k) = el::xi(qjk + P.gamma, P.tau, P.series) +
                             el::xi(qjk - P.gamma, P.tau, P.series) -
                             2.0 * el::xi(qjk, P.tau, P.series);
            }
        for (int m = 0; m < n; ++m) {
            for (int j = 0; j < n; ++j) {
                cplx wpart{};
                if (m == j) {
                    for (int k = 0; k < n; ++k)
                        if (k != j) wpart += 0.5 * wlog(j, k);
                } else {
                    wpart = -0.5 * wlog(j, m);
                }
                for (int i = 0; i < n; ++i) {
                    const double qji = x.q[j] - x.q[i];
                    const double sel = (m == j ? 1.0 : 0.0) - (m == i ? 1.0 : 0.0);
                    cplx kpart{};
                    if (sel != 0.0)
                        kpart = sel * (el::xi(P.gamma + u + qji, P.tau, P.series) -
                                       el::xi(P.gamma + qji, P.tau, P.series));
                    e.dq[m](i, j) = e.value(i, j) * (wpart + kpart);
                }
                if (m == j) e.dp[m].col(j) = e.value.col(j);
            }
        }
        return e;
    };
    return F;
}

MatrixField gauge_field(cplx u, const ModelParams& P) {
    MatrixField F;
    F.n = P.n;
    F.value = [u, P](const PhasePoint& x) { return gauge_g(u, x, P); };
    F.grad = [u, P](const PhasePoint& x) {
        const int n = P.n;
        require_generic_positions(x.q, P);
        Matrix A = intertwiner_A(u, x, P);
        Matrix Ap = intertwiner_A(u, x, P, 1);
        Eigen::VectorXcd h(n);
        for (int j = 0; j < n; ++j) {
            cplx prod{1.0, 0.0};
            for (int l = 0; l < n; ++l)
                if (l != j) prod *= el::sigma(x.q[j] - x.q[l], P.tau, P.series);
            h[j] = 1.0 / prod;
        }
        phase::FieldEval e;
        e.value = A * h.asDiagonal();
        e.dq.assign(n, Matrix());
        e.dp.assign(n, Matrix::Zero(n, n));
        for (int m = 0; m < n; ++m) {
            Matrix dA = q_derivative(Ap, m);
            Eigen::VectorXcd dh(n);
            for (int j = 0; j < n; ++j) {
                // d/dq_m of ln h_j = -sum_{l != j} xi(q_jl) (m=j) or +xi(q_jm)
                cplx eta{};
                if (m == j) {
                    for (int l = 0; l < n; ++l)
                        if (l != j) eta -= el::xi(x.q[j] - x.q[l], P.tau, P.series);
                } else {
                    eta = el::xi(x.q[j] - x.q[m], P.tau, P.series);
                }
                dh[j] = h[j] * eta;
            }
            e.dq[m] = dA * h.asDiagonal() + A * dh.asDiagonal();
        }
        return e;
    };
    return F;
}

cplx vandermonde_const(const std::vector<cplx>& base, const ModelParams& P) {
    const int n = P.n;
    Matrix M(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            M(j, k) = el::theta_j(j, base[k], n, P.tau, P.series);
    cplx det = M.determinant();
    cplx sum{};
    for (const cplx& uk : base) sum += uk;
    cplx rhs = el::sigma(sum / static_cast<double>(n) - 0.5 * (n - 1), P.tau, P.series);
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
            rhs *= el::sigma((base[k] - base[j]) / static_cast<double>(n), P.tau, P.series);
    if (std::abs(rhs) < 1e-12)
        throw DegenerateTuple("vandermonde: right-hand side vanishes");
    return det / rhs;
}

double vandermonde_check(const std::vector<cplx>& u_list, const ModelParams& P) {
    const int n = P.n;
    std::vector<cplx> base(n);
    for (int k = 0; k < n; ++k) base[k] = 0.1 * (k + 1) + 0.05;
    const cplx C = vandermonde_const(base, P);
    const cplx ratio = vandermonde_const(u_list, P); // det/RHS at u_list
    return std::abs(ratio / C - 1.0);
}

cplx hamiltonian(const PhasePoint& x, const ModelParams& P) {
    cplx H{};
    for (int j = 0; j < P.n; ++j)
        H += std::cosh(x.p[j]) * rs_weight(j, x.q, P.gamma, P.tau, P.series);
    return P.mc2 * H;
}

phase::Observable hamiltonian_observable(const ModelParams& P) {
    phase::Observable o;
    o.evaluator = [P](const PhasePoint& x) { return hamiltonian(x, P); };
    o.analytic_grad = [P](const PhasePoint& x) {
        const int n = P.n;
        phase::Gradient g;
        g.dq = Eigen::VectorXcd::Zero(n);
        g.dp = Eigen::VectorXcd::Zero(n);
        std::vector<cplx> w(n);
        for (int j = 0; j < n; ++j) w[j] = rs_weight(j, x.q, P.gamma, P.tau, P.series);
        for (int m = 0; m < n; ++m) {
            g.dp[m] = P.mc2 * std::sinh(x.p[m]) * w[m];
            cplx acc{};
            for (int j = 0; j < n; ++j) {
                // d/dq_m ln(prod under the root), then times w_j/2
                cplx dlog{};
                for (int k = 0; k < n; ++k) {
                    if (k == j) continue;
                    const double sel = (m == j ? 1.0 : 0.0) - (m == k ? 1.0 : 0.0);
                    if (sel == 0.0) continue;
                    const double qjk = x.q[j] - x.q[k];
                    dlog += sel * (el::xi(qjk + P.gamma, P.tau, P.series) +
                                   el::xi(qjk - P.gamma, P.tau, P.series) -
                                   2.0 * el::xi(qjk, P.tau, P.series));
                }
                acc += std::cosh(x.p[j]) * 0.5 * w[j] * dlog;
            }
            g.dq[m] = P.mc2 * acc;
        }
        return g;
    };
    return o;
}

cplx trace_power(cplx u, int l, const PhasePoint& x, const ModelParams& P) {
    Matrix L = lax_factorized(u, x, P).entries;
    Matrix M = Matrix::Identity(P.n, P.n);
    for (int k = 0; k < l; ++k) M = M * L;
    return M.trace();
}

phase::Observable trace_power_observable(cplx u, int l, const ModelParams& P,
                                         LaxKind kind) {
    MatrixField F = kind == LaxKind::Ruijsenaars ? ruijsenaars_field(u, P)
                    : kind == LaxKind::Nijhoff   ? nijhoff_field(u, P)
                                                 : factorized_field(u, P);
    phase::Observable o;
    o.evaluator = [F, l, P](const PhasePoint& x) {
        Matrix L = F.value(x);
        Matrix M = Matrix::Identity(P.n, P.n);
        for (int k = 0; k < l; ++k) M = M * L;
        return M.trace();
    };
    o.analytic_grad = [F, l, P](const PhasePoint& x) {
        phase::FieldEval e = F.grad(x);
        Matrix Lpow = Matrix::Identity(P.n, P.n);
        for (int k = 0; k < l - 1; ++k) Lpow = Lpow * e.value;
        phase::Gradient g;
        g.dq = Eigen::VectorXcd::Zero(P.n);
        g.dp = Eigen::VectorXcd::Zero(P.n);
        for (int m = 0; m < P.n; ++m) {
            g.dq[m] = static_cast<double>(l) * (Lpow * e.dq[m]).trace();
            g.dp[m] = static_cast<double>(l) * (Lpow * e.dp[m]).trace();
        }
        return g;
    };
    return o;
}

Eigen::VectorXcd cm_shifted_momenta(const PhasePoint& x_prime, double s,
                                    const ModelParams& P) {
    const int n = P.n;
    Eigen::VectorXcd pt = x_prime.p;
    for (int k = 0; k < n; ++k) {
        cplx dlnM{};
        for (int j = 0; j < n; ++j)
            if (j != k) dlnM += el::xi(x_prime.q[k] - x_prime.q[j], P.tau, P.series);
        pt[k] -= (s / n) * dlnM;
    }
    return pt;
}

LaxMatrix lax_cm(cplx u, const PhasePoint& x_prime, double s, const ModelParams& P) {
    require_spectral(u, P);
    require_generic_positions(x_prime.q, P);
    Matrix A = intertwiner_A(u, x_prime, P);
    Matrix Au = intertwiner_A(u, x_prime, P, 1);
    Matrix Ainv = invert(A).inv;
    Eigen::VectorXcd pt = cm_shifted_momenta(x_prime, s, P);
    Matrix L = A * pt.asDiagonal() * Ainv - s * Au * Ainv;
    return {L, u, LaxKind::CM};
}

LaxMatrix lax_cm_limit(cplx u, const PhasePoint& x_prime, double s, double beta,
                       const ModelParams& P) {
    const int n = P.n;
    ModelParams Q = P;
    Q.gamma = beta * s / n;
    PhasePoint xb = x_prime;
    xb.p = -beta * cm_shifted_momenta(x_prime, s, P);
    Matrix Lp = el::sigma(Q.gamma, Q.tau, Q.series) *
                lax_factorized(u, xb, Q).entries;
    Matrix L = -(Lp - Matrix::Identity(n, n)) / beta;
    return {L, u, LaxKind::CM};
}

MatrixField cm_field(cplx u, double s, const ModelParams& P) {
    MatrixField F;
    F.n = P.n;
    F.value = [u, s, P](const PhasePoint& x) { return lax_cm(u, x, s, P).entries; };
    F.grad = [u, s, P](const PhasePoint& x) {
        const int n = P.n;
        require_spectral(u, P);
        require_generic_positions(x.q, P);
        Matrix A = intertwiner_A(u, x, P);
        Matrix Ap = intertwiner_A(u, x, P, 1);   // d/du = per-entry theta'
        Matrix App = intertwiner_A(u, x, P, 2);
        Matrix Ainv = invert(A).inv;
        Eigen::VectorXcd pt = cm_shifted_momenta(x, s, P);

        phase::FieldEval e;
        e.value = A * pt.asDiagonal() * Ainv - s * Ap * Ainv;
        e.dq.assign(n, Matrix());
        e.dp.assign(n, Matrix());
        for (int m = 0; m < n; ++m) {
            Matrix dA = q_derivative(Ap, m);
            Matrix dAu = q_derivative(App, m);
            Matrix dAinv = -Ainv * dA * Ainv;
            Eigen::VectorXcd dpt(n);
            for (int k = 0; k < n; ++k) {
                cplx hess{};
                if (k == m) {
                    for (int j = 0; j < n; ++j)
                        if (j != k) hess += el::xi_prime(x.q[k] - x.q[j], P.tau, P.series);
                } else {
                    hess = -el::xi_prime(x.q[k] - x.q[m], P.tau, P.series);
                }
                dpt[k] = -(s / n) * hess;
            }
            e.dq[m] = dA * pt.asDiagonal() * Ainv + A * dpt.asDiagonal() * Ainv +
                      A * pt.asDiagonal() * dAinv - s * (dAu * Ainv + Ap * dAinv);
            e.dp[m] = A.col(m) * Ainv.row(m);
        }
        return e;
    };
    return F;
}

} // namespace rslab::lax
