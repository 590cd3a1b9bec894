#include "rslab/rmat.hpp"

#include <cmath>

namespace rslab::rmat {

namespace el = rslab::elliptic;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kPoleFloor = 1e-10;
const cplx kI{0.0, 1.0};

int mod(int a, int n) {
    int r = a % n;
    return r < 0 ? r + n : r;
}

void require_theta_regular(cplx v, const ModelParams& P) {
    if (std::abs(el::sigma(v, P.tau, P.series)) < kPoleFloor)
        throw SpectralPole("spectral argument on the sigma zero lattice");
    for (int m = 0; m < P.n; ++m)
        if (std::abs(el::theta_j(m, v, P.n, P.tau, P.series)) < kPoleFloor)
            throw SpectralPole("spectral argument on a theta_j zero set");
}

} // namespace

Matrix kron(const Matrix& A, const Matrix& B) {
    const int ar = static_cast<int>(A.rows()), ac = static_cast<int>(A.cols());
    const int br = static_cast<int>(B.rows()), bc = static_cast<int>(B.cols());
    Matrix K(ar * br, ac * bc);
    for (int i = 0; i < ar; ++i)
        for (int j = 0; j < ac; ++j)
            K.block(i * br, j * bc, br, bc) = A(i, j) * B;
    return K;
}

Matrix perm_op(int n) {
    Matrix P = Matrix::Zero(n * n, n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) P(a * n + b, b * n + a) = 1.0;
    return P;
}

Matrix swap_spaces(const Matrix& T, int n) {
    Matrix P = perm_op(n);
    return P * T * P;
}

Matrix embed12(const Matrix& r, int n) {
    return kron(r, Matrix::Identity(n, n));
}

Matrix embed23(const Matrix& r, int n) {
    return kron(Matrix::Identity(n, n), r);
}

Matrix embed13(const Matrix& r, int n) {
    const int n3 = n * n * n;
    Matrix R = Matrix::Zero(n3, n3);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d)
                    for (int f = 0; f < n; ++f)
                        R((a * n + b) * n + c, (d * n + b) * n + f) =
                            r(a * n + c, d * n + f);
    return R;
}

Matrix ClockShift::I_alpha(int a1, int a2) const {
    Matrix M = Matrix::Identity(n, n);
    for (int k = 0; k < a2; ++k) M = g * M;
    for (int k = 0; k < a1; ++k) M = h * M;
    return M;
}

ClockShift clock_shift(int n) {
    if (n < 2) throw ValidationError("clock_shift requires n >= 2");
    ClockShift cs;
    cs.n = n;
    cs.h = Matrix::Zero(n, n);
    cs.g = Matrix::Zero(n, n);
    const cplx omega = std::exp(2.0 * kPi * kI / static_cast<double>(n));
    for (int i = 0; i < n; ++i) {
        cs.h(i, mod(i + 1, n)) = 1.0;
        cs.g(i, i) = std::pow(omega, i);
    }
    return cs;
}

RTensor classical_r(cplx v, const ModelParams& P) {
    const int n = P.n;
    require_theta_regular(v, P);
    // theta tables at v and at 0
    std::vector<cplx> th(n), dth(n), th0(n);
    for (int m = 0; m < n; ++m) {
        th[m] = el::theta_j(m, v, n, P.tau, P.series);
        dth[m] = el::d_theta_j(m, v, n, P.tau, P.series);
        th0[m] = el::theta_j(m, 0.0, n, P.tau, P.series);
    }
    const cplx dth0_at0 = el::d_theta_j(0, 0.0, n, P.tau, P.series);
    const cplx xiv = el::d_sigma(v, P.tau, P.series) / el::sigma(v, P.tau, P.series);

    RTensor r;
    r.n = n;
    r.u = v;
    r.kind = RKind::classical_r;
    r.data = Matrix::Zero(n * n, n * n);
    // The component table r^{lk}_{ij} is a face-weight table: the lower
    // index pair labels the row of the doubled-space matrix. This is the
    // orientation under which the quantum table satisfies the factorized
    // exchange identity and the classical limit ties both tables together.
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const int k = mod(i + j - l, n);
                cplx val;
                if (l == i) {
                    const int m = mod(i - j, n);
                    val = dth[m] / th[m] - xiv;
                } else {
                    val = dth0_at0 * th[mod(i - j, n)] /
                          (th[mod(l - j, n)] * th0[mod(i - l, n)]);
                }
                r.data(i * n + j, l * n + k) = val;
            }
    return r;
}

RTensor quantum_R(cplx v, double hbar, const ModelParams& P) {
    const int n = P.n;
    RTensor R;
    R.n = n;
    R.u = v;
    R.kind = RKind::quantum_R;
    if (hbar == 0.0) {
        R.data = Matrix::Identity(n * n, n * n);
        return R;
    }
    require_theta_regular(v, P);
    const cplx ih = kI * hbar;
    std::vector<cplx> thv(n), thvh(n), thh(n);
    for (int m = 0; m < n; ++m) {
        thv[m] = el::theta_j(m, v, n, P.tau, P.series);
        thvh[m] = el::theta_j(m, v + ih, n, P.tau, P.series);
        thh[m] = el::theta_j(m, ih, n, P.tau, P.series);
        if (std::abs(thh[m]) < kPoleFloor)
            throw SpectralPole("crossing parameter on a theta_j zero set");
    }
    const cplx svh = el::sigma(v + ih, P.tau, P.series);
    if (std::abs(svh) < kPoleFloor)
        throw SpectralPole("v + i hbar on the sigma zero lattice");
    const cplx pref = el::d_theta_j(0, 0.0, n, P.tau, P.series) *
                      el::sigma(v, P.tau, P.series) *
                      el::sigma(ih, P.tau, P.series) /
                      (el::d_sigma(0.0, P.tau, P.series) * thv[0] * svh);

    R.data = Matrix::Zero(n * n, n * n);
    // lower index pair labels the row, as for classical_r
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const int k = mod(i + j - l, n);
                R.data(i * n + j, l * n + k) =
                    pref * thv[0] * thvh[mod(i - j, n)] /
                    (thh[mod(i - l, n)] * thv[mod(l - j, n)]);
            }
    return R;
}

double classical_limit_slope(cplx v, const std::vector<double>& hbars,
                             const ModelParams& P,
                             std::vector<double>* residuals_out) {
    const int n = P.n;
    const Matrix r = classical_r(v, P).data;
    const Matrix I = Matrix::Identity(n * n, n * n);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    if (residuals_out) residuals_out->clear();
    for (double h : hbars) {
        const Matrix R = quantum_R(v, h, P).data;
        const double res = (R - I - kI * h * r).norm();
        if (residuals_out) residuals_out->push_back(res);
        const double x = std::log(h), y = std::log(res);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(hbars.size());
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

namespace {

// a_12(u,v): off-diagonal exchange part r0, xi(u-v) on the double diagonal,
// and the xi(q_ij) diagonal dressing.
Matrix build_a12(cplx u, cplx v, const PhasePoint& x, const ModelParams& P) {
    const int n = P.n;
    const cplx w = u - v;
    const cplx sw = el::sigma(w, P.tau, P.series);
    if (std::abs(sw) < kPoleFloor)
        throw SpectralPole("a_12 requires u != v mod the lattice");
    const cplx xw = el::d_sigma(w, P.tau, P.series) / sw;
    Matrix a = Matrix::Zero(n * n, n * n);
    for (int i = 0; i < n; ++i) {
        a(i * n + i, i * n + i) += xw;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double qij = x.q[i] - x.q[j];
            a(i * n + j, j * n + i) +=
                el::sigma(qij + w, P.tau, P.series) /
                (el::sigma(qij, P.tau, P.series) * sw);
            a(i * n + j, i * n + j) += el::xi(qij, P.tau, P.series);
        }
    }
    return a;
}

Matrix build_u_pm(const PhasePoint& x, const ModelParams& P, double sign) {
    const int n = P.n;
    Matrix u = Matrix::Zero(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double qji = x.q[j] - x.q[i];
            u(i * n + j, i * n + j) =
                el::xi(qji + sign * P.gamma, P.tau, P.series);
        }
    return u;
}

// s_12(w) = sum_{i,j} X(w)^i_j e_ij (x) e_jj with the chosen reading of the
// printed L dL/dgamma combination.
Matrix build_s12(cplx w, const PhasePoint& x, const ModelParams& P,
                 S12Variant variant, bool fd_check) {
    const int n = P.n;
    const Matrix L = lax::lax_nijhoff(w, x, P).entries;
    const Matrix D = lax::dgamma_nijhoff(w, x, P, fd_check);
    Matrix X;
    switch (variant) {
        case S12Variant::a: X = L * D; break;
        case S12Variant::b: X = L.inverse() * D; break;
        case S12Variant::c: X = D * L.inverse(); break;
    }
    Matrix s = Matrix::Zero(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s(i * n + j, j * n + j) = X(i, j);
    return s;
}

} // namespace

DynamicalQuadruple dynamical_quadruple(cplx u, cplx v, const PhasePoint& x,
                                       const ModelParams& P, S12Variant variant,
                                       bool fd_check_dgamma) {
    const int n = P.n;
    const Matrix a = build_a12(u, v, x, P);
    const Matrix up = build_u_pm(x, P, +1.0);
    const Matrix um = build_u_pm(x, P, -1.0);
    const Matrix s12u = build_s12(u, x, P, variant, fd_check_dgamma);
    const Matrix s21v = swap_spaces(build_s12(v, x, P, variant, false), n);

    auto mk = [&](Matrix m, RKind kind) {
        RTensor t;
        t.data = std::move(m);
        t.u = u;
        t.v = v;
        t.kind = kind;
        t.n = n;
        return t;
    };
    DynamicalQuadruple q;
    q.r_minus = mk(a - s12u + s21v, RKind::r_minus);
    q.r_plus = mk(a + up + um, RKind::r_plus);
    q.s_plus = mk(s12u + up, RKind::s_plus);
    q.s_minus = mk(s21v - um, RKind::s_minus);
    return q;
}

Matrix twist_delta_general(const phase::MatrixField& g1,
                           const phase::MatrixField& g2,
                           const phase::MatrixField& L,
                           const PhasePoint& x, int n,
                           const phase::BracketMethod& m) {
    const Matrix gu = g1.value(x);
    const Matrix gv = g2.value(x);
    const Matrix Lval = L.value(x);
    const Matrix I = Matrix::Identity(n, n);

    const Matrix W_gg = phase::bracket_matrix(g1, g2, x, m);
    const Matrix W_gL = phase::bracket_matrix(g1, L, x, m);

    const Matrix G1i = kron(gu.inverse(), I);
    const Matrix G2 = kron(I, gv);
    const Matrix G2i = kron(I, gv.inverse());
    const Matrix L2 = kron(I, Lval);

    const Matrix term1_arg = W_gg * G1i * G2i;
    const Matrix dressed_L2 = G2 * L2 * G2i;
    const Matrix term1 = 0.5 * (term1_arg * dressed_L2 - dressed_L2 * term1_arg);
    const Matrix term2 = G2 * W_gL * G1i * G2i;
    return term1 + term2;
}

RTensor twist_delta(cplx u, cplx v, const PhasePoint& x, const ModelParams& P,
                    const phase::BracketMethod& m) {
    RTensor d;
    d.data = twist_delta_general(lax::gauge_field(u, P), lax::gauge_field(v, P),
                                 lax::nijhoff_field(v, P), x, P.n, m);
    d.u = u;
    d.v = v;
    d.kind = RKind::twisted;
    d.n = P.n;
    return d;
}

Matrix quadratic_bracket_rhs(const Matrix& Lu, const Matrix& Lv,
                             const DynamicalQuadruple& q_uv,
                             const DynamicalQuadruple& q_vu, int n) {
    const Matrix I = Matrix::Identity(n, n);
    const Matrix L1 = kron(Lu, I);
    const Matrix L2 = kron(I, Lv);
    const Matrix rp21 = swap_spaces(q_vu.r_plus.data, n);
    return L1 * L2 * q_uv.r_minus.data - rp21 * L1 * L2 +
           L1 * q_uv.s_plus.data * L2 - L2 * q_uv.s_minus.data * L1;
}

namespace {

// Inverse-twist correction: the gauge g^{-1} bracketed against the
// factorized operator, dressed per the twist formula.
Matrix inverse_twist_delta(cplx a, cplx b, const PhasePoint& x,
                           const ModelParams& P) {
    const int n = P.n;
    const Matrix I = Matrix::Identity(n, n);
    auto ginv_field = [&P](cplx w) {
        phase::MatrixField F = lax::gauge_field(w, P);
        auto val = F.value;
        auto grad = F.grad;
        F.value = [val](const PhasePoint& y) { return val(y).inverse().eval(); };
        F.grad = [grad](const PhasePoint& y) {
            phase::FieldEval e = grad(y);
            Matrix inv = e.value.inverse();
            phase::FieldEval o;
            o.value = inv;
            o.dq.resize(e.dq.size());
            o.dp.resize(e.dp.size());
            for (size_t k = 0; k < e.dq.size(); ++k) {
                o.dq[k] = -inv * e.dq[k] * inv;
                o.dp[k] = Matrix::Zero(inv.rows(), inv.cols());
            }
            return o;
        };
        return F;
    };
    const Matrix W = phase::bracket_matrix(ginv_field(a), lax::factorized_field(b, P), x);
    const Matrix ga = lax::gauge_g(a, x, P);
    const Matrix gb = lax::gauge_g(b, x, P);
    return kron(I, gb.inverse()) * W * kron(ga, I) * kron(I, gb);
}

} // namespace

DynamicalQuadruple derived_quadruple(cplx u, cplx v, const PhasePoint& x,
                                     const ModelParams& P) {
    const int n = P.n;
    const Matrix I = Matrix::Identity(n, n);
    const Matrix gu = lax::gauge_g(u, x, P);
    const Matrix gv = lax::gauge_g(v, x, P);
    const Matrix Gt = kron(gu.inverse(), gv.inverse());
    const Matrix Gti = kron(gu, gv);

    const Matrix r_uv = classical_r(u - v, P).data;
    const Matrix r_vu = classical_r(v - u, P).data;
    const Matrix Gt_vu = kron(gv.inverse(), gu.inverse());
    const Matrix Gti_vu = kron(gv, gu);

    const Matrix D12 = inverse_twist_delta(u, v, x, P);
    const Matrix D21 = swap_spaces(inverse_twist_delta(v, u, x, P), n);
    const Matrix L1i = kron(lax::lax_nijhoff(u, x, P).entries.inverse(), I);
    const Matrix L2i = kron(I, lax::lax_nijhoff(v, x, P).entries.inverse());

    auto mk = [&](Matrix m, RKind kind) {
        RTensor t;
        t.data = std::move(m);
        t.u = u;
        t.v = v;
        t.kind = kind;
        t.n = n;
        return t;
    };
    DynamicalQuadruple q;
    q.r_minus = mk(Gt * r_uv * Gti, RKind::r_minus);
    q.r_plus = mk(swap_spaces(Gt_vu * r_vu * Gti_vu, n), RKind::r_plus);
    q.s_plus = mk(-(D12 * L2i) - (L1i * D21), RKind::s_plus);
    q.s_minus = mk(-(L2i * D12) - (D21 * L1i), RKind::s_minus);
    return q;
}

TwistedQuadruple twisted_quadruple(cplx u, cplx v, const PhasePoint& x,
                                   const ModelParams& P, QuadrupleSource source,
                                   S12Variant variant) {
    const int n = P.n;
    const Matrix I = Matrix::Identity(n, n);
    DynamicalQuadruple base = source == QuadrupleSource::printed
                                  ? dynamical_quadruple(u, v, x, P, variant)
                                  : derived_quadruple(u, v, x, P);

    const Matrix gu = lax::gauge_g(u, x, P);
    const Matrix gv = lax::gauge_g(v, x, P);
    const Matrix G = kron(gu, gv);
    const Matrix Gi = kron(gu.inverse(), gv.inverse());

    const Matrix Lfu_inv = lax::lax_factorized(u, x, P).entries.inverse();
    const Matrix Lfv_inv = lax::lax_factorized(v, x, P).entries.inverse();
    const Matrix L1i = kron(Lfu_inv, I);
    const Matrix L2i = kron(I, Lfv_inv);

    const Matrix D12 = twist_delta(u, v, x, P).data;
    const Matrix D21 = swap_spaces(twist_delta(v, u, x, P).data, n);

    const Matrix Dt12 = L2i * D12;        // Delta-tilde_12(u,v)
    const Matrix Dt21 = L1i * D21;        // Delta-tilde_21(v,u)
    const Matrix Dt12_1 = D12 * L2i;      // Delta-tilde^(1)_12(u,v)
    const Matrix Dt21_1 = D21 * L1i;      // Delta-tilde^(1)_21(v,u)

    auto mk = [&](Matrix m, RKind kind) {
        RTensor t;
        t.data = std::move(m);
        t.u = u;
        t.v = v;
        t.kind = kind;
        t.n = n;
        return t;
    };
    TwistedQuadruple tq;
    tq.r_minus = mk(G * base.r_minus.data * Gi, RKind::twisted);
    tq.r_plus = mk(G * base.r_plus.data * Gi, RKind::twisted);
    tq.s_plus = mk(G * base.s_plus.data * Gi - Dt21 - Dt12_1, RKind::twisted);
    tq.s_minus = mk(G * base.s_minus.data * Gi - Dt12 - Dt21_1, RKind::twisted);
    return tq;
}

} // namespace rslab::rmat
