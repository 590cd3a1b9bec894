#include "rslab/phase.hpp"

#include <algorithm>
#include <cmath>

namespace rslab::phase {

namespace {

PhasePoint shift_q(const PhasePoint& x, int k, double h) {
    PhasePoint y = x;
    y.q[k] += h;
    return y;
}

PhasePoint shift_p(const PhasePoint& x, int k, double h) {
    PhasePoint y = x;
    y.p[k] += h;
    return y;
}

cplx central(const std::function<cplx(const PhasePoint&)>& f,
             const PhasePoint& plus, const PhasePoint& minus, double h) {
    return (f(plus) - f(minus)) / (2.0 * h);
}

} // namespace

Observable MatrixField::entry(int i, int j) const {
    Observable o;
    auto v = value;
    o.evaluator = [v, i, j](const PhasePoint& x) { return v(x)(i, j); };
    if (grad) {
        auto g = grad;
        o.analytic_grad = [g, i, j](const PhasePoint& x) {
            FieldEval e = g(x);
            const int n = x.n();
            Gradient out;
            out.dq.resize(n);
            out.dp.resize(n);
            for (int k = 0; k < n; ++k) {
                out.dq[k] = e.dq[k](i, j);
                out.dp[k] = e.dp[k](i, j);
            }
            return out;
        };
    }
    return o;
}

Gradient fd_gradient(const Observable& f, const PhasePoint& x, double step,
                     bool richardson) {
    const int n = x.n();
    Gradient g;
    g.dq.resize(n);
    g.dp.resize(n);
    for (int k = 0; k < n; ++k) {
        cplx dq = central(f.evaluator, shift_q(x, k, step), shift_q(x, k, -step), step);
        cplx dp = central(f.evaluator, shift_p(x, k, step), shift_p(x, k, -step), step);
        if (richardson) {
            const double h2 = step / 2.0;
            cplx dq2 = central(f.evaluator, shift_q(x, k, h2), shift_q(x, k, -h2), h2);
            cplx dp2 = central(f.evaluator, shift_p(x, k, h2), shift_p(x, k, -h2), h2);
            dq = (4.0 * dq2 - dq) / 3.0;
            dp = (4.0 * dp2 - dp) / 3.0;
        }
        g.dq[k] = dq;
        g.dp[k] = dp;
    }
    return g;
}

namespace {

cplx bracket_from(const Gradient& f, const Gradient& g) {
    cplx s{};
    for (int k = 0; k < f.dq.size(); ++k)
        s += f.dq[k] * g.dp[k] - f.dp[k] * g.dq[k];
    return s;
}

} // namespace

cplx poisson_bracket(const Observable& f, const Observable& g,
                     const PhasePoint& x, const BracketMethod& m) {
    auto analytic = [&]() {
        if (!f.analytic_grad || !g.analytic_grad)
            throw std::invalid_argument("analytic bracket requested without analytic gradients");
        return bracket_from((*f.analytic_grad)(x), (*g.analytic_grad)(x));
    };
    auto fd = [&]() {
        return bracket_from(fd_gradient(f, x, m.fd_step, m.richardson),
                            fd_gradient(g, x, m.fd_step, m.richardson));
    };
    switch (m.mode) {
        case BracketMode::analytic: return analytic();
        case BracketMode::finite_difference: return fd();
        case BracketMode::cross_check: {
            cplx a = analytic();
            cplx b = fd();
            if (std::abs(a - b) > m.cross_tol * std::max(1.0, std::abs(a)))
                throw DerivativeMismatch("analytic and finite-difference brackets disagree");
            return a;
        }
    }
    return {};
}

Matrix bracket_matrix(const std::vector<std::vector<Observable>>& F,
                      const std::vector<std::vector<Observable>>& G,
                      const PhasePoint& x, const BracketMethod& m) {
    const int nF = static_cast<int>(F.size());
    const int nG = static_cast<int>(G.size());
    if (nF != nG) throw std::invalid_argument("bracket_matrix requires equal dimensions");
    Matrix T = Matrix::Zero(nF * nG, nF * nG);
    for (int r = 0; r < nF; ++r)
        for (int a = 0; a < nF; ++a)
            for (int d = 0; d < nG; ++d)
                for (int b = 0; b < nG; ++b)
                    T(r * nG + d, a * nG + b) = poisson_bracket(F[r][a], G[d][b], x, m);
    return T;
}

namespace {

// Batch gradients of every entry of a matrix field by finite differences:
// one matrix evaluation per perturbed point.
FieldEval fd_field_gradients(const MatrixField& F, const PhasePoint& x,
                             double step, bool richardson) {
    const int n = x.n();
    FieldEval e;
    e.value = F.value(x);
    e.dq.resize(n);
    e.dp.resize(n);
    auto diff = [&](auto shifter, int k) {
        Matrix d = (F.value(shifter(x, k, step)) - F.value(shifter(x, k, -step))) / (2.0 * step);
        if (richardson) {
            const double h2 = step / 2.0;
            Matrix d2 = (F.value(shifter(x, k, h2)) - F.value(shifter(x, k, -h2))) / (2.0 * h2);
            d = (4.0 * d2 - d) / 3.0;
        }
        return d;
    };
    for (int k = 0; k < n; ++k) {
        e.dq[k] = diff([](const PhasePoint& y, int kk, double h) { return shift_q(y, kk, h); }, k);
        e.dp[k] = diff([](const PhasePoint& y, int kk, double h) { return shift_p(y, kk, h); }, k);
    }
    return e;
}

Matrix contract(const FieldEval& f, const FieldEval& g, int n, int nn) {
    Matrix T = Matrix::Zero(nn * nn, nn * nn);
    for (int r = 0; r < nn; ++r)
        for (int a = 0; a < nn; ++a)
            for (int d = 0; d < nn; ++d)
                for (int b = 0; b < nn; ++b) {
                    cplx s{};
                    for (int k = 0; k < n; ++k)
                        s += f.dq[k](r, a) * g.dp[k](d, b) - f.dp[k](r, a) * g.dq[k](d, b);
                    T(r * nn + d, a * nn + b) = s;
                }
    return T;
}

} // namespace

Matrix bracket_matrix(const MatrixField& F, const MatrixField& G,
                      const PhasePoint& x, const BracketMethod& m) {
    const int n = x.n();
    if (F.n != G.n) throw std::invalid_argument("bracket_matrix requires equal dimensions");
    auto analytic = [&]() {
        if (!F.grad || !G.grad)
            throw std::invalid_argument("analytic bracket_matrix requires field gradients");
        return contract(F.grad(x), G.grad(x), n, F.n);
    };
    auto fd = [&]() {
        return contract(fd_field_gradients(F, x, m.fd_step, m.richardson),
                        fd_field_gradients(G, x, m.fd_step, m.richardson), n, F.n);
    };
    switch (m.mode) {
        case BracketMode::analytic: return analytic();
        case BracketMode::finite_difference: return fd();
        case BracketMode::cross_check: {
            Matrix a = analytic();
            Matrix b = fd();
            double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
            if ((a - b).cwiseAbs().maxCoeff() > m.cross_tol * scale)
                throw DerivativeMismatch("analytic and finite-difference bracket tensors disagree");
            return a;
        }
    }
    return {};
}

PhasePoint poisson_map(const PhasePoint& x, cplx gamma,
                       const elliptic::ModularParam& tau,
                       const elliptic::SeriesControl& ctl) {
    const int n = x.n();
    PhasePoint y = x;
    for (int i = 0; i < n; ++i) {
        cplx prod{1.0, 0.0};
        for (int k = 0; k < n; ++k) {
            if (k == i) continue;
            const double qik = x.q[i] - x.q[k];
            const cplx num = elliptic::sigma(qik + gamma, tau, ctl);
            const cplx den = elliptic::sigma(qik - gamma, tau, ctl);
            if (std::abs(num) < 1e-10 || std::abs(den) < 1e-10)
                throw SingularConfiguration("poisson_map: sigma(q_ik +/- gamma) vanishes");
            prod *= num / den;
        }
        y.p[i] += 0.5 * std::log(prod);
    }
    return y;
}

double symplectic_residual(
    const std::function<PhasePoint(const PhasePoint&)>& map,
    const PhasePoint& x, double step) {
    const int n = x.n();
    const int d = 2 * n;
    Matrix J(d, d);
    auto column = [&](int k, bool is_q) {
        PhasePoint xp = is_q ? shift_q(x, k, step) : shift_p(x, k, step);
        PhasePoint xm = is_q ? shift_q(x, k, -step) : shift_p(x, k, -step);
        // realized difference: exact in floating point for nearby values
        const double den = is_q ? xp.q[k] - xm.q[k] : (xp.p[k] - xm.p[k]).real();
        PhasePoint yp = map(xp), ym = map(xm);
        Eigen::VectorXcd col(d);
        for (int i = 0; i < n; ++i) {
            col[i] = (yp.q[i] - ym.q[i]) / den;
            col[n + i] = (yp.p[i] - ym.p[i]) / den;
        }
        return col;
    };
    for (int k = 0; k < n; ++k) {
        J.col(k) = column(k, true);
        J.col(n + k) = column(k, false);
    }
    Matrix Omega = Matrix::Zero(d, d);
    for (int i = 0; i < n; ++i) {
        Omega(i, n + i) = 1.0;
        Omega(n + i, i) = -1.0;
    }
    return (J.transpose() * Omega * J - Omega).norm();
}

PhasePoint draw_phase_point(int n, Rng& rng) {
    const double sep = n <= 5 ? 0.15 : 0.7 / n;
    std::vector<double> q(n);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        for (auto& qi : q) qi = rng.uniform(0.03, 0.97);
        std::sort(q.begin(), q.end());
        bool ok = true;
        for (int i = 0; i + 1 < n; ++i)
            if (q[i + 1] - q[i] < sep) ok = false;
        if (ok) break;
        if (attempt == 999)
            throw SingularConfiguration("draw_phase_point: separation unattainable");
    }
    PhasePoint x;
    x.q.resize(n);
    x.p.resize(n);
    for (int i = 0; i < n; ++i) {
        x.q[i] = q[i];
        x.p[i] = rng.uniform(-1.0, 1.0);
    }
    return x;
}

std::pair<cplx, cplx> draw_spectral_pair(Rng& rng) {
    cplx u{rng.uniform(0.10, 0.40), rng.uniform(0.01, 0.12)};
    cplx v{rng.uniform(-0.40, -0.10), rng.uniform(-0.12, -0.01)};
    return {u, v};
}

} // namespace rslab::phase
