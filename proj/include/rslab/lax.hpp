// Lax operators of the elliptic Ruijsenaars-Schneider model.
//
// Three equivalent representations are built:
//   - Ruijsenaars form, with square-root pair products,
//   - the Nijhoff-style form without roots,
//   - the factorized form (1/sigma(gamma)) A(u+n gamma) diag(e^p) A(u)^{-1}
//     with the theta intertwiner A(u;q)^i_j = theta_j-type entries at
//     shifted arguments,
// plus the non-relativistic (Calogero-Moser) first-order coefficient.
//
// Matrix fields carry analytic phase-space gradients so the bracket engine
// can verify the r-matrix structures at tight tolerances.

#ifndef RSLAB_LAX_HPP
#define RSLAB_LAX_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "rslab/elliptic.hpp"
#include "rslab/errors.hpp"
#include "rslab/phase.hpp"

namespace rslab::lax {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using phase::MatrixField;
using phase::PhasePoint;

struct ModelParams {
    int n;
    elliptic::ModularParam tau;
    cplx gamma;
    double hbar = 0.1;
    double mc2 = 1.0;
    elliptic::SeriesControl series{};

    ModelParams(int n_, elliptic::ModularParam tau_, cplx gamma_,
                double hbar_ = 0.1, double mc2_ = 1.0)
        : n(n_), tau(tau_), gamma(gamma_), hbar(hbar_), mc2(mc2_) {
        if (n < 2 || n > 8)
            throw ValidationError("ModelParams: n must lie in [2,8]");
    }
};

enum class LaxKind { Ruijsenaars, Nijhoff, Factorized, CM };

struct LaxMatrix {
    Matrix entries;
    cplx u{};
    LaxKind kind = LaxKind::Ruijsenaars;
};

// Intertwiner A(u;q)^i_j = theta^{(i)}(u + n q_j - sum_k q_k + (n-1)/2),
// rows indexed by the theta characteristic. `deriv` selects the entrywise
// u-derivative order (the q-derivatives reduce to it by the chain rule).
Matrix intertwiner_A(cplx u, const PhasePoint& x, const ModelParams& P,
                     int deriv = 0);
// Same, at explicitly complex positions (used by shifted-argument checks).
Matrix intertwiner_A(cplx u, const Eigen::VectorXcd& q, const ModelParams& P,
                     int deriv = 0);

// g(u) = A(u;q) Lambda(q), Lambda = diag(h_i), h_i = 1/prod_{l != i} sigma(q_il).
Matrix gauge_g(cplx u, const PhasePoint& x, const ModelParams& P);

LaxMatrix lax_ruijsenaars(cplx u, const PhasePoint& x, const ModelParams& P);
LaxMatrix lax_nijhoff(cplx u, const PhasePoint& x, const ModelParams& P);
// Factorized form; records the reciprocal condition estimate of A(u;q) if
// `rcond_out` is given, and throws IllConditioned below 1e-12.
LaxMatrix lax_factorized(cplx u, const PhasePoint& x, const ModelParams& P,
                         double* rcond_out = nullptr);

// d/dgamma of the Nijhoff operator, analytic via the theta chain rule.
// When `fd_check` is set the value is cross-checked against a Richardson
// finite difference in gamma and DerivativeMismatch is thrown on conflict.
Matrix dgamma_nijhoff(cplx u, const PhasePoint& x, const ModelParams& P,
                      bool fd_check = false);

// Matrix fields (value + analytic gradients) for the bracket engine.
MatrixField nijhoff_field(cplx u, const ModelParams& P);
MatrixField factorized_field(cplx u, const ModelParams& P);
MatrixField ruijsenaars_field(cplx u, const ModelParams& P);
MatrixField gauge_field(cplx u, const ModelParams& P);
MatrixField cm_field(cplx u, double s, const ModelParams& P);

// Vandermonde-type determinant identity for det[theta^{(j)}(u_k)].
// The constant is pinned at a fixed base tuple; the residual is
// |det/RHS - 1| at `u_list`.
cplx vandermonde_const(const std::vector<cplx>& base, const ModelParams& P);
double vandermonde_check(const std::vector<cplx>& u_list, const ModelParams& P);

// H = mc^2 sum_j cosh(p_j) prod_{k != j} {sigma(q_jk+gamma) sigma(q_jk-gamma)
//     / sigma^2(q_jk)}^(1/2), principal square root of the full product.
cplx hamiltonian(const PhasePoint& x, const ModelParams& P);
phase::Observable hamiltonian_observable(const ModelParams& P);

// tr L(u)^l of the factorized operator (or of a chosen representation).
cplx trace_power(cplx u, int l, const PhasePoint& x, const ModelParams& P);
phase::Observable trace_power_observable(cplx u, int l, const ModelParams& P,
                                         LaxKind kind = LaxKind::Factorized);

// Calogero-Moser operator: the first-order coefficient of the rescaled
// factorized Lax operator after the canonical momentum shift
// p'_i -> p'_i - (s/n) d/dq_i ln prod_{i<j} sigma(q_ij).
LaxMatrix lax_cm(cplx u, const PhasePoint& x_prime, double s,
                 const ModelParams& P);
// Limit-based evaluator -(L'(u) - 1)/beta at finite beta, for cross-checks.
LaxMatrix lax_cm_limit(cplx u, const PhasePoint& x_prime, double s, double beta,
                       const ModelParams& P);
// Shifted momenta entering both evaluators.
Eigen::VectorXcd cm_shifted_momenta(const PhasePoint& x_prime, double s,
                                    const ModelParams& P);

// Pair-potential weight prod_{k != j} {...}^(1/2) shared by the Ruijsenaars
// operator and the Hamiltonian. Empty products give 1.
cplx rs_weight(int j, const Eigen::VectorXd& q, cplx gamma,
               const elliptic::ModularParam& tau,
               const elliptic::SeriesControl& ctl);

} // namespace rslab::lax

#endif
