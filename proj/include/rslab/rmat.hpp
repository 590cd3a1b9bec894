// r-matrices on the doubled space: the nondynamical classical Z_n-symmetric
// r-matrix, the Belavin quantum R-matrix, the dynamical quadruple of the
// quadratic bracket, and the gauge-twisting engine that connects them.
//
// Index convention: tensor entry (row l*n+k, col i*n+j) is the coefficient
// r^{lk}_{ij}, so e_ij (x) e_kl is the Kronecker product of matrix units and
// the permutation operator swaps the two factors.

#ifndef RSLAB_RMAT_HPP
#define RSLAB_RMAT_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "rslab/lax.hpp"

namespace rslab::rmat {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using lax::ModelParams;
using phase::PhasePoint;

enum class RKind {
    classical_r,
    quantum_R,
    a12,
    r0,
    s12,
    u_plus,
    u_minus,
    r_plus,
    r_minus,
    s_plus,
    s_minus,
    twisted
};

struct RTensor {
    Matrix data;
    cplx u{};
    cplx v{};
    RKind kind = RKind::classical_r;
    int n = 0;
};

// Kronecker product with the module index convention.
Matrix kron(const Matrix& A, const Matrix& B);
// Permutation operator P (x (x) y) = y (x) x on C^n (x) C^n.
Matrix perm_op(int n);
// P T P: both tensor legs swapped.
Matrix swap_spaces(const Matrix& T, int n);

// Embeddings into the triple space for Yang-Baxter residuals.
Matrix embed12(const Matrix& r, int n);
Matrix embed13(const Matrix& r, int n);
Matrix embed23(const Matrix& r, int n);

// Clock and shift generators, h_ij = delta_{i+1,j mod n}, g = diag(omega^i).
struct ClockShift {
    Matrix h;
    Matrix g;
    int n = 0;

    Matrix I_alpha(int a1, int a2) const; // g^{a2} h^{a1}
};
ClockShift clock_shift(int n);

// Classical Z_n-symmetric r-matrix; nonzero only for i+j = l+k mod n.
RTensor classical_r(cplx v, const ModelParams& P);

// Z_n-symmetric Belavin R-matrix with crossing parameter i*hbar.
// hbar = 0 returns the identity tensor exactly.
RTensor quantum_R(cplx v, double hbar, const ModelParams& P);
inline RTensor quantum_R(cplx v, const ModelParams& P) {
    return quantum_R(v, P.hbar, P);
}

// Least-squares log-log slope of ||R(v;h) - 1 - i h r(v)|| over the given
// hbar ladder. Slope 2 confirms the O(hbar^2) remainder.
double classical_limit_slope(cplx v, const std::vector<double>& hbars,
                             const ModelParams& P,
                             std::vector<double>* residuals_out = nullptr);

// Readings of the printed s_12(u) combination.
enum class S12Variant { a, b, c }; // L dL/dgamma, L^{-1} dL/dgamma, (dL/dgamma) L^{-1}

struct DynamicalQuadruple {
    RTensor r_plus, r_minus, s_plus, s_minus;
};

// The dynamical quadruple (r+-, s+-) built from a_12, r0_12, u+-_12 and the
// chosen s_12 reading, all at the given phase point.
DynamicalQuadruple dynamical_quadruple(cplx u, cplx v, const PhasePoint& x,
                                       const ModelParams& P,
                                       S12Variant variant = S12Variant::b,
                                       bool fd_check_dgamma = false);

// The quadruple of the Nijhoff-form operator obtained by gauge-untwisting
// the nondynamical Sklyanin structure through g(u): exact by construction,
// and the canonical input for the twisting checks.
DynamicalQuadruple derived_quadruple(cplx u, cplx v, const PhasePoint& x,
                                     const ModelParams& P);

// Twist correction Delta_12(u,v) =
//   (1/2)[{g_1,g_2} g_1^{-1} g_2^{-1}, g_2 L_2 g_2^{-1}] + g_2 {g_1,L_2} g_1^{-1} g_2^{-1},
// brackets supplied by the phase engine, L the untwisted (Nijhoff) operator.
RTensor twist_delta(cplx u, cplx v, const PhasePoint& x, const ModelParams& P,
                    const phase::BracketMethod& m = {});

// Same correction for arbitrary gauge and Lax fields (the model-specific
// overload wires in g(u) and the Nijhoff operator).
Matrix twist_delta_general(const phase::MatrixField& g1,
                           const phase::MatrixField& g2,
                           const phase::MatrixField& L,
                           const PhasePoint& x, int n,
                           const phase::BracketMethod& m = {});

// Right-hand side of the quadratic bracket form,
//   L1 L2 r^- - P r^+(v,u) P L1 L2 + L1 s^+ L2 - L2 s^- L1,
// assembled from the quadruple at (u,v) and at the swapped arguments.
Matrix quadratic_bracket_rhs(const Matrix& Lu, const Matrix& Lv,
                             const DynamicalQuadruple& q_uv,
                             const DynamicalQuadruple& q_vu, int n);

enum class QuadrupleSource { printed, derived };

struct TwistedQuadruple {
    RTensor r_plus, r_minus, s_plus, s_minus;
};

// Gauge twist of a quadruple of the Nijhoff operator into the factorized
// representation:
//   r~+- = G r+- G^{-1},
//   s~+  = G s+ G^{-1} - Delta~_21(v,u) - Delta~^(1)_12(u,v),
//   s~-  = G s- G^{-1} - Delta~_12(u,v) - Delta~^(1)_21(v,u),
// with Delta~_12 = L2^{-1} Delta_12 and Delta~^(1)_12 = Delta_12 L2^{-1} on
// the twisted operator. The r-slots carry no Delta corrections: that
// distribution is the one that closes the twisted bracket identically
// (see the twist unit tests for the numerical comparison).
TwistedQuadruple twisted_quadruple(cplx u, cplx v, const PhasePoint& x,
                                   const ModelParams& P,
                                   QuadrupleSource source = QuadrupleSource::derived,
                                   S12Variant variant = S12Variant::b);

} // namespace rslab::rmat

#endif
