// Residual checks: every identity is assembled with the left side from the
// bracket engine and the right side from tensor algebra (disjoint code
// paths), and reported as absolute plus relative Frobenius residuals.

#ifndef RSLAB_VERIFY_HPP
#define RSLAB_VERIFY_HPP

#include <vector>

#include "rslab/config.hpp"
#include "rslab/lax.hpp"
#include "rslab/report.hpp"
#include "rslab/rmat.hpp"

namespace rslab::verify {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using lax::ModelParams;
using phase::PhasePoint;

// {L_1(u), L_2(v)} = [L_1 L_2, r_12(u-v)] for the factorized operator.
ResidualReport check_sklyanin(cplx u, cplx v, const PhasePoint& x,
                              const ModelParams& P,
                              const phase::BracketMethod& m = {});

// Same residual with a caller-supplied tensor in place of the r-matrix
// (exposes the commutator structure: adding multiples of the identity
// tensor must not change the residual).
double sklyanin_residual(const Matrix& r_tensor, cplx u, cplx v,
                         const PhasePoint& x, const ModelParams& P,
                         const phase::BracketMethod& m = {});

// Quadratic bracket with the dynamical quadruple, one s_12 reading.
ResidualReport check_dynamical_quadratic(cplx u, cplx v, const PhasePoint& x,
                                         const ModelParams& P,
                                         rmat::S12Variant variant,
                                         const phase::BracketMethod& m = {});
// Sweep over the readings; reports the minimizing one, with the per-variant
// residuals and the discrimination ratio in the notes.
ResidualReport check_dynamical_quadratic_auto(cplx u, cplx v,
                                              const PhasePoint& x,
                                              const ModelParams& P,
                                              const phase::BracketMethod& m = {});

// Skew conditions of the dynamical quadruple.
ResidualReport check_skew_conditions(cplx u, cplx v, const PhasePoint& x,
                                     const ModelParams& P,
                                     rmat::S12Variant variant = rmat::S12Variant::b);

// {L_CM,1(u), L_CM,2(v)} = [L_CM,1 + L_CM,2, r_12(u-v)].
ResidualReport check_linear_cm(cplx u, cplx v, const PhasePoint& x_prime,
                               double s, const ModelParams& P,
                               const phase::BracketMethod& m = {});

// Appendix algebraic relation: [r_12(u-v), L_1 L_2] against the double sum
// of intertwiner products with analytic q-derivatives.
ResidualReport check_lemma1(cplx u, cplx v, const PhasePoint& x,
                            const ModelParams& P);

// Finite-shift exchange identity T(i,j) = G(i,j) with the Belavin R-matrix.
ResidualReport check_tg_identity(cplx u, cplx v, const PhasePoint& x,
                                 double hbar, const ModelParams& P);

// |{tr L^l(u), tr L^m(v)}|.
ResidualReport check_involution(cplx u, cplx v, int l, int m,
                                const PhasePoint& x, const ModelParams& P);

// |{H, tr L^l(u)}|.
ResidualReport check_hamiltonian_involution(cplx u, int l, const PhasePoint& x,
                                            const ModelParams& P);

// Factorization, Poisson map, Vandermonde, r/R structure checks.
ResidualReport check_prop3(cplx u, const PhasePoint& x, const ModelParams& P);
ResidualReport check_poisson_map(const PhasePoint& x, const ModelParams& P);
ResidualReport check_vandermonde(const ModelParams& P, Rng& rng, int tuples = 20);
ResidualReport check_cm_limit_slope(cplx u, const PhasePoint& x_prime, double s,
                                    const ModelParams& P);
ResidualReport check_cybe(cplx v1, cplx v2, cplx v3, const ModelParams& P);
ResidualReport check_qybe(cplx v1, cplx v2, cplx v3, const ModelParams& P);
ResidualReport check_r_antisymmetry(cplx v, const ModelParams& P);
ResidualReport check_zn_symmetry_r(cplx v, const ModelParams& P);
ResidualReport check_zn_symmetry_R(cplx v, const ModelParams& P);
ResidualReport check_classical_limit(cplx v, const ModelParams& P);

// Corollary-1 conditions via the twist engine on the derived quadruple:
// vanishing of the twisted s-tensors, phase-point independence of the
// common r-assembly, and its agreement with the classical r-matrix.
std::vector<ResidualReport> check_corollary1(cplx u, cplx v,
                                             const std::vector<PhasePoint>& xs,
                                             const ModelParams& P);

// Executes all enabled checks over the configured (n, seed, point) grid.
// Child errors become failed reports; the order is deterministic.
std::vector<ResidualReport> run_suite(const config::ScenarioConfig& cfg);

} // namespace rslab::verify

#endif
