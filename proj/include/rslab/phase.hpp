// Canonical phase space and the Poisson-bracket engine for matrix-valued
// observables, plus the momentum-shift Poisson map and the symplectic
// Jacobian residual.
//
// Positions are real. Momenta are stored complex: the Poisson map shifts p
// by a principal logarithm that may pick up an imaginary part, and every
// downstream formula depends on p only through e^p. Brackets differentiate
// along the real q- and p-directions.

#ifndef RSLAB_PHASE_HPP
#define RSLAB_PHASE_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "rslab/elliptic.hpp"
#include "rslab/errors.hpp"
#include "rslab/rng.hpp"

namespace rslab::phase {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

struct PhasePoint {
    Eigen::VectorXd q;
    Eigen::VectorXcd p;

    int n() const { return static_cast<int>(q.size()); }
};

// Gradient of a scalar observable: (d/dq_k, d/dp_k), k = 1..n.
struct Gradient {
    Eigen::VectorXcd dq;
    Eigen::VectorXcd dp;
};

struct Observable {
    std::function<cplx(const PhasePoint&)> evaluator;
    std::optional<std::function<Gradient(const PhasePoint&)>> analytic_grad;
};

enum class BracketMode { analytic, finite_difference, cross_check };

struct BracketMethod {
    BracketMode mode = BracketMode::analytic;
    double fd_step = 1e-5;
    bool richardson = true;
    double cross_tol = 1e-6;
};

// Matrix-valued observable with batch evaluation of all entries and, when
// available, of all entry gradients at once.
struct FieldEval {
    Matrix value;
    std::vector<Matrix> dq; // dq[k](i,j) = d F^i_j / d q_k
    std::vector<Matrix> dp;
};

struct MatrixField {
    int n = 0;
    std::function<Matrix(const PhasePoint&)> value;
    std::function<FieldEval(const PhasePoint&)> grad; // empty => FD only

    Observable entry(int i, int j) const;
};

// Central finite-difference gradient of a scalar observable, with one
// optional Richardson extrapolation level.
Gradient fd_gradient(const Observable& f, const PhasePoint& x, double step,
                     bool richardson);

// Canonical bracket {f,g} = sum_k (df/dq_k dg/dp_k - df/dp_k dg/dq_k).
cplx poisson_bracket(const Observable& f, const Observable& g,
                     const PhasePoint& x, const BracketMethod& m = {});

// Doubled-space tensor {F_1, G_2}: entry (rho*n+delta, alpha*n+beta) holds
// {F^rho_alpha, G^delta_beta}.
Matrix bracket_matrix(const std::vector<std::vector<Observable>>& F,
                      const std::vector<std::vector<Observable>>& G,
                      const PhasePoint& x, const BracketMethod& m = {});
Matrix bracket_matrix(const MatrixField& F, const MatrixField& G,
                      const PhasePoint& x, const BracketMethod& m = {});

// p_i -> p_i + (1/2) ln prod_{k != i} sigma(q_ik + gamma)/sigma(q_ik - gamma),
// q unchanged. Principal logarithm; the shift may be complex.
PhasePoint poisson_map(const PhasePoint& x, cplx gamma,
                       const elliptic::ModularParam& tau,
                       const elliptic::SeriesControl& ctl = {});

// || J^T Omega J - Omega ||_F from the finite-difference Jacobian of `map`.
double symplectic_residual(
    const std::function<PhasePoint(const PhasePoint&)>& map,
    const PhasePoint& x, double step = 1e-5);

// Seeded generic-position draw: sorted q with a minimum pairwise separation
// inside (0,1), p real in [-1,1].
PhasePoint draw_phase_point(int n, Rng& rng);

// Spectral pair in pole-avoiding boxes: |u - v| >= 0.05 and both arguments
// away from lattice zeros.
std::pair<cplx, cplx> draw_spectral_pair(Rng& rng);

} // namespace rslab::phase

#endif
