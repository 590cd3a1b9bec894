// Theta functions with characteristics, evaluated by truncated series.
//
// Conventions:
//
//   theta[a;b](z, tau) = sum_m exp{ i pi [ (m+a)^2 tau + 2 (m+a) (z+b) ] },
//   sigma(u)      = theta[1/2;1/2](u, tau),
//   theta_j(u)    = theta[1/2 - j/n; 1/2](u, n tau),
//   xi(u)         = sigma'(u) / sigma(u),
//
// with Im(tau) > 0. sigma here is the theta-function "sigma", not the
// Weierstrass one. The truncation window is symmetric in m+a; every value
// carries an a-posteriori geometric tail bound. Arguments with a large
// imaginary part are reduced into the fundamental cell by the exact
// quasi-periodicity factors
//
//   theta[a;b](z+1)   = exp(2 pi i a) theta[a;b](z),
//   theta[a;b](z+tau) = exp(-i pi (tau + 2z + 2b)) theta[a;b](z),
//
// so the series itself is only ever summed near the peak of the Gaussian.

#ifndef RSLAB_ELLIPTIC_HPP
#define RSLAB_ELLIPTIC_HPP

#include <complex>

#include "rslab/errors.hpp"

namespace rslab::elliptic {

using cplx = std::complex<double>;

// Characteristics (a, b) of theta[a;b]. Integer shifts of `a` leave the
// value unchanged; shifts of `b` multiply it by a phase.
struct ThetaChar {
    double a = 0.0;
    double b = 0.0;
};

// Modular parameter with Im(tau) > 0 enforced at construction.
class ModularParam {
  public:
    explicit ModularParam(cplx tau) : tau_(tau) {
        if (!(tau.imag() > 0.0))
            throw InvalidModulus("modular parameter requires Im(tau) > 0");
    }
    cplx value() const { return tau_; }
    double im() const { return tau_.imag(); }

  private:
    cplx tau_;
};

struct SeriesControl {
    int max_terms = 4000;      // hard budget on summed terms
    double tail_tol = 1e-12;   // required tail bound, relative above unit scale
};

// Value plus the a-posteriori bound on the discarded tail.
struct SeriesValue {
    cplx value{};
    double tail_bound = 0.0;
};

SeriesValue theta_char_full(ThetaChar ch, cplx z, const ModularParam& tau,
                            const SeriesControl& ctl = {});
SeriesValue d_theta_char_full(ThetaChar ch, cplx z, const ModularParam& tau,
                              const SeriesControl& ctl = {});
SeriesValue d2_theta_char_full(ThetaChar ch, cplx z, const ModularParam& tau,
                               const SeriesControl& ctl = {});

cplx theta_char(ThetaChar ch, cplx z, const ModularParam& tau,
                const SeriesControl& ctl = {});
cplx d_theta_char(ThetaChar ch, cplx z, const ModularParam& tau,
                  const SeriesControl& ctl = {});

cplx sigma(cplx u, const ModularParam& tau, const SeriesControl& ctl = {});
cplx d_sigma(cplx u, const ModularParam& tau, const SeriesControl& ctl = {});
cplx d2_sigma(cplx u, const ModularParam& tau, const SeriesControl& ctl = {});

// theta_j at modulus n*tau; j is reduced mod n before use.
cplx theta_j(int j, cplx u, int n, const ModularParam& tau,
             const SeriesControl& ctl = {});
cplx d_theta_j(int j, cplx u, int n, const ModularParam& tau,
               const SeriesControl& ctl = {});
cplx d2_theta_j(int j, cplx u, int n, const ModularParam& tau,
                const SeriesControl& ctl = {});

// Log-derivative of sigma. Throws PoleAtLatticePoint when |sigma(u)| falls
// below the pole floor: huge finite values would silently corrupt bracket
// residuals downstream.
cplx xi(cplx u, const ModularParam& tau, const SeriesControl& ctl = {},
        double pole_floor = 1e-10);

// xi'(u) = sigma''/sigma - xi^2, same pole contract as xi.
cplx xi_prime(cplx u, const ModularParam& tau, const SeriesControl& ctl = {},
              double pole_floor = 1e-10);

} // namespace rslab::elliptic

#endif
