#include "rslab/elliptic.hpp"

#include <algorithm>
#include <cmath>

namespace rslab::elliptic {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx kI{0.0, 1.0};

struct RawSeries {
    cplx v0{}, v1{}, v2{};   // value, d/dz, d^2/dz^2
    double tail0 = 0.0, tail1 = 0.0, tail2 = 0.0;
};

// Sum the series at a reduced argument. The window |m+a| <= M is chosen
// from the a-priori Gaussian bound, then the reported tail is the edge-term
// geometric bound. Terms decay like exp(-pi Im(tau) (m+a)^2), so M stays
// small for Im(tau) >= 0.3.
RawSeries sum_raw(double a, double b, cplx z, cplx tau,
                  const SeriesControl& ctl) {
    const double imt = tau.imag();
    const double peak = std::abs(z.imag()) / imt; // |m+a| where terms peak
    const double target = std::max(ctl.tail_tol * 1e-3, 1e-300);
    const double m_from_tol =
        peak + std::sqrt(peak * peak + std::log(4.0 / target) / (kPi * imt));
    const int window = static_cast<int>(std::ceil(m_from_tol)) + 2;

    const int lo = static_cast<int>(std::floor(-a - window));
    const int hi = static_cast<int>(std::ceil(-a + window));
    if (hi - lo + 1 > ctl.max_terms)
        throw NonConvergent("theta series window exceeds max_terms");

    RawSeries r;
    double edge = 0.0;
    for (int m = lo; m <= hi; ++m) {
        const double t = m + a;
        const cplx term = std::exp(kI * kPi * (t * t * tau + 2.0 * t * (z + b)));
        const cplx f = 2.0 * kPi * kI * t;
        r.v0 += term;
        r.v1 += f * term;
        r.v2 += f * f * term;
        if (m == lo || m == hi) edge = std::max(edge, std::abs(term));
    }

    // ratio of consecutive term magnitudes beyond the window
    const double ratio =
        std::exp(-kPi * imt * (2.0 * window - 1.0) + 2.0 * kPi * std::abs(z.imag()));
    if (ratio >= 0.5) throw NonConvergent("theta series tail ratio >= 1/2");
    r.tail0 = 2.0 * edge * ratio / (1.0 - ratio);
    const double fac = 2.0 * kPi * (window + std::abs(a) + 2.0);
    r.tail1 = r.tail0 * fac;
    r.tail2 = r.tail0 * fac * fac;
    return r;
}

// Full evaluation with argument reduction: z = z_red + k*tau + m_re, where
// theta(z) = exp(2 pi i a m_re) exp(-i pi (k^2 tau + 2 k (z_red + b))) theta(z_red).
// Derivatives pick up the -2 pi i k cross terms from the tau-shift factor.
RawSeries eval(double a, double b, cplx z, cplx tau, const SeriesControl& ctl) {
    const double imt = tau.imag();
    long k = 0;
    if (std::abs(z.imag()) > imt)
        k = std::lround(z.imag() / imt);
    cplx zr = z - static_cast<double>(k) * tau;
    long mre = 0;
    if (std::abs(zr.real()) > 1.0)
        mre = std::lround(zr.real());
    zr -= static_cast<double>(mre);

    RawSeries raw = sum_raw(a, b, zr, tau, ctl);
    if (k == 0 && mre == 0) return raw;

    const double kd = static_cast<double>(k);
    const cplx pref = std::exp(2.0 * kPi * kI * a * static_cast<double>(mre)) *
                      std::exp(-kI * kPi * (kd * kd * tau + 2.0 * kd * (zr + b)));
    const cplx s = -2.0 * kPi * kI * kd; // d/dz of the shift factor's exponent
    RawSeries out;
    out.v0 = pref * raw.v0;
    out.v1 = pref * (raw.v1 + s * raw.v0);
    out.v2 = pref * (raw.v2 + 2.0 * s * raw.v1 + s * s * raw.v0);
    const double pm = std::abs(pref);
    const double sm = std::abs(s);
    out.tail0 = pm * raw.tail0;
    out.tail1 = pm * (raw.tail1 + sm * raw.tail0);
    out.tail2 = pm * (raw.tail2 + 2.0 * sm * raw.tail1 + sm * sm * raw.tail0);
    return out;
}

SeriesValue checked(cplx v, double tail, const SeriesControl& ctl) {
    if (tail > ctl.tail_tol * std::max(1.0, std::abs(v)))
        throw NonConvergent("theta series tail bound above tail_tol");
    return {v, tail};
}

ThetaChar char_j(int j, int n) {
    int jr = j % n;
    if (jr < 0) jr += n;
    return {0.5 - static_cast<double>(jr) / n, 0.5};
}

} // namespace

SeriesValue theta_char_full(ThetaChar ch, cplx z, const ModularParam& tau,
                            const SeriesControl& ctl) {
    RawSeries r = eval(ch.a, ch.b, z, tau.value(), ctl);
    return checked(r.v0, r.tail0, ctl);
}

SeriesValue d_theta_char_full(ThetaChar ch, cplx z, const ModularParam& tau,
                              const SeriesControl& ctl) {
    RawSeries r = eval(ch.a, ch.b, z, tau.value(), ctl);
    return checked(r.v1, r.tail1, ctl);
}

SeriesValue d2_theta_char_full(ThetaChar ch, cplx z, const ModularParam& tau,
                               const SeriesControl& ctl) {
    RawSeries r = eval(ch.a, ch.b, z, tau.value(), ctl);
    return checked(r.v2, r.tail2, ctl);
}

cplx theta_char(ThetaChar ch, cplx z, const ModularParam& tau,
                const SeriesControl& ctl) {
    return theta_char_full(ch, z, tau, ctl).value;
}

cplx d_theta_char(ThetaChar ch, cplx z, const ModularParam& tau,
                  const SeriesControl& ctl) {
    return d_theta_char_full(ch, z, tau, ctl).value;
}

cplx sigma(cplx u, const ModularParam& tau, const SeriesControl& ctl) {
    return theta_char({0.5, 0.5}, u, tau, ctl);
}

cplx d_sigma(cplx u, const ModularParam& tau, const SeriesControl& ctl) {
    return d_theta_char({0.5, 0.5}, u, tau, ctl);
}

cplx d2_sigma(cplx u, const ModularParam& tau, const SeriesControl& ctl) {
    return d2_theta_char_full({0.5, 0.5}, u, tau, ctl).value;
}

cplx theta_j(int j, cplx u, int n, const ModularParam& tau,
             const SeriesControl& ctl) {
    ModularParam ntau(static_cast<double>(n) * tau.value());
    return theta_char(char_j(j, n), u, ntau, ctl);
}

cplx d_theta_j(int j, cplx u, int n, const ModularParam& tau,
               const SeriesControl& ctl) {
    ModularParam ntau(static_cast<double>(n) * tau.value());
    return d_theta_char(char_j(j, n), u, ntau, ctl);
}

cplx d2_theta_j(int j, cplx u, int n, const ModularParam& tau,
                const SeriesControl& ctl) {
    ModularParam ntau(static_cast<double>(n) * tau.value());
    return d2_theta_char_full(char_j(j, n), u, ntau, ctl).value;
}

cplx xi(cplx u, const ModularParam& tau, const SeriesControl& ctl,
        double pole_floor) {
    const cplx s = sigma(u, tau, ctl);
    if (std::abs(s) < pole_floor)
        throw PoleAtLatticePoint("xi evaluated at a lattice zero of sigma");
    return d_sigma(u, tau, ctl) / s;
}

cplx xi_prime(cplx u, const ModularParam& tau, const SeriesControl& ctl,
              double pole_floor) {
    const cplx s = sigma(u, tau, ctl);
    if (std::abs(s) < pole_floor)
        throw PoleAtLatticePoint("xi' evaluated at a lattice zero of sigma");
    const cplx x = d_sigma(u, tau, ctl) / s;
    return d2_sigma(u, tau, ctl) / s - x * x;
}

} // namespace rslab::elliptic
