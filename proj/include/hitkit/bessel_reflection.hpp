#pragma once

// K_nu(x) through the reflection formula
//   K_nu(x) = pi/2 (I_{-nu}(x) - I_nu(x)) / sin(nu pi),
// summed in quad precision. The difference cancels roughly e^{2x} of the
// leading digits, which double precision cannot afford for x beyond ~5. Used
// as an independent route against the production Macdonald quadrature.
// Requires libquadmath.

#include <cmath>

extern "C" {
#include <quadmath.h>
}

#include "error.hpp"

namespace hitkit::sf {

namespace detail {

inline __float128 bessel_i_quad(__float128 nu, __float128 x) {
    const __float128 half = 0.5, quarter = 0.25, one = 1.0;
    __float128 q = quarter * x * x;
    __float128 term = powq(half * x, nu) / tgammaq(nu + one);
    __float128 sum = term;
    for (int k = 1; k < 2000; ++k) {
        term *= q / (k * (k + nu));
        sum += term;
        if (fabsq(term) < __float128(1e-36) * fabsq(sum)) return sum;
    }
    throw NonConvergence("bessel_i_quad: series cap reached", double(sum));
}

} // namespace detail

inline double bessel_k_reflection(double nu, double x) {
    if (!(x > 0.0)) throw DomainError("bessel_k_reflection: x must be positive");
    if (nu == std::nearbyint(nu)) throw DomainError("bessel_k_reflection: integer order is a limit");
    __float128 n = nu, xx = x;
    __float128 diff = detail::bessel_i_quad(-n, xx) - detail::bessel_i_quad(n, xx);
    const __float128 pi = acosq(__float128(-1.0));
    return double(__float128(0.5) * pi * diff / sinq(n * pi));
}

} // namespace hitkit::sf
