#pragma once

// Reference computations written independently of the library code paths.

#include <cmath>
#include <complex>
#include <numbers>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline const cplx I{0.0, 1.0};

// prod_{n < count} (1 - a b^n), plain multiplication
inline cplx finite_poch(cplx a, cplx b, int count) {
  cplx p = 1.0, x = a;
  for (int n = 0; n < count; ++n, x *= b) p *= 1.0 - x;
  return p;
}

// Euler pentagonal series for (x; x)_inf
inline cplx euler_pentagonal(cplx x, int terms = 60) {
  cplx s = 1.0;
  for (int k = 1; k <= terms; ++k) {
    const double sign = (k % 2) ? -1.0 : 1.0;
    s += sign * (std::pow(x, k * (3 * k - 1) / 2) + std::pow(x, k * (3 * k + 1) / 2));
  }
  return s;
}

// gamma(z) as the plain ratio of truncated products; valid away from the lattice and for
// moderate |z|, where no cancellation occurs.
inline cplx gamma_naive(cplx z, cplx tau, int count = 400) {
  const cplx num = finite_poch(std::exp(-2.0 * pi * I * (z - tau)), std::exp(2.0 * pi * I * tau), count);
  const cplx den = finite_poch(std::exp(-2.0 * pi * I * z / tau), std::exp(-2.0 * pi * I / tau), count);
  return num / den;
}

// omega-frame gamma through the change of variables to the tau frame
inline cplx gamma_omega_naive(cplx z, double theta, double hbar) {
  const double r = std::sqrt(pi * hbar / 2.0);
  const cplx w = std::polar(r, (pi - theta) / 2.0);
  const cplx wp = std::polar(r, (pi + theta) / 2.0);
  return gamma_naive((z + w + wp) / (2.0 * w), wp / w);
}

// eta(i) = Gamma(1/4) / (2 pi^{3/4})
inline double eta_i() { return std::tgamma(0.25) / (2.0 * std::pow(pi, 0.75)); }

}  // namespace oracle
