#include "qdilog/modular.hpp"

#include <algorithm>
#include <cmath>

#include "qdilog/errors.hpp"

namespace qdilog {

ModularParam make_modular_param(cplx tau) {
  if (!(tau.imag() > 0.0) || !std::isfinite(tau.real()) || !std::isfinite(tau.imag())) {
    throw DomainError("Im(tau) must be positive");
  }
  ModularParam mp{tau, std::exp(kI * kPi * tau), std::exp(-kI * kPi / tau)};
  if (!(std::abs(mp.q) < 1.0) || !(std::abs(mp.q_dual) < 1.0)) {
    throw DomainError("nome modulus not below one");
  }
  return mp;
}

OmegaFrame make_omega_frame(double theta, double hbar) {
  if (!(theta > 0.0 && theta < kPi)) throw DomainError("theta must lie in (0, pi)");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw DomainError("hbar must be positive");
  const double r = std::sqrt(kPi * hbar / 2.0);
  OmegaFrame f;
  f.hbar = hbar;
  f.theta = theta;
  f.tau = std::polar(1.0, theta);
  f.omega = std::polar(r, (kPi - theta) / 2.0);
  f.omega_p = std::polar(r, (kPi + theta) / 2.0);
  // The sum is exactly imaginary; drop the rounding residue in the real part.
  f.omega_pp = cplx(0.0, 2.0 * r * std::cos(theta / 2.0));
  return f;
}

ModularParam modular_param(const OmegaFrame& frame) { return make_modular_param(frame.tau); }

cplx frame_map(cplx z_omega, const OmegaFrame& frame) {
  return (z_omega + frame.omega_pp) / (2.0 * frame.omega);
}

cplx frame_unmap(cplx z_tau, const OmegaFrame& frame) {
  return 2.0 * frame.omega * z_tau - frame.omega_pp;
}

const char* to_string(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::zero: return "zero";
    case LatticeKind::pole: return "pole";
    case LatticeKind::cancelled: return "cancelled";
    case LatticeKind::regular: return "regular";
  }
  return "?";
}

namespace {

LatticeKind classify(int k, int l) {
  if (k >= 1 && l >= 1) return LatticeKind::zero;
  if (k <= 0 && l <= 0) return LatticeKind::pole;
  if (k <= 0 && l >= 1) return LatticeKind::cancelled;
  return LatticeKind::regular;
}

// Integer points K + L*tau with |K + L tau| <= R.
template <class Fn>
void for_each_in_disc(cplx tau, double R, Fn&& fn) {
  const int lmax = static_cast<int>(std::floor(R / tau.imag())) + 1;
  for (int L = -lmax; L <= lmax; ++L) {
    const double y = L * tau.imag();
    if (std::abs(y) > R) continue;
    const double half = std::sqrt(std::max(0.0, R * R - y * y));
    const double cx = -L * tau.real();
    const int kmin = static_cast<int>(std::floor(cx - half)) - 1;
    const int kmax = static_cast<int>(std::ceil(cx + half)) + 1;
    for (int K = kmin; K <= kmax; ++K) fn(K, L);
  }
}

}  // namespace

std::vector<LatticePoint> lattice_points(const Frame& frame, LatticeKind kind, double radius) {
  if (!(radius > 0.0)) throw DomainError("radius must be positive");
  if (kind == LatticeKind::regular) throw DomainError("unsupported lattice kind");
  std::vector<LatticePoint> out;
  if (const auto* mp = std::get_if<ModularParam>(&frame)) {
    for_each_in_disc(mp->tau, radius, [&](int K, int L) {
      const cplx loc = double(K) + double(L) * mp->tau;
      if (std::abs(loc) <= radius && classify(K, L) == kind) out.push_back({K, L, loc, kind});
    });
  } else {
    const auto& f = std::get<OmegaFrame>(frame);
    // k omega + l omega' = omega (k + l tau); enumerate in the scaled disc.
    const double scale = std::abs(f.omega);
    for_each_in_disc(f.tau, radius / scale, [&](int k, int l) {
      if ((k & 1) == 0 || (l & 1) == 0) return;
      const cplx loc = double(k) * f.omega + double(l) * f.omega_p;
      const int K = (k + 1) / 2;
      const int L = (l + 1) / 2;
      if (std::abs(loc) <= radius && classify(K, L) == kind) out.push_back({k, l, loc, kind});
    });
  }
  std::sort(out.begin(), out.end(), [](const LatticePoint& a, const LatticePoint& b) {
    return a.l != b.l ? a.l < b.l : a.k < b.k;
  });
  return out;
}

LatticePoint nearest_lattice_point(cplx z, const ModularParam& mp) {
  const double y = z.imag() / mp.tau.imag();
  const double x = z.real() - y * mp.tau.real();
  const int L0 = static_cast<int>(std::lround(y));
  const int K0 = static_cast<int>(std::lround(x));
  // The rounded oblique coordinates are only approximately nearest; check neighbours.
  LatticePoint best{K0, L0, double(K0) + double(L0) * mp.tau, classify(K0, L0)};
  double bd = std::abs(z - best.location);
  for (int dl = -1; dl <= 1; ++dl) {
    for (int dk = -1; dk <= 1; ++dk) {
      const int K = K0 + dk;
      const int L = L0 + dl;
      const cplx loc = double(K) + double(L) * mp.tau;
      const double d = std::abs(z - loc);
      if (d < bd) {
        bd = d;
        best = {K, L, loc, classify(K, L)};
      }
    }
  }
  return best;
}

double lattice_distance(cplx z, const ModularParam& mp) {
  return std::abs(z - nearest_lattice_point(z, mp).location);
}

cplx symmetry_point(const Frame& frame) {
  if (const auto* mp = std::get_if<ModularParam>(&frame)) return (1.0 + mp->tau) / 2.0;
  return cplx(0.0, 0.0);
}

}  // namespace qdilog
