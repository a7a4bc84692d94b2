#pragma once

#include <complex>
#include <numbers>
#include <variant>
#include <vector>

namespace qdilog {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

struct ModularParam {
  cplx tau;
  cplx q;       // e^{i pi tau}
  cplx q_dual;  // e^{-i pi / tau}
};

ModularParam make_modular_param(cplx tau);

struct OmegaFrame {
  double hbar;
  double theta;
  cplx tau;  // e^{i theta}
  cplx omega;
  cplx omega_p;
  cplx omega_pp;  // omega + omega_p
};

OmegaFrame make_omega_frame(double theta, double hbar);

// Original-frame parameter carried by an omega frame.
ModularParam modular_param(const OmegaFrame& frame);

using Frame = std::variant<ModularParam, OmegaFrame>;

// (z + omega'') / (2 omega)
cplx frame_map(cplx z_omega, const OmegaFrame& frame);
cplx frame_unmap(cplx z_tau, const OmegaFrame& frame);

enum class LatticeKind { zero, pole, cancelled, regular };

const char* to_string(LatticeKind kind);

// Labels: original frame k + l tau with integers; omega frame k omega + l omega' with odd integers.
struct LatticePoint {
  int k;
  int l;
  cplx location;
  LatticeKind kind;
};

// Sorted by (l, k). Only zero, pole and cancelled kinds are accepted.
std::vector<LatticePoint> lattice_points(const Frame& frame, LatticeKind kind, double radius);

// Nearest point of the full lattice to z in original-frame labels, with its kind.
LatticePoint nearest_lattice_point(cplx z, const ModularParam& mp);

// Distance from z to the nearest point of the full lattice (any kind).
double lattice_distance(cplx z, const ModularParam& mp);

// Symmetry point of the zero/pole sets: (1 + tau)/2 in the original frame, 0 in the omega frame.
cplx symmetry_point(const Frame& frame);

}  // namespace qdilog
