#include "qdilog/scalar_identities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qdilog/errors.hpp"

namespace qdilog {

namespace {

const std::vector<ScalarIdentity> kCatalog = {
    {ScalarId::diff_tau, "diff-tau", FrameKind::original, 1, "g(z+tau)/g(z) = 1 - e^{-2i pi z}"},
    {ScalarId::diff_one, "diff-one", FrameKind::original, 1, "g(z+1)/g(z) = 1 - e^{-2i pi z/tau}"},
    {ScalarId::spectral_tau, "spectral-tau", FrameKind::original, 2,
     "e^{-2i pi z} psi(z) + psi(z+tau) = e^{-2i pi lambda} psi(z)"},
    {ScalarId::spectral_one, "spectral-one", FrameKind::original, 2,
     "e^{-2i pi z/tau} psi(z) + psi(z+1) = e^{-2i pi lambda/tau} psi(z)"},
    {ScalarId::reflection, "reflection", FrameKind::original, 1,
     "g(z) g(1+tau-z) = -tau g(1)^2 e^{i pi z(1+tau-z)/tau}"},
    {ScalarId::residue, "residue", FrameKind::original, 0, "g(tau) = tau g(1) = 2i pi Res_0 g"},
    {ScalarId::gamma_one, "gamma-one", FrameKind::original, 0,
     "closed form = eta ratio = product ratio = g(1)"},
    {ScalarId::omega_diff_p, "omega-diff-p", FrameKind::omega, 1,
     "g(z+w')/g(z-w') = 1 + e^{-i pi z/w}"},
    {ScalarId::omega_diff, "omega-diff", FrameKind::omega, 1, "g(z+w)/g(z-w) = 1 + e^{-i pi z/w'}"},
    {ScalarId::omega_reflection, "omega-reflection", FrameKind::omega, 1,
     "g(z) g(-z) = alpha e^{i z^2/2hbar}"},
    {ScalarId::unit_modulus, "unit-modulus", FrameKind::omega, 1, "|g(x)| = 1 for real x"},
    {ScalarId::frame_consistency, "frame-consistency", FrameKind::omega, 1,
     "g_w(z) = g_tau((z + w'')/2w)"},
    {ScalarId::southeast_limit, "southeast-limit", FrameKind::original, 1, "g(z) -> 1 southeast"},
};

double rel_residual(cplx lhs, cplx rhs) {
  return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0});
}

// exp(log g(a) - log g(b)), or nullopt when either side vanishes.
std::optional<cplx> gamma_ratio(cplx a, cplx b, const Frame& frame, const EvalOptions& eo,
                                bool& warn) {
  const LogGamma la = log_gamma(a, frame, eo);
  const LogGamma lb = log_gamma(b, frame, eo);
  warn = warn || la.near_cancelled || lb.near_cancelled;
  if (la.is_zero || lb.is_zero) return std::nullopt;
  return std::exp(la.log_value - lb.log_value);
}

// Lattice arguments whose distance to the lattice gates sampling.
std::vector<cplx> gamma_arguments(ScalarId id, std::span<const cplx> p, const Frame& frame) {
  switch (id) {
    case ScalarId::diff_tau: return {p[0], p[0] + std::get<ModularParam>(frame).tau};
    case ScalarId::diff_one: return {p[0], p[0] + 1.0};
    case ScalarId::spectral_tau:
      return {p[0] - p[1], p[0] - p[1] + std::get<ModularParam>(frame).tau};
    case ScalarId::spectral_one: return {p[0] - p[1], p[0] - p[1] + 1.0};
    case ScalarId::reflection: return {p[0], 1.0 + std::get<ModularParam>(frame).tau - p[0]};
    case ScalarId::omega_diff_p: {
      const auto& f = std::get<OmegaFrame>(frame);
      return {p[0] + f.omega_p, p[0] - f.omega_p};
    }
    case ScalarId::omega_diff: {
      const auto& f = std::get<OmegaFrame>(frame);
      return {p[0] + f.omega, p[0] - f.omega};
    }
    case ScalarId::omega_reflection: return {p[0], -p[0]};
    case ScalarId::unit_modulus:
    case ScalarId::frame_consistency:
    case ScalarId::southeast_limit: return {p[0]};
    case ScalarId::residue:
    case ScalarId::gamma_one: return {};
  }
  return {};
}

double min_lattice_distance(const std::vector<cplx>& args, const Frame& frame) {
  double d = std::numeric_limits<double>::infinity();
  if (const auto* mp = std::get_if<ModularParam>(&frame)) {
    for (cplx a : args) d = std::min(d, lattice_distance(a, *mp));
  } else {
    const auto& f = std::get<OmegaFrame>(frame);
    const ModularParam om = modular_param(f);
    const double scale = 2.0 * std::abs(f.omega);
    for (cplx a : args) d = std::min(d, scale * lattice_distance(frame_map(a, f), om));
  }
  return d;
}

// Open southeast sector (arg tau - pi, 0) in the original frame.
std::pair<double, double> southeast_sector(const ModularParam& mp) {
  return {std::arg(mp.tau) - kPi, 0.0};
}

}  // namespace

const std::vector<ScalarIdentity>& scalar_catalog() { return kCatalog; }

const ScalarIdentity& scalar_identity(ScalarId id) {
  for (const auto& e : kCatalog) {
    if (e.id == id) return e;
  }
  throw DomainError("unknown scalar identity");
}

std::optional<ScalarId> parse_scalar_id(std::string_view name) {
  for (const auto& e : kCatalog) {
    if (e.name == name) return e.id;
  }
  return std::nullopt;
}

ResidualReport verify_scalar(ScalarId id, std::span<const cplx> p, const Frame& frame,
                             const ScalarOptions& opts) {
  const ScalarIdentity& entry = scalar_identity(id);
  if (static_cast<int>(p.size()) != entry.arity) {
    throw DomainError(std::string(entry.name) + ": expected " + std::to_string(entry.arity) +
                      " parameters");
  }
  const bool omega = std::holds_alternative<OmegaFrame>(frame);
  if (omega != (entry.frame == FrameKind::omega)) {
    throw DomainError(std::string(entry.name) + ": wrong frame type");
  }
  const EvalOptions& eo = opts.eval;
  ResidualReport rep;
  rep.tolerance = opts.tolerance;
  bool warn = false;
  double r = 0.0;

  switch (id) {
    case ScalarId::diff_tau:
    case ScalarId::diff_one: {
      const auto& mp = std::get<ModularParam>(frame);
      const cplx z = p[0];
      const cplx step = id == ScalarId::diff_tau ? mp.tau : cplx(1.0);
      const cplx rhs = id == ScalarId::diff_tau ? 1.0 - std::exp(-2.0 * kI * kPi * z)
                                                : 1.0 - std::exp(-2.0 * kI * kPi * z / mp.tau);
      if (auto ratio = gamma_ratio(z + step, z, frame, eo, warn)) {
        r = rel_residual(*ratio, rhs);
      } else {
        r = rel_residual(gamma_tau(z + step, mp, eo), gamma_tau(z, mp, eo) * rhs);
      }
      break;
    }
    case ScalarId::spectral_tau:
    case ScalarId::spectral_one: {
      const auto& mp = std::get<ModularParam>(frame);
      using X = cplx_ext;
      const X z(p[0]);
      const X lam(p[1]);
      const X tau(mp.tau);
      const X i2pi(0.0L, 2.0L * std::numbers::pi_v<long double>);
      const bool t = id == ScalarId::spectral_tau;
      const X step = t ? tau : X(1.0L);
      // The exponential term and the psi ratio cancel heavily for Im z > 0, so both sides are
      // formed in long double. Both are divided by psi(z).
      const LogGammaExt a = log_gamma_tau_ext(z + step - lam, mp, eo);
      const LogGammaExt b = log_gamma_tau_ext(z - lam, mp, eo);
      warn = a.near_cancelled || b.near_cancelled;
      if (b.is_zero) throw DomainError("psi vanishes at the base point");
      const X log_psi_a = -i2pi * lam * (z + step) / tau + a.log_value;
      const X log_psi_b = -i2pi * lam * z / tau + b.log_value;
      const X ratio = a.is_zero ? X(0.0L) : std::exp(log_psi_a - log_psi_b);
      const X lhs = (t ? std::exp(-i2pi * z) : std::exp(-i2pi * z / tau)) + ratio;
      const X rhs = t ? std::exp(-i2pi * lam) : std::exp(-i2pi * lam / tau);
      r = double(std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0L}));
      break;
    }
    case ScalarId::reflection: {
      const auto& mp = std::get<ModularParam>(frame);
      const cplx z = p[0];
      const LogGamma a = log_gamma_tau(z, mp, eo);
      const LogGamma b = log_gamma_tau(1.0 + mp.tau - z, mp, eo);
      warn = a.near_cancelled || b.near_cancelled;
      const cplx lhs =
          (a.is_zero || b.is_zero) ? cplx(0.0) : std::exp(a.log_value + b.log_value);
      const cplx g1 = gamma_one_closed(mp);
      const cplx rhs =
          -mp.tau * g1 * g1 * std::exp(kI * kPi * z * (1.0 + mp.tau - z) / mp.tau);
      r = rel_residual(lhs, rhs);
      break;
    }
    case ScalarId::residue: {
      const auto& mp = std::get<ModularParam>(frame);
      const GammaEval gt = gamma_tau_eval(mp.tau, mp, eo);
      warn = false;  // tau is a cancelled point by construction; the pair limit is exact there
      const cplx tg1 = mp.tau * gamma_one_closed(mp);
      const cplx circ = residue_circle(mp, eo);
      r = std::max(rel_residual(gt.value, tg1), rel_residual(circ, gt.value));
      break;
    }
    case ScalarId::gamma_one: {
      const auto& mp = std::get<ModularParam>(frame);
      const cplx c = gamma_one_closed(mp);
      const cplx e = dedekind_eta_ratio(mp, eo);
      const cplx d = gamma_one_product(mp, eo);
      const cplx g = gamma_tau(1.0, mp, eo);
      r = std::max({rel_residual(c, e), rel_residual(c, d), rel_residual(e, d), rel_residual(g, d)});
      break;
    }
    case ScalarId::omega_diff_p:
    case ScalarId::omega_diff: {
      const auto& f = std::get<OmegaFrame>(frame);
      const cplx z = p[0];
      const bool prime = id == ScalarId::omega_diff_p;
      const cplx step = prime ? f.omega_p : f.omega;
      const cplx rhs = prime ? 1.0 + std::exp(-kI * kPi * z / f.omega)
                             : 1.0 + std::exp(-kI * kPi * z / f.omega_p);
      if (auto ratio = gamma_ratio(z + step, z - step, frame, eo, warn)) {
        r = rel_residual(*ratio, rhs);
      } else {
        r = rel_residual(gamma_omega(z + step, f, eo), gamma_omega(z - step, f, eo) * rhs);
      }
      break;
    }
    case ScalarId::omega_reflection: {
      const auto& f = std::get<OmegaFrame>(frame);
      const cplx z = p[0];
      const LogGamma a = log_gamma_omega(z, f, eo);
      const LogGamma b = log_gamma_omega(-z, f, eo);
      warn = a.near_cancelled || b.near_cancelled;
      const cplx lhs = (a.is_zero || b.is_zero) ? cplx(0.0) : std::exp(a.log_value + b.log_value);
      const cplx rhs = reflection_constant(f) * std::exp(kI * z * z / (2.0 * f.hbar));
      r = rel_residual(lhs, rhs);
      break;
    }
    case ScalarId::unit_modulus: {
      const auto& f = std::get<OmegaFrame>(frame);
      if (p[0].imag() != 0.0) throw DomainError("unit-modulus requires a real argument");
      const GammaEval g = gamma_omega_eval(p[0], f, eo);
      warn = g.near_cancelled;
      r = std::abs(std::abs(g.value) - 1.0);
      break;
    }
    case ScalarId::frame_consistency: {
      const auto& f = std::get<OmegaFrame>(frame);
      const GammaEval a = gamma_omega_eval(p[0], f, eo);
      const GammaEval b = gamma_tau_eval(frame_map(p[0], f), modular_param(f), eo);
      warn = a.near_cancelled || b.near_cancelled;
      r = rel_residual(a.value, b.value);
      break;
    }
    case ScalarId::southeast_limit: {
      const auto& mp = std::get<ModularParam>(frame);
      const auto [lo, hi] = southeast_sector(mp);
      const double phi = std::arg(p[0]);
      if (!(phi > lo && phi < hi)) throw DomainError("southeast-limit needs z in the southeast sector");
      r = std::abs(gamma_tau(p[0], mp, eo) - 1.0);
      break;
    }
  }
  rep.residual = r;
  rep.pass = std::isfinite(r) && r <= opts.tolerance;
  rep.warning = warn;
  return rep;
}

SweepReport sample_sweep(ScalarId id, const SamplerSpec& spec, int count, const Frame& frame,
                         const ScalarOptions& opts) {
  if (count < 1) throw DomainError("sample count must be at least 1");
  const ScalarIdentity& entry = scalar_identity(id);
  Rng rng(spec.seed);
  SweepReport rep;
  // Parameter-free identities are deterministic; one evaluation stands for the sweep.
  if (entry.arity == 0) count = 1;
  auto draw_z = [&] {
    return cplx(rng.uniform(spec.lo.real(), spec.hi.real()), rng.uniform(spec.lo.imag(), spec.hi.imag()));
  };
  const int max_attempts = 1000 * count;
  int attempts = 0;
  while (rep.count < count) {
    if (++attempts > max_attempts) throw DomainError("sampler rejected too many points");
    std::vector<cplx> params;
    switch (id) {
      case ScalarId::residue:
      case ScalarId::gamma_one: break;
      case ScalarId::spectral_tau:
      case ScalarId::spectral_one: {
        params.push_back(draw_z());
        const double lr = rng.uniform(spec.lo.real(), spec.hi.real());
        const double li = rng.uniform(-spec.lambda_im_max, spec.lambda_im_max);
        params.emplace_back(lr, li);
        break;
      }
      case ScalarId::unit_modulus: params.emplace_back(rng.uniform(spec.lo.real(), spec.hi.real()), 0.0); break;
      case ScalarId::southeast_limit: {
        const auto& mp = std::get<ModularParam>(frame);
        auto [lo, hi] = southeast_sector(mp);
        double a = spec.phi_min, b = spec.phi_max;
        if (a == 0.0 && b == 0.0) {
          a = lo + 0.25 * (hi - lo);
          b = hi - 0.25 * (hi - lo);
        }
        const double rad = rng.uniform(spec.r_min, spec.r_max);
        params.push_back(std::polar(rad, rng.uniform(a, b)));
        break;
      }
      default: params.push_back(draw_z()); break;
    }
    if (entry.arity > 0 && id != ScalarId::southeast_limit &&
        min_lattice_distance(gamma_arguments(id, params, frame), frame) < spec.lattice_margin) {
      continue;
    }
    const ResidualReport r = verify_scalar(id, params, frame, opts);
    ++rep.count;
    if (!r.pass) ++rep.failures;
    if (r.warning) ++rep.warnings;
    if (r.residual > rep.max_residual || rep.worst_params.empty()) {
      rep.max_residual = std::max(rep.max_residual, r.residual);
      rep.worst_params = params;
    }
    if (!std::isfinite(r.residual)) rep.max_residual = r.residual;
  }
  return rep;
}

}  // namespace qdilog
