#include "qdilog/integral_identities.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "qdilog/errors.hpp"

namespace qdilog {

namespace {

const std::vector<IntegralIdentity> kCatalog = {
    {IntegralId::tau_gamma, "tau-gamma", FrameKind::original, 1, 1e-6, false,
     "g(z) = g(1) int e^{2i pi s z/tau} / g(1+tau-s) ds"},
    {IntegralId::tau_binomial, "tau-binomial", FrameKind::original, 2, 1e-6, false,
     "g(y) g(z) / g(y+z) = g(1) int e^{2i pi s z/tau} g(y-s) / g(1+tau-s) ds"},
    {IntegralId::gaussian_const, "gaussian-const", FrameKind::original, 0, 1e-8, false,
     "1 = -tau g(1)^3 int e^{i pi s(1+tau-s)/tau} ds"},
    {IntegralId::addition, "addition", FrameKind::original, 3, 1e-6, false,
     "g(nu+mu) g(nu+ka) g(mu) g(ka) / g(nu+mu+ka) = -1/(tau g(1)) int e^{2i pi s(nu+s)/tau} "
     "g(nu+s) g(mu-s) g(ka-s) g(s) ds"},
    {IntegralId::ultimate, "ultimate", FrameKind::original, 4, 1e-5, false,
     "six-gamma over three-gamma = -1/(tau g(1)) int e^{2i pi s(nu+s)/tau} g(nu+s) g(mu-s) "
     "g(la-s) g(ka-s) g(s) / g(nu+mu+la+ka-s) ds"},
    {IntegralId::omega_ft, "omega-ft", FrameKind::omega, 1, 1e-6, false,
     "g(z-w'') = b int e^{-i s z/hbar} / g(w''-s) ds, b = g(w-w')/2w"},
    {IntegralId::omega_tbt, "omega-tbt", FrameKind::omega, 2, 1e-6, false,
     "g(y) g(z-w'') / g(y+z) = b int e^{-i s z/hbar} g(y-s) / g(w''-s) ds"},
    {IntegralId::eigen_conv, "eigen-conv", FrameKind::original, 2, 1e-3, true,
     "g(la) psi_la(z) = g(z) int g(1)/g(1+tau-z+s) psi_la(s) ds"},
};

const cplx kNegInf(-std::numeric_limits<double>::infinity(), 0.0);

struct Problem {
  std::vector<cplx> sw_apex;
  std::vector<cplx> ne_apex;
  cplx prefactor;
  std::function<cplx(cplx)> log_integrand;
  cplx lhs;
};

cplx lg(cplx z, const Frame& frame, const EvalOptions& eo) {
  const LogGamma r = log_gamma(z, frame, eo);
  return r.is_zero ? kNegInf : r.log_value;
}

cplx exp_sum(std::initializer_list<cplx> logs) {
  cplx s = 0.0;
  for (cplx l : logs) {
    if (std::isinf(l.real()) && l.real() < 0) return 0.0;
    s += l;
  }
  return std::exp(s);
}

void require_clear_of_poles(cplx x, const ModularParam& mp, const char* what) {
  const LatticePoint p = nearest_lattice_point(x, mp);
  if (p.kind == LatticeKind::pole && std::abs(x - p.location) < 1e-6) {
    throw DomainError(std::string(what) + " sits on the excluded pole lattice");
  }
}

Problem build(IntegralId id, std::span<const cplx> p, const Frame& frame, const EvalOptions& eo) {
  const IntegralIdentity& entry = integral_identity(id);
  if (static_cast<int>(p.size()) != entry.arity) {
    throw DomainError(std::string(entry.name) + ": expected " + std::to_string(entry.arity) +
                      " parameters");
  }
  const bool omega = std::holds_alternative<OmegaFrame>(frame);
  if (omega != (entry.frame == FrameKind::omega)) {
    throw DomainError(std::string(entry.name) + ": wrong frame type");
  }
  Problem pr;
  auto L = [&frame, eo](cplx z) { return lg(z, frame, eo); };
  if (!omega) {
    const ModularParam mp = std::get<ModularParam>(frame);
    const cplx tau = mp.tau;
    const cplx g1 = gamma_one_closed(mp);
    const cplx c2 = 2.0 * kI * kPi / tau;
    switch (id) {
      case IntegralId::tau_gamma: {
        const cplx z = p[0];
        pr.sw_apex = {0.0};
        pr.prefactor = g1;
        pr.log_integrand = [=](cplx s) { return c2 * s * z - L(1.0 + tau - s); };
        pr.lhs = gamma_tau(z, mp, eo);
        break;
      }
      case IntegralId::tau_binomial: {
        const cplx y = p[0], z = p[1];
        require_clear_of_poles(y + z, mp, "y+z");
        pr.sw_apex = {0.0};
        pr.ne_apex = {y};
        pr.prefactor = g1;
        pr.log_integrand = [=](cplx s) { return c2 * s * z + L(y - s) - L(1.0 + tau - s); };
        pr.lhs = exp_sum({L(y), L(z), -L(y + z)});
        break;
      }
      case IntegralId::gaussian_const: {
        pr.prefactor = -tau * g1 * g1 * g1;
        pr.log_integrand = [=](cplx s) { return kI * kPi * s * (1.0 + tau - s) / tau; };
        pr.lhs = 1.0;
        break;
      }
      case IntegralId::addition: {
        const cplx nu = p[0], mu = p[1], ka = p[2];
        pr.sw_apex = {0.0, -nu};
        pr.ne_apex = {mu, ka};
        pr.prefactor = -1.0 / (tau * g1);
        pr.log_integrand = [=](cplx s) {
          return c2 * s * (nu + s) + L(nu + s) + L(mu - s) + L(ka - s) + L(s);
        };
        pr.lhs = exp_sum({L(nu + mu), L(nu + ka), L(mu), L(ka), -L(nu + mu + ka)});
        break;
      }
      case IntegralId::ultimate: {
        const cplx nu = p[0], mu = p[1], la = p[2], ka = p[3];
        const cplx sum = nu + mu + la + ka;
        pr.sw_apex = {0.0, -nu, sum - 1.0 - tau};
        pr.ne_apex = {mu, la, ka};
        pr.prefactor = -1.0 / (tau * g1);
        pr.log_integrand = [=](cplx s) {
          return c2 * s * (nu + s) + L(nu + s) + L(mu - s) + L(la - s) + L(ka - s) + L(s) -
                 L(sum - s);
        };
        pr.lhs = exp_sum({L(nu + mu), L(nu + la), L(nu + ka), L(mu), L(la), L(ka),
                          -L(nu + la + ka), -L(nu + mu + ka), -L(nu + mu + la)});
        break;
      }
      case IntegralId::eigen_conv: {
        const cplx z = p[0], la = p[1];
        pr.sw_apex = {la};
        pr.ne_apex = {z};
        pr.prefactor = gamma_tau(z, mp, eo) * g1;
        pr.log_integrand = [=](cplx s) {
          return -L(1.0 + tau - z + s) - c2 * la * s + L(s - la);
        };
        pr.lhs = gamma_tau(la, mp, eo) * psi(z, la, mp, eo);
        break;
      }
      default: break;
    }
  } else {
    const OmegaFrame f = std::get<OmegaFrame>(frame);
    const cplx beta = gamma_omega(f.omega - f.omega_p, f, eo) / (2.0 * f.omega);
    const cplx wpp = f.omega_pp;
    const double hb = f.hbar;
    switch (id) {
      case IntegralId::omega_ft: {
        const cplx z = p[0];
        pr.sw_apex = {0.0};
        pr.prefactor = beta;
        pr.log_integrand = [=](cplx s) { return -kI * s * z / hb - L(wpp - s); };
        pr.lhs = gamma_omega(z - wpp, f, eo);
        break;
      }
      case IntegralId::omega_tbt: {
        const cplx y = p[0], z = p[1];
        pr.sw_apex = {0.0};
        pr.ne_apex = {y + wpp};
        pr.prefactor = beta;
        pr.log_integrand = [=](cplx s) { return -kI * s * z / hb + L(y - s) - L(wpp - s); };
        pr.lhs = exp_sum({L(y), L(z - wpp), -L(y + z)});
        break;
      }
      default: break;
    }
  }
  return pr;
}

cplx centroid(const Problem& pr, const Frame& frame) {
  if (pr.sw_apex.empty() && pr.ne_apex.empty()) return symmetry_point(frame);
  cplx c = 0.0;
  for (cplx a : pr.sw_apex) c += a;
  for (cplx a : pr.ne_apex) c += a;
  return c / double(pr.sw_apex.size() + pr.ne_apex.size());
}

struct Routed {
  Problem problem;
  Contour contour;
  std::vector<cplx> sw, ne;
};

Routed route(IntegralId id, std::span<const cplx> params, const Frame& frame,
             const IntegralOptions& opts) {
  Routed r{build(id, params, frame, opts.eval), {}, {}, {}};
  const double window = 1.5 * opts.route.extent;
  for (cplx a : r.problem.sw_apex) {
    auto c = sw_cone(a, frame, window);
    r.sw.insert(r.sw.end(), c.begin(), c.end());
  }
  for (cplx a : r.problem.ne_apex) {
    auto c = ne_cone(a, frame, window);
    r.ne.insert(r.ne.end(), c.begin(), c.end());
  }
  RouteOptions ro = opts.route;
  if (!ro.center) ro.center = centroid(r.problem, frame);
  const auto& logf = r.problem.log_integrand;
  Integrand f = [&logf](cplx s) { return std::exp(logf(s)); };
  r.contour = route_contour_tuned(f, r.sw, r.ne, frame, ro);
  return r;
}

double rel_residual(cplx a, cplx b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

}  // namespace

const std::vector<IntegralIdentity>& integral_catalog() { return kCatalog; }

const IntegralIdentity& integral_identity(IntegralId id) {
  for (const auto& e : kCatalog) {
    if (e.id == id) return e;
  }
  throw DomainError("unknown integral identity");
}

std::optional<IntegralId> parse_integral_id(std::string_view name) {
  for (const auto& e : kCatalog) {
    if (e.name == name) return e.id;
  }
  return std::nullopt;
}

IntegralEvaluation evaluate_integral(IntegralId id, std::span<const cplx> params, const Frame& frame,
                                     const IntegralOptions& opts) {
  const Routed r = route(id, params, frame, opts);
  const auto& logf = r.problem.log_integrand;
  Integrand f = [&logf](cplx s) { return std::exp(logf(s)); };
  const QuadResult q = integrate_adaptive(f, r.contour, opts.quad);
  IntegralEvaluation ev;
  ev.lhs = r.problem.lhs;
  ev.rhs = r.problem.prefactor * q.value;
  ev.quad_error = std::abs(r.problem.prefactor) * q.error;
  ev.contour = r.contour;
  return ev;
}

IntegralReport verify_integral(IntegralId id, std::span<const cplx> params, const Frame& frame,
                               const IntegralOptions& opts) {
  const IntegralEvaluation ev = evaluate_integral(id, params, frame, opts);
  IntegralReport rep;
  rep.lhs = ev.lhs;
  rep.rhs = ev.rhs;
  rep.quad_error = ev.quad_error;
  rep.residual = rel_residual(ev.lhs, ev.rhs);
  rep.tolerance = opts.tolerance > 0.0 ? opts.tolerance : integral_identity(id).default_tolerance;
  rep.pass = std::isfinite(rep.residual) && rep.residual <= rep.tolerance;
  rep.direction_angle = std::arg(ev.contour.direction);
  rep.margin = ev.contour.margin;
  rep.indentations = static_cast<int>(ev.contour.indentations.size());
  return rep;
}

CheckReport deformation_check(IntegralId id, std::span<const cplx> params, const Frame& frame,
                              const IntegralOptions& opts, double fraction) {
  const Routed r = route(id, params, frame, opts);
  const auto& logf = r.problem.log_integrand;
  Integrand f = [&logf](cplx s) { return std::exp(logf(s)); };
  const cplx ref = integrate_adaptive(f, r.contour, opts.quad).value;
  // Gaussian-type integrands without poles report an infinite margin; use a lattice gap.
  const double margin = std::isfinite(r.contour.margin) ? r.contour.margin : lattice_gap(frame);
  CheckReport rep;
  rep.tolerance = 10.0 * opts.quad.eps_quad;
  for (double sgn : {1.0, -1.0}) {
    // Parallel shift toward northeast (sgn > 0) or southwest; no pole is crossed.
    Contour c = r.contour;
    c.base += kI * c.direction * (sgn * fraction * margin);
    const cplx v = integrate_adaptive(f, c, opts.quad).value;
    rep.residual = std::max(rep.residual, std::abs(r.problem.prefactor) * std::abs(v - ref));
  }
  rep.pass = rep.residual <= rep.tolerance;
  return rep;
}

cplx southeast_point(const ModularParam& mp, double real_part) {
  const double phi = sector_bisector(Frame{mp});
  return cplx(real_part, real_part * std::tan(phi));
}

CheckReport degeneration_binomial_to_gamma(cplx z, const ModularParam& mp,
                                           const IntegralOptions& opts, double re_y,
                                           double tolerance) {
  const cplx y = southeast_point(mp, re_y);
  const cplx p2[] = {y, z};
  const cplx p1[] = {z};
  const IntegralEvaluation a = evaluate_integral(IntegralId::tau_binomial, p2, Frame{mp}, opts);
  const IntegralEvaluation b = evaluate_integral(IntegralId::tau_gamma, p1, Frame{mp}, opts);
  CheckReport rep;
  rep.tolerance = tolerance;
  rep.residual = rel_residual(a.rhs, b.rhs);
  rep.pass = rep.residual <= tolerance;
  return rep;
}

CheckReport degeneration_addition_to_binomial(cplx nu, cplx mu, const ModularParam& mp,
                                              const IntegralOptions& opts, double re_kappa,
                                              double tolerance) {
  const cplx ka = southeast_point(mp, re_kappa);
  const cplx p4[] = {nu, mu, ka};
  const IntegralEvaluation a = evaluate_integral(IntegralId::addition, p4, Frame{mp}, opts);

  // kappa-free integral routed with the same machinery.
  const Frame frame{mp};
  const EvalOptions eo = opts.eval;
  const cplx tau = mp.tau;
  const cplx g1 = gamma_one_closed(mp);
  auto L = [&](cplx s) { return lg(s, frame, eo); };
  auto logf = [&](cplx s) {
    return 2.0 * kI * kPi * s * (nu + s) / tau + L(nu + s) + L(mu - s) + L(s);
  };
  Integrand f = [&](cplx s) { return std::exp(logf(s)); };
  const double window = 1.5 * opts.route.extent;
  std::vector<cplx> sw = sw_cone(0.0, frame, window);
  auto sw2 = sw_cone(-nu, frame, window);
  sw.insert(sw.end(), sw2.begin(), sw2.end());
  const std::vector<cplx> ne = ne_cone(mu, frame, window);
  RouteOptions ro = opts.route;
  if (!ro.center) ro.center = (mu - nu) / 3.0;
  const Contour c = route_contour_tuned(f, sw, ne, frame, ro);
  const cplx k_free = -1.0 / (tau * g1) * integrate_adaptive(f, c, opts.quad).value;
  const cplx closed = exp_sum({L(nu + mu), L(mu)});

  CheckReport rep;
  rep.tolerance = tolerance;
  rep.residual = std::max(rel_residual(a.rhs, k_free), rel_residual(k_free, closed));
  rep.pass = rep.residual <= tolerance;
  return rep;
}

}  // namespace qdilog
