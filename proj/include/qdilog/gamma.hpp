#pragma once

#include "qdilog/modular.hpp"

namespace qdilog {

struct EvalOptions {
  double eps = 1e-13;       // target relative error
  int max_factors = 20000;  // per infinite product
  double pole_tol = 1e-12;  // relative distance treated as "on" a pole
  double warn_tol = 1e-6;   // band around cancelled points that raises a warning
};

// Throws DomainError when the invariants eps >= 100 machine eps, max_factors >= 8 fail.
void validate(const EvalOptions& opts);

struct LogGamma {
  cplx log_value;  // any branch; exp() gives the value
  bool is_zero = false;
  double error = 0.0;  // estimated relative error
  bool near_cancelled = false;
};

struct GammaEval {
  cplx value;
  double error = 0.0;
  bool near_cancelled = false;  // accuracy warning
};

// (a; b)_inf
cplx qpoch(cplx a, cplx b, const EvalOptions& opts = {});

LogGamma log_gamma_tau(cplx z, const ModularParam& mp, const EvalOptions& opts = {});
GammaEval gamma_tau_eval(cplx z, const ModularParam& mp, const EvalOptions& opts = {});
cplx gamma_tau(cplx z, const ModularParam& mp, const EvalOptions& opts = {});

// Same product in long double with a tail bound at long double epsilon; for combinations whose
// cancellation exceeds double precision.
using cplx_ext = std::complex<long double>;
struct LogGammaExt {
  cplx_ext log_value;
  bool is_zero = false;
  bool near_cancelled = false;
};
LogGammaExt log_gamma_tau_ext(cplx_ext z, const ModularParam& mp, const EvalOptions& opts = {});

// Evaluated from the omega-frame product directly; pole labels are odd (k, l).
LogGamma log_gamma_omega(cplx z, const OmegaFrame& frame, const EvalOptions& opts = {});
GammaEval gamma_omega_eval(cplx z, const OmegaFrame& frame, const EvalOptions& opts = {});
cplx gamma_omega(cplx z, const OmegaFrame& frame, const EvalOptions& opts = {});

// Dispatch on the frame.
LogGamma log_gamma(cplx z, const Frame& frame, const EvalOptions& opts = {});
cplx gamma(cplx z, const Frame& frame, const EvalOptions& opts = {});

cplx gamma_one_closed(const ModularParam& mp);
cplx gamma_one_product(const ModularParam& mp, const EvalOptions& opts = {});
cplx dedekind_eta(cplx tau, const EvalOptions& opts = {});
cplx dedekind_eta_ratio(const ModularParam& mp, const EvalOptions& opts = {});

cplx psi(cplx z, cplx lambda, const ModularParam& mp, const EvalOptions& opts = {});

// gamma(tau), checked against tau * gamma(1); throws AccuracyError on disagreement.
cplx residue_at_zero(const ModularParam& mp, const EvalOptions& opts = {});
// 2 i pi Res_0 gamma from a trapezoid rule on a small circle.
cplx residue_circle(const ModularParam& mp, const EvalOptions& opts = {});

// gamma(z) gamma(-z) = alpha e^{i z^2 / 2 hbar}
cplx reflection_constant(const OmegaFrame& frame);

}  // namespace qdilog
