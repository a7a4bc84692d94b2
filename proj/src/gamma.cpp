#include "qdilog/gamma.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qdilog/errors.hpp"

namespace qdilog {

namespace {

constexpr double kMachEps = std::numeric_limits<double>::epsilon();

template <class R>
using C = std::complex<R>;

template <class R>
C<R> reduce_phase(C<R> w) {
  return {w.real(), std::remainder(w.imag(), 2 * std::numbers::pi_v<R>)};
}

// e^w - 1 without cancellation for small |w|; expects Im w already reduced.
template <class R>
C<R> expm1c(C<R> w) {
  const R x = w.real();
  const R y = w.imag();
  const R s = std::sin(y / 2);
  return {std::expm1(x) * std::cos(y) - 2 * s * s, std::exp(x) * std::sin(y)};
}

// log(1 - e^w), branch unspecified.
template <class R>
C<R> log1m_exp(C<R> w) {
  w = reduce_phase(w);
  if (w.real() > 0) return w + C<R>(0, std::numbers::pi_v<R>) + std::log(-expm1c(-w));
  return std::log(-expm1c(w));
}

template <class R>
struct Series {
  C<R> sum{0, 0};
  double tail = 0.0;
  double round = 0.0;
  int factors = 0;
  bool zero = false;
};

// sum_{j >= 0, j != skip} log(1 - e^{w0 + j dw}), Re dw < 0.
template <class R>
Series<R> log_series(C<R> w0, C<R> dw, int skip, double budget, int max_factors) {
  const R unit = std::numeric_limits<R>::epsilon();
  const R log_half = std::log(R(0.5));
  const R b = std::exp(dw.real());
  Series<R> s;
  for (int j = 0;; ++j) {
    if (j >= max_factors) {
      throw ConvergenceError("product did not reach its tail bound within " +
                             std::to_string(max_factors) + " factors");
    }
    const C<R> w = w0 + R(j) * dw;
    if (j != skip) {
      const C<R> t = log1m_exp(w);
      if (!std::isfinite(t.real())) {
        s.zero = true;
      } else {
        s.sum += t;
        const R ew = std::exp(std::min(w.real(), R(700)));
        const R cond = ew / std::max(std::abs(1 - ew), R(1e-300));
        s.round += double(unit * (std::abs(t) + std::abs(w) * std::min(cond, R(1)) + 1));
      }
    }
    const C<R> next = w0 + R(j + 1) * dw;
    if (j >= skip && next.real() < log_half) {
      const R a = std::exp(next.real());
      const R tail = a / ((1 - b) * (1 - a));
      if (tail <= budget) {
        s.tail = double(tail);
        s.factors = j + 1;
        return s;
      }
    }
  }
}

template <class R>
struct Setup {
  C<R> num_w0, num_dw, den_w0, den_dw;
  C<R> num_special, den_special;  // exponents of the factors vanishing at the nearest lattice point
  C<R> cancel_limit;              // their ratio as the distance goes to zero
  LatticePoint nearest;           // original-frame labels
  double dist;
  double scale;  // |location| used for relative tolerances
  int label_k, label_l;
};

struct LogResult {
  bool is_zero = false;
  bool near_cancelled = false;
  double error = 0.0;
};

// Writes the log value into lv; budget is the tail bound per product.
template <class R>
LogResult evaluate(const Setup<R>& s, const EvalOptions& opts, double budget, C<R>& lv) {
  validate(opts);
  const int K = s.nearest.k;
  const int L = s.nearest.l;
  const double rel = std::max(1.0, s.scale);
  if (s.nearest.kind == LatticeKind::pole && s.dist <= opts.pole_tol * rel) {
    throw PoleError(s.label_k, s.label_l);
  }
  LogResult out;
  if (s.nearest.kind == LatticeKind::zero && s.dist <= 16.0 * kMachEps * rel) {
    out.is_zero = true;
    return out;
  }
  out.near_cancelled = s.nearest.kind == LatticeKind::cancelled && s.dist <= opts.warn_tol * rel;

  const int skip_num = L >= 1 ? L - 1 : -1;
  const int skip_den = K <= 0 ? -K : -1;
  const Series<R> num = log_series(s.num_w0, s.num_dw, skip_num, budget, opts.max_factors);
  const Series<R> den = log_series(s.den_w0, s.den_dw, skip_den, budget, opts.max_factors);
  if (den.zero) throw PoleError(s.label_k, s.label_l);
  if (num.zero) {
    out.is_zero = true;
    return out;
  }
  lv = num.sum - den.sum;
  const C<R> zero(0, 0);
  if (skip_num >= 0 && skip_den >= 0) {
    if (s.num_special == zero || s.den_special == zero) {
      lv += std::log(s.cancel_limit);
    } else {
      lv += std::log(expm1c(s.num_special) / expm1c(s.den_special));
    }
  } else if (skip_num >= 0) {
    const C<R> f = -expm1c(s.num_special);
    if (f == zero) {
      out.is_zero = true;
      return out;
    }
    lv += std::log(f);
  } else if (skip_den >= 0) {
    const C<R> f = -expm1c(s.den_special);
    if (f == zero) throw PoleError(s.label_k, s.label_l);
    lv -= std::log(f);
  }
  out.error = num.tail + den.tail + num.round + den.round;
  return out;
}

template <class R>
Setup<R> tau_setup(C<R> zz, const ModularParam& mp) {
  const C<R> i2pi(0, 2 * std::numbers::pi_v<R>);
  const C<R> tau(mp.tau);
  const cplx z(zz);
  Setup<R> s;
  s.num_w0 = -i2pi * (zz - tau);
  s.num_dw = i2pi * tau;
  s.den_w0 = -i2pi * zz / tau;
  s.den_dw = -i2pi / tau;
  s.nearest = nearest_lattice_point(z, mp);
  // Lattice location recomputed in R so delta keeps the extra digits.
  const C<R> delta = zz - (R(s.nearest.k) + R(s.nearest.l) * tau);
  s.dist = double(std::abs(delta));
  s.scale = std::abs(s.nearest.location);
  s.num_special = -i2pi * delta;
  s.den_special = -i2pi * delta / tau;
  s.cancel_limit = tau;
  s.label_k = s.nearest.k;
  s.label_l = s.nearest.l;
  return s;
}

LogGamma to_log_gamma(const LogResult& r, cplx lv) {
  LogGamma out;
  out.is_zero = r.is_zero;
  out.near_cancelled = r.near_cancelled;
  out.error = r.error;
  out.log_value = r.is_zero ? cplx(-std::numeric_limits<double>::infinity(), 0.0) : lv;
  return out;
}

GammaEval to_eval(const LogGamma& lg) {
  GammaEval e;
  e.value = lg.is_zero ? cplx(0.0, 0.0) : std::exp(lg.log_value);
  e.error = lg.error;
  e.near_cancelled = lg.near_cancelled;
  return e;
}

}  // namespace

void validate(const EvalOptions& opts) {
  if (!(opts.eps >= 100.0 * kMachEps)) throw DomainError("eps below 100 x machine epsilon");
  if (opts.max_factors < 8) throw DomainError("max_factors must be at least 8");
  if (!(opts.pole_tol >= 0.0) || !(opts.warn_tol >= 0.0)) throw DomainError("negative tolerance");
}

cplx qpoch(cplx a, cplx b, const EvalOptions& opts) {
  validate(opts);
  const double nb = std::abs(b);
  if (!(nb < 1.0)) throw DomainError("qpoch requires |b| < 1");
  if (a == cplx(0.0, 0.0)) return 1.0;
  cplx x = a;
  cplx sum = 0.0;
  for (int n = 0;; ++n) {
    if (n >= opts.max_factors) throw ConvergenceError("qpoch exceeded max_factors");
    const cplx f = 1.0 - x;
    if (f == cplx(0.0, 0.0)) return 0.0;
    // log1p form keeps small |x| accurate.
    if (std::abs(x) < 0.5) {
      const double re = 0.5 * std::log1p(-2.0 * x.real() + std::norm(x));
      sum += cplx(re, std::atan2(-x.imag(), 1.0 - x.real()));
    } else {
      sum += std::log(f);
    }
    x *= b;
    const double ax = std::abs(x);
    if (ax < 0.5) {
      const double tail = ax / ((1.0 - nb) * (1.0 - ax));
      if (tail <= opts.eps / 2.0 || ax == 0.0) break;
    }
  }
  return std::exp(sum);
}

LogGamma log_gamma_tau(cplx z, const ModularParam& mp, const EvalOptions& opts) {
  cplx lv;
  const LogResult r = evaluate(tau_setup(z, mp), opts, opts.eps / 4.0, lv);
  return to_log_gamma(r, lv);
}

LogGammaExt log_gamma_tau_ext(cplx_ext z, const ModularParam& mp, const EvalOptions& opts) {
  LogGammaExt out;
  const LogResult r = evaluate(tau_setup(z, mp), opts,
                               double(std::numeric_limits<long double>::epsilon()), out.log_value);
  out.is_zero = r.is_zero;
  out.near_cancelled = r.near_cancelled;
  return out;
}

GammaEval gamma_tau_eval(cplx z, const ModularParam& mp, const EvalOptions& opts) {
  return to_eval(log_gamma_tau(z, mp, opts));
}

cplx gamma_tau(cplx z, const ModularParam& mp, const EvalOptions& opts) {
  return gamma_tau_eval(z, mp, opts).value;
}

LogGamma log_gamma_omega(cplx z, const OmegaFrame& f, const EvalOptions& opts) {
  const ModularParam mp = modular_param(f);
  const cplx w = f.omega;
  const cplx wp = f.omega_p;
  Setup<double> s;
  s.num_w0 = -kI * kPi * (z - wp) / w + kI * kPi;
  s.num_dw = 2.0 * kI * kPi * wp / w;
  s.den_w0 = -kI * kPi * (z + w) / wp + kI * kPi;
  s.den_dw = -2.0 * kI * kPi * w / wp;
  s.nearest = nearest_lattice_point(frame_map(z, f), mp);
  const int K = s.nearest.k;
  const int L = s.nearest.l;
  const cplx loc = double(2 * K - 1) * w + double(2 * L - 1) * wp;
  const cplx delta = z - loc;
  s.dist = std::abs(delta);
  s.scale = std::abs(loc);
  s.num_special = -kI * kPi * delta / w;
  s.den_special = -kI * kPi * delta / wp;
  s.cancel_limit = wp / w;
  s.label_k = 2 * K - 1;
  s.label_l = 2 * L - 1;
  cplx lv;
  return to_log_gamma(evaluate(s, opts, opts.eps / 4.0, lv), lv);
}

GammaEval gamma_omega_eval(cplx z, const OmegaFrame& frame, const EvalOptions& opts) {
  return to_eval(log_gamma_omega(z, frame, opts));
}

cplx gamma_omega(cplx z, const OmegaFrame& frame, const EvalOptions& opts) {
  return gamma_omega_eval(z, frame, opts).value;
}

LogGamma log_gamma(cplx z, const Frame& frame, const EvalOptions& opts) {
  if (const auto* mp = std::get_if<ModularParam>(&frame)) return log_gamma_tau(z, *mp, opts);
  return log_gamma_omega(z, std::get<OmegaFrame>(frame), opts);
}

cplx gamma(cplx z, const Frame& frame, const EvalOptions& opts) {
  return to_eval(log_gamma(z, frame, opts)).value;
}

cplx gamma_one_closed(const ModularParam& mp) {
  const cplx tau = mp.tau;
  return std::exp(kI * (5.0 * kPi / 12.0)) * std::pow(tau, -0.5) *
         std::exp(-kI * kPi * (1.0 + tau) * (1.0 + tau) / (12.0 * tau));
}

cplx gamma_one_product(const ModularParam& mp, const EvalOptions& opts) {
  const cplx q2 = mp.q * mp.q;
  const cplx qd2 = mp.q_dual * mp.q_dual;
  return qpoch(q2, q2, opts) / qpoch(qd2, qd2, opts);
}

cplx dedekind_eta(cplx tau, const EvalOptions& opts) {
  if (!(tau.imag() > 0.0)) throw DomainError("eta requires Im(tau) > 0");
  const cplx q2 = std::exp(2.0 * kI * kPi * tau);
  return std::exp(kI * kPi * tau / 12.0) * qpoch(q2, q2, opts);
}

cplx dedekind_eta_ratio(const ModularParam& mp, const EvalOptions& opts) {
  const cplx tau = mp.tau;
  return std::exp(-kI * kPi * tau / 12.0) * dedekind_eta(tau, opts) /
         (std::exp(kI * kPi / (12.0 * tau)) * dedekind_eta(-1.0 / tau, opts));
}

cplx psi(cplx z, cplx lambda, const ModularParam& mp, const EvalOptions& opts) {
  const LogGamma lg = log_gamma_tau(z - lambda, mp, opts);
  if (lg.is_zero) return 0.0;
  return std::exp(-2.0 * kI * kPi * lambda * z / mp.tau + lg.log_value);
}

cplx residue_at_zero(const ModularParam& mp, const EvalOptions& opts) {
  const cplx g = gamma_tau(mp.tau, mp, opts);
  const cplx expect = mp.tau * gamma_one_closed(mp);
  if (std::abs(g - expect) > 1e-8 * std::max(1.0, std::abs(expect))) {
    throw AccuracyError("gamma(tau) disagrees with tau * gamma(1)");
  }
  return g;
}

cplx residue_circle(const ModularParam& mp, const EvalOptions& opts) {
  const double r = 0.25 * std::min(1.0, mp.tau.imag());
  auto trap = [&](int n) {
    cplx acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const cplx e = std::polar(1.0, 2.0 * kPi * (j + 0.5) / n);
      acc += gamma_tau(r * e, mp, opts) * e;
    }
    return acc * (kI * r * 2.0 * kPi / double(n));
  };
  cplx prev = trap(16);
  for (int n = 32; n <= 4096; n *= 2) {
    const cplx cur = trap(n);
    if (std::abs(cur - prev) <= 1e-13 * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw ConvergenceError("residue circle rule did not converge");
}

cplx reflection_constant(const OmegaFrame& f) {
  const cplx g1 = gamma_one_closed(modular_param(f));
  return -f.tau * g1 * g1 * std::exp(-kI * f.omega_pp * f.omega_pp / (2.0 * f.hbar));
}

}  // namespace qdilog
