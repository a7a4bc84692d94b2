#include "qdilog/operator_identities.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "qdilog/errors.hpp"

namespace qdilog {

namespace {

const std::vector<OperatorIdentity> kCatalog = {
    {OperatorId::pentagon, "pentagon", false, 1e-6, "g(p) g(Q) = g(Q) g(p+Q) g(p)"},
    {OperatorId::three_four, "three-four", false, 1e-6, "g(-Q) g(p) g(Q) = g(p) g(-Q) g(Q) g(p)"},
    {OperatorId::artin, "artin", false, 1e-6, "s1 s2 s1 = s2 s1 s2, s1 = a e^{i pi Q^2}, s2 = a e^{i pi p^2}"},
    {OperatorId::artin_fourier, "artin-fourier", false, 1e-6, "s1 s2 s1 = a^3 sqrt(i) F"},
    {OperatorId::quasi_yb_p, "quasi-yb-p", true, 1e-5,
     "g(p) g(l-p) g(m+p-Q) g(l-p+Q) g(Q) g(m-Q) = g(m-Q) g(Q) g(p+Q) g(l+m-p-Q) g(p) g(l-p)"},
    {OperatorId::quasi_yb_s, "quasi-yb-s", true, 1e-5,
     "[g(-Q)/g(l-Q)] [g(p)/g(l+m+p)] [g(Q)/g(m+Q)] = [g(p)/g(m+p)] [g(-Q) g(Q)/(g(l-Q) g(m+Q))] "
     "[g(p)/g(l+p)]"},
    {OperatorId::true_yb, "true-yb", true, 1e-5, "s1(l) s2(l+m) s1(m) = s2(m) s1(l+m) s2(l)"},
    {OperatorId::unitarity, "unitarity", true, 1e-10, "||g(sp + tQ + c) f|| = ||f||"},
};

int resolve_workers(int workers, size_t jobs) {
  if (workers <= 0) return static_cast<int>(std::max<size_t>(jobs, 1));
  return std::min<int>(workers, static_cast<int>(std::max<size_t>(jobs, 1)));
}

// Runs fn(i) for i < n on up to `workers` threads; results keep index order.
template <class Fn>
std::vector<double> parallel_map(size_t n, int workers, Fn fn) {
  std::vector<double> out(n);
  const int w = resolve_workers(workers, n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(w);
  for (int t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (size_t i = t; i < n; i += w) out[i] = fn(i);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

struct Builder {
  const OmegaFrame& frame;
  const Grid& g;
  const EvalOptions& eval;

  cplx gm(double x) const { return gamma_omega(x, frame, eval); }
  GridOperator aff(double c, int s, int t) const { return gamma_affine_op({s, t, c}, frame, g, eval); }
  GridOperator pm(const std::function<cplx(double)>& f) const {
    return GridOperator::position(g, position_multiplier(g, f));
  }
  GridOperator fm(const std::function<cplx(double)>& f) const {
    return GridOperator::frequency(g, frequency_multiplier(g, f));
  }
};

}  // namespace

const std::vector<OperatorIdentity>& operator_catalog() { return kCatalog; }

const OperatorIdentity& operator_identity(OperatorId id) {
  for (const auto& e : kCatalog)
    if (e.id == id) return e;
  throw DomainError("unknown operator identity");
}

std::optional<OperatorId> parse_operator_id(std::string_view name) {
  for (const auto& e : kCatalog)
    if (e.name == name) return e.id;
  return std::nullopt;
}

const char* to_string(FourierSign s) { return s == FourierSign::minus ? "e^{-2i pi xy}" : "e^{+2i pi xy}"; }

OperatorSides operator_sides(OperatorId id, double lam, double mu, const OmegaFrame& frame, const Grid& g,
                             const EvalOptions& eval) {
  require_grid_frame(frame);
  const Builder b{frame, g, eval};
  switch (id) {
    case OperatorId::pentagon:
      return {compose({b.aff(0, 1, 0), b.aff(0, 0, 1)}), compose({b.aff(0, 0, 1), b.aff(0, 1, 1), b.aff(0, 1, 0)})};
    case OperatorId::three_four:
      return {compose({b.aff(0, 0, -1), b.aff(0, 1, 0), b.aff(0, 0, 1)}),
              compose({b.aff(0, 1, 0), b.aff(0, 0, -1), b.aff(0, 0, 1), b.aff(0, 1, 0)})};
    case OperatorId::artin: {
      const GridOperator s1 = artin_sigma(1, frame, g);
      const GridOperator s2 = artin_sigma(2, frame, g);
      return {compose({s1, s2, s1}), compose({s2, s1, s2})};
    }
    case OperatorId::quasi_yb_p:
      return {compose({b.aff(0, 1, 0), b.aff(lam, -1, 0), b.aff(mu, 1, -1), b.aff(lam, -1, 1), b.aff(0, 0, 1),
                       b.aff(mu, 0, -1)}),
              compose({b.aff(mu, 0, -1), b.aff(0, 0, 1), b.aff(0, 1, 1), b.aff(lam + mu, -1, -1), b.aff(0, 1, 0),
                       b.aff(lam, -1, 0)})};
    case OperatorId::quasi_yb_s: {
      const auto& gm = [&b](double x) { return b.gm(x); };
      const GridOperator lhs = compose({b.pm([&](double z) { return gm(-z) / gm(lam - z); }),
                                        b.fm([&](double k) { return gm(k) / gm(lam + mu + k); }),
                                        b.pm([&](double z) { return gm(z) / gm(mu + z); })});
      const GridOperator rhs =
          compose({b.fm([&](double k) { return gm(k) / gm(mu + k); }),
                   b.pm([&](double z) { return gm(-z) * gm(z) / (gm(lam - z) * gm(mu + z)); }),
                   b.fm([&](double k) { return gm(k) / gm(lam + k); })});
      return {lhs, rhs};
    }
    case OperatorId::true_yb:
      return {compose({fz_sigma(lam, 1, frame, g, eval), fz_sigma(lam + mu, 2, frame, g, eval),
                       fz_sigma(mu, 1, frame, g, eval)}),
              compose({fz_sigma(mu, 2, frame, g, eval), fz_sigma(lam + mu, 1, frame, g, eval),
                       fz_sigma(lam, 2, frame, g, eval)})};
    case OperatorId::artin_fourier:
    case OperatorId::unitarity:
      break;
  }
  throw DomainError("identity has no two-sided operator form");
}

OperatorSides quasi_yb_half_shifted(double lam, double mu, const OmegaFrame& frame, const Grid& g,
                                    const EvalOptions& eval) {
  require_grid_frame(frame);
  const Builder b{frame, g, eval};
  const double a = lam / 2;
  const double m = (lam + mu) / 2;
  const double c = mu / 2;
  return {compose({b.aff(a, 1, 0), b.aff(a, -1, 0), b.aff(m, 1, -1), b.aff(m, -1, 1), b.aff(c, 0, 1),
                   b.aff(c, 0, -1)}),
          compose({b.aff(c, 0, -1), b.aff(c, 0, 1), b.aff(m, 1, 1), b.aff(m, -1, -1), b.aff(a, 1, 0),
                   b.aff(a, -1, 0)})};
}

OperatorSides three_four_derived(const OmegaFrame& frame, const Grid& g, const EvalOptions& eval) {
  const OperatorSides pent = operator_sides(OperatorId::pentagon, 0, 0, frame, g, eval);
  const Builder b{frame, g, eval};
  const GridOperator gp = b.aff(0, 1, 0);
  return {compose({b.aff(0, 0, -1), pent.rhs}), compose({gp, artin_sigma(1, frame, g), gp})};
}

double max_residual(const GridOperator& a, const GridOperator& b, const std::vector<GridFunction>& tests,
                    int workers) {
  if (tests.empty()) throw DomainError("test set must be nonempty");
  const auto r = parallel_map(tests.size(), workers, [&](size_t i) {
    return relative_distance(apply(a, tests[i]), apply(b, tests[i]));
  });
  return *std::max_element(r.begin(), r.end());
}

std::vector<NamedOperator> unitarity_family(double lam, double mu, const OmegaFrame& frame, const Grid& g,
                                            const EvalOptions& eval) {
  require_grid_frame(frame);
  const Builder b{frame, g, eval};
  std::vector<NamedOperator> out;
  const struct {
    double c;
    int s, t;
  } args[] = {{0, 1, 0},        {0, 0, 1},       {0, 0, -1},      {0, 1, 1},          {lam, -1, 0},
              {mu, 1, -1},      {lam, -1, 1},    {mu, 0, -1},     {lam + mu, -1, -1}, {lam / 2, 1, 0},
              {lam / 2, -1, 0}, {(lam + mu) / 2, 1, -1}, {(lam + mu) / 2, -1, 1}, {mu / 2, 0, 1},
              {mu / 2, 0, -1},  {(lam + mu) / 2, 1, 1},  {(lam + mu) / 2, -1, -1}};
  for (const auto& a : args)
    out.push_back({"gamma(" + std::to_string(a.c) + "," + std::to_string(a.s) + "," + std::to_string(a.t) + ")",
                   b.aff(a.c, a.s, a.t), 1.0});
  const double abs_alpha = std::abs(reflection_constant(frame));
  out.push_back({"sigma1", artin_sigma(1, frame, g), abs_alpha});
  out.push_back({"sigma2", artin_sigma(2, frame, g), abs_alpha});
  for (double l : {lam, mu, lam + mu}) {
    out.push_back({"sigma1(" + std::to_string(l) + ")", fz_sigma(l, 1, frame, g, eval), abs_alpha});
    out.push_back({"sigma2(" + std::to_string(l) + ")", fz_sigma(l, 2, frame, g, eval), abs_alpha});
  }
  const OperatorSides ratio = operator_sides(OperatorId::quasi_yb_s, lam, mu, frame, g, eval);
  out.push_back({"ratio-lhs", ratio.lhs, 1.0});
  out.push_back({"ratio-rhs", ratio.rhs, 1.0});
  return out;
}

double norm_deviation(const std::vector<NamedOperator>& ops, const std::vector<GridFunction>& tests,
                      int workers) {
  if (tests.empty()) throw DomainError("test set must be nonempty");
  std::vector<double> norms(tests.size());
  for (size_t i = 0; i < tests.size(); ++i) norms[i] = l2_norm(tests[i]);
  double worst = 0.0;
  for (const auto& op : ops) {
    const auto r = parallel_map(tests.size(), workers, [&](size_t i) {
      return std::abs(l2_norm(apply(op.op, tests[i])) / (op.norm_factor * norms[i]) - 1.0);
    });
    worst = std::max(worst, *std::max_element(r.begin(), r.end()));
  }
  return worst;
}

GridFunction direct_fourier(const GridFunction& f, FourierSign sign) {
  const Grid& g = f.grid;
  const int n = g.size;
  const double sgn = sign == FourierSign::plus ? 1.0 : -1.0;
  GridFunction out{g, std::vector<cplx>(n)};
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int w = static_cast<int>(std::min<unsigned>(hw, 16));
  std::vector<std::thread> pool;
  for (int t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      for (int m = t; m < n; m += w) {
        const double x = g.node(m);
        const double sr = std::cos(2.0 * kPi * x * g.spacing);
        const double si = sgn * std::sin(2.0 * kPi * x * g.spacing);
        double ar = 0.0, ai = 0.0, pr = 1.0, pi = 0.0;
        for (int j = 0; j < n; ++j) {
          // reseed the recurrence every 64 nodes to bound drift
          if (j % 64 == 0) {
            const double a = 2.0 * kPi * x * g.node(j);
            pr = std::cos(a);
            pi = sgn * std::sin(a);
          } else {
            const double t = pr * sr - pi * si;
            pi = pr * si + pi * sr;
            pr = t;
          }
          const double fr = f.samples[j].real();
          const double fi = f.samples[j].imag();
          ar += fr * pr - fi * pi;
          ai += fr * pi + fi * pr;
        }
        const cplx acc(ar, ai);
        out.samples[m] = acc * g.spacing;
      }
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

namespace {

OperatorReport artin_fourier_report(const OmegaFrame& frame, const Grid& g, const std::vector<GridFunction>& tests,
                                    double tol) {
  const GridOperator s1 = artin_sigma(1, frame, g);
  const GridOperator s2 = artin_sigma(2, frame, g);
  const GridOperator lhs = compose({s1, s2, s1});
  const cplx alpha = reflection_constant(frame);
  const cplx c = alpha * alpha * alpha * std::polar(1.0, kPi / 4);
  OperatorReport rep;
  rep.tolerance = tol;
  double rm = 0.0;
  double rp = 0.0;
  for (const auto& f : tests) {
    const GridFunction l = apply(lhs, f);
    for (FourierSign sign : {FourierSign::minus, FourierSign::plus}) {
      const GridFunction r = direct_fourier(f, sign);
      GridFunction d{g, l.samples};
      for (size_t j = 0; j < d.samples.size(); ++j) d.samples[j] -= c * r.samples[j];
      double& worst = sign == FourierSign::minus ? rm : rp;
      worst = std::max(worst, l2_norm(d) / l2_norm(f));
    }
  }
  rep.residual_minus = rm;
  rep.residual_plus = rp;
  const bool mm = rm <= tol;
  const bool mp = rp <= tol;
  if (mm == mp)
    throw ConventionUnresolved(mm ? "both Fourier conventions match" : "neither Fourier convention matches");
  rep.convention = mm ? FourierSign::minus : FourierSign::plus;
  rep.residual = std::min(rm, rp);
  rep.pass = true;
  return rep;
}

}  // namespace

OperatorReport verify_operator(OperatorId id, double lam, double mu, const OmegaFrame& frame, const Grid& g,
                               const std::vector<GridFunction>& tests, const OperatorOptions& opts) {
  if (tests.empty()) throw DomainError("test set must be nonempty");
  if (!std::isfinite(lam) || !std::isfinite(mu)) throw DomainError("lambda and mu must be finite");
  for (const auto& f : tests)
    if (!(f.grid == g)) throw GridMismatch("test function lives on a different grid");
  const double tol = opts.tolerance > 0.0 ? opts.tolerance : operator_identity(id).default_tolerance;
  if (id == OperatorId::artin_fourier) return artin_fourier_report(frame, g, tests, tol);
  OperatorReport rep;
  rep.tolerance = tol;
  if (id == OperatorId::unitarity) {
    rep.residual = norm_deviation(unitarity_family(lam, mu, frame, g, opts.eval), tests, opts.workers);
  } else {
    const OperatorSides s = operator_sides(id, lam, mu, frame, g, opts.eval);
    rep.residual = max_residual(s.lhs, s.rhs, tests, opts.workers);
  }
  rep.pass = rep.residual <= tol;
  return rep;
}

namespace {

double floored(double r) { return std::max(r, kOperatorNoiseFloor); }

double residual_on(OperatorId id, double lam, double mu, const OmegaFrame& frame, const Grid& g,
                   const OperatorOptions& opts) {
  return verify_operator(id, lam, mu, frame, g, gaussian_test_set(g), opts).residual;
}

}  // namespace

DoublingReport doubling_check(OperatorId id, double lam, double mu, const OmegaFrame& frame, const Grid& g,
                              const OperatorOptions& opts) {
  DoublingReport rep;
  rep.base = residual_on(id, lam, mu, frame, g, opts);
  rep.doubled_size = residual_on(id, lam, mu, frame, make_grid(g.half_width, 2 * g.size), opts);
  rep.doubled_window = residual_on(id, lam, mu, frame, make_grid(2 * g.half_width, 2 * g.size), opts);
  const double limit = 2.0 * floored(rep.base);
  rep.pass = rep.doubled_size <= limit && rep.doubled_window <= limit;
  return rep;
}

ComparisonReport basis_check(OperatorId id, double lam, double mu, const OmegaFrame& frame, const Grid& g,
                             std::uint64_t seed, const OperatorOptions& opts) {
  ComparisonReport rep;
  rep.base = verify_operator(id, lam, mu, frame, g, gaussian_test_set(g), opts).residual;
  rep.other = verify_operator(id, lam, mu, frame, g, random_phase_test_set(g, seed), opts).residual;
  const double a = floored(rep.base);
  const double b = floored(rep.other);
  rep.ratio = std::max(a, b) / std::min(a, b);
  rep.pass = rep.ratio <= 5.0;
  return rep;
}

ComparisonReport three_four_route_check(const OmegaFrame& frame, const Grid& g, const OperatorOptions& opts) {
  const auto tests = gaussian_test_set(g);
  ComparisonReport rep;
  rep.base = verify_operator(OperatorId::three_four, 0, 0, frame, g, tests, opts).residual;
  const OperatorSides d = three_four_derived(frame, g, opts.eval);
  rep.other = max_residual(d.lhs, d.rhs, tests, opts.workers);
  const double a = floored(rep.base);
  const double b = floored(rep.other);
  rep.ratio = std::max(a, b) / std::min(a, b);
  rep.pass = rep.ratio <= 10.0;
  return rep;
}

}  // namespace qdilog
