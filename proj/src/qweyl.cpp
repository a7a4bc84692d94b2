#include "qdilog/qweyl.hpp"

#include <algorithm>
#include <cmath>

#include "qdilog/errors.hpp"

namespace qdilog {

NCSeries::NCSeries(cplx q, int max_degree) : q_(q), n_(max_degree) {
  if (max_degree < 0) throw DomainError("negative truncation degree");
}

NCSeries NCSeries::constant(cplx c, cplx q, int max_degree) {
  return monomial(0, 0, c, q, max_degree);
}

NCSeries NCSeries::monomial(int a, int b, cplx coef, cplx q, int max_degree) {
  if (a < 0 || b < 0) throw DomainError("negative exponent");
  NCSeries s(q, max_degree);
  s.add(a, b, coef);
  return s;
}

cplx NCSeries::coeff(int a, int b) const {
  auto it = terms_.find({a, b});
  return it == terms_.end() ? cplx(0.0) : it->second;
}

void NCSeries::add(int a, int b, cplx c) {
  if (a + b > n_) return;
  terms_[{a, b}] += c;
}

void NCSeries::check_compatible(const NCSeries& o) const {
  if (q_ != o.q_ || n_ != o.n_) throw MismatchError("series differ in q or truncation degree");
}

NCSeries NCSeries::operator+(const NCSeries& o) const {
  check_compatible(o);
  NCSeries r = *this;
  for (const auto& [k, c] : o.terms_) r.add(k.first, k.second, c);
  return r;
}

NCSeries NCSeries::operator-(const NCSeries& o) const { return *this + o * cplx(-1.0); }

NCSeries NCSeries::operator*(cplx s) const {
  NCSeries r(q_, n_);
  for (const auto& [k, c] : terms_) r.add(k.first, k.second, c * s);
  return r;
}

double NCSeries::max_abs() const {
  double m = 0.0;
  for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

NCSeries nc_mul(const NCSeries& a, const NCSeries& b) {
  a.check_compatible(b);
  const int n = a.n_;
  // (q^2)^m for m up to n^2 by repeated multiplication.
  std::vector<cplx> q2pow(static_cast<size_t>(n) * n + 1);
  q2pow[0] = 1.0;
  for (size_t m = 1; m < q2pow.size(); ++m) q2pow[m] = q2pow[m - 1] * a.q_ * a.q_;
  NCSeries r(a.q_, n);
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      const int deg = ka.first + ka.second + kb.first + kb.second;
      if (deg > n) continue;
      // v^a u^b v^c u^d = q^{2bc} v^{a+c} u^{b+d}
      r.add(ka.first + kb.first, ka.second + kb.second, q2pow[ka.second * kb.first] * ca * cb);
    }
  }
  return r;
}

NCSeries nc_qexp(const NCSeries& w) {
  if (w.coeff(0, 0) != cplx(0.0)) throw DomainError("nc_qexp needs a zero constant term");
  const cplx q = w.q();
  const int n = w.max_degree();
  const cplx q2 = q * q;
  NCSeries result = NCSeries::constant(1.0, q, n);
  NCSeries power = NCSeries::constant(1.0, q, n);
  cplx poch = 1.0;   // (q^2; q^2)_k
  cplx q2k = 1.0;    // q^{2k}
  cplx qk = 1.0;     // q^{k(k+1)}
  for (int k = 1; k <= n; ++k) {
    q2k *= q2;
    poch *= 1.0 - q2k;
    if (std::abs(poch) < 1e-8) throw DomainError("(q^2; q^2)_k too close to zero");
    qk *= q2k;  // q^{k(k+1)} = q^{(k-1)k} q^{2k}
    power = nc_mul(power, w);
    const double sign = (k % 2) ? -1.0 : 1.0;
    result = result + power * (sign * qk / poch);
  }
  return result;
}

namespace {

const std::vector<FormalIdentity> kCatalog = {
    {FormalId::brace, "brace", "(u - uv + v) E(v) = E(v) (u + v)"},
    {FormalId::brace_2, "brace-2", "(u + v) E(u) = E(u) (u - uv + v)"},
    {FormalId::schuetzenberger, "schuetzenberger", "E(u + v) = E(u) E(v)"},
    {FormalId::reversed, "reversed", "E(v) E(u) = E(u - uv + v)"},
};

}  // namespace

const std::vector<FormalIdentity>& formal_catalog() { return kCatalog; }

std::optional<FormalId> parse_formal_id(std::string_view name) {
  for (const auto& e : kCatalog) {
    if (e.name == name) return e.id;
  }
  return std::nullopt;
}

std::string_view formal_name(FormalId id) {
  for (const auto& e : kCatalog) {
    if (e.id == id) return e.name;
  }
  return "?";
}

FormalReport compare_series(const NCSeries& lhs, const NCSeries& rhs, double rel_tol) {
  FormalReport rep;
  rep.largest_coefficient = std::max(lhs.max_abs(), rhs.max_abs());
  const NCSeries diff = lhs - rhs;
  const double bound = rel_tol * rep.largest_coefficient;
  for (const auto& [k, c] : diff.terms()) {
    const double m = std::abs(c);
    rep.max_mismatch = std::max(rep.max_mismatch, m);
    if (m > bound) {
      const int d = k.first + k.second;
      if (!rep.first_failing_degree || d < *rep.first_failing_degree) rep.first_failing_degree = d;
    }
  }
  rep.pass = !rep.first_failing_degree.has_value();
  return rep;
}

FormalReport verify_formal(FormalId id, cplx q, int n, double rel_tol) {
  if (!(std::abs(q) < 1.0) || q == cplx(0.0)) throw DomainError("formal identities need 0 < |q| < 1");
  if (n < 2) throw DomainError("truncation degree must be at least 2");
  const NCSeries u = NCSeries::u(q, n);
  const NCSeries v = NCSeries::v(q, n);
  const NCSeries braced = u - u * v + v;
  switch (id) {
    case FormalId::brace: {
      const NCSeries ev = nc_qexp(v);
      return compare_series(braced * ev, ev * (u + v), rel_tol);
    }
    case FormalId::brace_2: {
      const NCSeries eu = nc_qexp(u);
      return compare_series((u + v) * eu, eu * braced, rel_tol);
    }
    case FormalId::schuetzenberger:
      return compare_series(nc_qexp(u + v), nc_qexp(u) * nc_qexp(v), rel_tol);
    case FormalId::reversed:
      return compare_series(nc_qexp(v) * nc_qexp(u), nc_qexp(braced), rel_tol);
  }
  throw DomainError("unknown formal identity");
}

}  // namespace qdilog
