#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "oracles.hpp"
#include "qdilog/errors.hpp"
#include "qdilog/qweyl.hpp"

using namespace qdilog;

namespace {

// Matrices on polynomials of degree <= n: v f = x f, u f = x f(q^2 x). Both are nilpotent, so
// everything above degree n vanishes, matching the series truncation.
struct Mat {
  int n;
  std::vector<cplx> a;
  explicit Mat(int n_) : n(n_), a(size_t((n_ + 1) * (n_ + 1)), 0.0) {}
  cplx& at(int i, int j) { return a[size_t(i * (n + 1) + j)]; }
  cplx at(int i, int j) const { return a[size_t(i * (n + 1) + j)]; }
};

Mat operator*(const Mat& x, const Mat& y) {
  Mat r(x.n);
  for (int i = 0; i <= x.n; ++i)
    for (int k = 0; k <= x.n; ++k)
      for (int j = 0; j <= x.n; ++j) r.at(i, j) += x.at(i, k) * y.at(k, j);
  return r;
}
Mat operator+(const Mat& x, const Mat& y) {
  Mat r(x.n);
  for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] + y.a[i];
  return r;
}
Mat operator*(cplx s, const Mat& x) {
  Mat r(x.n);
  for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = s * x.a[i];
  return r;
}
Mat eye(int n) {
  Mat r(n);
  for (int i = 0; i <= n; ++i) r.at(i, i) = 1.0;
  return r;
}
Mat mat_v(int n) {
  Mat r(n);
  for (int m = 0; m < n; ++m) r.at(m + 1, m) = 1.0;
  return r;
}
Mat mat_u(cplx q, int n) {
  Mat r(n);
  for (int m = 0; m < n; ++m) r.at(m + 1, m) = std::pow(q, 2 * m);
  return r;
}
Mat mat_exp(cplx q, const Mat& w) {
  Mat acc = eye(w.n), pw = eye(w.n);
  cplx poch = 1.0;
  for (int k = 1; k <= w.n; ++k) {
    pw = pw * w;
    poch *= 1.0 - std::pow(q, 2 * k);
    const double sign = k % 2 ? -1.0 : 1.0;
    acc = acc + (sign * std::pow(q, k * (k + 1)) / poch) * pw;
  }
  return acc;
}
double mat_dist(const Mat& x, const Mat& y) {
  double d = 0.0;
  for (size_t i = 0; i < x.a.size(); ++i) d = std::max(d, std::abs(x.a[i] - y.a[i]));
  return d;
}
Mat to_mat(const NCSeries& s) {
  const int n = s.max_degree();
  const Mat u = mat_u(s.q(), n), v = mat_v(n);
  Mat r(n);
  for (const auto& [key, c] : s.terms()) {
    Mat m = eye(n);
    for (int i = 0; i < key.first; ++i) m = m * v;
    for (int i = 0; i < key.second; ++i) m = m * u;
    r = r + c * m;
  }
  return r;
}

const cplx kQs[] = {cplx(0.2), std::polar(0.5, kPi / 5), cplx(0.8)};

}  // namespace

TEST_CASE("commutation") {
  const cplx q = std::polar(0.5, kPi / 5);
  const auto u = NCSeries::u(q, 4), v = NCSeries::v(q, 4);
  const auto uv = u * v;
  CHECK(uv.terms().size() == 1);
  CHECK(std::abs(uv.coeff(1, 1) - q * q) < 1e-15);
  const auto sq = (u + v) * (u + v);
  CHECK(std::abs(sq.coeff(0, 2) - 1.0) < 1e-15);
  CHECK(std::abs(sq.coeff(2, 0) - 1.0) < 1e-15);
  CHECK(std::abs(sq.coeff(1, 1) - (1.0 + q * q)) < 1e-15);
  // matrix model obeys the same rule
  const Mat U = mat_u(q, 6), V = mat_v(6);
  CHECK(mat_dist(U * V, (q * q) * (V * U)) < 1e-15);
}

TEST_CASE("truncation") {
  const auto u = NCSeries::u(0.3, 3);
  auto p = u * u * u * u;
  CHECK(p.terms().empty());
  NCSeries s(0.3, 2);
  s.add(2, 1, 5.0);
  CHECK(s.terms().empty());
}

TEST_CASE("q-exponential of a single generator matches the product") {
  for (cplx q : kQs) {
    const int n = 10;
    const auto e = nc_qexp(NCSeries::u(q, n));
    // prod_{k=1}^{40} (1 - q^{2k} u) expanded as a polynomial in u
    std::vector<cplx> poly(size_t(n + 1), 0.0);
    poly[0] = 1.0;
    for (int k = 1; k <= 40; ++k) {
      const cplx c = std::pow(q, 2 * k);
      for (int d = n; d >= 1; --d) poly[size_t(d)] -= c * poly[size_t(d - 1)];
    }
    for (int d = 0; d <= n; ++d) {
      CAPTURE(d);
      const double tol = std::abs(q) > 0.7 ? 1e-6 : 1e-13;
      CHECK(std::abs(e.coeff(0, d) - poly[size_t(d)]) < tol * std::max(1.0, std::abs(poly[size_t(d)])));
    }
  }
}

TEST_CASE("series products agree with the matrix model") {
  for (cplx q : kQs) {
    const int n = 8;
    const auto u = NCSeries::u(q, n), v = NCSeries::v(q, n);
    const Mat U = mat_u(q, n), V = mat_v(n);
    const auto lhs = nc_qexp(u + v);
    CHECK(mat_dist(to_mat(lhs), mat_exp(q, U + V)) < 1e-11);
    const auto prod = nc_qexp(u) * nc_qexp(v);
    CHECK(mat_dist(to_mat(prod), mat_exp(q, U) * mat_exp(q, V)) < 1e-11);
  }
}

TEST_CASE("identities hold in the matrix model") {
  for (cplx q : kQs) {
    const int n = 9;
    const Mat U = mat_u(q, n), V = mat_v(n);
    const Mat braced = U + (-1.0) * (U * V) + V;
    CHECK(mat_dist(mat_exp(q, U + V), mat_exp(q, U) * mat_exp(q, V)) < 1e-10);
    CHECK(mat_dist(mat_exp(q, V) * mat_exp(q, U), mat_exp(q, braced)) < 1e-10);
    CHECK(mat_dist(braced * mat_exp(q, V), mat_exp(q, V) * (U + V)) < 1e-10);
    CHECK(mat_dist((U + V) * mat_exp(q, U), mat_exp(q, U) * braced) < 1e-10);
  }
}

TEST_CASE("formal identities") {
  CHECK(formal_catalog().size() == 4);
  for (const auto& e : formal_catalog()) {
    CHECK(parse_formal_id(e.name) == e.id);
    CHECK(formal_name(e.id) == e.name);
    for (cplx q : kQs) {
      for (int n : {4, 8, 12}) {
        const FormalReport r = verify_formal(e.id, q, n);
        CAPTURE(e.name);
        CAPTURE(q);
        CAPTURE(n);
        CHECK(r.pass);
        CHECK_FALSE(r.first_failing_degree.has_value());
        CHECK(r.max_mismatch <= 1e-12 * r.largest_coefficient);
      }
    }
  }
}

TEST_CASE("a false identity fails at the first degree that sees it") {
  const cplx q = 0.5;
  const auto u = NCSeries::u(q, 6), v = NCSeries::v(q, 6);
  // E(u) E(v) is the ordered product; the reversed order is not
  const FormalReport r = compare_series(nc_qexp(u + v), nc_qexp(v) * nc_qexp(u), 1e-12);
  CHECK_FALSE(r.pass);
  REQUIRE(r.first_failing_degree.has_value());
  CHECK(*r.first_failing_degree == 2);
  CHECK(r.max_mismatch > 1e-3);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(verify_formal(FormalId::brace, 1.0, 6), DomainError);
  CHECK_THROWS_AS(verify_formal(FormalId::brace, 0.0, 6), DomainError);
  CHECK_THROWS_AS(verify_formal(FormalId::brace, 0.5, 1), DomainError);
  CHECK_THROWS_AS(NCSeries::u(0.5, 4) + NCSeries::u(0.4, 4), MismatchError);
  CHECK_THROWS_AS(NCSeries::u(0.5, 4) * NCSeries::u(0.5, 5), MismatchError);
  CHECK_THROWS_AS(nc_qexp(NCSeries::constant(1.0, 0.5, 4)), DomainError);
  CHECK_THROWS_AS(NCSeries::monomial(-1, 0, 1.0, 0.5, 4), DomainError);
  CHECK_FALSE(parse_formal_id("pentagon").has_value());
}
