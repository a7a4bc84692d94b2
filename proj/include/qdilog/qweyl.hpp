#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "qdilog/modular.hpp"

namespace qdilog {

// Degree-truncated series in u, v with uv = q^2 vu; key (a, b) stands for v^a u^b.
class NCSeries {
 public:
  using Key = std::pair<int, int>;

  NCSeries(cplx q, int max_degree);

  static NCSeries constant(cplx c, cplx q, int max_degree);
  static NCSeries monomial(int a, int b, cplx coef, cplx q, int max_degree);
  static NCSeries u(cplx q, int max_degree) { return monomial(0, 1, 1.0, q, max_degree); }
  static NCSeries v(cplx q, int max_degree) { return monomial(1, 0, 1.0, q, max_degree); }

  cplx q() const { return q_; }
  int max_degree() const { return n_; }
  const std::map<Key, cplx>& terms() const { return terms_; }
  cplx coeff(int a, int b) const;
  // Terms with a + b > max_degree are dropped.
  void add(int a, int b, cplx c);

  NCSeries operator+(const NCSeries& o) const;
  NCSeries operator-(const NCSeries& o) const;
  NCSeries operator*(cplx s) const;

  double max_abs() const;

 private:
  void check_compatible(const NCSeries& o) const;
  cplx q_;
  int n_;
  std::map<Key, cplx> terms_;
  friend NCSeries nc_mul(const NCSeries& a, const NCSeries& b);
};

NCSeries nc_mul(const NCSeries& a, const NCSeries& b);
inline NCSeries operator*(const NCSeries& a, const NCSeries& b) { return nc_mul(a, b); }

// E(W) = sum_k (-1)^k q^{k(k+1)} W^k / (q^2; q^2)_k, truncated at the series degree.
NCSeries nc_qexp(const NCSeries& w);

enum class FormalId { brace, brace_2, schuetzenberger, reversed };

struct FormalIdentity {
  FormalId id;
  std::string_view name;
  std::string_view formula;
};

const std::vector<FormalIdentity>& formal_catalog();
std::optional<FormalId> parse_formal_id(std::string_view name);
std::string_view formal_name(FormalId id);

struct FormalReport {
  double max_mismatch = 0.0;
  double largest_coefficient = 0.0;
  std::optional<int> first_failing_degree;
  bool pass = false;
};

FormalReport verify_formal(FormalId id, cplx q, int max_degree, double rel_tol = 1e-12);

// Coefficient comparison of two series through their common degree.
FormalReport compare_series(const NCSeries& lhs, const NCSeries& rhs, double rel_tol);

}  // namespace qdilog
