#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>

#include "oracles.hpp"
#include "qdilog/errors.hpp"
#include "qdilog/integral_identities.hpp"

using namespace qdilog;

namespace {
const ModularParam kI1 = make_modular_param(cplx(0, 1));
const ModularParam kT = make_modular_param(cplx(0.3, 0.8));
const OmegaFrame kW = make_omega_frame(kPi / 2, 1 / (2 * kPi));
}  // namespace

TEST_CASE("catalog") {
  const auto& cat = integral_catalog();
  CHECK(cat.size() == 8);
  std::set<std::string> names;
  for (const auto& e : cat) {
    names.insert(std::string(e.name));
    CHECK(parse_integral_id(e.name) == e.id);
  }
  CHECK(names.size() == cat.size());
  CHECK(integral_identity(IntegralId::ultimate).default_tolerance == 1e-5);
  CHECK(integral_identity(IntegralId::eigen_conv).best_effort);
  CHECK(integral_identity(IntegralId::gaussian_const).default_tolerance == 1e-8);
}

TEST_CASE("tau-gamma") {
  const cplx p[] = {cplx(0.4, 0.1)};
  const auto r = verify_integral(IntegralId::tau_gamma, p, kT);
  CHECK(r.pass);
  CHECK(r.residual < 1e-6);
  // the left side is gamma itself, cross-checked against the plain product
  CHECK(std::abs(r.lhs - oracle::gamma_naive(p[0], kT.tau)) < 1e-11);
}

TEST_CASE("tau-binomial") {
  const cplx p[] = {(1.0 + kI1.tau) / 2.0, cplx(0.3)};
  const auto r = verify_integral(IntegralId::tau_binomial, p, kI1);
  CHECK(r.residual < 1e-6);
  CHECK(r.indentations == 0);
  const cplx expect = oracle::gamma_naive(p[0], kI1.tau) * oracle::gamma_naive(p[1], kI1.tau) /
                      oracle::gamma_naive(p[0] + p[1], kI1.tau);
  CHECK(std::abs(r.rhs - expect) < 1e-6 * std::abs(expect));
}

TEST_CASE("tau-binomial through an indented contour") {
  const cplx p[] = {cplx(-0.5, -0.5), cplx(0.3)};
  const auto r = verify_integral(IntegralId::tau_binomial, p, kI1);
  CHECK(r.indentations > 0);
  CHECK(r.residual < 1e-6);
}

TEST_CASE("exclusion set") {
  const cplx p[] = {cplx(0.3, 0.2), cplx(-0.3, -0.2)};
  CHECK_THROWS_AS(verify_integral(IntegralId::tau_binomial, p, kI1), DomainError);
  const cplx one[] = {cplx(0.3)};
  CHECK_THROWS_AS(verify_integral(IntegralId::tau_binomial, one, kI1), DomainError);
  CHECK_THROWS_AS(verify_integral(IntegralId::omega_ft, one, kI1), DomainError);
}

TEST_CASE("gaussian constant") {
  for (const auto& mp : {kI1, kT}) {
    const auto r = verify_integral(IntegralId::gaussian_const, {}, mp);
    CHECK(r.residual < 1e-8);
  }
}

TEST_CASE("addition and the ultimate identity") {
  const cplx a[] = {cplx(0.2), cplx(0.25), cplx(0.35)};
  CHECK(verify_integral(IntegralId::addition, a, kI1).residual < 1e-6);
  const cplx u1[] = {cplx(0.2), cplx(0.25), cplx(0.3), cplx(0.35)};
  const cplx u2[] = {cplx(0.15), cplx(0.3), cplx(0.25), cplx(0.2)};
  const cplx u3[] = {cplx(0.25, 0.05), cplx(0.2), cplx(0.35), cplx(0.3, -0.05)};
  for (auto u : {std::span<const cplx>(u1), std::span<const cplx>(u2), std::span<const cplx>(u3)}) {
    const auto r = verify_integral(IntegralId::ultimate, u, kI1);
    CHECK(r.pass);
    CHECK(r.residual < 1e-5);
  }
}

TEST_CASE("a mis-stated ultimate identity fails") {
  // swapping which parameter enters the shifted factors changes the left side
  const cplx u[] = {cplx(0.2), cplx(0.25), cplx(0.3), cplx(0.35)};
  const auto r = verify_integral(IntegralId::ultimate, u, kI1);
  const cplx wrong = r.lhs * gamma_tau(0.2 + 0.3, kI1) / gamma_tau(0.25 + 0.3, kI1);
  CHECK(std::abs(wrong - r.rhs) / std::abs(r.rhs) > 1e-2);
}

TEST_CASE("omega frame images") {
  const cplx z[] = {cplx(0.0, 0.3)};
  const auto r6 = verify_integral(IntegralId::omega_ft, z, kW);
  CHECK(r6.residual < 1e-6);
  const cplx yz[] = {cplx(0.3, 0.1), cplx(0.0, 0.3)};
  const auto r7 = verify_integral(IntegralId::omega_tbt, yz, kW);
  CHECK(r7.residual < 1e-6);

  // same instances in the original frame through z_tau = (z + w'')/2w
  const ModularParam mp = modular_param(kW);
  const cplx zt[] = {frame_map(z[0] - kW.omega_pp, kW)};
  const auto r1 = verify_integral(IntegralId::tau_gamma, zt, mp);
  CHECK(std::abs(r1.lhs - r6.lhs) < 1e-13);
  const cplx yzt[] = {frame_map(yz[0], kW), frame_map(yz[1] - kW.omega_pp, kW)};
  const auto r2 = verify_integral(IntegralId::tau_binomial, yzt, mp);
  CHECK(std::abs(r2.lhs - r7.lhs) < 1e-12 * std::abs(r7.lhs));
  CHECK(r1.residual <= 10.0 * r6.residual);
  CHECK(r6.residual <= 10.0 * r1.residual);
  CHECK(r2.residual <= 10.0 * r7.residual);
  CHECK(r7.residual <= 10.0 * r2.residual);
}

TEST_CASE("deformation invariance") {
  IntegralOptions o;
  const cplx p1[] = {cplx(0.4, 0.1)};
  const auto d1 = deformation_check(IntegralId::tau_gamma, p1, kT, o);
  CHECK(d1.pass);
  CHECK(d1.tolerance == doctest::Approx(10 * o.quad.eps_quad));
  const cplx p2[] = {(1.0 + kI1.tau) / 2.0, cplx(0.3)};
  CHECK(deformation_check(IntegralId::tau_binomial, p2, kI1, o).pass);
  CHECK(deformation_check(IntegralId::gaussian_const, {}, kT, o).pass);
}

TEST_CASE("halving eps_quad keeps passing residuals passing") {
  const cplx p[] = {cplx(0.4, 0.1)};
  IntegralOptions o;
  const auto a = verify_integral(IntegralId::tau_gamma, p, kT, o);
  o.quad.eps_quad /= 2;
  const auto b = verify_integral(IntegralId::tau_gamma, p, kT, o);
  CHECK(a.pass);
  CHECK(b.pass);
}

TEST_CASE("degenerations") {
  CHECK(degeneration_binomial_to_gamma(cplx(0.3, 0.1), kI1).pass);
  CHECK(degeneration_addition_to_binomial(cplx(0.2), cplx(0.25), kI1).pass);
}

TEST_CASE("direction override outside the sector") {
  IntegralOptions o;
  o.route.angle = 0.5;
  const cplx p[] = {cplx(0.4, 0.1)};
  CHECK_THROWS_AS(verify_integral(IntegralId::tau_gamma, p, kT, o), RoutingError);
}

TEST_CASE("eigenfunction convolution is best effort") {
  const cplx p[] = {cplx(0.5, -0.3), cplx(0.2)};
  const auto r = verify_integral(IntegralId::eigen_conv, p, kI1);
  CHECK(r.tolerance == 1e-3);
  MESSAGE("eigen-conv residual " << r.residual);
}
