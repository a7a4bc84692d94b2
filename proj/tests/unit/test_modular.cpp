#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qdilog/errors.hpp"
#include "qdilog/modular.hpp"

using namespace qdilog;

TEST_CASE("nomes") {
  const auto mp = make_modular_param(cplx(0.3, 0.8));
  CHECK(std::abs(mp.q - std::exp(kI * kPi * mp.tau)) < 1e-15);
  CHECK(std::abs(mp.q_dual - std::exp(-kI * kPi / mp.tau)) < 1e-15);
  CHECK_THROWS_AS(make_modular_param(cplx(0.3, -0.1)), DomainError);
  CHECK_THROWS_AS(make_modular_param(cplx(1.0, 0.0)), DomainError);
}

TEST_CASE("omega frame geometry") {
  for (double th : {kPi / 2, kPi / 3, 2 * kPi / 3}) {
    const auto f = make_omega_frame(th, 1 / (2 * kPi));
    CHECK(std::abs(f.omega_p / f.omega - f.tau) < 1e-14);
    CHECK(std::abs(std::abs(f.tau) - 1.0) < 1e-15);
    CHECK(f.omega_pp.real() == 0.0);
    CHECK(std::abs(f.omega_pp - (f.omega + f.omega_p)) < 1e-15);
    // -2 omega omega' / pi = hbar fixes the normalization
    CHECK(std::abs(-2.0 * f.omega * f.omega_p / kPi - f.hbar) < 1e-15);
    const cplx z(0.37, -0.21);
    CHECK(std::abs(frame_unmap(frame_map(z, f), f) - z) < 1e-15);
  }
  CHECK_THROWS_AS(make_omega_frame(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(make_omega_frame(1.0, -1.0), DomainError);
}

TEST_CASE("lattice kinds and ordering") {
  const Frame f{make_modular_param(cplx(0, 1))};
  const auto zeros = lattice_points(f, LatticeKind::zero, 3.0);
  // k, l >= 1 with k^2 + l^2 <= 9: (1,1),(2,1),(1,2),(2,2)
  REQUIRE(zeros.size() == 4);
  CHECK(zeros[0].k == 1);
  CHECK(zeros[0].l == 1);
  CHECK(zeros[1].k == 2);
  CHECK(zeros[1].l == 1);
  CHECK(zeros[3].k == 2);
  CHECK(zeros[3].l == 2);
  for (const auto& p : zeros) CHECK(std::abs(p.location - cplx(p.k, p.l)) < 1e-15);

  const auto poles = lattice_points(f, LatticeKind::pole, 1.5);
  // (0,0),(-1,0),(0,-1),(-1,-1)
  CHECK(poles.size() == 4);
  CHECK_THROWS_AS(lattice_points(f, LatticeKind::regular, 2.0), DomainError);
  CHECK_THROWS_AS(lattice_points(f, LatticeKind::zero, -1.0), DomainError);
}

TEST_CASE("omega-frame labels are odd") {
  const auto of = make_omega_frame(kPi / 2, 1 / (2 * kPi));
  const Frame f{of};
  const auto zeros = lattice_points(f, LatticeKind::zero, 2.0);
  REQUIRE(!zeros.empty());
  for (const auto& p : zeros) {
    CHECK(p.k % 2 != 0);
    CHECK(p.l % 2 != 0);
    CHECK(std::abs(p.location - (double(p.k) * of.omega + double(p.l) * of.omega_p)) < 1e-14);
  }
  // first zero is omega''
  CHECK(std::abs(zeros.front().location - of.omega_pp) < 1e-14);
  const auto poles = lattice_points(f, LatticeKind::pole, 1.0);
  bool found = false;
  for (const auto& p : poles) found |= std::abs(p.location + of.omega_pp) < 1e-14;
  CHECK(found);
}

TEST_CASE("nearest lattice point on a sheared lattice") {
  const auto mp = make_modular_param(cplx(0.9, 0.3));
  // brute-force oracle
  for (cplx z : {cplx(0.1, 0.2), cplx(-2.3, 0.7), cplx(1.45, -0.16)}) {
    double best = 1e300;
    for (int k = -20; k <= 20; ++k)
      for (int l = -20; l <= 20; ++l) best = std::min(best, std::abs(z - (double(k) + double(l) * mp.tau)));
    CHECK(std::abs(lattice_distance(z, mp) - best) < 1e-14);
  }
  const auto p = nearest_lattice_point(cplx(1.0, 0.0) + mp.tau + cplx(1e-9, 0), mp);
  CHECK(p.k == 1);
  CHECK(p.l == 1);
  CHECK(p.kind == LatticeKind::zero);
}

TEST_CASE("symmetry point") {
  const auto mp = make_modular_param(cplx(0.3, 0.8));
  CHECK(std::abs(symmetry_point(Frame{mp}) - (1.0 + mp.tau) / 2.0) < 1e-15);
  CHECK(symmetry_point(Frame{make_omega_frame(1.0, 0.2)}) == cplx(0, 0));
}
