#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qdilog/contour.hpp"
#include "qdilog/gamma.hpp"
#include "qdilog/scalar_identities.hpp"

namespace qdilog {

enum class IntegralId {
  tau_gamma,
  tau_binomial,
  gaussian_const,
  addition,
  ultimate,
  omega_ft,
  omega_tbt,
  eigen_conv,
};

struct IntegralIdentity {
  IntegralId id;
  std::string_view name;
  FrameKind frame;
  int arity;
  double default_tolerance;
  bool best_effort;  // failures downgrade to warnings
  std::string_view formula;
};

const std::vector<IntegralIdentity>& integral_catalog();
const IntegralIdentity& integral_identity(IntegralId id);
std::optional<IntegralId> parse_integral_id(std::string_view name);

struct IntegralOptions {
  EvalOptions eval;
  QuadOptions quad{1e-8, 16, 4000, 1e-14};
  double tolerance = 0.0;  // 0 selects the catalog default
  RouteOptions route;
};

struct IntegralEvaluation {
  cplx lhs;
  cplx rhs;
  double quad_error = 0.0;
  Contour contour;
};

// Routes the contour for the identity's pole families and evaluates both sides.
IntegralEvaluation evaluate_integral(IntegralId id, std::span<const cplx> params, const Frame& frame,
                                     const IntegralOptions& opts = {});

struct IntegralReport {
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  cplx lhs;
  cplx rhs;
  double quad_error = 0.0;
  double direction_angle = 0.0;
  double margin = 0.0;
  int indentations = 0;
};

IntegralReport verify_integral(IntegralId id, std::span<const cplx> params, const Frame& frame,
                               const IntegralOptions& opts = {});

struct CheckReport {
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Shifts the routed line by +-fraction of its pole margin and compares the integrals.
CheckReport deformation_check(IntegralId id, std::span<const cplx> params, const Frame& frame,
                              const IntegralOptions& opts = {}, double fraction = 0.1);

// Point on the southeast bisector with the given real part.
cplx southeast_point(const ModularParam& mp, double real_part);

// tau-binomial with y far southeast against tau-gamma at the same z.
CheckReport degeneration_binomial_to_gamma(cplx z, const ModularParam& mp,
                                           const IntegralOptions& opts = {}, double re_y = 12.0,
                                           double tolerance = 1e-5);

// addition theorem with kappa far southeast against its kappa-free binomial form
// g(nu+mu) g(mu) = -1/(tau g(1)) int e^{2i pi s(nu+s)/tau} g(nu+s) g(mu-s) g(s) ds.
CheckReport degeneration_addition_to_binomial(cplx nu, cplx mu, const ModularParam& mp,
                                              const IntegralOptions& opts = {},
                                              double re_kappa = 12.0, double tolerance = 1e-5);

}  // namespace qdilog
