#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qdilog/grid.hpp"

namespace qdilog {

enum class OperatorId {
  pentagon,
  three_four,
  artin,
  artin_fourier,
  quasi_yb_p,
  quasi_yb_s,
  true_yb,
  unitarity,
};

struct OperatorIdentity {
  OperatorId id;
  std::string_view name;
  bool uses_params;  // depends on (lambda, mu)
  double default_tolerance;
  std::string_view formula;
};

const std::vector<OperatorIdentity>& operator_catalog();
const OperatorIdentity& operator_identity(OperatorId id);
std::optional<OperatorId> parse_operator_id(std::string_view name);

struct OperatorOptions {
  EvalOptions eval;
  double tolerance = 0.0;  // 0 selects the catalog default
  int workers = 0;         // test functions applied concurrently; 0 = one thread per function
};

// Sign of the Fourier kernel e^{sign 2 i pi x y}.
enum class FourierSign { minus, plus };
const char* to_string(FourierSign s);

struct OperatorReport {
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  // artin-fourier only
  std::optional<FourierSign> convention;
  double residual_minus = 0.0;
  double residual_plus = 0.0;
};

struct OperatorSides {
  GridOperator lhs;
  GridOperator rhs;
};

// Both sides of an equality-type identity (all ids except artin-fourier and unitarity).
OperatorSides operator_sides(OperatorId id, double lambda, double mu, const OmegaFrame& frame,
                             const Grid& g, const EvalOptions& eval = {});

// Half-shifted form of the six-factor quasi-Yang-Baxter identity.
OperatorSides quasi_yb_half_shifted(double lambda, double mu, const OmegaFrame& frame, const Grid& g,
                                    const EvalOptions& eval = {});

// Pentagon-then-reflection route to the 3=4 identity:
// gamma(-Q) [gamma(Q) gamma(p+Q) gamma(p)] against gamma(p) sigma_1 gamma(p).
OperatorSides three_four_derived(const OmegaFrame& frame, const Grid& g, const EvalOptions& eval = {});

// max over tests of ||A f - B f|| / ||f||
double max_residual(const GridOperator& a, const GridOperator& b, const std::vector<GridFunction>& tests,
                    int workers = 0);

// Every gamma(affine) and sigma operator used by the catalog, with its expected norm factor.
struct NamedOperator {
  std::string name;
  GridOperator op;
  double norm_factor;
};
std::vector<NamedOperator> unitarity_family(double lambda, double mu, const OmegaFrame& frame, const Grid& g,
                                            const EvalOptions& eval = {});
// max over operators and tests of | ||A f|| / (c ||f||) - 1 |
double norm_deviation(const std::vector<NamedOperator>& ops, const std::vector<GridFunction>& tests,
                      int workers = 0);

// Continuum Fourier transform with kernel e^{sign 2 i pi x z}, sampled back on the nodes by a direct sum.
GridFunction direct_fourier(const GridFunction& f, FourierSign sign);

OperatorReport verify_operator(OperatorId id, double lambda, double mu, const OmegaFrame& frame,
                               const Grid& g, const std::vector<GridFunction>& tests,
                               const OperatorOptions& opts = {});

// Residuals below this are treated as equal when comparing two runs.
inline constexpr double kOperatorNoiseFloor = 1e-12;

struct ComparisonReport {
  double base = 0.0;
  double other = 0.0;
  double ratio = 0.0;  // with both sides floored at kOperatorNoiseFloor
  bool pass = false;
};

// Re-runs on the grid with doubled M (fixed L) and with doubled L and M (fixed spacing).
// Passes when neither run exceeds twice the base residual.
struct DoublingReport {
  double base = 0.0;
  double doubled_size = 0.0;
  double doubled_window = 0.0;
  bool pass = false;
};
DoublingReport doubling_check(OperatorId id, double lambda, double mu, const OmegaFrame& frame,
                              const Grid& g, const OperatorOptions& opts = {});

// Gaussian set against the random-phase set; pass when the residuals agree within 5x.
ComparisonReport basis_check(OperatorId id, double lambda, double mu, const OmegaFrame& frame, const Grid& g,
                             std::uint64_t seed, const OperatorOptions& opts = {});

// Derived 3=4 route against the direct one; pass within 10x.
ComparisonReport three_four_route_check(const OmegaFrame& frame, const Grid& g, const OperatorOptions& opts = {});

}  // namespace qdilog
