#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qdilog/gamma.hpp"

namespace qdilog {

enum class ScalarId {
  diff_tau,
  diff_one,
  spectral_tau,
  spectral_one,
  reflection,
  residue,
  gamma_one,
  omega_diff_p,
  omega_diff,
  omega_reflection,
  unit_modulus,
  frame_consistency,
  southeast_limit,
};

enum class FrameKind { original, omega };

struct ScalarIdentity {
  ScalarId id;
  std::string_view name;
  FrameKind frame;
  int arity;
  std::string_view formula;
};

const std::vector<ScalarIdentity>& scalar_catalog();
const ScalarIdentity& scalar_identity(ScalarId id);
std::optional<ScalarId> parse_scalar_id(std::string_view name);

struct ResidualReport {
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool warning = false;  // some evaluation was close to a cancelled lattice point
};

struct ScalarOptions {
  EvalOptions eval;
  double tolerance = 1e-9;
};

// residual = |LHS - RHS| / max(|LHS|, |RHS|, 1); the southeast limit reports |gamma(z) - 1|.
ResidualReport verify_scalar(ScalarId id, std::span<const cplx> params, const Frame& frame,
                             const ScalarOptions& opts = {});

// Rectangular box for z (and lambda for the spectral identities); sector sampling for the
// southeast limit uses radii [r_min, r_max] and angles [phi_min, phi_max].
struct SamplerSpec {
  cplx lo{-1.0, -1.0};
  cplx hi{2.0, 2.0};
  double lambda_im_max = 1.0;
  double r_min = 20.0, r_max = 40.0;
  double phi_min = 0.0, phi_max = 0.0;  // both zero: middle half of the southeast sector
  double lattice_margin = 1e-3;
  std::uint64_t seed = 1;
};

struct SweepReport {
  double max_residual = 0.0;
  int count = 0;
  int failures = 0;
  int warnings = 0;
  std::vector<cplx> worst_params;
};

SweepReport sample_sweep(ScalarId id, const SamplerSpec& spec, int count, const Frame& frame,
                         const ScalarOptions& opts = {});

// mt19937_64 with a fixed bits-to-double conversion, so draws match across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace qdilog
