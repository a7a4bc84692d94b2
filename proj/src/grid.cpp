#include "qdilog/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "qdilog/errors.hpp"
#include "qdilog/scalar_identities.hpp"

namespace qdilog {

double Grid::frequency(int m) const {
  const int k = (m < size / 2) ? m : m - size;
  return k / (2.0 * half_width);
}

Grid make_grid(double half_width, int size) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw DomainError("grid half-width must be positive");
  if (size < 256 || (size & (size - 1)) != 0) throw DomainError("grid size must be a power of two >= 256");
  return Grid{half_width, size, 2.0 * half_width / size};
}

std::vector<double> grid_nodes(const Grid& g) {
  std::vector<double> z(g.size);
  for (int j = 0; j < g.size; ++j) z[j] = g.node(j);
  return z;
}

std::vector<double> grid_frequencies(const Grid& g) {
  std::vector<double> k(g.size);
  for (int m = 0; m < g.size; ++m) k[m] = g.frequency(m);
  return k;
}

GridFunction sample(const Grid& g, const std::function<cplx(double)>& f) {
  GridFunction out{g, std::vector<cplx>(g.size)};
  for (int j = 0; j < g.size; ++j) {
    out.samples[j] = f(g.node(j));
    if (!std::isfinite(out.samples[j].real()) || !std::isfinite(out.samples[j].imag()))
      throw DomainError("non-finite sample");
  }
  return out;
}

double l2_norm(const GridFunction& f) {
  double s = 0.0;
  for (const cplx& v : f.samples) s += std::norm(v);
  return std::sqrt(f.grid.spacing * s);
}

double relative_distance(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid == b.grid)) throw GridMismatch("functions live on different grids");
  GridFunction d{a.grid, a.samples};
  for (size_t j = 0; j < d.samples.size(); ++j) d.samples[j] -= b.samples[j];
  return l2_norm(d) / l2_norm(b);
}

// ---------------------------------------------------------------------------
// FFTW plans, created once per (size, sign). Planning is not thread-safe, execution is.

namespace {

struct PlanCache {
  std::mutex mu;
  std::map<std::pair<int, int>, fftw_plan> plans;

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = plans.find({n, sign});
    if (it != plans.end()) return it->second;
    std::vector<cplx> tmp(n);
    auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
    fftw_plan plan = fftw_plan_dft_1d(n, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans[{n, sign}] = plan;
    return plan;
  }
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void fft_inplace(std::vector<cplx>& data, int sign) {
  fftw_plan plan = plan_cache().get(static_cast<int>(data.size()), sign);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

void check_multiplier(const Grid& g, const std::vector<cplx>& m) {
  if (static_cast<int>(m.size()) != g.size) throw GridMismatch("multiplier length differs from grid size");
}

}  // namespace

GridOperator GridOperator::position(const Grid& g, std::vector<cplx> mult) {
  check_multiplier(g, mult);
  GridOperator op(g);
  op.steps_.push_back({StepKind::position, std::move(mult)});
  return op;
}

GridOperator GridOperator::frequency(const Grid& g, std::vector<cplx> mult) {
  check_multiplier(g, mult);
  GridOperator op(g);
  op.steps_.push_back({StepKind::frequency, std::move(mult)});
  return op;
}

GridOperator GridOperator::dft(const Grid& g, bool inverse) {
  GridOperator op(g);
  op.steps_.push_back({inverse ? StepKind::dft_inverse : StepKind::dft_forward, {}});
  return op;
}

GridOperator GridOperator::scalar(const Grid& g, cplx c) {
  GridOperator op(g);
  op.scalar_ = c;
  return op;
}

GridOperator GridOperator::scaled(cplx c) const {
  GridOperator op = *this;
  op.scalar_ *= c;
  return op;
}

void GridOperator::push(GridStep step) {
  const bool mult = step.kind == StepKind::position || step.kind == StepKind::frequency;
  if (mult && !steps_.empty() && steps_.back().kind == step.kind) {
    auto& m = steps_.back().multiplier;
    for (size_t j = 0; j < m.size(); ++j) m[j] *= step.multiplier[j];
    return;
  }
  steps_.push_back(std::move(step));
}

GridOperator GridOperator::after(const GridOperator& other) const {
  if (!(grid_ == other.grid_)) throw GridMismatch("operators live on different grids");
  GridOperator r = other;
  r.scalar_ *= scalar_;
  for (const auto& s : steps_) r.push(s);
  return r;
}

GridOperator compose(const std::vector<GridOperator>& ops) {
  if (ops.empty()) throw DomainError("compose needs at least one operator");
  GridOperator r = ops.back();
  for (size_t i = ops.size() - 1; i-- > 0;) r = ops[i].after(r);
  return r;
}

GridFunction apply(const GridOperator& op, const GridFunction& f) {
  if (!(op.grid() == f.grid)) throw GridMismatch("operator and function live on different grids");
  const int n = f.grid.size;
  GridFunction out{f.grid, f.samples};
  auto& x = out.samples;
  const double inv_n = 1.0 / n;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(n));
  for (const auto& step : op.steps()) {
    switch (step.kind) {
      case StepKind::position:
        for (int j = 0; j < n; ++j) x[j] *= step.multiplier[j];
        break;
      case StepKind::frequency:
        fft_inplace(x, FFTW_FORWARD);
        for (int j = 0; j < n; ++j) x[j] *= step.multiplier[j] * inv_n;
        fft_inplace(x, FFTW_BACKWARD);
        break;
      case StepKind::dft_forward:
        fft_inplace(x, FFTW_FORWARD);
        for (auto& v : x) v *= inv_sqrt;
        break;
      case StepKind::dft_inverse:
        fft_inplace(x, FFTW_BACKWARD);
        for (auto& v : x) v *= inv_sqrt;
        break;
    }
  }
  if (op.factor() != cplx(1.0))
    for (auto& v : x) v *= op.factor();
  return out;
}

std::vector<cplx> position_multiplier(const Grid& g, const std::function<cplx(double)>& f) {
  std::vector<cplx> m(g.size);
  for (int j = 0; j < g.size; ++j) m[j] = f(g.node(j));
  return m;
}

std::vector<cplx> frequency_multiplier(const Grid& g, const std::function<cplx(double)>& f) {
  std::vector<cplx> m(g.size);
  for (int j = 0; j < g.size; ++j) m[j] = f(g.frequency(j));
  return m;
}

// ---------------------------------------------------------------------------

void require_grid_frame(const OmegaFrame& frame) {
  if (std::abs(frame.hbar * 2.0 * kPi - 1.0) > 1e-12)
    throw DomainError("grid operators require hbar = 1/(2 pi)");
}

namespace {

GridOperator chirp(const Grid& g, double e) {
  return GridOperator::position(g, position_multiplier(g, [e](double z) {
    return std::polar(1.0, kPi * e * z * z);
  }));
}

}  // namespace

GridOperator gamma_affine_op(const AffineArg& arg, const OmegaFrame& frame, const Grid& g,
                             const EvalOptions& opts) {
  const auto unit = [](int v) { return v >= -1 && v <= 1; };
  if (!unit(arg.s) || !unit(arg.t) || (arg.s == 0 && arg.t == 0))
    throw UnsupportedArg("affine argument outside {-1,0,1} p + {-1,0,1} Q");
  require_grid_frame(frame);
  const double s = arg.s;
  const double t = arg.t;
  const double c = arg.c;
  if (arg.t == 0)
    return GridOperator::frequency(g, frequency_multiplier(g, [&](double k) {
      return gamma_omega(c + s * k, frame, opts);
    }));
  if (arg.s == 0)
    return GridOperator::position(g, position_multiplier(g, [&](double z) {
      return gamma_omega(c + t * z, frame, opts);
    }));
  // p e^{i pi e Q^2} = e^{i pi e Q^2} (p + e Q)
  const double e = t / s;
  const GridOperator inner = GridOperator::frequency(g, frequency_multiplier(g, [&](double k) {
    return gamma_omega(c + s * k, frame, opts);
  }));
  return compose({chirp(g, -e), inner, chirp(g, e)});
}

GridOperator artin_sigma(int which, const OmegaFrame& frame, const Grid& g) {
  require_grid_frame(frame);
  const cplx alpha = reflection_constant(frame);
  const auto f = [](double x) { return std::polar(1.0, kPi * x * x); };
  if (which == 1) return GridOperator::position(g, position_multiplier(g, f)).scaled(alpha);
  if (which == 2) return GridOperator::frequency(g, frequency_multiplier(g, f)).scaled(alpha);
  throw DomainError("sigma index must be 1 or 2");
}

GridOperator fz_sigma(double lambda, int which, const OmegaFrame& frame, const Grid& g,
                      const EvalOptions& opts) {
  if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
  require_grid_frame(frame);
  const cplx alpha = reflection_constant(frame);
  const auto f = [&](double x) {
    return std::polar(1.0, kPi * x * x) /
           (gamma_omega(lambda / 2 + x, frame, opts) * gamma_omega(lambda / 2 - x, frame, opts));
  };
  if (which == 1) return GridOperator::position(g, position_multiplier(g, f)).scaled(alpha);
  if (which == 2) return GridOperator::frequency(g, frequency_multiplier(g, f)).scaled(alpha);
  throw DomainError("sigma index must be 1 or 2");
}

// ---------------------------------------------------------------------------

std::vector<GridFunction> gaussian_test_set(const Grid& g) {
  std::vector<GridFunction> out;
  for (double a : {-1.0, 0.0, 1.0}) {
    for (double b : {-0.5, 0.0, 0.5}) {
      out.push_back(sample(g, [a, b](double z) {
        return std::exp(cplx(-kPi * (z - a) * (z - a), 2.0 * kPi * b * z));
      }));
      check_edge_decay(out.back());
    }
  }
  return out;
}

std::vector<GridFunction> random_phase_test_set(const Grid& g, std::uint64_t seed, int count) {
  if (count < 1) throw DomainError("test set must be nonempty");
  Rng rng(seed);
  std::vector<GridFunction> out;
  for (int n = 0; n < count; ++n) {
    struct Packet {
      double amp, centre, momentum, phase;
    };
    std::vector<Packet> packets;
    for (int m = 0; m < 3; ++m)
      packets.push_back({rng.uniform(0.5, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-0.5, 0.5),
                         rng.uniform(0.0, 2.0 * kPi)});
    out.push_back(sample(g, [&](double z) {
      cplx v = 0.0;
      for (const auto& p : packets)
        v += p.amp * std::exp(cplx(-kPi * (z - p.centre) * (z - p.centre),
                                   2.0 * kPi * p.momentum * z + p.phase));
      return v;
    }));
    check_edge_decay(out.back());
  }
  return out;
}

void check_edge_decay(const GridFunction& f, double rel) {
  double peak = 0.0;
  for (const auto& v : f.samples) peak = std::max(peak, std::abs(v));
  const double edge = std::max(std::abs(f.samples.front()), std::abs(f.samples.back()));
  if (!(peak > 0.0) || edge > rel * peak) throw DomainError("test function does not decay at the grid edge");
}

}  // namespace qdilog
