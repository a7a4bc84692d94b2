#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qdilog/gamma.hpp"

namespace qdilog {

struct Grid {
  double half_width = 0.0;  // L
  int size = 0;             // M
  double spacing = 0.0;     // 2L / M

  double node(int j) const { return -half_width + j * spacing; }
  // FFT bin order: m / 2L for m < M/2, (m - M) / 2L otherwise.
  double frequency(int m) const;
  double max_frequency() const { return 0.5 / spacing; }
  bool operator==(const Grid& o) const = default;
};

Grid make_grid(double half_width, int size);
std::vector<double> grid_nodes(const Grid& g);
std::vector<double> grid_frequencies(const Grid& g);

struct GridFunction {
  Grid grid;
  std::vector<cplx> samples;
};

GridFunction sample(const Grid& g, const std::function<cplx(double)>& f);
double l2_norm(const GridFunction& f);  // sqrt(Delta sum |f_j|^2)
// ||a - b|| / ||b||
double relative_distance(const GridFunction& a, const GridFunction& b);

enum class StepKind { position, frequency, dft_forward, dft_inverse };

struct GridStep {
  StepKind kind;
  std::vector<cplx> multiplier;  // empty for the transforms
};

// Recipe of primitive steps; steps_ is stored in application order (first entry acts first).
class GridOperator {
 public:
  explicit GridOperator(const Grid& g) : grid_(g) {}

  static GridOperator identity(const Grid& g) { return GridOperator(g); }
  static GridOperator position(const Grid& g, std::vector<cplx> mult);
  static GridOperator frequency(const Grid& g, std::vector<cplx> mult);
  // Unitary DFT (normalized by 1/sqrt(M)) and its inverse.
  static GridOperator dft(const Grid& g, bool inverse = false);
  static GridOperator scalar(const Grid& g, cplx c);

  const Grid& grid() const { return grid_; }
  cplx factor() const { return scalar_; }
  const std::vector<GridStep>& steps() const { return steps_; }

  GridOperator scaled(cplx c) const;
  // this o other: other acts first.
  GridOperator after(const GridOperator& other) const;

 private:
  void push(GridStep step);
  Grid grid_;
  cplx scalar_ = 1.0;
  std::vector<GridStep> steps_;
};

// compose({A, B, C}) = A B C, C acts first.
GridOperator compose(const std::vector<GridOperator>& ops);

GridFunction apply(const GridOperator& op, const GridFunction& f);

// Multiplier sampled at nodes (position) or frequencies in FFT bin order.
std::vector<cplx> position_multiplier(const Grid& g, const std::function<cplx(double)>& f);
std::vector<cplx> frequency_multiplier(const Grid& g, const std::function<cplx(double)>& f);

// gamma(c + s p + t Q) with s, t in {-1, 0, 1}, not both zero, |s| = |t| when both are nonzero.
struct AffineArg {
  int s = 0;
  int t = 0;
  double c = 0.0;
};

// The grid operators assume hbar = 1/(2 pi), so that e^{i Q^2/2hbar} = e^{i pi z^2}.
void require_grid_frame(const OmegaFrame& frame);

GridOperator gamma_affine_op(const AffineArg& arg, const OmegaFrame& frame, const Grid& g,
                             const EvalOptions& opts = {});

// sigma_1 = alpha e^{i pi Q^2}, sigma_2 = alpha e^{i pi p^2}.
GridOperator artin_sigma(int which, const OmegaFrame& frame, const Grid& g);
// sigma_which / (gamma(lambda/2 + X) gamma(lambda/2 - X)), X = Q for which = 1, p for which = 2.
GridOperator fz_sigma(double lambda, int which, const OmegaFrame& frame, const Grid& g,
                      const EvalOptions& opts = {});

// e^{-pi (z-a)^2 + 2 i pi b z}, a in {-1,0,1}, b in {-0.5,0,0.5}.
std::vector<GridFunction> gaussian_test_set(const Grid& g);
// Sums of three Gaussian packets with random centres, momenta and phases.
std::vector<GridFunction> random_phase_test_set(const Grid& g, std::uint64_t seed, int count = 9);
// Throws DomainError if an edge sample exceeds rel * peak.
void check_edge_decay(const GridFunction& f, double rel = 1e-14);

}  // namespace qdilog
