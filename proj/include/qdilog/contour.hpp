#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qdilog/modular.hpp"

namespace qdilog {

enum class Side { left, right };

// Full circular detour around an offending pole. Side is where the pole sits relative to
// the line: right means a northeast-family pole stranded southwest of the line
// (counterclockwise loop added), left the opposite case (clockwise loop).
struct Indentation {
  cplx center;
  double radius;
  Side side;
};

struct Contour {
  cplx base;
  cplx direction;  // unit, southeast-pointing
  double extent = 8.0;
  std::vector<Indentation> indentations;
  double margin = 0.0;  // smallest distance from the line to a listed pole
};

struct QuadOptions {
  double eps_quad = 1e-10;
  int panel_order = 16;
  int max_panels = 4000;
  double tail_eps = 1e-14;
};

void validate(const QuadOptions& opts);

struct QuadResult {
  cplx value;
  double error = 0.0;
  int panels = 0;
};

struct RouteOptions {
  std::optional<double> angle;  // direction override (radians)
  double offset_shift = 0.0;    // signed normal shift of the line, positive toward northeast
  double extent = 8.0;
  std::optional<cplx> center;  // point the line passes closest to when nothing else decides
};

// Open interval of admissible direction angles.
struct Sector {
  double lo;
  double hi;
};

Sector southeast_sector(const Frame& frame);
double sector_bisector(const Frame& frame);

// Lattice steps (1, tau) or (2 omega, 2 omega') and the smallest nonzero lattice distance.
std::pair<cplx, cplx> lattice_steps(const Frame& frame);
double lattice_gap(const Frame& frame);

// Truncated pole cones apex - k s1 - l s2 and apex + k s1 + l s2 (k, l >= 0) within window.
std::vector<cplx> sw_cone(cplx apex, const Frame& frame, double window);
std::vector<cplx> ne_cone(cplx apex, const Frame& frame, double window);

// Imaginary part of conj(direction) (p - base): positive means northeast of the line.
double signed_distance(cplx p, const Contour& c);

Contour route_contour(std::span<const cplx> sw, std::span<const cplx> ne, const ModularParam& mp);
Contour route_contour(std::span<const cplx> sw, std::span<const cplx> ne, const OmegaFrame& frame);
Contour route_contour(std::span<const cplx> sw, std::span<const cplx> ne, const Frame& frame,
                      const RouteOptions& ropts);

using Integrand = std::function<cplx(cplx)>;

// Tries the bisector and nudges of 5, 10, 15 degrees; prefers lines without detours and with
// clear decay of |f| toward both ends.
Contour route_contour_tuned(const Integrand& f, std::span<const cplx> sw, std::span<const cplx> ne,
                            const Frame& frame, const RouteOptions& ropts);

QuadResult integrate_adaptive(const Integrand& f, const Contour& contour, const QuadOptions& opts);

// Counterclockwise loop integral by the periodic trapezoid rule.
QuadResult integrate_circle(const Integrand& f, cplx center, double radius, double eps);

}  // namespace qdilog
