#include "qdilog/contour.hpp"

#include <algorithm>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "qdilog/errors.hpp"

namespace qdilog {

namespace {

constexpr double kDeg = kPi / 180.0;

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

const Rule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Rule r;
  for (double z : boost::math::legendre_p_zeros<double>(n)) {
    const double dp = boost::math::legendre_p_prime<double>(n, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x.push_back(z);
    r.w.push_back(w);
    if (z != 0.0) {
      r.x.push_back(-z);
      r.w.push_back(w);
    }
  }
  return cache.emplace(n, std::move(r)).first->second;
}

struct Panel {
  double a, b;
  cplx value;
  double err;
  double gmax;
};

template <class G>
cplx gl(const G& g, double a, double b, const Rule& r, double& gmax) {
  const double h = 0.5 * (b - a);
  const double m = 0.5 * (a + b);
  cplx s = 0.0;
  for (size_t i = 0; i < r.x.size(); ++i) {
    const cplx v = g(m + h * r.x[i]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw ConvergenceError("non-finite integrand value on the contour");
    }
    gmax = std::max(gmax, std::abs(v));
    s += r.w[i] * v;
  }
  return h * s;
}

template <class G>
Panel make_panel(const G& g, double a, double b, const Rule& r) {
  Panel p{a, b, 0.0, 0.0, 0.0};
  const double m = 0.5 * (a + b);
  const cplx whole = gl(g, a, b, r, p.gmax);
  const cplx halves = gl(g, a, m, r, p.gmax) + gl(g, m, b, r, p.gmax);
  p.value = halves;
  p.err = std::abs(whole - halves);
  return p;
}

struct SegmentResult {
  cplx value;
  double err;
  double gmax;
  int panels;
};

template <class G>
SegmentResult integrate_segment(const G& g, double a, double b, double eps, const QuadOptions& o) {
  const Rule& r = gauss_legendre(o.panel_order);
  std::vector<Panel> panels;
  const int init = 4;
  for (int i = 0; i < init; ++i) {
    panels.push_back(make_panel(g, a + (b - a) * i / init, a + (b - a) * (i + 1) / init, r));
  }
  for (;;) {
    double err = 0.0, mag = 0.0;
    size_t worst = 0;
    for (size_t i = 0; i < panels.size(); ++i) {
      err += panels[i].err;
      mag += std::abs(panels[i].value);
      if (panels[i].err > panels[worst].err) worst = i;
    }
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * mag;
    if (err <= std::max(eps, floor)) break;
    if (static_cast<int>(panels.size()) >= o.max_panels) {
      throw ConvergenceError("quadrature panel budget exhausted");
    }
    const Panel p = panels[worst];
    const double m = 0.5 * (p.a + p.b);
    panels[worst] = make_panel(g, p.a, m, r);
    panels.push_back(make_panel(g, m, p.b, r));
  }
  SegmentResult s{0.0, 0.0, 0.0, static_cast<int>(panels.size())};
  for (const auto& p : panels) {
    s.value += p.value;
    s.err += p.err;
    s.gmax = std::max(s.gmax, p.gmax);
  }
  return s;
}

bool inside(const Sector& s, double a) { return a > s.lo && a < s.hi; }

}  // namespace

void validate(const QuadOptions& o) {
  if (!(o.eps_quad > 0.0)) throw DomainError("eps_quad must be positive");
  if (o.panel_order < 8) throw DomainError("panel order must be at least 8");
  if (o.max_panels < 4) throw DomainError("max panels too small");
  if (!(o.tail_eps > 0.0)) throw DomainError("tail_eps must be positive");
}

Sector southeast_sector(const Frame& frame) {
  if (const auto* mp = std::get_if<ModularParam>(&frame)) return {std::arg(mp->tau) - kPi, 0.0};
  const auto& f = std::get<OmegaFrame>(frame);
  const double a = std::arg(f.omega);
  return {-a, a};
}

double sector_bisector(const Frame& frame) {
  const Sector s = southeast_sector(frame);
  return 0.5 * (s.lo + s.hi);
}

std::pair<cplx, cplx> lattice_steps(const Frame& frame) {
  if (const auto* mp = std::get_if<ModularParam>(&frame)) return {1.0, mp->tau};
  const auto& f = std::get<OmegaFrame>(frame);
  return {2.0 * f.omega, 2.0 * f.omega_p};
}

double lattice_gap(const Frame& frame) {
  const auto [s1, s2] = lattice_steps(frame);
  return std::min({std::abs(s1), std::abs(s2), std::abs(s1 - s2), std::abs(s1 + s2)});
}

namespace {

std::vector<cplx> cone(cplx apex, const Frame& frame, double window, double sign) {
  const auto [s1, s2] = lattice_steps(frame);
  const double gap = std::min(std::abs(s1), std::abs(s2));
  const int n = static_cast<int>(std::ceil(window / gap)) + 1;
  // Generous index bound; the window test does the actual truncation.
  std::vector<cplx> out;
  for (int k = 0; k <= 4 * n; ++k) {
    for (int l = 0; l <= 4 * n; ++l) {
      const cplx p = apex + sign * (double(k) * s1 + double(l) * s2);
      if (std::abs(p - apex) <= window) out.push_back(p);
    }
  }
  return out;
}

}  // namespace

std::vector<cplx> sw_cone(cplx apex, const Frame& frame, double window) {
  return cone(apex, frame, window, -1.0);
}

std::vector<cplx> ne_cone(cplx apex, const Frame& frame, double window) {
  return cone(apex, frame, window, 1.0);
}

double signed_distance(cplx p, const Contour& c) {
  return (std::conj(c.direction) * (p - c.base)).imag();
}

Contour route_contour(std::span<const cplx> sw, std::span<const cplx> ne, const ModularParam& mp) {
  return route_contour(sw, ne, Frame{mp}, RouteOptions{});
}

Contour route_contour(std::span<const cplx> sw, std::span<const cplx> ne, const OmegaFrame& frame) {
  return route_contour(sw, ne, Frame{frame}, RouteOptions{});
}

Contour route_contour(std::span<const cplx> sw, std::span<const cplx> ne, const Frame& frame,
                      const RouteOptions& ro) {
  const Sector sector = southeast_sector(frame);
  const double phi = ro.angle.value_or(sector_bisector(frame));
  if (!inside(sector, phi)) throw RoutingError("direction outside the southeast sector");
  const cplx d = std::polar(1.0, phi);
  auto s = [&](cplx p) { return (std::conj(d) * p).imag(); };
  const double gap = lattice_gap(frame);

  for (cplx a : sw) {
    for (cplx b : ne) {
      if (std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a))) {
        throw RoutingError("pinched contour: pole families coincide");
      }
    }
  }

  const auto [s1, s2] = lattice_steps(frame);
  const double half_step = 0.5 * s(s1 + s2);
  double c;
  if (!sw.empty() && !ne.empty()) {
    double a = -std::numeric_limits<double>::infinity();
    double b = std::numeric_limits<double>::infinity();
    for (cplx p : sw) a = std::max(a, s(p));
    for (cplx p : ne) b = std::min(b, s(p));
    c = 0.5 * (a + b);
  } else if (!sw.empty()) {
    double a = -std::numeric_limits<double>::infinity();
    for (cplx p : sw) a = std::max(a, s(p));
    c = a + half_step;
  } else if (!ne.empty()) {
    double b = std::numeric_limits<double>::infinity();
    for (cplx p : ne) b = std::min(b, s(p));
    c = b - half_step;
  } else {
    c = s(ro.center.value_or(symmetry_point(frame)));
  }
  c += ro.offset_shift;

  // Keep every pole a fixed fraction of the lattice gap away from the line itself.
  const double rho = 0.01 * gap;
  for (int attempt = 0; attempt < 32; ++attempt) {
    bool moved = false;
    for (cplx p : sw) {
      if (std::abs(s(p) - c) < rho) {
        c = s(p) + 1.5 * rho;
        moved = true;
      }
    }
    for (cplx p : ne) {
      if (std::abs(s(p) - c) < rho) {
        c = s(p) - 1.5 * rho;
        moved = true;
      }
    }
    if (!moved) break;
  }

  Contour out;
  out.direction = d;
  out.extent = ro.extent;
  const cplx center = ro.center.value_or(symmetry_point(frame));
  out.base = d * cplx((std::conj(d) * center).real(), c);

  std::vector<cplx> all(sw.begin(), sw.end());
  all.insert(all.end(), ne.begin(), ne.end());
  out.margin = std::numeric_limits<double>::infinity();
  for (cplx p : all) out.margin = std::min(out.margin, std::abs(s(p) - c));

  auto radius_for = [&](cplx p) {
    double r = gap;
    for (cplx q : all) {
      const double dq = std::abs(q - p);
      if (dq > 0.0) r = std::min(r, dq);
    }
    return 0.25 * r;
  };
  for (cplx p : sw) {
    if (s(p) > c) out.indentations.push_back({p, radius_for(p), Side::left});
  }
  for (cplx p : ne) {
    if (s(p) < c) out.indentations.push_back({p, radius_for(p), Side::right});
  }
  return out;
}

Contour route_contour_tuned(const Integrand& f, std::span<const cplx> sw, std::span<const cplx> ne,
                            const Frame& frame, const RouteOptions& ro) {
  if (ro.angle) return route_contour(sw, ne, frame, ro);
  const Sector sector = southeast_sector(frame);
  const double bis = sector_bisector(frame);
  struct Candidate {
    Contour contour;
    double score;    // log drop of |f| from the peak to the far probes, worst end
    double log_peak; // conditioning proxy: cancellation grows with the peak modulus
  };
  std::optional<Candidate> best;
  constexpr double kDecayed = 5.0;
  auto better = [](const Candidate& x, const Candidate& y) {
    const bool xi = x.contour.indentations.empty();
    const bool yi = y.contour.indentations.empty();
    if (xi != yi) return xi;
    const bool xd = x.score >= kDecayed;
    const bool yd = y.score >= kDecayed;
    if (xd != yd) return xd;
    const double px = std::round(x.log_peak);
    const double py = std::round(y.log_peak);
    if (px != py) return px < py;
    const double sx = std::min(x.score, 30.0);
    const double sy = std::min(y.score, 30.0);
    if (sx != sy) return sx > sy;
    return x.contour.margin > y.contour.margin;
  };
  for (double deg : {0.0, -5.0, 5.0, -10.0, 10.0, -15.0, 15.0}) {
    const double phi = bis + deg * kDeg;
    if (!inside(sector, phi)) continue;
    RouteOptions r = ro;
    r.angle = phi;
    Contour c;
    try {
      c = route_contour(sw, ne, frame, r);
    } catch (const RoutingError&) {
      continue;
    }
    double score = -std::numeric_limits<double>::infinity();
    double log_peak = std::numeric_limits<double>::infinity();
    try {
      const double E = c.extent;
      const int n = 32;
      double peak = 0.0;
      bool finite = true;
      for (int j = -n; j <= n; ++j) {
        const double v = std::abs(f(c.base + (2.0 * E * j / n) * c.direction));
        if (!std::isfinite(v)) finite = false;
        peak = std::max(peak, v);
      }
      if (finite) {
        const double end_p = std::abs(f(c.base + 2.0 * E * c.direction));
        const double end_m = std::abs(f(c.base - 2.0 * E * c.direction));
        auto drop = [&](double v) {
          return v == 0.0 ? std::numeric_limits<double>::infinity() : std::log(peak / v);
        };
        score = peak == 0.0 ? 30.0 : std::min(drop(end_p), drop(end_m));
        log_peak = peak == 0.0 ? -300.0 : std::log10(peak);
      }
    } catch (const Error&) {
    }
    Candidate cand{c, score, log_peak};
    if (!best || better(cand, *best)) best = cand;
  }
  if (!best) throw RoutingError("no admissible direction");
  return best->contour;
}

QuadResult integrate_circle(const Integrand& f, cplx center, double radius, double eps) {
  auto trap = [&](int n) {
    cplx acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const cplx e = std::polar(1.0, 2.0 * kPi * (j + 0.5) / n);
      acc += f(center + radius * e) * e;
    }
    return acc * (kI * radius * 2.0 * kPi / double(n));
  };
  cplx prev = trap(32);
  for (int n = 64; n <= 8192; n *= 2) {
    const cplx cur = trap(n);
    const double diff = std::abs(cur - prev);
    if (diff <= std::max(eps, 1e-14 * std::abs(cur))) return {cur, diff, n};
    prev = cur;
  }
  throw ConvergenceError("loop integral did not converge");
}

QuadResult integrate_adaptive(const Integrand& f, const Contour& contour, const QuadOptions& o) {
  validate(o);
  const cplx d = contour.direction;
  auto g = [&](double t) { return f(contour.base + t * d) * d; };
  const double E = contour.extent;
  const double seg_eps = o.eps_quad / 16.0;
  QuadResult out{0.0, 0.0, 0};
  for (double side : {1.0, -1.0}) {
    double t0 = 0.0, t1 = E;
    double prev_far = std::numeric_limits<double>::infinity();
    for (int k = 0;; ++k) {
      const double a = side > 0 ? t0 : -t1;
      const double b = side > 0 ? t1 : -t0;
      const SegmentResult sr = integrate_segment(g, a, b, seg_eps, o);
      out.value += sr.value;
      out.error += sr.err;
      out.panels += sr.panels;
      // Tail estimate from the far quarter of the segment.
      double far = 0.0;
      for (int j = 0; j <= 8; ++j) {
        const double t = t1 - 0.25 * (t1 - t0) * j / 8.0;
        far = std::max(far, std::abs(g(side * t)));
      }
      if (k >= 1 && far * (t1 - t0) < o.tail_eps * std::max(1.0, std::abs(out.value))) break;
      // Past 8 extents keep going only while the far values still fall off.
      const bool decaying = far < 0.5 * prev_far;
      if (t1 >= 8.0 * E && (!decaying || t1 >= 128.0 * E)) {
        throw TailError("integrand does not decay along the contour");
      }
      prev_far = far;
      t0 = t1;
      t1 = 2.0 * t1;
    }
  }
  for (const Indentation& ind : contour.indentations) {
    const QuadResult loop = integrate_circle(f, ind.center, ind.radius, seg_eps);
    out.value += ind.side == Side::right ? loop.value : -loop.value;
    out.error += loop.error;
  }
  out.error += o.tail_eps;
  return out;
}

}  // namespace qdilog
