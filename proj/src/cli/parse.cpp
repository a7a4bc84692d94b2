#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "qdilog/cli.hpp"
#include "qdilog/errors.hpp"
#include "qdilog/integral_identities.hpp"
#include "qdilog/operator_identities.hpp"
#include "qdilog/qweyl.hpp"
#include "qdilog/scalar_identities.hpp"

namespace qdilog::cli {

namespace {

std::string strip(std::string_view s) {
  std::string r;
  for (char c : s)
    if (c != ' ' && c != '\t') r.push_back(c);
  return r;
}

double parse_number(std::string_view s, std::string_view whole) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("cannot parse number '" + std::string(whole) + "'");
  return v;
}

// "<num>", "<num>pi", "pi", "-pi", "(2pi)"
double parse_term(std::string_view t, std::string_view whole) {
  if (t.size() >= 2 && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
  const auto p = t.find("pi");
  if (p == std::string_view::npos) return parse_number(t, whole);
  if (p + 2 != t.size()) throw ConfigError("cannot parse number '" + std::string(whole) + "'");
  std::string_view coef = t.substr(0, p);
  if (!coef.empty() && coef.back() == '*') coef.remove_suffix(1);
  if (coef.empty() || coef == "+") return kPi;
  if (coef == "-") return -kPi;
  return parse_number(coef, whole) * kPi;
}

}  // namespace

double parse_real(std::string_view text) {
  const std::string s = strip(text);
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parse_term(s, text);
  const double den = parse_term(std::string_view(s).substr(slash + 1), text);
  if (den == 0.0) throw ConfigError("division by zero in '" + std::string(text) + "'");
  return parse_term(std::string_view(s).substr(0, slash), text) / den;
}

cplx parse_complex(std::string_view text) {
  const std::string s = strip(text);
  if (s.empty()) throw ConfigError("empty complex number");
  if (s.back() != 'i' && s.back() != 'j') return {parse_number(s, text), 0.0};
  const std::string_view body = std::string_view(s).substr(0, s.size() - 1);
  // split at the last sign that is not an exponent sign and not leading
  size_t split = std::string_view::npos;
  for (size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  const std::string_view re_part = split == std::string_view::npos ? std::string_view{} : body.substr(0, split);
  const std::string_view im_part = split == std::string_view::npos ? body : body.substr(split);
  double im;
  if (im_part.empty() || im_part == "+")
    im = 1.0;
  else if (im_part == "-")
    im = -1.0;
  else
    im = parse_number(im_part, text);
  const double re = re_part.empty() ? 0.0 : parse_number(re_part, text);
  return {re, im};
}

double real_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_real(j.get<std::string>());
  throw ConfigError("expected a real number, got " + j.dump());
}

cplx complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_string()) return parse_complex(j.get<std::string>());
  if (j.is_object()) {
    if (j.contains("re") || j.contains("im"))
      return {real_from_json(j.value("re", Json(0.0))), real_from_json(j.value("im", Json(0.0)))};
    if (j.contains("abs") && j.contains("arg")) return std::polar(real_from_json(j["abs"]), real_from_json(j["arg"]));
  }
  throw ConfigError("expected a complex number, got " + j.dump());
}

Json to_json(cplx z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

std::string format_complex(cplx z) {
  return fmt::format("{}{}{}i", z.real(), z.imag() < 0 || std::signbit(z.imag()) ? "-" : "+", std::abs(z.imag()));
}

FrameSpec tau_frame(cplx tau) { return {make_modular_param(tau), false}; }
FrameSpec omega_frame(double theta, double hbar) { return {make_omega_frame(theta, hbar), true}; }

Json to_json(const FrameSpec& f) {
  if (f.omega) {
    const auto& o = std::get<OmegaFrame>(f.frame);
    return Json{{"kind", "omega"}, {"theta", o.theta}, {"hbar", o.hbar}};
  }
  return Json{{"kind", "tau"}, {"tau", to_json(std::get<ModularParam>(f.frame).tau)}};
}

FrameSpec frame_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("frame needs a kind");
  try {
    if (j["kind"] == "tau") return tau_frame(complex_from_json(j.at("tau")));
    if (j["kind"] == "omega") return omega_frame(real_from_json(j.at("theta")), real_from_json(j.at("hbar")));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid frame: ") + e.what());
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("invalid frame: ") + e.what());
  }
  throw ConfigError("unknown frame kind " + j["kind"].dump());
}

// ---------------------------------------------------------------------------

bool is_known_id(std::string_view id) {
  return parse_scalar_id(id) || parse_integral_id(id) || parse_formal_id(id) || parse_operator_id(id);
}

SuiteConfig default_config() {
  SuiteConfig c;
  c.taus = {cplx(0, 1), cplx(0.3, 0.8)};
  c.thetas = {kPi / 2, kPi / 3};
  c.hbar = 1.0 / (2.0 * kPi);
  c.formal.q = {cplx(0.2), std::polar(0.5, kPi / 5), cplx(0.8)};
  return c;
}

void validate(const SuiteConfig& c) {
  static const std::vector<std::string> known{"scalar", "integral", "formal", "operator"};
  for (const auto& s : c.suites)
    if (std::find(known.begin(), known.end(), s) == known.end()) throw ConfigError("unknown suite '" + s + "'");
  for (const auto& id : c.ids)
    if (!is_known_id(id)) throw ConfigError("unknown identity id '" + id + "'");
  for (cplx t : c.taus)
    if (!(t.imag() > 0.0)) throw ConfigError("tau must lie in the upper half plane");
  for (double th : c.thetas)
    if (!(th > 0.0 && th < kPi)) throw ConfigError("theta must lie in (0, pi)");
  if (!c.thetas.empty() && !(c.hbar > 0.0)) throw ConfigError("hbar must be positive");
  if (c.workers < 0) throw ConfigError("workers must be >= 0");
  if (c.scalar.samples < 1) throw ConfigError("scalar.samples must be >= 1");
  if (!(c.scalar.eps > 0.0) || !(c.scalar.tolerance > 0.0)) throw ConfigError("scalar eps/tolerance must be positive");
  if (!(c.integral.eps_quad > 0.0)) throw ConfigError("integral.eps_quad must be positive");
  for (const auto& [id, t] : c.integral.tolerances) {
    if (!parse_integral_id(id)) throw ConfigError("unknown integral id '" + id + "'");
    if (!(t > 0.0)) throw ConfigError("tolerances must be positive");
  }
  for (cplx q : c.formal.q)
    if (!(std::abs(q) < 1.0) || q == cplx(0.0)) throw ConfigError("formal q must satisfy 0 < |q| < 1");
  for (int n : c.formal.degrees)
    if (n < 2) throw ConfigError("formal degrees must be >= 2");
  if (!(c.formal.tolerance > 0.0)) throw ConfigError("formal.tolerance must be positive");
  if (!(c.op.half_width > 0.0) || c.op.size < 256 || (c.op.size & (c.op.size - 1)) != 0)
    throw ConfigError("operator grid needs half_width > 0 and a power-of-two size >= 256");
  for (const auto& [id, t] : c.op.tolerances) {
    if (!parse_operator_id(id)) throw ConfigError("unknown operator id '" + id + "'");
    if (!(t > 0.0)) throw ConfigError("tolerances must be positive");
  }
  for (const auto& [l, m] : c.op.params)
    if (!std::isfinite(l) || !std::isfinite(m)) throw ConfigError("operator params must be finite");
}

namespace {

void reject_unknown(const Json& j, std::initializer_list<std::string_view> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

std::map<std::string, double> tolerance_map(const Json& j) {
  std::map<std::string, double> m;
  for (const auto& [k, v] : j.items()) m[k] = real_from_json(v);
  return m;
}

}  // namespace

SuiteConfig config_from_json(const Json& j) {
  SuiteConfig c = default_config();
  try {
    reject_unknown(j, {"schema_version", "seed", "workers", "timing", "suites", "ids", "frames", "scalar", "integral",
                       "formal", "operator", "out"},
                   "config");
    if (j.contains("schema_version") && j["schema_version"] != kReportSchemaVersion)
      throw ConfigError("unsupported config schema_version");
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("workers")) c.workers = j["workers"].get<int>();
    if (j.contains("timing")) c.timing = j["timing"].get<bool>();
    if (j.contains("suites")) c.suites = j["suites"].get<std::vector<std::string>>();
    if (j.contains("ids")) {
      if (j["ids"].is_string()) {
        if (j["ids"] != "all") throw ConfigError("ids must be \"all\" or a list");
        c.ids.clear();
      } else {
        c.ids = j["ids"].get<std::vector<std::string>>();
      }
    }
    if (j.contains("frames")) {
      const Json& f = j["frames"];
      reject_unknown(f, {"tau", "theta", "hbar"}, "frames");
      if (f.contains("tau")) {
        c.taus.clear();
        for (const auto& t : f["tau"]) c.taus.push_back(complex_from_json(t));
      }
      if (f.contains("theta")) {
        c.thetas.clear();
        for (const auto& t : f["theta"]) c.thetas.push_back(real_from_json(t));
      }
      if (f.contains("hbar")) c.hbar = real_from_json(f["hbar"]);
    }
    if (j.contains("scalar")) {
      const Json& s = j["scalar"];
      reject_unknown(s, {"samples", "eps", "tolerance"}, "scalar");
      if (s.contains("samples")) c.scalar.samples = s["samples"].get<int>();
      if (s.contains("eps")) c.scalar.eps = real_from_json(s["eps"]);
      if (s.contains("tolerance")) c.scalar.tolerance = real_from_json(s["tolerance"]);
    }
    if (j.contains("integral")) {
      const Json& s = j["integral"];
      reject_unknown(s, {"eps_quad", "deformation", "degeneration", "tolerances"}, "integral");
      if (s.contains("eps_quad")) c.integral.eps_quad = real_from_json(s["eps_quad"]);
      if (s.contains("deformation")) c.integral.deformation = s["deformation"].get<bool>();
      if (s.contains("degeneration")) c.integral.degeneration = s["degeneration"].get<bool>();
      if (s.contains("tolerances")) c.integral.tolerances = tolerance_map(s["tolerances"]);
    }
    if (j.contains("formal")) {
      const Json& s = j["formal"];
      reject_unknown(s, {"q", "degrees", "tolerance"}, "formal");
      if (s.contains("q")) {
        c.formal.q.clear();
        for (const auto& q : s["q"]) c.formal.q.push_back(complex_from_json(q));
      }
      if (s.contains("degrees")) c.formal.degrees = s["degrees"].get<std::vector<int>>();
      if (s.contains("tolerance")) c.formal.tolerance = real_from_json(s["tolerance"]);
    }
    if (j.contains("operator")) {
      const Json& s = j["operator"];
      reject_unknown(s, {"half_width", "size", "params", "doubling", "basis", "tolerances"}, "operator");
      if (s.contains("half_width")) c.op.half_width = real_from_json(s["half_width"]);
      if (s.contains("size")) c.op.size = s["size"].get<int>();
      if (s.contains("params")) {
        c.op.params.clear();
        for (const auto& p : s["params"]) {
          if (!p.is_array() || p.size() != 2) throw ConfigError("operator params are [lambda, mu] pairs");
          c.op.params.emplace_back(real_from_json(p[0]), real_from_json(p[1]));
        }
      }
      if (s.contains("doubling")) c.op.doubling = s["doubling"].get<bool>();
      if (s.contains("basis")) c.op.basis = s["basis"].get<bool>();
      if (s.contains("tolerances")) c.op.tolerances = tolerance_map(s["tolerances"]);
    }
    if (j.contains("out")) c.out = j["out"].get<std::string>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  validate(c);
  return c;
}

SuiteConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

Json config_to_json(const SuiteConfig& c) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["timing"] = c.timing;
  j["suites"] = c.suites;
  j["ids"] = c.ids.empty() ? Json("all") : Json(c.ids);
  Json taus = Json::array();
  for (cplx t : c.taus) taus.push_back(to_json(t));
  j["frames"] = Json{{"tau", taus}, {"theta", c.thetas}, {"hbar", c.hbar}};
  j["scalar"] = Json{{"samples", c.scalar.samples}, {"eps", c.scalar.eps}, {"tolerance", c.scalar.tolerance}};
  j["integral"] = Json{{"eps_quad", c.integral.eps_quad},
                       {"deformation", c.integral.deformation},
                       {"degeneration", c.integral.degeneration},
                       {"tolerances", c.integral.tolerances}};
  Json qs = Json::array();
  for (cplx q : c.formal.q) qs.push_back(to_json(q));
  j["formal"] = Json{{"q", qs}, {"degrees", c.formal.degrees}, {"tolerance", c.formal.tolerance}};
  Json params = Json::array();
  for (const auto& [l, m] : c.op.params) params.push_back(Json::array({l, m}));
  j["operator"] = Json{{"half_width", c.op.half_width}, {"size", c.op.size},     {"params", params},
                       {"doubling", c.op.doubling},     {"basis", c.op.basis},   {"tolerances", c.op.tolerances}};
  return j;
}

}  // namespace qdilog::cli
