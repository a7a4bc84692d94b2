#include <fmt/format.h>
#include <fmt/ostream.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qdilog/cli.hpp"
#include "qdilog/errors.hpp"
#include "qdilog/integral_identities.hpp"
#include "qdilog/operator_identities.hpp"
#include "qdilog/qweyl.hpp"
#include "qdilog/scalar_identities.hpp"

namespace qdilog::cli {

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

struct FrameArgs {
  std::string tau;
  std::string theta;
  std::string hbar = "1/(2pi)";
};

void add_frame_flags(CLI::App* app, FrameArgs& f) {
  app->add_option("--tau", f.tau, "modular parameter, e.g. 0.3+0.8i");
  app->add_option("--theta", f.theta, "omega-frame angle, e.g. pi/2");
  app->add_option("--hbar", f.hbar, "omega-frame hbar (default 1/(2pi))");
}

FrameSpec frame_from_args(const FrameArgs& f) {
  if (!f.tau.empty() && !f.theta.empty()) throw ConfigError("give either --tau or --theta, not both");
  if (f.tau.empty() && f.theta.empty()) throw ConfigError("a frame is required: --tau or --theta");
  if (!f.tau.empty()) return tau_frame(parse_complex(f.tau));
  return omega_frame(parse_real(f.theta), parse_real(f.hbar));
}

// ---------------------------------------------------------------------------
// golden entries

cplx eval_value(const Json& e) {
  const std::string fn = e.at("function");
  const Json& a = e.at("args");
  if (fn == "qpoch") return qpoch(complex_from_json(a.at("a")), complex_from_json(a.at("b")));
  if (fn == "eta") return dedekind_eta(complex_from_json(a.at("tau")));
  const FrameSpec f = frame_from_json(e.at("frame"));
  if (fn == "gamma") return gamma(complex_from_json(a.at("z")), f.frame);
  if (f.omega) throw ConfigError("function '" + fn + "' needs a tau frame");
  const ModularParam& mp = std::get<ModularParam>(f.frame);
  if (fn == "gamma1") {
    const std::string method = a.value("method", "closed");
    if (method == "closed") return gamma_one_closed(mp);
    if (method == "product") return gamma_one_product(mp);
    if (method == "eta") return dedekind_eta_ratio(mp);
    throw ConfigError("unknown gamma1 method '" + method + "'");
  }
  if (fn == "psi") return psi(complex_from_json(a.at("z")), complex_from_json(a.at("lambda")), mp);
  throw ConfigError("unknown function '" + fn + "'");
}

std::vector<cplx> complex_list(const Json& j) {
  std::vector<cplx> v;
  for (const auto& x : j) v.push_back(complex_from_json(x));
  return v;
}

double eval_residual(const Json& e) {
  const std::string suite = e.at("suite");
  const std::string id = e.at("id");
  const Json& p = e.at("params");
  if (suite == "scalar") {
    const auto sid = parse_scalar_id(id);
    if (!sid) throw ConfigError("unknown scalar id '" + id + "'");
    return verify_scalar(*sid, complex_list(p), frame_from_json(e.at("frame")).frame).residual;
  }
  if (suite == "integral") {
    const auto iid = parse_integral_id(id);
    if (!iid) throw ConfigError("unknown integral id '" + id + "'");
    return verify_integral(*iid, complex_list(p), frame_from_json(e.at("frame")).frame).residual;
  }
  if (suite == "formal") {
    const auto fid = parse_formal_id(id);
    if (!fid) throw ConfigError("unknown formal id '" + id + "'");
    const FormalReport r = verify_formal(*fid, complex_from_json(p.at("q")), p.at("degree").get<int>());
    return r.max_mismatch;
  }
  if (suite == "operator") {
    const auto oid = parse_operator_id(id);
    if (!oid) throw ConfigError("unknown operator id '" + id + "'");
    const FrameSpec f = frame_from_json(e.at("frame"));
    if (!f.omega) throw ConfigError("operator entries need an omega frame");
    const Grid g = make_grid(real_from_json(p.at("half_width")), p.at("size").get<int>());
    return verify_operator(*oid, real_from_json(p.value("lambda", Json(0.0))), real_from_json(p.value("mu", Json(0.0))),
                           std::get<OmegaFrame>(f.frame), g, gaussian_test_set(g))
        .residual;
  }
  throw ConfigError("unknown suite '" + suite + "'");
}

Json value_entry(const std::string& fn, const Json& frame, const Json& args) {
  Json e{{"kind", "value"}, {"function", fn}};
  if (!frame.is_null()) e["frame"] = frame;
  e["args"] = args;
  e["expected"] = to_json(eval_value(e));
  e["tolerance"] = 1e-12;
  return e;
}

Json residual_entry(const std::string& suite, const std::string& id, const Json& frame, const Json& params) {
  Json e{{"kind", "residual"}, {"suite", suite}, {"id", id}};
  if (!frame.is_null()) e["frame"] = frame;
  e["params"] = params;
  e["residual"] = eval_residual(e);
  e["drift_tolerance"] = 1e-9;
  return e;
}

}  // namespace

Json generate_golden() {
  const Json ti = to_json(tau_frame(cplx(0, 1)));
  const Json tg = to_json(tau_frame(cplx(0.3, 0.8)));
  const Json om = to_json(omega_frame(kPi / 2, 1 / (2 * kPi)));
  const Json om3 = to_json(omega_frame(kPi / 3, 1 / (2 * kPi)));
  Json entries = Json::array();
  for (cplx z : {cplx(0.3, 0.2), cplx(0.5, 0.5), cplx(1, 1), cplx(-0.4, 0.7), cplx(2.5, -0.5)})
    entries.push_back(value_entry("gamma", ti, {{"z", to_json(z)}}));
  for (cplx z : {cplx(0.3, 0.2), cplx(-1.1, 0.4)}) entries.push_back(value_entry("gamma", tg, {{"z", to_json(z)}}));
  for (cplx z : {cplx(0.3), cplx(-1.2, 0.1)}) entries.push_back(value_entry("gamma", om, {{"z", to_json(z)}}));
  entries.push_back(value_entry("gamma", om3, {{"z", to_json(cplx(0.7, -0.2))}}));
  for (const char* m : {"closed", "product", "eta"}) {
    entries.push_back(value_entry("gamma1", ti, {{"method", m}}));
    entries.push_back(value_entry("gamma1", tg, {{"method", m}}));
  }
  entries.push_back(value_entry("psi", tg, {{"z", to_json(cplx(0.2, 0.1))}, {"lambda", to_json(cplx(0.4, -0.1))}}));
  entries.push_back(value_entry("qpoch", nullptr, {{"a", to_json(0.5)}, {"b", to_json(0.5)}}));
  entries.push_back(value_entry("eta", nullptr, {{"tau", to_json(cplx(0, 1))}}));
  entries.push_back(residual_entry("scalar", "reflection", tg, Json::array({to_json(cplx(0.4, 0.3))})));
  entries.push_back(residual_entry("scalar", "omega-reflection", om, Json::array({to_json(cplx(0.6, 0.2))})));
  entries.push_back(residual_entry("integral", "tau-gamma", ti, Json::array({to_json(cplx(0.4, 0.1))})));
  entries.push_back(residual_entry("formal", "schuetzenberger", nullptr, {{"q", to_json(cplx(0.5))}, {"degree", 8}}));
  entries.push_back(residual_entry("operator", "pentagon", om, {{"half_width", 16.0}, {"size", 1024}}));
  return Json{{"schema_version", kGoldenSchemaVersion}, {"entries", entries}};
}

RegressResult regress(const Json& golden) {
  if (!golden.is_object() || golden.value("schema_version", 0) != kGoldenSchemaVersion)
    throw ConfigError("golden file has an unsupported schema_version");
  RegressResult res;
  int index = 0;
  for (const auto& e : golden.at("entries")) {
    ++res.entries;
    const std::string kind = e.at("kind");
    std::string label;
    bool ok = false;
    std::string detail;
    try {
      if (kind == "value") {
        label = fmt::format("value {} {}", e.at("function").get<std::string>(), e.at("args").dump());
        const cplx expected = complex_from_json(e.at("expected"));
        const cplx got = eval_value(e);
        const double tol = real_from_json(e.at("tolerance"));
        const double diff = std::abs(got - expected);
        ok = diff <= tol * std::max(1.0, std::abs(expected));
        detail = fmt::format("got {} expected {} diff {:.3e}", format_complex(got), format_complex(expected), diff);
      } else if (kind == "residual") {
        label = fmt::format("residual {} {}", e.at("suite").get<std::string>(), e.at("id").get<std::string>());
        const double recorded = real_from_json(e.at("residual"));
        const double got = eval_residual(e);
        const double tol = real_from_json(e.at("drift_tolerance"));
        ok = std::abs(got - recorded) <= tol;
        detail = fmt::format("got {:.3e} recorded {:.3e}", got, recorded);
      } else {
        throw ConfigError("unknown golden entry kind '" + kind + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const Json::exception& ex) {
      throw ConfigError(fmt::format("malformed golden entry {}: {}", index, ex.what()));
    } catch (const std::exception& ex) {
      ok = false;
      detail = ex.what();
    }
    if (!ok) ++res.drifted;
    res.lines.push_back(fmt::format("{} [{}] {}: {}", ok ? "ok   " : "DRIFT", index, label, detail));
    ++index;
  }
  return res;
}

namespace {

// ---------------------------------------------------------------------------
// commands

int cmd_eval(const std::string& fn, const FrameArgs& fa, const std::vector<std::string>& zs,
             const std::string& lambda, const std::string& a, const std::string& b, std::ostream& out) {
  if (fn == "qpoch") {
    if (a.empty() || b.empty()) throw ConfigError("qpoch needs --a and --b");
    out << format_complex(qpoch(parse_complex(a), parse_complex(b))) << "\n";
    return kExitPass;
  }
  const FrameSpec f = frame_from_args(fa);
  if (fn == "gamma1") {
    if (f.omega) throw ConfigError("gamma1 needs --tau");
    const ModularParam& mp = std::get<ModularParam>(f.frame);
    const cplx closed = gamma_one_closed(mp);
    const cplx prod = gamma_one_product(mp);
    out << fmt::format("{}  error={:.3e}\n", format_complex(closed), std::abs(closed - prod));
    return kExitPass;
  }
  if (zs.empty()) throw ConfigError(fn + " needs --z");
  for (const auto& zt : zs) {
    const cplx z = parse_complex(zt);
    if (fn == "gamma") {
      GammaEval r;
      if (f.omega) {
        r = gamma_omega_eval(z, std::get<OmegaFrame>(f.frame));
      } else {
        r = gamma_tau_eval(z, std::get<ModularParam>(f.frame));
      }
      out << fmt::format("{}  error={:.3e}{}\n", format_complex(r.value), r.error,
                         r.near_cancelled ? "  warning=near-cancelled-point" : "");
    } else if (fn == "psi") {
      if (f.omega) throw ConfigError("psi needs --tau");
      if (lambda.empty()) throw ConfigError("psi needs --lambda");
      out << format_complex(psi(z, parse_complex(lambda), std::get<ModularParam>(f.frame))) << "\n";
    } else {
      throw ConfigError("unknown function '" + fn + "' (gamma, psi, gamma1, qpoch)");
    }
  }
  return kExitPass;
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& s : items) {
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ','))
      if (!part.empty()) out.push_back(part);
  }
  return out;
}

struct VerifyArgs {
  std::vector<std::string> suites;
  std::string config;
  std::vector<std::string> taus;
  std::vector<std::string> thetas;
  std::string hbar;
  std::vector<std::string> qs;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> workers;
  bool timing = false;
};

int cmd_verify(const VerifyArgs& va, std::ostream& out, std::ostream& err) {
  SuiteConfig cfg;
  std::string path = va.config;
  if (path.empty())
    if (const char* env = std::getenv("QDILOG_CONFIG"); env && *env) path = env;
  cfg = path.empty() ? default_config() : load_config(path);
  const auto suites = split_list(va.suites);
  if (!suites.empty() && !(suites.size() == 1 && suites[0] == "all")) cfg.suites = suites;
  if (!suites.empty() && suites.size() == 1 && suites[0] == "all")
    cfg.suites = {"scalar", "integral", "formal", "operator"};
  if (!va.taus.empty()) {
    cfg.taus.clear();
    for (const auto& t : split_list(va.taus)) cfg.taus.push_back(parse_complex(t));
  }
  if (!va.thetas.empty()) {
    cfg.thetas.clear();
    for (const auto& t : split_list(va.thetas)) cfg.thetas.push_back(parse_real(t));
  }
  if (!va.hbar.empty()) cfg.hbar = parse_real(va.hbar);
  if (!va.qs.empty()) {
    cfg.formal.q.clear();
    for (const auto& q : split_list(va.qs)) cfg.formal.q.push_back(parse_complex(q));
  }
  if (va.seed) cfg.seed = *va.seed;
  if (va.workers) cfg.workers = *va.workers;
  if (va.timing) cfg.timing = true;
  if (!va.out.empty()) cfg.out = va.out;
  validate(cfg);

  const Json report = run_verify(cfg);
  const std::string text = report.dump(2) + "\n";
  if (cfg.out) {
    std::ofstream f(*cfg.out);
    if (!f || !(f << text)) {
      err << "error: cannot write report to '" << *cfg.out << "'\n";
      return kExitError;
    }
  } else {
    out << text;
  }
  const Json& s = report["summary"];
  err << fmt::format("verify: {} records, {} passed, {} failed, {} warnings\n", s["total"].get<int>(),
                     s["passed"].get<int>(), s["failed"].get<int>(), s["warnings"].get<int>());
  for (const auto& r : report["records"]) {
    if (r["status"] != "pass")
      err << fmt::format("  {} {} {} {} ({})\n", r["status"].get<std::string>(), r["suite"].get<std::string>(),
                         r["id"].get<std::string>(), r["check"].get<std::string>(),
                         r.contains("error") ? r["error"].get<std::string>() : r["residual"].dump());
  }
  return report_passed(report) ? kExitPass : kExitFail;
}

int cmd_plot(const std::string& what, const FrameArgs& fa, const std::string& window_text, int samples,
             const std::string& offset_text, const std::string& out_path, std::ostream& out) {
  const double window = parse_real(window_text);
  if (!(window > 0.0) || !std::isfinite(window)) throw ConfigError("window must be positive");
  const FrameSpec f = frame_from_args(fa);
  std::ostringstream buf;
  if (what == "zeros" || what == "poles") {
    const LatticeKind kind = what == "zeros" ? LatticeKind::zero : LatticeKind::pole;
    buf << "re,im,kind,k,l\n";
    for (const auto& p : lattice_points(f.frame, kind, window))
      buf << fmt::format("{},{},{},{},{}\n", p.location.real(), p.location.imag(), to_string(p.kind), p.k, p.l);
  } else if (what == "modulus-line" || what == "phase-line") {
    if (samples < 2) throw ConfigError("samples must be >= 2");
    const double offset = offset_text.empty() ? 0.0 : parse_real(offset_text);
    buf << "t,value\n";
    for (int j = 0; j < samples; ++j) {
      const double t = -window + 2.0 * window * j / (samples - 1);
      const cplx g = gamma(cplx(t, offset), f.frame);
      buf << fmt::format("{},{}\n", t, what == "modulus-line" ? std::abs(g) : std::arg(g));
    }
  } else {
    throw ConfigError("unknown plot-data table '" + what + "' (zeros, poles, modulus-line, phase-line)");
  }
  if (out_path.empty()) {
    out << buf.str();
  } else {
    std::ofstream file(out_path);
    if (!file || !(file << buf.str())) throw ConfigError("cannot write '" + out_path + "'");
  }
  return kExitPass;
}

int cmd_regress(const std::string& path, bool generate, std::ostream& out, std::ostream& err) {
  if (generate) {
    std::ofstream f(path);
    if (!f || !(f << generate_golden().dump(2) << "\n")) {
      err << "error: cannot write golden file '" << path << "'\n";
      return kExitError;
    }
    out << "wrote " << path << "\n";
    return kExitPass;
  }
  std::ifstream in(path);
  if (!in) {
    err << "error: cannot open golden file '" << path << "'\n";
    return kExitError;
  }
  Json golden;
  try {
    golden = Json::parse(in);
  } catch (const Json::exception& e) {
    err << "error: golden file is not valid JSON: " << e.what() << "\n";
    return kExitError;
  }
  const RegressResult r = regress(golden);
  for (const auto& line : r.lines) out << line << "\n";
  out << fmt::format("regress: {} entries, {} drifted\n", r.entries, r.drifted);
  return r.drifted == 0 ? kExitPass : kExitFail;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical toolkit for the noncompact quantum dilogarithm", "qdilog"};
  app.set_version_flag("--version", QDILOG_VERSION);
  app.require_subcommand(1);

  FrameArgs eval_frame;
  std::string eval_fn, eval_lambda, eval_a, eval_b;
  std::vector<std::string> eval_z;
  auto* eval = app.add_subcommand("eval", "evaluate gamma, psi, gamma1 or qpoch");
  eval->add_option("function", eval_fn, "gamma | psi | gamma1 | qpoch")->required();
  add_frame_flags(eval, eval_frame);
  eval->add_option("--z", eval_z, "evaluation point(s)");
  eval->add_option("--lambda", eval_lambda, "psi eigenvalue parameter");
  eval->add_option("--a", eval_a, "qpoch base point");
  eval->add_option("--b", eval_b, "qpoch ratio");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run identity suites and write a JSON report");
  verify->add_option("--suite", va.suites, "scalar | integral | formal | operator | all");
  verify->add_option("--config", va.config, "JSON suite configuration");
  verify->add_option("--tau", va.taus, "original-frame parameters (replaces the config list)");
  verify->add_option("--theta", va.thetas, "omega-frame angles (replaces the config list)");
  verify->add_option("--hbar", va.hbar, "omega-frame hbar");
  verify->add_option("--q", va.qs, "formal-suite q values");
  verify->add_option("--seed", va.seed, "sampler seed");
  verify->add_option("--out", va.out, "report path (default: standard output)");
  verify->add_option("--workers", va.workers, "concurrent suite entries (0 = all cores)");
  verify->add_flag("--timing", va.timing, "record wall times (reports are then not byte-reproducible)");

  FrameArgs plot_frame;
  std::string plot_what, plot_window = "3", plot_offset, plot_out;
  int plot_samples = 201;
  auto* plot = app.add_subcommand("plot-data", "export lattice points or line scans as CSV");
  plot->add_option("table", plot_what, "zeros | poles | modulus-line | phase-line")->required();
  add_frame_flags(plot, plot_frame);
  plot->add_option("--window", plot_window, "radius for lattices, half-length for line scans");
  plot->add_option("--samples", plot_samples, "points on a line scan");
  plot->add_option("--offset", plot_offset, "imaginary offset of a line scan");
  plot->add_option("--out", plot_out, "output path (default: standard output)");

  std::string golden_path;
  bool generate = false;
  auto* reg = app.add_subcommand("regress", "compare against a golden file");
  reg->add_option("golden", golden_path, "golden JSON file")->required();
  reg->add_flag("--generate", generate, "write a fresh golden file instead of comparing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitError;
  }

  try {
    if (*eval) return cmd_eval(eval_fn, eval_frame, eval_z, eval_lambda, eval_a, eval_b, out);
    if (*verify) return cmd_verify(va, out, err);
    if (*plot) return cmd_plot(plot_what, plot_frame, plot_window, plot_samples, plot_offset, plot_out, out);
    if (*reg) return cmd_regress(golden_path, generate, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace qdilog::cli
