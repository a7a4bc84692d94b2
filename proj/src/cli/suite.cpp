#include <fmt/chrono.h>
#include <fmt/format.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <span>
#include <thread>

#include "qdilog/cli.hpp"
#include "qdilog/errors.hpp"
#include "qdilog/integral_identities.hpp"
#include "qdilog/operator_identities.hpp"
#include "qdilog/qweyl.hpp"
#include "qdilog/scalar_identities.hpp"

namespace qdilog::cli {

namespace {

struct Outcome {
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  Json details = Json::object();
};

struct Task {
  std::string suite;
  std::string id;
  std::string check;  // "identity" or the name of an auxiliary check
  Json frame;
  Json params;
  bool best_effort = false;
  std::function<Outcome()> run;
};

Json params_json(std::span<const cplx> p) {
  Json a = Json::array();
  for (cplx z : p) a.push_back(to_json(z));
  return a;
}

bool selected(const SuiteConfig& c, std::string_view id) {
  if (c.ids.empty()) return true;
  for (const auto& s : c.ids)
    if (s == id) return true;
  return false;
}

bool suite_on(const SuiteConfig& c, std::string_view s) {
  for (const auto& x : c.suites)
    if (x == s) return true;
  return false;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined key
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (a * 1000003ull + b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<FrameSpec> tau_frames(const SuiteConfig& c) {
  std::vector<FrameSpec> out;
  for (cplx t : c.taus) out.push_back(tau_frame(t));
  return out;
}

std::vector<FrameSpec> omega_frames(const SuiteConfig& c) {
  std::vector<FrameSpec> out;
  for (double th : c.thetas) out.push_back(omega_frame(th, c.hbar));
  return out;
}

// ---------------------------------------------------------------------------

void add_scalar(const SuiteConfig& c, std::vector<Task>& tasks) {
  const auto taus = tau_frames(c);
  const auto omegas = omega_frames(c);
  for (const auto& e : scalar_catalog()) {
    if (!selected(c, e.name)) continue;
    const auto& frames = e.frame == FrameKind::omega ? omegas : taus;
    for (size_t fi = 0; fi < frames.size(); ++fi) {
      const FrameSpec f = frames[fi];
      SamplerSpec spec;
      spec.seed = mix_seed(c.seed, static_cast<std::uint64_t>(e.id), fi);
      ScalarOptions opts;
      opts.eval.eps = c.scalar.eps;
      opts.tolerance = c.scalar.tolerance;
      const int samples = e.arity == 0 ? 1 : c.scalar.samples;
      const ScalarId id = e.id;
      tasks.push_back({"scalar", std::string(e.name), "identity", to_json(f),
                       Json{{"samples", samples}, {"seed", spec.seed}}, false, [=] {
                         const SweepReport r = sample_sweep(id, spec, samples, f.frame, opts);
                         Outcome o{r.max_residual, opts.tolerance, r.failures == 0};
                         o.details = {{"count", r.count},
                                      {"failures", r.failures},
                                      {"accuracy_warnings", r.warnings},
                                      {"worst_params", params_json(r.worst_params)}};
                         return o;
                       }});
    }
  }
}

struct IntegralPoint {
  IntegralId id;
  std::vector<cplx> params;
};

std::vector<IntegralPoint> integral_points(const FrameSpec& f) {
  if (f.omega)
    return {{IntegralId::omega_ft, {cplx(0, 0.3)}},
            {IntegralId::omega_ft, {cplx(0.2, 0.35)}},
            {IntegralId::omega_tbt, {cplx(0.3, 0.1), cplx(0, 0.3)}}};
  const cplx tau = std::get<ModularParam>(f.frame).tau;
  return {{IntegralId::tau_gamma, {cplx(0.4, 0.1)}},
          {IntegralId::tau_binomial, {(1.0 + tau) / 2.0, cplx(0.3)}},
          {IntegralId::gaussian_const, {}},
          {IntegralId::addition, {0.2, 0.25, 0.35}},
          {IntegralId::ultimate, {0.2, 0.25, 0.3, 0.35}},
          {IntegralId::ultimate, {0.15, 0.3, 0.25, 0.2}},
          {IntegralId::ultimate, {cplx(0.25, 0.05), 0.2, 0.35, cplx(0.3, -0.05)}},
          {IntegralId::eigen_conv, {cplx(0.5, -0.3), 0.2}}};
}

void add_integral(const SuiteConfig& c, std::vector<Task>& tasks) {
  IntegralOptions base;
  base.quad.eps_quad = c.integral.eps_quad;
  std::vector<FrameSpec> frames = tau_frames(c);
  for (const auto& f : omega_frames(c)) frames.push_back(f);
  for (const auto& f : frames) {
    for (const auto& pt : integral_points(f)) {
      const IntegralIdentity& e = integral_identity(pt.id);
      if (!selected(c, e.name)) continue;
      IntegralOptions opts = base;
      if (auto it = c.integral.tolerances.find(std::string(e.name)); it != c.integral.tolerances.end())
        opts.tolerance = it->second;
      tasks.push_back({"integral", std::string(e.name), "identity", to_json(f), params_json(pt.params),
                       e.best_effort, [=] {
                         const IntegralReport r = verify_integral(pt.id, pt.params, f.frame, opts);
                         Outcome o{r.residual, r.tolerance, r.pass};
                         o.details = {{"lhs", to_json(r.lhs)},
                                      {"rhs", to_json(r.rhs)},
                                      {"quad_error", r.quad_error},
                                      {"direction_deg", r.direction_angle * 180.0 / kPi},
                                      {"margin", std::isfinite(r.margin) ? Json(r.margin) : Json(nullptr)},
                                      {"indentations", r.indentations}};
                         return o;
                       }});
      if (c.integral.deformation && !e.best_effort) {
        tasks.push_back({"integral", std::string(e.name), "deformation", to_json(f), params_json(pt.params), false,
                         [=] {
                           const CheckReport r = deformation_check(pt.id, pt.params, f.frame, opts);
                           return Outcome{r.residual, r.tolerance, r.pass};
                         }});
      }
    }
    if (c.integral.degeneration && !f.omega) {
      const ModularParam mp = std::get<ModularParam>(f.frame);
      if (selected(c, "tau-binomial")) {
        const cplx z(0.4, 0.1);
        tasks.push_back({"integral", "tau-binomial", "degeneration", to_json(f),
                         Json{{"z", to_json(z)}, {"re_y", 12.0}}, false, [=] {
                           const CheckReport r = degeneration_binomial_to_gamma(z, mp, base);
                           return Outcome{r.residual, r.tolerance, r.pass};
                         }});
      }
      if (selected(c, "addition")) {
        tasks.push_back({"integral", "addition", "degeneration", to_json(f),
                         Json{{"nu", to_json(0.2)}, {"mu", to_json(0.25)}, {"re_kappa", 12.0}}, false, [=] {
                           const CheckReport r = degeneration_addition_to_binomial(0.2, 0.25, mp, base);
                           return Outcome{r.residual, r.tolerance, r.pass};
                         }});
      }
    }
  }
}

void add_formal(const SuiteConfig& c, std::vector<Task>& tasks) {
  for (const auto& e : formal_catalog()) {
    if (!selected(c, e.name)) continue;
    for (cplx q : c.formal.q) {
      for (int n : c.formal.degrees) {
        const FormalId id = e.id;
        const double tol = c.formal.tolerance;
        tasks.push_back({"formal", std::string(e.name), "identity", Json{{"kind", "weyl"}, {"q", to_json(q)}},
                         Json{{"degree", n}}, false, [=] {
                           const FormalReport r = verify_formal(id, q, n, tol);
                           Outcome o{r.max_mismatch, tol * r.largest_coefficient, r.pass};
                           o.details = {{"max_mismatch", r.max_mismatch},
                                        {"largest_coefficient", r.largest_coefficient},
                                        {"first_failing_degree", r.first_failing_degree
                                                                     ? Json(*r.first_failing_degree)
                                                                     : Json(nullptr)}};
                           return o;
                         }});
      }
    }
  }
}

void add_operator(const SuiteConfig& c, std::vector<Task>& tasks) {
  if (std::abs(c.hbar * 2.0 * kPi - 1.0) > 1e-12) return;  // grid operators need hbar = 1/(2 pi)
  const Grid g = make_grid(c.op.half_width, c.op.size);
  const Json grid_json{{"half_width", g.half_width}, {"size", g.size}};
  OperatorOptions base;
  base.workers = 1;
  const auto tol_for = [&](OperatorId id) {
    OperatorOptions o = base;
    const auto name = std::string(operator_identity(id).name);
    if (auto it = c.op.tolerances.find(name); it != c.op.tolerances.end()) o.tolerance = it->second;
    return o;
  };
  for (const auto& f : omega_frames(c)) {
    const OmegaFrame fr = std::get<OmegaFrame>(f.frame);
    for (const auto& e : operator_catalog()) {
      if (!selected(c, e.name)) continue;
      const OperatorId id = e.id;
      const OperatorOptions opts = tol_for(id);
      std::vector<std::pair<double, double>> params = c.op.params;
      if (!e.uses_params) params = {{0.0, 0.0}};
      for (const auto& [lam, mu] : params) {
        Json pj = e.uses_params ? Json{{"lambda", lam}, {"mu", mu}, {"grid", grid_json}} : Json{{"grid", grid_json}};
        tasks.push_back({"operator", std::string(e.name), "identity", to_json(f), pj, false, [=] {
                           const OperatorReport r = verify_operator(id, lam, mu, fr, g, gaussian_test_set(g), opts);
                           Outcome o{r.residual, r.tolerance, r.pass};
                           if (r.convention)
                             o.details = {{"convention", to_string(*r.convention)},
                                          {"residual_minus", r.residual_minus},
                                          {"residual_plus", r.residual_plus}};
                           return o;
                         }});
        if (id == OperatorId::quasi_yb_p) {
          tasks.push_back({"operator", std::string(e.name), "half-shifted", to_json(f), pj, false, [=] {
                             const OperatorSides s = quasi_yb_half_shifted(lam, mu, fr, g, opts.eval);
                             const double tol = opts.tolerance > 0 ? opts.tolerance : e.default_tolerance;
                             const double r = max_residual(s.lhs, s.rhs, gaussian_test_set(g), 1);
                             return Outcome{r, tol, r <= tol};
                           }});
        }
      }
      if (id == OperatorId::three_four) {
        tasks.push_back({"operator", std::string(e.name), "derived-route", to_json(f), Json{{"grid", grid_json}},
                         false, [=] {
                           const ComparisonReport r = three_four_route_check(fr, g, opts);
                           Outcome o{r.ratio, 10.0, r.pass};
                           o.details = {{"direct", r.base}, {"derived", r.other}};
                           return o;
                         }});
      }
      const bool two_sided = id != OperatorId::artin_fourier && id != OperatorId::unitarity;
      if (!two_sided) continue;
      const auto [lam, mu] = e.uses_params && !c.op.params.empty() ? c.op.params.front() : std::pair{0.0, 0.0};
      Json pj = e.uses_params ? Json{{"lambda", lam}, {"mu", mu}, {"grid", grid_json}} : Json{{"grid", grid_json}};
      if (c.op.doubling) {
        tasks.push_back({"operator", std::string(e.name), "doubling", to_json(f), pj, false, [=] {
                           const DoublingReport r = doubling_check(id, lam, mu, fr, g, opts);
                           const double limit = 2.0 * std::max(r.base, kOperatorNoiseFloor);
                           Outcome o{std::max(r.doubled_size, r.doubled_window), limit, r.pass};
                           o.details = {{"base", r.base},
                                        {"doubled_size", r.doubled_size},
                                        {"doubled_window", r.doubled_window}};
                           return o;
                         }});
      }
      if (c.op.basis) {
        const std::uint64_t seed = mix_seed(c.seed, 100 + static_cast<std::uint64_t>(id), 0);
        tasks.push_back({"operator", std::string(e.name), "basis", to_json(f), pj, false, [=] {
                           const ComparisonReport r = basis_check(id, lam, mu, fr, g, seed, opts);
                           Outcome o{r.ratio, 5.0, r.pass};
                           o.details = {{"gaussian", r.base}, {"random_phase", r.other}, {"seed", seed}};
                           return o;
                         }});
      }
    }
  }
}

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", tm);
}

}  // namespace

Json run_verify(const SuiteConfig& cfg) {
  validate(cfg);
  std::vector<Task> tasks;
  if (suite_on(cfg, "scalar")) add_scalar(cfg, tasks);
  if (suite_on(cfg, "integral")) add_integral(cfg, tasks);
  if (suite_on(cfg, "formal")) add_formal(cfg, tasks);
  if (suite_on(cfg, "operator")) add_operator(cfg, tasks);

  std::vector<Json> records(tasks.size());
  std::atomic<size_t> next{0};
  const auto worker = [&] {
    for (size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      Json r;
      r["suite"] = t.suite;
      r["id"] = t.id;
      r["check"] = t.check;
      r["frame"] = t.frame;
      r["params"] = t.params;
      const auto t0 = std::chrono::steady_clock::now();
      std::string status;
      try {
        const Outcome o = t.run();
        r["residual"] = o.residual;
        r["tolerance"] = o.tolerance;
        r["pass"] = o.pass;
        status = o.pass ? "pass" : (t.best_effort ? "warning" : "fail");
        if (!o.details.empty()) r["details"] = o.details;
      } catch (const std::exception& ex) {
        r["residual"] = nullptr;
        r["tolerance"] = nullptr;
        r["pass"] = false;
        r["error"] = ex.what();
        status = t.best_effort ? "warning" : "fail";
      }
      r["status"] = status;
      const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      r["wall_time"] = cfg.timing ? dt : 0.0;
      records[i] = std::move(r);
    }
  };
  unsigned w = cfg.workers > 0 ? static_cast<unsigned>(cfg.workers) : std::max(1u, std::thread::hardware_concurrency());
  w = std::min<unsigned>(w, std::max<size_t>(tasks.size(), 1));
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < w; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  int passed = 0, failed = 0, warnings = 0;
  Json recs = Json::array();
  for (auto& r : records) {
    const std::string s = r["status"];
    passed += s == "pass";
    failed += s == "fail";
    warnings += s == "warning";
    recs.push_back(std::move(r));
  }
  Json report;
  report["schema_version"] = kReportSchemaVersion;
  report["tool"] = "qdilog";
  report["environment"] = Json{{"version", QDILOG_VERSION},
                               {"timestamp", utc_timestamp()},
                               {"seed", cfg.seed},
                               {"settings", config_to_json(cfg)}};
  report["records"] = std::move(recs);
  report["summary"] = Json{{"total", static_cast<int>(records.size())},
                           {"passed", passed},
                           {"failed", failed},
                           {"warnings", warnings},
                           {"pass", failed == 0}};
  return report;
}

bool report_passed(const Json& report) { return report.at("summary").at("failed").get<int>() == 0; }

}  // namespace qdilog::cli
