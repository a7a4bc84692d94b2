// One PASS/FAIL line per acceptance criterion; exit status 1 if any criterion fails.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qdilog/cli.hpp"
#include "qdilog/errors.hpp"
#include "qdilog/integral_identities.hpp"
#include "qdilog/operator_identities.hpp"
#include "qdilog/qweyl.hpp"
#include "qdilog/scalar_identities.hpp"

using namespace qdilog;
using cli::Json;

namespace {

struct Check {
  bool ok = true;
  std::vector<std::string> notes;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back("failed: " + what);
    }
  }
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void criterion(int n, const std::string& title, double budget_s, const std::function<std::string(Check&)>& body) {
  Check c;
  std::string summary;
  const auto t0 = Clock::now();
  try {
    summary = body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.notes.push_back(std::string("exception: ") + e.what());
  }
  const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  c.require(dt < budget_s, fmt::format("runtime {:.2f} s within {:.0f} s", dt, budget_s));
  if (!c.ok) ++failures;
  std::cout << fmt::format("{} criterion {}: {} | {} | {:.2f} s (budget {:.0f} s)\n", c.ok ? "PASS" : "FAIL", n, title,
                           summary, dt, budget_s);
  for (const auto& note : c.notes) std::cout << "    " << note << "\n";
  std::cout.flush();
}

cli::SuiteConfig only(const std::vector<std::string>& suites) {
  cli::SuiteConfig c = cli::default_config();
  c.suites = suites;
  c.timing = true;
  return c;
}

double num(const Json& j) { return j.is_null() ? INFINITY : j.get<double>(); }

}  // namespace

int main() {
  criterion(1, "gamma(1) anchor and its three expressions", 1.0, [](Check& c) {
    const cplx at_i = gamma_one_closed(make_modular_param(cplx(0, 1)));
    c.require(std::abs(at_i - 1.0) <= 1e-12, "closed form at tau = i equals 1");
    double worst = 0.0;
    for (cplx tau : {cplx(0.3, 0.8), cplx(0.1, 1.5), cplx(0, 2)}) {
      const ModularParam mp = make_modular_param(tau);
      const cplx closed = gamma_one_closed(mp), eta = dedekind_eta_ratio(mp), prod = gamma_one_product(mp);
      // independent product ratio from the pentagonal-number series
      const cplx ref = oracle::euler_pentagonal(std::exp(2.0 * oracle::pi * oracle::I * tau)) /
                       oracle::euler_pentagonal(std::exp(-2.0 * oracle::pi * oracle::I / tau));
      for (double d : {std::abs(closed - eta), std::abs(closed - prod), std::abs(eta - prod), std::abs(prod - ref)}) {
        worst = std::max(worst, d);
        c.require(d <= 1e-10, fmt::format("pairwise agreement at tau = {}", cli::format_complex(tau)));
      }
    }
    return fmt::format("|g1(i) - 1| = {:.1e}, worst pairwise {:.1e}", std::abs(at_i - 1.0), worst);
  });

  criterion(2, "scalar suite, 100 seeded samples per identity and frame", 30.0, [](Check& c) {
    const Json r = cli::run_verify(only({"scalar"}));
    double worst = 0.0;
    int n = 0;
    for (const auto& rec : r["records"]) {
      ++n;
      const double res = num(rec["residual"]);
      worst = std::max(worst, res);
      c.require(rec["status"] == "pass" && res <= 1e-9, rec["id"].get<std::string>() + " " + rec["frame"].dump());
      if (rec["details"]["count"] != 1) c.require(rec["details"]["count"] == 100, "100 samples");
    }
    c.require(n == 26, "13 identities x 2 frames");
    return fmt::format("{} records, max residual {:.2e}", n, worst);
  });

  criterion(3, "integral suite and deformation invariance", 300.0, [](Check& c) {
    const cli::SuiteConfig cfg = only({"integral"});
    const Json r = cli::run_verify(cfg);
    double worst_core = 0.0, worst_i3 = 0.0, worst_i5 = 0.0, worst_def = 0.0;
    int i5 = 0, deform = 0;
    for (const auto& rec : r["records"]) {
      const std::string id = rec["id"], check = rec["check"];
      const double res = num(rec["residual"]);
      if (id == "eigen-conv" || check == "degeneration") continue;
      if (check == "deformation") {
        ++deform;
        worst_def = std::max(worst_def, res);
        c.require(res <= 10 * cfg.integral.eps_quad, "deformation " + id);
        continue;
      }
      if (id == "gaussian-const") {
        worst_i3 = std::max(worst_i3, res);
        c.require(res <= 1e-8, "gaussian-const");
      } else if (id == "ultimate") {
        ++i5;
        worst_i5 = std::max(worst_i5, res);
        c.require(res <= 1e-5, "ultimate " + rec["params"].dump());
      } else {
        worst_core = std::max(worst_core, res);
        c.require(res <= 1e-6, id + " " + rec["params"].dump());
      }
    }
    c.require(i5 >= 3, "ultimate identity at three tuples");
    c.require(deform > 0, "deformation records present");
    return fmt::format("I1-I4,I6,I7 max {:.1e}; I3 max {:.1e}; I5 max {:.1e} over {} runs; deformation max {:.1e} "
                       "over {} runs",
                       worst_core, worst_i3, worst_i5, i5, worst_def, deform);
  });

  criterion(4, "degeneration chain toward the southeast", 60.0, [](Check& c) {
    double a = 0.0, b = 0.0;
    for (cplx tau : {cplx(0, 1), cplx(0.3, 0.8)}) {
      const ModularParam mp = make_modular_param(tau);
      const CheckReport r1 = degeneration_binomial_to_gamma(cplx(0.4, 0.1), mp, {}, 12.0, 1e-5);
      const CheckReport r2 = degeneration_addition_to_binomial(0.2, 0.25, mp, {}, 12.0, 1e-5);
      c.require(r1.pass, "tau-binomial -> tau-gamma");
      c.require(r2.pass, "addition -> tau-binomial");
      a = std::max(a, r1.residual);
      b = std::max(b, r2.residual);
    }
    return fmt::format("I2->I1 {:.1e}, I4->I2 {:.1e} at Re = 12", a, b);
  });

  criterion(5, "formal q-Weyl identities", 10.0, [](Check& c) {
    const cli::SuiteConfig cfg = only({"formal"});
    const Json r = cli::run_verify(cfg);
    int n = 0;
    for (const auto& rec : r["records"]) {
      ++n;
      c.require(rec["status"] == "pass", rec["id"].get<std::string>() + " " + rec["params"].dump());
    }
    double worst = 0.0;
    for (const auto& e : formal_catalog())
      for (cplx q : cfg.formal.q)
        for (int deg : {4, 8, 12}) {
          const FormalReport f = verify_formal(e.id, q, deg);
          worst = std::max(worst, f.max_mismatch / f.largest_coefficient);
          c.require(f.max_mismatch <= 1e-12 * f.largest_coefficient, std::string(e.name));
        }
    c.require(n == 36, "4 identities x 3 q x 3 degrees");
    return fmt::format("{} records, max relative coefficient mismatch {:.1e}", n, worst);
  });

  criterion(6, "operator suite at theta = pi/2, L = 16, M = 4096", 120.0, [](Check& c) {
    const OmegaFrame f = make_omega_frame(kPi / 2, 1 / (2 * kPi));
    const Grid g = make_grid(16.0, 4096);
    const auto tests = gaussian_test_set(g);
    const std::pair<double, double> params[] = {{0.7, 0.3}, {0.4, 0.6}};
    double o8 = 0.0, o12 = 0.0, o3 = 0.0, o57 = 0.0, growth = 0.0;
    for (auto [l, m] : params) {
      o8 = std::max(o8, verify_operator(OperatorId::unitarity, l, m, f, g, tests).residual);
    }
    c.require(o8 <= 1e-10, "norm preservation");
    for (auto id : {OperatorId::pentagon, OperatorId::three_four})
      o12 = std::max(o12, verify_operator(id, 0, 0, f, g, tests).residual);
    c.require(o12 <= 1e-6, "pentagon and three-four");
    o3 = verify_operator(OperatorId::artin, 0, 0, f, g, tests).residual;
    c.require(o3 <= 1e-8, "artin");
    const OperatorReport o4 = verify_operator(OperatorId::artin_fourier, 0, 0, f, g, tests);
    c.require(o4.convention.has_value() && o4.residual <= 1e-6, "one Fourier convention");
    c.require((o4.residual_plus <= 1e-6) != (o4.residual_minus <= 1e-6), "exactly one convention");
    for (auto [l, m] : params)
      for (auto id : {OperatorId::quasi_yb_p, OperatorId::quasi_yb_s, OperatorId::true_yb})
        o57 = std::max(o57, verify_operator(id, l, m, f, g, tests).residual);
    c.require(o57 <= 1e-5, "quasi and true Yang-Baxter");
    for (auto id : {OperatorId::pentagon, OperatorId::three_four, OperatorId::artin, OperatorId::quasi_yb_p,
                    OperatorId::quasi_yb_s, OperatorId::true_yb}) {
      const auto [l, m] = id == OperatorId::quasi_yb_p ? params[1] : params[0];
      const DoublingReport d = doubling_check(id, l, m, f, g);
      c.require(d.pass, std::string(operator_identity(id).name) + " doubling");
      growth = std::max(growth, d.doubled_size / std::max(d.base, kOperatorNoiseFloor));
    }
    return fmt::format("O8 {:.1e}; O1,O2 {:.1e}; O3 {:.1e}; O4 {} {:.1e} (other {:.1e}); O5-O7 {:.1e}; "
                       "doubling growth {:.2f}x",
                       o8, o12, o3, o4.convention ? to_string(*o4.convention) : "none", o4.residual,
                       o4.convention == FourierSign::plus ? o4.residual_minus : o4.residual_plus, o57, growth);
  });

  criterion(7, "shared eigenfunctions of the two spectral equations", 10.0, [](Check& c) {
    ScalarOptions opts;
    opts.tolerance = 1e-10;
    double worst = 0.0;
    for (cplx tau : {cplx(0, 1), cplx(0.3, 0.8)}) {
      for (auto id : {ScalarId::spectral_tau, ScalarId::spectral_one}) {
        SamplerSpec spec;
        spec.seed = 20240601;
        const SweepReport r = sample_sweep(id, spec, 20, make_modular_param(tau), opts);
        worst = std::max(worst, r.max_residual);
        c.require(r.count == 20 && r.failures == 0, std::string(scalar_identity(id).name));
      }
    }
    return fmt::format("20 pairs per identity and frame, max residual {:.1e}", worst);
  });

  criterion(8, "best-effort eigenfunction convolution", 30.0, [](Check& c) {
    const ModularParam mp = make_modular_param(cplx(0, 1));
    const cplx p[] = {cplx(0.5, -0.3), cplx(0.2)};
    const IntegralReport r = verify_integral(IntegralId::eigen_conv, p, mp);
    c.require(r.residual <= 1e-3, "residual at z = 0.5-0.3i, lambda = 0.2");
    // an unreachable tolerance must surface as a warning, never as a suite failure
    cli::SuiteConfig cfg = only({"integral"});
    cfg.ids = {"eigen-conv"};
    cfg.integral.tolerances["eigen-conv"] = 1e-30;
    const Json rep = cli::run_verify(cfg);
    bool downgraded = true;
    for (const auto& rec : rep["records"])
      if (rec["check"] == "identity") downgraded &= rec["status"] == "warning";
    c.require(downgraded, "forced failure reported as warning");
    c.require(cli::report_passed(rep), "suite still passes");
    return fmt::format("residual {:.1e} (tolerance 1e-3); forced failure -> {} warning(s), suite pass",
                       r.residual, rep["summary"]["warnings"].get<int>());
  });

  criterion(9, "full desk run through the command line", 600.0, [](Check& c) {
    const std::string cfg = std::string(QDILOG_SOURCE_DIR) + "/configs/desk.json";
    const std::string out = std::string(QDILOG_TEST_TMP) + "/acceptance_desk_report.json";
    const char* argv[] = {"qdilog", "verify", "--suite", "all", "--config", cfg.c_str(), "--out", out.c_str()};
    std::ostringstream so, se;
    const int code = cli::run(8, argv, so, se);
    c.require(code == 0, fmt::format("exit code 0 (got {})", code));
    std::string line = se.str();
    if (!line.empty() && line.back() == '\n') line.pop_back();
    return fmt::format("exit {}; {}", code, line.substr(0, line.find('\n')));
  });

  std::cout << (failures == 0 ? "all acceptance criteria passed\n" : fmt::format("{} criteria failed\n", failures));
  return failures == 0 ? 0 : 1;
}
