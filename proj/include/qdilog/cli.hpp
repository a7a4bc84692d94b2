#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qdilog/gamma.hpp"

namespace qdilog::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;
inline constexpr int kGoldenSchemaVersion = 1;

// "0.3+0.8i", "i", "-2i", "1-1e-3i", "0.5"
cplx parse_complex(std::string_view text);
// "1.25", "pi/2", "2pi/3", "1/2pi", "1/(2pi)"
double parse_real(std::string_view text);
// JSON number or string for reals; {"re","im"}, {"abs","arg"}, number or string for complex.
double real_from_json(const Json& j);
cplx complex_from_json(const Json& j);
Json to_json(cplx z);
std::string format_complex(cplx z);

struct FrameSpec {
  Frame frame;
  bool omega = false;
};
Json to_json(const FrameSpec& f);
FrameSpec frame_from_json(const Json& j);
FrameSpec tau_frame(cplx tau);
FrameSpec omega_frame(double theta, double hbar);

struct SuiteConfig {
  std::uint64_t seed = 20240601;
  int workers = 0;  // 0: hardware concurrency
  bool timing = false;
  std::vector<std::string> suites{"scalar", "integral", "formal", "operator"};
  std::vector<std::string> ids;  // empty: all
  std::vector<cplx> taus;
  std::vector<double> thetas;
  double hbar = 0.0;

  struct Scalar {
    int samples = 100;
    double eps = 1e-10;
    double tolerance = 1e-9;
  } scalar;
  struct Integral {
    double eps_quad = 1e-8;
    bool deformation = true;
    bool degeneration = true;
    std::map<std::string, double> tolerances;
  } integral;
  struct Formal {
    std::vector<cplx> q;
    std::vector<int> degrees{4, 8, 12};
    double tolerance = 1e-12;
  } formal;
  struct Operator {
    double half_width = 16.0;
    int size = 4096;
    std::vector<std::pair<double, double>> params{{0.7, 0.3}, {0.4, 0.6}};
    bool doubling = true;
    bool basis = true;
    std::map<std::string, double> tolerances;
  } op;

  std::optional<std::string> out;
};

SuiteConfig default_config();
// Throws ConfigError for unknown keys, unknown ids, and out-of-range values.
SuiteConfig config_from_json(const Json& j);
SuiteConfig load_config(const std::string& path);
Json config_to_json(const SuiteConfig& c);
void validate(const SuiteConfig& c);

bool is_known_id(std::string_view id);

// Runs every selected suite; the report is deterministic except for environment.timestamp.
Json run_verify(const SuiteConfig& cfg);
bool report_passed(const Json& report);

// Golden files.
Json generate_golden();
struct RegressResult {
  int entries = 0;
  int drifted = 0;
  std::vector<std::string> lines;
};
RegressResult regress(const Json& golden);

// Entry point: returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qdilog::cli
