#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "netoco/config.hpp"
#include "netoco/episodic.hpp"
#include "netoco/oco.hpp"
#include "netoco/rf_teacher.hpp"
#include "netoco/trace_io.hpp"
#include "netoco/two_layer.hpp"

namespace netoco::harness {

// Raised when a run aborts on nonfinite values; carries the failing round.
class NumericalAbort : public std::runtime_error {
 public:
  NumericalAbort(const std::string& what, int round)
      : std::runtime_error(what), round_(round) {}
  int round() const { return round_; }

 private:
  int round_;
};

struct ComparatorResult {
  std::string kind;
  Tensor theta;
  std::vector<double> cum_losses;  // cumulative comparator loss per round
  int iterations = 0;
  double final_grad_norm = 0.0;
  bool warning_no_stationarity = false;
  std::vector<std::pair<int, double>> budget_curve;  // (pass, best objective)
};

// Multi-pass full-gradient projected descent on the sum of recorded losses,
// with step halving on non-decrease. An approximate argmin: every consumer
// labels it as such.
ComparatorResult offline_comparator(const std::vector<oco::LossOracle>& losses,
                                    const BallSet& set, int budget, Tensor start);

// theta*[i]: row r        <- theta1[i,r]       + (b/2) a_{i,r} c_{i,r}
//           row r + m/2   <- theta1[i,r+m/2]   - (b/2) a_{i,r} c_{i,r}
// Requires m_rf = m/2 and matched p, d, activation. Per slice,
// ||theta*[i] - theta1[i]||_F <= b D / sqrt(m).
Tensor constructive_theta_star(const rf::RfTeacher& teacher,
                               const neural::TwoLayerParams& student);

// 1-D nearly-convex synthetic family: l_t(z) = 0.5 (z - y_t)^2 +
// alpha * sin(omega z + phi_t) over the interval [-R, R].
struct SyntheticFamily {
  double R = 2.0;
  double alpha = 0.05;
  double omega = 6.0;
  std::vector<double> y;
  std::vector<double> phi;

  double value(int t, double z) const;
  double deriv(int t, double z) const;
  oco::LossOracle oracle(int t) const;
};

SyntheticFamily make_synthetic_family(double R, double alpha, double omega, int T,
                                      std::uint64_t seed);

struct SyntheticCertificate {
  double epsilon = 0.0;       // grid max violation + analytic off-grid slack
  double gradient_bound = 0.0;
  double grid_step = 0.0;
  double grid_max_violation = 0.0;
};

// Dense grid certification of the first-order lower-bound inequality for every
// member of the family; the reported epsilon includes a Lipschitz slack for
// off-grid pairs.
SyntheticCertificate certify_synthetic(const SyntheticFamily& family, int grid_points = 801);

struct CheckResult {
  std::string name;
  bool pass = false;
  bool hard = true;  // monitoring checks are reported, not gating
  double observed = 0.0;
  double bound = 0.0;
  std::string detail;
};

// The cross-module hard-invariant battery behind `verify` and the
// invariant_suite experiment kind.
std::vector<CheckResult> invariant_suite(const ExperimentConfig& config);

struct RunArtifacts {
  std::filesystem::path trace_csv;
  std::filesystem::path metadata_json;
  std::filesystem::path params_bin;
};

// Executes the configured experiment and writes trace.csv, metadata.json and
// serialized params into config.out_dir (atomically). Throws ConfigError,
// NumericalAbort, or IoError; the CLI maps these to exit codes 2/3/4.
RunArtifacts run(const ExperimentConfig& config);

// Prints a human-readable description of an artifact (container, trace CSV,
// or metadata JSON) to the stream.
void inspect(const std::filesystem::path& path, std::ostream& out);

void write_text_atomic(const std::filesystem::path& path, const std::string& body);

}  // namespace netoco::harness
