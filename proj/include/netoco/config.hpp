#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace netoco::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key-value configuration with [section] headers, '#' comments, and
// 'key = value' lines. Unknown sections or keys are hard errors. Every key
// has a default; parse(to_string(c)) == c. The full grammar and key table
// live in docs/FORMATS.md.
struct ExperimentConfig {
  // [experiment]
  std::string kind = "online_rf";  // online_rf | nearly_convex_synthetic |
                                   // episodic_control | invariant_suite

  // [architecture]
  std::string arch = "two_layer";  // two_layer | deep
  int p = 8;
  int d = 2;
  int m = 256;
  int H = 2;                          // deep only
  std::optional<double> b;            // empty = default sqrt(m)
  std::string activation = "tanh";
  std::optional<double> R;            // empty = default (online_rf: D sqrt(d))
  std::string ball_mode = "joint";    // joint | per_slice

  // [algorithm]
  std::string algorithm = "ogd";  // ogd | adagrad
  std::optional<double> eta0;     // empty = schedule from theory constants
  double loss_lipschitz = 1.0;

  // [stream]
  int T = 400;
  std::string loss = "square";          // square | abs
  double teacher_D = 1.0;
  std::optional<int> teacher_m_rf;      // empty = matched (m/2)
  double bump_amplitude = 0.05;         // synthetic family
  double bump_frequency = 6.0;
  std::string comparator = "offline_gd_oracle";
  // offline_gd_oracle | constructive_theta_star | rf_teacher_loss | zero_policy

  // [control]
  int K = 10;
  int d_x = 2;
  int d_u = 2;
  double W = 0.5;
  double rho = 0.7;
  double rotation_rate = 0.3;
  double b_scale = 1.0;
  double cost_mu = 0.1;
  std::string disturbance = "sinusoidal";  // zero | uniform | sinusoidal | alternating
  double disturbance_freq = 1.0;
  double episode_phase = 0.0;
  double cert_C1 = 2.0;
  double cert_rho1 = 0.75;
  double cert_C2 = 1.0;
  std::string zero_history = "zero_vector";  // zero_vector | bias_coordinate

  // [seeds]
  std::uint64_t master_seed = 42;

  // [output]
  std::string out_dir = "out";

  // [tolerances]
  double tol_projection = 1e-12;
  double tol_nc_slack = 1e-8;
  double tol_exactness = 1e-10;
  double tol_gradient_check = 1e-4;
  double tol_regret_identity = 1e-9;
  double kink_filter = 1e-3;
  double kappa_output = 3.0;
  double kappa_grad = 3.0;
  double kappa_nc = 1.0;
  int comparator_budget = 200;
  std::string nc_sampling = "ball_uniform";  // ball_uniform | sphere_grid

  bool operator==(const ExperimentConfig&) const = default;
};

// Throws ConfigError with a line/field diagnostic on malformed input.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);
std::string to_string(const ExperimentConfig& config);
// Cross-field checks; parse_config calls this, CLI overrides re-validate.
void validate(const ExperimentConfig& config);

}  // namespace netoco::harness
