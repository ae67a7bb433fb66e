#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace netoco::control {

// Cost c_k(x, u). The quadratic tracking family 0.5*||x - g||^2 +
// 0.5*mu*||u||^2 is jointly convex with gradient bound constant
// L_c = 1 + ||g|| + mu. Custom costs must declare their own L_c.
struct Cost {
  std::string tag = "zero";
  Eigen::VectorXd target;  // tracking target g_k (empty = origin)
  double mu = 0.0;
  double declared_Lc = 0.0;  // used by tag == "custom"
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> value_fn;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> grad_x_fn;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> grad_u_fn;

  static Cost zero();
  static Cost quadratic_tracking(Eigen::VectorXd target, double mu);
  static Cost custom(double Lc,
                     std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> v,
                     std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> gx,
                     std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> gu);

  double value(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
  Eigen::VectorXd grad_x(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
  Eigen::VectorXd grad_u(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
  double Lc() const;
};

struct StabilityCertificate {
  double C1 = 1.0;
  double rho1 = 0.0;
  double C2 = 1.0;
  bool verified = false;
};

// One episode of x_{k+1} = A_k x_k + B_k u_k + w_k, k = 1..K.
struct LtvEpisode {
  int K = 0;
  int d_x = 0;
  int d_u = 0;
  double W = 0.0;  // disturbance norm bound
  Eigen::VectorXd x1;
  std::vector<Eigen::MatrixXd> A;  // K matrices d_x x d_x
  std::vector<Eigen::MatrixXd> B;  // K matrices d_x x d_u
  std::vector<Eigen::VectorXd> w;  // K disturbances
  std::vector<Cost> costs;         // K cost descriptors
  std::optional<StabilityCertificate> certificate;

  void check_shapes() const;
  double max_disturbance_norm() const;
};

Eigen::VectorXd step(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                     const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& w);

Eigen::VectorXd recover_disturbance(const Eigen::VectorXd& x_next, const Eigen::MatrixXd& A,
                                    const Eigen::MatrixXd& B, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& u);

enum class ZeroHistoryMode {
  zero_vector,      // zbar_1 = 0 (unit-norm precondition fails at k=1, recorded)
  bias_coordinate,  // append a 1 before normalizing; input length K*d_x + 1
};

struct PolicyInput {
  Eigen::VectorXd z;      // padded, most-recent-first
  Eigen::VectorXd z_bar;  // normalized per the mode
};

// z_k = vec([w_{k-1}, ..., w_1, 0, ..., 0]) of length K*d_x.
PolicyInput build_policy_input(const std::vector<Eigen::VectorXd>& w_history, int k, int K,
                               int d_x, ZeroHistoryMode mode = ZeroHistoryMode::zero_vector);

// Network input dimension for a policy under the given mode.
int policy_input_dim(int K, int d_x, ZeroHistoryMode mode);

struct StabilityReport {
  bool pass = false;
  double worst_ratio = 0.0;  // max ||prod||_op / (C1 rho1^n), and ||B||/C2
  int worst_k = 0;
  int worst_n = 0;  // 0 marks a B-norm violation witness
};

// Checks ||A_k ... A_{k-n+1}||_op <= C1 rho1^n for all k in [K], n in [1, k)
// and ||B_k||_op <= C2, via SVD of the explicit partial products.
StabilityReport check_sequential_stability(const LtvEpisode& episode, double C1, double rho1,
                                           double C2);

// A'_k = A_k + B_k F_k. The rollout driver adds F_k x_k to the network
// output at play time when feedback gains are attached.
LtvEpisode stabilize_transform(const LtvEpisode& episode,
                               const std::vector<Eigen::MatrixXd>& F);

// Disturbance generators (all clipped to norm W).
using DisturbanceGen = std::function<Eigen::VectorXd(int episode, int k)>;
DisturbanceGen zero_disturbance(int d_x);
DisturbanceGen uniform_disturbance(int d_x, double W, std::uint64_t seed);
DisturbanceGen sinusoidal_disturbance(int d_x, double W, double freq, double episode_phase);
DisturbanceGen sign_alternating_disturbance(int d_x, double W);

void save_episode(const std::filesystem::path& path, const LtvEpisode& episode);
LtvEpisode load_episode(const std::filesystem::path& path);

}  // namespace netoco::control
