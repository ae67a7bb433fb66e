#pragma once

#include <functional>
#include <vector>

#include "netoco/ltv.hpp"
#include "netoco/oco.hpp"
#include "netoco/policy.hpp"

namespace netoco::control {

struct EpisodeResult {
  std::vector<Eigen::VectorXd> states;     // x_1 .. x_{K+1}
  std::vector<Eigen::VectorXd> controls;   // u_1 .. u_K (composite if feedback used)
  std::vector<Eigen::VectorXd> inputs;     // zbar_1 .. zbar_K
  std::vector<double> step_costs;
  double J = 0.0;
  std::vector<Eigen::VectorXd> recovered_w;
  double max_state_norm = 0.0;
  double max_control_norm = 0.0;
};

// Plays the policy against the episode's dynamics: builds the policy input
// from realized disturbances, plays u_k = f(theta; zbar_k) (plus F_k x_k if
// feedback gains are attached), steps, accumulates cost, and recovers the
// disturbances from observed transitions.
EpisodeResult rollout(const Policy& policy, const LtvEpisode& episode,
                      const std::vector<Eigen::MatrixXd>* feedback = nullptr,
                      ZeroHistoryMode mode = ZeroHistoryMode::zero_vector);

struct TransferDecomposition {
  std::vector<Eigen::VectorXd> nat_states;        // x_k^nat, k = 1..K+1
  // M[k][i] maps u_{i+1} into x_{k+2}: states[k] uses controls 1..k+1.
  std::vector<std::vector<Eigen::MatrixXd>> M;
  std::vector<Eigen::VectorXd> states;            // closed-form x_k, k = 1..K+1
};

// Closed-form state decomposition x_k = x_k^nat + sum_i M_i^k u_i with
// M_i^k = A_{k-1} ... A_{i+1} B_i.
TransferDecomposition transfer_decomposition(const LtvEpisode& episode,
                                             const std::vector<Eigen::VectorXd>& controls);

// Episode cost as a function of a free control sequence (the recorded w's
// drive the states). Used by the convexity checks and the closed-form
// comparisons.
double episode_cost_of_controls(const LtvEpisode& episode,
                                const std::vector<Eigen::VectorXd>& controls);

struct EpisodeGradient {
  double loss = 0.0;
  Tensor grad;                               // d L / d theta
  std::vector<Eigen::VectorXd> control_grads;  // d L / d u_k along the counterfactual
  std::vector<Eigen::VectorXd> states;       // counterfactual x_1 .. x_{K+1}
  std::vector<Eigen::VectorXd> controls;     // counterfactual u_1 .. u_K
};

// Counterfactual episode loss L_t(theta) under the recorded disturbances and
// its adjoint gradient: lambda_{K+1} = 0, lambda_k = grad_x c_k + A_k^T
// lambda_{k+1}, dL/du_k = grad_u c_k + B_k^T lambda_{k+1}, and dL/dtheta =
// sum_k net_grad(theta, zbar_k, dL/du_k). The inputs zbar_k come from the
// recorded disturbances, so they do not depend on theta.
EpisodeGradient episode_loss_and_gradient(const Policy& policy, const LtvEpisode& episode,
                                          ZeroHistoryMode mode = ZeroHistoryMode::zero_vector);

using EpisodeStream = std::function<LtvEpisode(int t)>;

struct EpisodicRunResult {
  oco::RegretTrace trace;
  Tensor final_params;
  std::vector<LtvEpisode> recorded;  // episodes with recovered disturbances
  int failed_episode = 0;
  std::string error;
  bool ok() const { return failed_episode == 0; }
};

// Episodic OGD: per episode roll out with theta_t, recover disturbances,
// build the counterfactual loss, take a projected gradient step with
// eta0 * t^{-1/2}.
EpisodicRunResult run_episodic(Policy& policy, const EpisodeStream& stream, int T,
                               const BallSet& decision_set, double eta0,
                               ZeroHistoryMode mode = ZeroHistoryMode::zero_vector);

}  // namespace netoco::control
