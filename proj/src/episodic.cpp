#include "netoco/episodic.hpp"

#include <cmath>
#include <stdexcept>

namespace netoco::control {

EpisodeResult rollout(const Policy& policy, const LtvEpisode& episode,
                      const std::vector<Eigen::MatrixXd>* feedback, ZeroHistoryMode mode) {
  episode.check_shapes();
  if (policy.output_dim() != episode.d_u)
    throw std::invalid_argument("policy output dimension does not match d_u");
  if (policy.input_dim() != policy_input_dim(episode.K, episode.d_x, mode))
    throw std::invalid_argument("policy input dimension does not match K*d_x");
  if (feedback && static_cast<int>(feedback->size()) != episode.K)
    throw std::invalid_argument("need one feedback gain per round");

  EpisodeResult result;
  result.states.reserve(episode.K + 1);
  result.states.push_back(episode.x1);
  std::vector<Eigen::VectorXd> w_seen;
  for (int k = 1; k <= episode.K; ++k) {
    const PolicyInput input = build_policy_input(w_seen, k, episode.K, episode.d_x, mode);
    Eigen::VectorXd u = policy.forward(input.z_bar);
    if (feedback) u += (*feedback)[k - 1] * result.states.back();
    const Eigen::VectorXd x_next =
        step(episode.A[k - 1], episode.B[k - 1], result.states.back(), u, episode.w[k - 1]);
    if (!x_next.allFinite())
      throw oco::NumericalError("nonfinite state during rollout at k=" + std::to_string(k), k);
    const double cost = episode.costs[k - 1].value(result.states.back(), u);
    result.inputs.push_back(input.z_bar);
    result.controls.push_back(u);
    result.step_costs.push_back(cost);
    result.J += cost;
    result.recovered_w.push_back(recover_disturbance(
        x_next, episode.A[k - 1], episode.B[k - 1], result.states.back(), u));
    result.max_state_norm = std::max(result.max_state_norm, result.states.back().norm());
    result.max_control_norm = std::max(result.max_control_norm, u.norm());
    w_seen.push_back(result.recovered_w.back());
    result.states.push_back(x_next);
  }
  return result;
}

TransferDecomposition transfer_decomposition(const LtvEpisode& episode,
                                             const std::vector<Eigen::VectorXd>& controls) {
  episode.check_shapes();
  if (static_cast<int>(controls.size()) != episode.K)
    throw std::invalid_argument("need one control per round");
  TransferDecomposition out;
  out.M.assign(episode.K + 1, {});
  out.nat_states.push_back(episode.x1);
  out.states.push_back(episode.x1);

  // Everything flows through explicit transfer products: state k receives
  // x1 through A_{k-1}...A_1 and each input at step i (w_i directly, u_i
  // through B_i) through W_i^k = A_{k-1}...A_{i+1}. M_i^k = W_i^k B_i.
  Eigen::MatrixXd x1_prod = Eigen::MatrixXd::Identity(episode.d_x, episode.d_x);
  std::vector<Eigen::MatrixXd> w_prods;
  for (int k = 2; k <= episode.K + 1; ++k) {
    const Eigen::MatrixXd& A_prev = episode.A[k - 2];
    x1_prod = A_prev * x1_prod;
    for (auto& W : w_prods) W = A_prev * W;
    w_prods.push_back(Eigen::MatrixXd::Identity(episode.d_x, episode.d_x));

    auto& row = out.M[k - 1];
    Eigen::VectorXd nat = x1_prod * episode.x1;
    Eigen::VectorXd x = nat;
    for (int i = 1; i <= k - 1; ++i) {
      nat += w_prods[i - 1] * episode.w[i - 1];
      row.push_back(w_prods[i - 1] * episode.B[i - 1]);
      x += w_prods[i - 1] * episode.w[i - 1] + row.back() * controls[i - 1];
    }
    out.nat_states.push_back(nat);
    out.states.push_back(x);
  }
  return out;
}

double episode_cost_of_controls(const LtvEpisode& episode,
                                const std::vector<Eigen::VectorXd>& controls) {
  episode.check_shapes();
  if (static_cast<int>(controls.size()) != episode.K)
    throw std::invalid_argument("need one control per round");
  double total = 0.0;
  Eigen::VectorXd x = episode.x1;
  for (int k = 1; k <= episode.K; ++k) {
    total += episode.costs[k - 1].value(x, controls[k - 1]);
    x = step(episode.A[k - 1], episode.B[k - 1], x, controls[k - 1], episode.w[k - 1]);
  }
  return total;
}

EpisodeGradient episode_loss_and_gradient(const Policy& policy, const LtvEpisode& episode,
                                          ZeroHistoryMode mode) {
  episode.check_shapes();
  EpisodeGradient out;
  const int K = episode.K;

  // Counterfactual forward pass: recorded w's, controls from theta.
  std::vector<Eigen::VectorXd> w_hist(episode.w.begin(), episode.w.end());
  out.states.push_back(episode.x1);
  std::vector<Eigen::VectorXd> zbars;
  for (int k = 1; k <= K; ++k) {
    const PolicyInput input = build_policy_input(w_hist, k, K, episode.d_x, mode);
    zbars.push_back(input.z_bar);
    const Eigen::VectorXd u = policy.forward(input.z_bar);
    out.controls.push_back(u);
    out.loss += episode.costs[k - 1].value(out.states.back(), u);
    const Eigen::VectorXd x_next =
        step(episode.A[k - 1], episode.B[k - 1], out.states.back(), u, episode.w[k - 1]);
    if (!x_next.allFinite() || !std::isfinite(out.loss))
      throw oco::NumericalError("nonfinite counterfactual state at k=" + std::to_string(k), k);
    out.states.push_back(x_next);
  }

  // Adjoint pass.
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(episode.d_x);  // lambda_{K+1}
  out.control_grads.assign(K, Eigen::VectorXd());
  for (int k = K; k >= 1; --k) {
    out.control_grads[k - 1] =
        episode.costs[k - 1].grad_u(out.states[k - 1], out.controls[k - 1]) +
        episode.B[k - 1].transpose() * lambda;
    lambda = episode.costs[k - 1].grad_x(out.states[k - 1], out.controls[k - 1]) +
             episode.A[k - 1].transpose() * lambda;
  }

  out.grad = Tensor::zeros_like(policy.params());
  for (int k = 1; k <= K; ++k)
    out.grad += policy.gradient(zbars[k - 1], out.control_grads[k - 1]);
  return out;
}

EpisodicRunResult run_episodic(Policy& policy, const EpisodeStream& stream, int T,
                               const BallSet& decision_set, double eta0,
                               ZeroHistoryMode mode) {
  EpisodicRunResult result;
  for (int t = 1; t <= T; ++t) {
    LtvEpisode episode;
    EpisodeResult played;
    try {
      episode = stream(t);
      played = rollout(policy, episode, nullptr, mode);
    } catch (const std::exception& e) {
      result.failed_episode = t;
      result.error = e.what();
      result.final_params = policy.params();
      return result;
    }
    // Counterfactual loss uses the recovered disturbances of this episode.
    LtvEpisode recorded = episode;
    recorded.w = played.recovered_w;
    EpisodeGradient eg;
    try {
      eg = episode_loss_and_gradient(policy, recorded, mode);
      if (!eg.grad.all_finite())
        throw oco::NumericalError("nonfinite episode gradient", t);
    } catch (const std::exception& e) {
      result.failed_episode = t;
      result.error = e.what();
      result.final_params = policy.params();
      return result;
    }
    result.trace.append_loss(played.J);
    result.recorded.push_back(std::move(recorded));

    const double eta_t = eta0 / std::sqrt(static_cast<double>(t));
    Tensor next = policy.params();
    next -= eg.grad * eta_t;
    policy.set_params(decision_set.project(next));
  }
  result.final_params = policy.params();
  return result;
}

}  // namespace netoco::control
