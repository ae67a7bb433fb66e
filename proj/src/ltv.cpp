#include "netoco/ltv.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

#include "netoco/container.hpp"
#include "netoco/rng.hpp"

namespace netoco::control {

Cost Cost::zero() {
  Cost c;
  c.tag = "zero";
  return c;
}

Cost Cost::quadratic_tracking(Eigen::VectorXd target, double mu) {
  Cost c;
  c.tag = "quadratic_tracking";
  c.target = std::move(target);
  c.mu = mu;
  return c;
}

Cost Cost::custom(double Lc,
                  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> v,
                  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> gx,
                  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> gu) {
  Cost c;
  c.tag = "custom";
  c.declared_Lc = Lc;
  c.value_fn = std::move(v);
  c.grad_x_fn = std::move(gx);
  c.grad_u_fn = std::move(gu);
  return c;
}

double Cost::value(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  if (tag == "zero") return 0.0;
  if (tag == "quadratic_tracking") {
    const Eigen::VectorXd dx = target.size() ? (x - target).eval() : x;
    return 0.5 * dx.squaredNorm() + 0.5 * mu * u.squaredNorm();
  }
  return value_fn(x, u);
}

Eigen::VectorXd Cost::grad_x(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  if (tag == "zero") return Eigen::VectorXd::Zero(x.size());
  if (tag == "quadratic_tracking") return target.size() ? (x - target).eval() : x;
  return grad_x_fn(x, u);
}

Eigen::VectorXd Cost::grad_u(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  if (tag == "zero") return Eigen::VectorXd::Zero(u.size());
  if (tag == "quadratic_tracking") return mu * u;
  return grad_u_fn(x, u);
}

double Cost::Lc() const {
  if (tag == "zero") return 0.0;
  if (tag == "quadratic_tracking")
    return 1.0 + (target.size() ? target.norm() : 0.0) + mu;
  return declared_Lc;
}

void LtvEpisode::check_shapes() const {
  if (K < 0) throw std::invalid_argument("negative horizon");
  if (static_cast<int>(A.size()) != K || static_cast<int>(B.size()) != K ||
      static_cast<int>(w.size()) != K || static_cast<int>(costs.size()) != K)
    throw std::invalid_argument("episode arrays must all have length K");
  if (x1.size() != d_x) throw std::invalid_argument("x1 dimension mismatch");
  for (int k = 0; k < K; ++k) {
    if (A[k].rows() != d_x || A[k].cols() != d_x)
      throw std::invalid_argument("A_k shape mismatch");
    if (B[k].rows() != d_x || B[k].cols() != d_u)
      throw std::invalid_argument("B_k shape mismatch");
    if (w[k].size() != d_x) throw std::invalid_argument("w_k dimension mismatch");
  }
}

double LtvEpisode::max_disturbance_norm() const {
  double worst = 0.0;
  for (const auto& wk : w) worst = std::max(worst, wk.norm());
  return worst;
}

Eigen::VectorXd step(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                     const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& w) {
  if (A.rows() != A.cols() || A.cols() != x.size() || B.rows() != A.rows() ||
      B.cols() != u.size() || w.size() != A.rows())
    throw std::invalid_argument("dimension mismatch in dynamics step");
  return A * x + B * u + w;
}

Eigen::VectorXd recover_disturbance(const Eigen::VectorXd& x_next, const Eigen::MatrixXd& A,
                                    const Eigen::MatrixXd& B, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& u) {
  if (A.rows() != A.cols() || A.cols() != x.size() || B.rows() != A.rows() ||
      B.cols() != u.size() || x_next.size() != A.rows())
    throw std::invalid_argument("dimension mismatch in disturbance recovery");
  return x_next - A * x - B * u;
}

PolicyInput build_policy_input(const std::vector<Eigen::VectorXd>& w_history, int k, int K,
                               int d_x, ZeroHistoryMode mode) {
  if (k < 1 || k > K) throw std::invalid_argument("round k outside [1, K]");
  Eigen::VectorXd z = Eigen::VectorXd::Zero(K * d_x);
  const int have = std::min<int>(k - 1, static_cast<int>(w_history.size()));
  for (int j = 0; j < have; ++j) {
    // most-recent-first: slot j holds w_{k-1-j}
    z.segment(j * d_x, d_x) = w_history[k - 2 - j];
  }
  PolicyInput input;
  input.z = z;
  if (mode == ZeroHistoryMode::bias_coordinate) {
    Eigen::VectorXd aug(K * d_x + 1);
    aug.head(K * d_x) = z;
    aug(K * d_x) = 1.0;
    input.z_bar = aug / aug.norm();
  } else {
    const double nrm = z.norm();
    input.z_bar = (nrm > 0.0) ? (z / nrm).eval() : Eigen::VectorXd::Zero(K * d_x);
  }
  return input;
}

int policy_input_dim(int K, int d_x, ZeroHistoryMode mode) {
  return K * d_x + (mode == ZeroHistoryMode::bias_coordinate ? 1 : 0);
}

namespace {
double op_norm(const Eigen::MatrixXd& M) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0);
}
}  // namespace

StabilityReport check_sequential_stability(const LtvEpisode& episode, double C1, double rho1,
                                           double C2) {
  StabilityReport report;
  report.worst_ratio = 0.0;
  // B norms first (witness n = 0).
  for (int k = 1; k <= episode.K; ++k) {
    const double ratio = op_norm(episode.B[k - 1]) / C2;
    if (ratio > report.worst_ratio) {
      report.worst_ratio = ratio;
      report.worst_k = k;
      report.worst_n = 0;
    }
  }
  // All partial products A_k ... A_{k-n+1} for n in [1, k).
  for (int k = 2; k <= episode.K; ++k) {
    Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(episode.d_x, episode.d_x);
    for (int n = 1; n < k; ++n) {
      prod = prod * episode.A[k - n];  // appends A_{k-n+1} in 1-based terms
      const double ratio = op_norm(prod) / (C1 * std::pow(rho1, n));
      if (ratio > report.worst_ratio) {
        report.worst_ratio = ratio;
        report.worst_k = k;
        report.worst_n = n;
      }
    }
  }
  report.pass = report.worst_ratio <= 1.0 + 1e-12;
  return report;
}

LtvEpisode stabilize_transform(const LtvEpisode& episode,
                               const std::vector<Eigen::MatrixXd>& F) {
  if (static_cast<int>(F.size()) != episode.K)
    throw std::invalid_argument("need one feedback gain per round");
  LtvEpisode out = episode;
  for (int k = 0; k < episode.K; ++k) {
    if (F[k].rows() != episode.d_u || F[k].cols() != episode.d_x)
      throw std::invalid_argument("feedback gain shape mismatch");
    out.A[k] = episode.A[k] + episode.B[k] * F[k];
  }
  out.certificate.reset();  // certificates do not transfer
  return out;
}

namespace {
Eigen::VectorXd clip_to_norm(Eigen::VectorXd v, double W) {
  const double nrm = v.norm();
  if (nrm > W && nrm > 0.0) v *= W / nrm;
  return v;
}
}  // namespace

DisturbanceGen zero_disturbance(int d_x) {
  return [d_x](int, int) { return Eigen::VectorXd::Zero(d_x); };
}

DisturbanceGen uniform_disturbance(int d_x, double W, std::uint64_t seed) {
  return [d_x, W, seed](int episode, int k) {
    Rng rng(derive_seed(seed, "w/" + std::to_string(episode) + "/" + std::to_string(k)));
    Eigen::VectorXd v(d_x);
    for (int i = 0; i < d_x; ++i) v(i) = rng.uniform(-W, W);
    return clip_to_norm(std::move(v), W);
  };
}

DisturbanceGen sinusoidal_disturbance(int d_x, double W, double freq, double episode_phase) {
  return [d_x, W, freq, episode_phase](int episode, int k) {
    Eigen::VectorXd v(d_x);
    const double phase = episode_phase * episode;
    for (int i = 0; i < d_x; ++i)
      v(i) = W * std::sin(freq * k + phase + 0.5 * M_PI * i);
    return clip_to_norm(std::move(v), W);
  };
}

DisturbanceGen sign_alternating_disturbance(int d_x, double W) {
  return [d_x, W](int, int k) {
    const double s = (k % 2 == 0) ? 1.0 : -1.0;
    Eigen::VectorXd v = Eigen::VectorXd::Constant(d_x, s);
    return clip_to_norm(std::move(v), W);
  };
}

void save_episode(const std::filesystem::path& path, const LtvEpisode& episode) {
  episode.check_shapes();
  Container c;
  c.kind = "ltv_episode";
  nlohmann::json cost_meta = nlohmann::json::array();
  for (const auto& cost : episode.costs) {
    if (cost.tag == "custom")
      throw std::invalid_argument("custom costs are not serializable");
    cost_meta.push_back({{"tag", cost.tag}, {"mu", cost.mu}});
  }
  c.meta = {{"K", episode.K},
            {"d_x", episode.d_x},
            {"d_u", episode.d_u},
            {"W", episode.W},
            {"costs", cost_meta}};
  if (episode.certificate) {
    c.meta["certificate"] = {{"C1", episode.certificate->C1},
                             {"rho1", episode.certificate->rho1},
                             {"C2", episode.certificate->C2},
                             {"verified", episode.certificate->verified}};
  }
  for (int k = 0; k < episode.K; ++k)
    c.tensors.emplace_back("A/" + std::to_string(k), episode.A[k]);
  for (int k = 0; k < episode.K; ++k)
    c.tensors.emplace_back("B/" + std::to_string(k), episode.B[k]);
  for (int k = 0; k < episode.K; ++k)
    c.tensors.emplace_back("w/" + std::to_string(k), episode.w[k]);
  c.tensors.emplace_back("x1", episode.x1);
  // Tracking targets ride along so quadratic costs round-trip.
  for (int k = 0; k < episode.K; ++k)
    if (episode.costs[k].target.size() > 0)
      c.tensors.emplace_back("target/" + std::to_string(k), episode.costs[k].target);
  save_container(path, c);
}

LtvEpisode load_episode(const std::filesystem::path& path) {
  const Container c = load_container(path);
  if (c.kind != "ltv_episode")
    throw std::runtime_error("expected an ltv_episode container, got " + c.kind);
  LtvEpisode e;
  e.K = c.meta.at("K").get<int>();
  e.d_x = c.meta.at("d_x").get<int>();
  e.d_u = c.meta.at("d_u").get<int>();
  e.W = c.meta.at("W").get<double>();
  e.x1 = c.tensor("x1");
  for (int k = 0; k < e.K; ++k) {
    e.A.push_back(c.tensor("A/" + std::to_string(k)));
    e.B.push_back(c.tensor("B/" + std::to_string(k)));
    e.w.push_back(c.tensor("w/" + std::to_string(k)));
  }
  for (int k = 0; k < e.K; ++k) {
    const auto& cm = c.meta.at("costs").at(k);
    const auto tag = cm.at("tag").get<std::string>();
    if (tag == "zero") {
      e.costs.push_back(Cost::zero());
    } else if (tag == "quadratic_tracking") {
      const std::string tname = "target/" + std::to_string(k);
      Eigen::VectorXd target;
      if (c.has_tensor(tname)) target = c.tensor(tname);
      e.costs.push_back(Cost::quadratic_tracking(target, cm.at("mu").get<double>()));
    } else {
      throw std::runtime_error("unknown cost tag in episode file: " + tag);
    }
  }
  if (c.meta.contains("certificate")) {
    StabilityCertificate cert;
    cert.C1 = c.meta["certificate"].at("C1").get<double>();
    cert.rho1 = c.meta["certificate"].at("rho1").get<double>();
    cert.C2 = c.meta["certificate"].at("C2").get<double>();
    cert.verified = c.meta["certificate"].at("verified").get<bool>();
    e.certificate = cert;
  }
  e.check_shapes();
  return e;
}

}  // namespace netoco::control
