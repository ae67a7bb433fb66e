#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netoco/ball.hpp"
#include "netoco/tensor.hpp"

namespace netoco::oco {

// Thrown when a gradient or iterate picks up nonfinite entries. Runs abort
// rather than clamp; the round index travels with the error.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, int round)
      : std::runtime_error(what), round_(round) {}
  int round() const { return round_; }

 private:
  int round_;
};

enum class AlgorithmTag { ogd, adagrad };

// One round's observation: input, realized loss, and the gradients the
// linearization reduction feeds to the inner algorithm.
struct LossEvent {
  int t = 0;
  Eigen::VectorXd input;        // may be empty for synthetic scalar streams
  double value = 0.0;
  Tensor grad;                  // d loss / d theta at the played iterate
  Eigen::VectorXd output_grad;  // d loss / d network output (empty if n/a)
};

struct RegretRecord {
  int t = 0;
  double loss = 0.0;
  double cum_loss = 0.0;
  double comparator_cum_loss = 0.0;
  double regret = 0.0;
  double avg_regret = 0.0;
};

// Per-round regret bookkeeping. The comparator column is filled after the
// run (the harness owns the comparator); until then it is zero and the
// regret columns equal the cumulative loss.
struct RegretTrace {
  std::vector<RegretRecord> rows;

  void append_loss(double loss_value);
  // comparator_cum[t-1] = cumulative comparator loss through round t.
  void set_comparator(const std::vector<double>& comparator_cum);
  int rounds() const { return static_cast<int>(rows.size()); }
  double final_regret() const { return rows.empty() ? 0.0 : rows.back().regret; }
  double final_avg_regret() const { return rows.empty() ? 0.0 : rows.back().avg_regret; }
};

// Projected online algorithm state. OGD uses the eta0 * t^{-1/2} schedule;
// AdaGrad accumulates per-coordinate squared gradients with a fixed divisor
// guard and no explicit decay.
class OcoState {
 public:
  static OcoState ogd(Tensor theta1, BallSet set, double eta0);
  static OcoState adagrad(Tensor theta1, BallSet set, double eta0,
                          double eps_div = 1e-8);

  const Tensor& iterate() const { return theta_; }
  int round() const { return t_; }
  AlgorithmTag algorithm() const { return tag_; }
  const BallSet& decision_set() const { return set_; }
  double eta0() const { return eta0_; }

  // Applies one update with the given (linearized) gradient and advances t.
  void step(const Tensor& grad);

 private:
  OcoState(AlgorithmTag tag, Tensor theta1, BallSet set, double eta0, double eps_div);

  AlgorithmTag tag_;
  Tensor theta_;
  int t_ = 1;
  double eta0_;
  double eps_div_;
  Tensor grad_sq_;  // adagrad accumulator
  BallSet set_;
};

// Loss oracle: given theta, returns value and gradient (plus optional
// context recorded into the LossEvent).
struct LossSample {
  double value = 0.0;
  Tensor grad;
  Eigen::VectorXd output_grad;
  Eigen::VectorXd input;
};
using LossOracle = std::function<LossSample(const Tensor&)>;

struct RunOutcome {
  RegretTrace trace;
  Tensor final_iterate;
  int failed_round = 0;  // 0 = completed; otherwise the 1-based failing round
  std::string error;
  bool ok() const { return failed_round == 0; }
};

// The nearly-convex reduction: play theta_t, observe (value, grad), hand the
// inner algorithm the linearization h_t(theta) = value + <grad, theta -
// theta_t>, whose gradient is constant and equal to grad. The observer (if
// set) sees every round's LossEvent; the trace keeps scalars only.
RunOutcome run_nearly_convex(OcoState state, const std::vector<LossOracle>& losses,
                             const std::function<void(const LossEvent&)>& observer = {});

enum class PairSampling { ball_uniform, sphere_grid };

struct NearConvexityReport {
  double max_violation = 0.0;  // worst l(y) + <g(y), x-y> - l(x) over pairs
  bool pass = false;
  int pairs = 0;
  PairSampling sampling = PairSampling::ball_uniform;
  double epsilon = 0.0;
  // Worst pair, kept for diagnostics.
  Tensor worst_x, worst_y;
};

// Samples n_pairs (x, y) pairs from the set and checks the first-order
// convexity inequality up to epsilon. Pass iff the worst violation is at
// most epsilon + 1e-8. sphere_grid mode draws both points from spheres of
// the given radii (cycled); ball_uniform draws exact uniform ball samples.
NearConvexityReport verify_nearly_convex(const LossOracle& loss, const BallSet& set,
                                         double epsilon, int n_pairs,
                                         std::uint64_t seed,
                                         PairSampling sampling = PairSampling::ball_uniform,
                                         const std::vector<double>& sphere_radii = {});

}  // namespace netoco::oco
