#include "netoco/oco.hpp"

#include <cmath>
#include <limits>

namespace netoco::oco {

void RegretTrace::append_loss(double loss_value) {
  RegretRecord rec;
  rec.t = static_cast<int>(rows.size()) + 1;
  rec.loss = loss_value;
  rec.cum_loss = (rows.empty() ? 0.0 : rows.back().cum_loss) + loss_value;
  rec.comparator_cum_loss = 0.0;
  rec.regret = rec.cum_loss;
  rec.avg_regret = rec.regret / rec.t;
  rows.push_back(rec);
}

void RegretTrace::set_comparator(const std::vector<double>& comparator_cum) {
  if (comparator_cum.size() != rows.size())
    throw std::invalid_argument("comparator column length mismatch");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].comparator_cum_loss = comparator_cum[i];
    rows[i].regret = rows[i].cum_loss - rows[i].comparator_cum_loss;
    rows[i].avg_regret = rows[i].regret / rows[i].t;
  }
}

OcoState::OcoState(AlgorithmTag tag, Tensor theta1, BallSet set, double eta0,
                   double eps_div)
    : tag_(tag),
      theta_(std::move(theta1)),
      eta0_(eta0),
      eps_div_(eps_div),
      set_(std::move(set)) {
  if (!set_.contains(theta_))
    theta_ = set_.project(theta_);
  if (tag_ == AlgorithmTag::adagrad) grad_sq_ = Tensor::zeros_like(theta_);
}

OcoState OcoState::ogd(Tensor theta1, BallSet set, double eta0) {
  return OcoState(AlgorithmTag::ogd, std::move(theta1), std::move(set), eta0, 0.0);
}

OcoState OcoState::adagrad(Tensor theta1, BallSet set, double eta0, double eps_div) {
  return OcoState(AlgorithmTag::adagrad, std::move(theta1), std::move(set), eta0, eps_div);
}

void OcoState::step(const Tensor& grad) {
  if (!grad.same_shape(theta_))
    throw std::invalid_argument("gradient shape mismatch in oco step");
  if (!grad.all_finite())
    throw NumericalError("nonfinite gradient entries at round " + std::to_string(t_), t_);
  Tensor candidate = theta_;
  if (tag_ == AlgorithmTag::ogd) {
    const double eta_t = eta0_ / std::sqrt(static_cast<double>(t_));
    candidate -= grad * eta_t;
  } else {
    for (std::size_t i = 0; i < grad.slices.size(); ++i) {
      grad_sq_.slices[i].array() += grad.slices[i].array().square();
      candidate.slices[i].array() -=
          eta0_ * grad.slices[i].array() /
          (grad_sq_.slices[i].array().sqrt() + eps_div_);
    }
  }
  theta_ = set_.project(candidate);
  if (!theta_.all_finite())
    throw NumericalError("nonfinite iterate at round " + std::to_string(t_), t_);
  ++t_;
}

RunOutcome run_nearly_convex(OcoState state, const std::vector<LossOracle>& losses,
                             const std::function<void(const LossEvent&)>& observer) {
  RunOutcome out;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    const int t = static_cast<int>(i) + 1;
    LossSample sample;
    try {
      sample = losses[i](state.iterate());
      if (!std::isfinite(sample.value) || !sample.grad.all_finite())
        throw NumericalError("nonfinite loss or gradient", t);
    } catch (const std::exception& e) {
      out.failed_round = t;
      out.error = "loss oracle failed at round " + std::to_string(t) + ": " + e.what();
      out.final_iterate = state.iterate();
      return out;  // trace is truncated at t-1
    }
    out.trace.append_loss(sample.value);
    if (observer) {
      LossEvent ev;
      ev.t = t;
      ev.input = sample.input;
      ev.value = sample.value;
      ev.grad = sample.grad;
      ev.output_grad = sample.output_grad;
      observer(ev);
    }
    // grad h_t = grad l_t(theta_t) everywhere: the inner algorithm sees a
    // linear loss each round.
    try {
      state.step(sample.grad);
    } catch (const NumericalError& e) {
      out.failed_round = t;
      out.error = e.what();
      out.final_iterate = state.iterate();
      return out;
    }
  }
  out.final_iterate = state.iterate();
  return out;
}

NearConvexityReport verify_nearly_convex(const LossOracle& loss, const BallSet& set,
                                         double epsilon, int n_pairs,
                                         std::uint64_t seed, PairSampling sampling,
                                         const std::vector<double>& sphere_radii) {
  if (n_pairs < 1) throw std::invalid_argument("n_pairs must be >= 1");
  Rng rng(seed);
  NearConvexityReport report;
  report.sampling = sampling;
  report.epsilon = epsilon;
  report.pairs = n_pairs;
  report.max_violation = -std::numeric_limits<double>::infinity();

  std::vector<double> radii = sphere_radii;
  if (sampling == PairSampling::sphere_grid && radii.empty())
    radii = {0.25 * set.radius(), 0.5 * set.radius(), 0.75 * set.radius(), set.radius()};

  for (int k = 0; k < n_pairs; ++k) {
    Tensor x, y;
    if (sampling == PairSampling::ball_uniform) {
      x = set.sample_uniform(rng);
      y = set.sample_uniform(rng);
    } else {
      const double rx = radii[k % radii.size()];
      const double ry = radii[(k + 1) % radii.size()];
      x = set.sample_sphere(rng, rx);
      y = set.sample_sphere(rng, ry);
    }
    const LossSample at_y = loss(y);
    const LossSample at_x = loss(x);
    const double violation = at_y.value + at_y.grad.dot(x - y) - at_x.value;
    if (violation > report.max_violation) {
      report.max_violation = violation;
      report.worst_x = x;
      report.worst_y = y;
    }
  }
  report.pass = report.max_violation <= epsilon + 1e-8;
  return report;
}

}  // namespace netoco::oco
