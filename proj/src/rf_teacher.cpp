#include "netoco/rf_teacher.hpp"

#include <cmath>
#include <stdexcept>

#include "netoco/container.hpp"
#include "netoco/rng.hpp"

namespace netoco::rf {

void RfTeacher::validate() const {
  const double cap = (m_rf > 0) ? 2.0 * D / m_rf : 0.0;
  for (int i = 0; i < d; ++i)
    for (int r = 0; r < m_rf; ++r)
      if (c.slices[i].row(r).norm() > cap + 1e-12)
        throw std::invalid_argument("teacher coefficient row exceeds 2D/m_rf cap");
}

namespace {

Tensor sample_coefficients(int p, int d, double D, int m_rf, Rng& rng) {
  Tensor c;
  c.slices.resize(d);
  const double scale = (m_rf > 0) ? D / m_rf : 0.0;
  for (int i = 0; i < d; ++i) {
    Eigen::MatrixXd ci(m_rf, p);
    for (int r = 0; r < m_rf; ++r) {
      const Eigen::VectorXd dir = rng.unit_vector(p);
      const double rho = rng.uniform();
      ci.row(r) = (rho * scale) * dir.transpose();
    }
    c.slices[i] = std::move(ci);
  }
  return c;
}

}  // namespace

RfTeacher sample_teacher(int p, int d, double D, int m_rf, std::uint64_t seed,
                         const neural::Activation& act) {
  if (D < 0.0) throw std::invalid_argument("RF-norm bound D must be nonnegative");
  if (m_rf < 1) throw std::invalid_argument("m_rf must be >= 1");
  RfTeacher t;
  t.p = p;
  t.d = d;
  t.m_rf = m_rf;
  t.D = D;
  t.activation = act;
  t.seed = seed;
  t.generator = kGeneratorId;
  Rng rng(seed);
  t.w.slices.resize(d);
  for (int i = 0; i < d; ++i) t.w.slices[i] = rng.normal_matrix(m_rf, p);
  t.c = sample_coefficients(p, d, D, m_rf, rng);
  t.validate();
  return t;
}

RfTeacher aligned_teacher(const neural::TwoLayerParams& student, double D,
                          std::uint64_t seed) {
  RfTeacher t;
  t.p = student.p;
  t.d = student.d;
  t.m_rf = student.m / 2;
  t.D = D;
  t.activation = student.activation;
  t.seed = seed;
  t.generator = kGeneratorId;
  t.w.slices.resize(t.d);
  for (int i = 0; i < t.d; ++i)
    t.w.slices[i] = student.theta1.slices[i].topRows(t.m_rf);
  Rng rng(seed);
  t.c = sample_coefficients(t.p, t.d, D, t.m_rf, rng);
  t.validate();
  return t;
}

Eigen::VectorXd eval_teacher(const RfTeacher& teacher, const Eigen::VectorXd& x,
                             neural::NormCheck check) {
  if (x.size() != teacher.p) throw std::invalid_argument("input dimension mismatch");
  if (check == neural::NormCheck::strict) {
    const double nrm = x.norm();
    if (nrm != 0.0 && std::abs(nrm - 1.0) > 1e-9)
      throw std::invalid_argument("input is not unit norm (strict mode)");
  }
  Eigen::VectorXd out(teacher.d);
  for (int i = 0; i < teacher.d; ++i) {
    const Eigen::VectorXd proj = teacher.w.slices[i] * x;   // w_{i,r} . x
    const Eigen::VectorXd coef = teacher.c.slices[i] * x;   // c_{i,r} . x
    double acc = 0.0;
    for (int r = 0; r < teacher.m_rf; ++r)
      acc += coef(r) * teacher.activation.deriv(proj(r));
    out(i) = acc;
  }
  return out;
}

void save_teacher(const std::filesystem::path& path, const RfTeacher& teacher) {
  Container c;
  c.kind = "rf_teacher";
  c.meta = {{"p", teacher.p},
            {"d", teacher.d},
            {"m_rf", teacher.m_rf},
            {"D", teacher.D},
            {"activation", teacher.activation.name},
            {"seed", teacher.seed},
            {"generator", teacher.generator}};
  for (int i = 0; i < teacher.d; ++i)
    c.tensors.emplace_back("w/" + std::to_string(i), teacher.w.slices[i]);
  for (int i = 0; i < teacher.d; ++i)
    c.tensors.emplace_back("c/" + std::to_string(i), teacher.c.slices[i]);
  save_container(path, c);
}

RfTeacher load_teacher(const std::filesystem::path& path) {
  const Container file = load_container(path);
  if (file.kind != "rf_teacher")
    throw std::runtime_error("expected an rf_teacher container, got " + file.kind);
  RfTeacher t;
  t.p = file.meta.at("p").get<int>();
  t.d = file.meta.at("d").get<int>();
  t.m_rf = file.meta.at("m_rf").get<int>();
  t.D = file.meta.at("D").get<double>();
  t.activation = neural::Activation::by_name(file.meta.at("activation").get<std::string>());
  t.seed = file.meta.at("seed").get<std::uint64_t>();
  t.generator = file.meta.at("generator").get<std::string>();
  t.w.slices.resize(t.d);
  t.c.slices.resize(t.d);
  for (int i = 0; i < t.d; ++i) {
    t.w.slices[i] = file.tensor("w/" + std::to_string(i));
    t.c.slices[i] = file.tensor("c/" + std::to_string(i));
  }
  t.validate();
  return t;
}

NtkEstimate ntk_estimate(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                         const neural::Activation& act, int n_samples,
                         std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (x.size() != y.size()) throw std::invalid_argument("dimension mismatch");
  Rng rng(seed);
  const double xy = x.dot(y);
  double sum = 0.0, sum_sq = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    const Eigen::VectorXd w = rng.normal_vector(x.size());
    const double v = xy * act.deriv(w.dot(x)) * act.deriv(w.dot(y));
    sum += v;
    sum_sq += v * v;
  }
  NtkEstimate est;
  est.n_samples = n_samples;
  est.value = sum / n_samples;
  const double var = (n_samples > 1)
                         ? std::max(0.0, (sum_sq - sum * sum / n_samples) / (n_samples - 1))
                         : 0.0;
  est.std_error = std::sqrt(var / n_samples);
  return est;
}

}  // namespace netoco::rf
