#include "netoco/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace netoco::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError("line " + std::to_string(line) + ": expected a number, got '" + v + "'");
  }
}

int parse_int(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError("line " + std::to_string(line) + ": expected an integer, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const auto x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError("line " + std::to_string(line) + ": expected an unsigned integer, got '" + v + "'");
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  using Setter = std::function<void(ExperimentConfig&, const std::string&, int)>;
  // section -> key -> setter
  std::map<std::string, std::map<std::string, Setter>> schema;

  auto str = [](std::string ExperimentConfig::*field) {
    return [field](ExperimentConfig& c, const std::string& v, int) { c.*field = v; };
  };
  auto dbl = [](double ExperimentConfig::*field) {
    return [field](ExperimentConfig& c, const std::string& v, int line) {
      c.*field = parse_double(v, line);
    };
  };
  auto integer = [](int ExperimentConfig::*field) {
    return [field](ExperimentConfig& c, const std::string& v, int line) {
      c.*field = parse_int(v, line);
    };
  };
  auto opt_dbl = [](std::optional<double> ExperimentConfig::*field) {
    return [field](ExperimentConfig& c, const std::string& v, int line) {
      if (v == "theory_default")
        c.*field = std::nullopt;
      else
        c.*field = parse_double(v, line);
    };
  };

  schema["experiment"]["kind"] = str(&ExperimentConfig::kind);

  schema["architecture"]["arch"] = str(&ExperimentConfig::arch);
  schema["architecture"]["p"] = integer(&ExperimentConfig::p);
  schema["architecture"]["d"] = integer(&ExperimentConfig::d);
  schema["architecture"]["m"] = integer(&ExperimentConfig::m);
  schema["architecture"]["H"] = integer(&ExperimentConfig::H);
  schema["architecture"]["b"] = opt_dbl(&ExperimentConfig::b);
  schema["architecture"]["activation"] = str(&ExperimentConfig::activation);
  schema["architecture"]["R"] = opt_dbl(&ExperimentConfig::R);
  schema["architecture"]["ball_mode"] = str(&ExperimentConfig::ball_mode);

  schema["algorithm"]["name"] = str(&ExperimentConfig::algorithm);
  schema["algorithm"]["eta0"] = opt_dbl(&ExperimentConfig::eta0);
  schema["algorithm"]["loss_lipschitz"] = dbl(&ExperimentConfig::loss_lipschitz);

  schema["stream"]["T"] = integer(&ExperimentConfig::T);
  schema["stream"]["loss"] = str(&ExperimentConfig::loss);
  schema["stream"]["teacher_D"] = dbl(&ExperimentConfig::teacher_D);
  schema["stream"]["teacher_m_rf"] = [](ExperimentConfig& c, const std::string& v, int line) {
    if (v == "matched")
      c.teacher_m_rf = std::nullopt;
    else
      c.teacher_m_rf = parse_int(v, line);
  };
  schema["stream"]["bump_amplitude"] = dbl(&ExperimentConfig::bump_amplitude);
  schema["stream"]["bump_frequency"] = dbl(&ExperimentConfig::bump_frequency);
  schema["stream"]["comparator"] = str(&ExperimentConfig::comparator);

  schema["control"]["K"] = integer(&ExperimentConfig::K);
  schema["control"]["d_x"] = integer(&ExperimentConfig::d_x);
  schema["control"]["d_u"] = integer(&ExperimentConfig::d_u);
  schema["control"]["W"] = dbl(&ExperimentConfig::W);
  schema["control"]["rho"] = dbl(&ExperimentConfig::rho);
  schema["control"]["rotation_rate"] = dbl(&ExperimentConfig::rotation_rate);
  schema["control"]["b_scale"] = dbl(&ExperimentConfig::b_scale);
  schema["control"]["cost_mu"] = dbl(&ExperimentConfig::cost_mu);
  schema["control"]["disturbance"] = str(&ExperimentConfig::disturbance);
  schema["control"]["disturbance_freq"] = dbl(&ExperimentConfig::disturbance_freq);
  schema["control"]["episode_phase"] = dbl(&ExperimentConfig::episode_phase);
  schema["control"]["cert_C1"] = dbl(&ExperimentConfig::cert_C1);
  schema["control"]["cert_rho1"] = dbl(&ExperimentConfig::cert_rho1);
  schema["control"]["cert_C2"] = dbl(&ExperimentConfig::cert_C2);
  schema["control"]["zero_history"] = str(&ExperimentConfig::zero_history);

  schema["seeds"]["master"] = [](ExperimentConfig& c, const std::string& v, int line) {
    c.master_seed = parse_u64(v, line);
  };

  schema["output"]["dir"] = str(&ExperimentConfig::out_dir);

  schema["tolerances"]["projection"] = dbl(&ExperimentConfig::tol_projection);
  schema["tolerances"]["near_convexity_slack"] = dbl(&ExperimentConfig::tol_nc_slack);
  schema["tolerances"]["exactness"] = dbl(&ExperimentConfig::tol_exactness);
  schema["tolerances"]["gradient_check"] = dbl(&ExperimentConfig::tol_gradient_check);
  schema["tolerances"]["regret_identity"] = dbl(&ExperimentConfig::tol_regret_identity);
  schema["tolerances"]["kink_filter"] = dbl(&ExperimentConfig::kink_filter);
  schema["tolerances"]["kappa_output"] = dbl(&ExperimentConfig::kappa_output);
  schema["tolerances"]["kappa_grad"] = dbl(&ExperimentConfig::kappa_grad);
  schema["tolerances"]["kappa_nc"] = dbl(&ExperimentConfig::kappa_nc);
  schema["tolerances"]["comparator_budget"] = integer(&ExperimentConfig::comparator_budget);
  schema["tolerances"]["nc_sampling"] = str(&ExperimentConfig::nc_sampling);

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError("line " + std::to_string(line) + ": malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!schema.count(section))
        throw ConfigError("line " + std::to_string(line) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (section.empty())
      throw ConfigError("line " + std::to_string(line) + ": key outside any section");
    auto& keys = schema[section];
    auto it = keys.find(key);
    if (it == keys.end())
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key +
                        "' in section [" + section + "]");
    it->second(c, value, line);
  }
  validate(c);
  return c;
}

void validate(const ExperimentConfig& c) {
  auto one_of = [](const std::string& v, std::initializer_list<const char*> allowed,
                   const char* field) {
    for (const char* a : allowed)
      if (v == a) return;
    throw ConfigError(std::string("invalid value '") + v + "' for " + field);
  };
  one_of(c.kind, {"online_rf", "nearly_convex_synthetic", "episodic_control", "invariant_suite"},
         "experiment.kind");
  one_of(c.arch, {"two_layer", "deep"}, "architecture.arch");
  one_of(c.ball_mode, {"joint", "per_slice"}, "architecture.ball_mode");
  one_of(c.algorithm, {"ogd", "adagrad"}, "algorithm.name");
  one_of(c.loss, {"square", "abs"}, "stream.loss");
  one_of(c.comparator,
         {"offline_gd_oracle", "constructive_theta_star", "rf_teacher_loss", "zero_policy"},
         "stream.comparator");
  one_of(c.disturbance, {"zero", "uniform", "sinusoidal", "alternating"}, "control.disturbance");
  one_of(c.nc_sampling, {"ball_uniform", "sphere_grid"}, "tolerances.nc_sampling");
  one_of(c.zero_history, {"zero_vector", "bias_coordinate"}, "control.zero_history");
  if (c.T < 0) throw ConfigError("stream.T must be nonnegative");
  if (c.m < 2 || c.m % 2 != 0) throw ConfigError("architecture.m must be even and >= 2");
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_string(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[experiment]\n";
  out << "kind = " << c.kind << "\n";
  out << "\n[architecture]\n";
  out << "arch = " << c.arch << "\n";
  out << "p = " << c.p << "\n";
  out << "d = " << c.d << "\n";
  out << "m = " << c.m << "\n";
  out << "H = " << c.H << "\n";
  out << "b = " << (c.b ? fmt(*c.b) : "theory_default") << "\n";
  out << "activation = " << c.activation << "\n";
  out << "R = " << (c.R ? fmt(*c.R) : "theory_default") << "\n";
  out << "ball_mode = " << c.ball_mode << "\n";
  out << "\n[algorithm]\n";
  out << "name = " << c.algorithm << "\n";
  out << "eta0 = " << (c.eta0 ? fmt(*c.eta0) : "theory_default") << "\n";
  out << "loss_lipschitz = " << fmt(c.loss_lipschitz) << "\n";
  out << "\n[stream]\n";
  out << "T = " << c.T << "\n";
  out << "loss = " << c.loss << "\n";
  out << "teacher_D = " << fmt(c.teacher_D) << "\n";
  out << "teacher_m_rf = "
      << (c.teacher_m_rf ? std::to_string(*c.teacher_m_rf) : "matched") << "\n";
  out << "bump_amplitude = " << fmt(c.bump_amplitude) << "\n";
  out << "bump_frequency = " << fmt(c.bump_frequency) << "\n";
  out << "comparator = " << c.comparator << "\n";
  out << "\n[control]\n";
  out << "K = " << c.K << "\n";
  out << "d_x = " << c.d_x << "\n";
  out << "d_u = " << c.d_u << "\n";
  out << "W = " << fmt(c.W) << "\n";
  out << "rho = " << fmt(c.rho) << "\n";
  out << "rotation_rate = " << fmt(c.rotation_rate) << "\n";
  out << "b_scale = " << fmt(c.b_scale) << "\n";
  out << "cost_mu = " << fmt(c.cost_mu) << "\n";
  out << "disturbance = " << c.disturbance << "\n";
  out << "disturbance_freq = " << fmt(c.disturbance_freq) << "\n";
  out << "episode_phase = " << fmt(c.episode_phase) << "\n";
  out << "cert_C1 = " << fmt(c.cert_C1) << "\n";
  out << "cert_rho1 = " << fmt(c.cert_rho1) << "\n";
  out << "cert_C2 = " << fmt(c.cert_C2) << "\n";
  out << "zero_history = " << c.zero_history << "\n";
  out << "\n[seeds]\n";
  out << "master = " << c.master_seed << "\n";
  out << "\n[output]\n";
  out << "dir = " << c.out_dir << "\n";
  out << "\n[tolerances]\n";
  out << "projection = " << fmt(c.tol_projection) << "\n";
  out << "near_convexity_slack = " << fmt(c.tol_nc_slack) << "\n";
  out << "exactness = " << fmt(c.tol_exactness) << "\n";
  out << "gradient_check = " << fmt(c.tol_gradient_check) << "\n";
  out << "regret_identity = " << fmt(c.tol_regret_identity) << "\n";
  out << "kink_filter = " << fmt(c.kink_filter) << "\n";
  out << "kappa_output = " << fmt(c.kappa_output) << "\n";
  out << "kappa_grad = " << fmt(c.kappa_grad) << "\n";
  out << "kappa_nc = " << fmt(c.kappa_nc) << "\n";
  out << "comparator_budget = " << c.comparator_budget << "\n";
  out << "nc_sampling = " << c.nc_sampling << "\n";
  return out.str();
}

}  // namespace netoco::harness
