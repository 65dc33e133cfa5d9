#include "lge/config_io.hpp"

#include <cstdio>
#include <stdexcept>

namespace lge {

namespace {

double to_double(const std::string& k, const std::string& v) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad numeric value for " + k + ": '" + v + "'");
  }
}

int to_int(const std::string& k, const std::string& v) {
  try {
    size_t pos = 0;
    int i = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad integer value for " + k + ": '" + v + "'");
  }
}

bool to_bool(const std::string& k, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::runtime_error("config: bad boolean value for " + k + ": '" + v + "'");
}

std::string fmt(double d) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", d);
  return buf;
}

}  // namespace

SolverConfig solver_config_from_kv(const csv::KeyValues& kv) {
  SolverConfig cfg;
  for (const auto& [k, v] : kv) {
    if (k == "gamma") cfg.gamma = to_double(k, v);
    else if (k == "delta") cfg.delta = to_double(k, v);
    else if (k == "beta") cfg.beta = to_double(k, v);
    else if (k == "r1") cfg.r1 = to_double(k, v);
    else if (k == "r2") cfg.r2 = to_double(k, v);
    else if (k == "rho") cfg.rho = to_double(k, v);
    else if (k == "step1_tol") cfg.step1_tol = to_double(k, v);
    else if (k == "step2_tol") cfg.step2_tol = to_double(k, v);
    else if (k == "outer_tol") cfg.outer_tol = to_double(k, v);
    else if (k == "step1_max_iter") cfg.step1_max_iter = to_int(k, v);
    else if (k == "step2_max_iter") cfg.step2_max_iter = to_int(k, v);
    else if (k == "outer_max_iter") cfg.outer_max_iter = to_int(k, v);
    else if (k == "printed_phi_denominator") cfg.printed_phi_denominator = to_bool(k, v);
    else if (k == "constant_dual_step") cfg.constant_dual_step = to_bool(k, v);
    else throw std::runtime_error("config: unknown key '" + k + "'");
  }
  cfg.validate();
  return cfg;
}

csv::KeyValues solver_config_to_kv(const SolverConfig& cfg) {
  csv::KeyValues kv;
  kv["gamma"] = fmt(cfg.gamma);
  kv["delta"] = fmt(cfg.delta);
  kv["beta"] = fmt(cfg.beta);
  kv["r1"] = fmt(cfg.r1);
  kv["r2"] = fmt(cfg.r2);
  kv["rho"] = fmt(cfg.rho);
  kv["step1_tol"] = fmt(cfg.step1_tol);
  kv["step2_tol"] = fmt(cfg.step2_tol);
  kv["outer_tol"] = fmt(cfg.outer_tol);
  kv["step1_max_iter"] = std::to_string(cfg.step1_max_iter);
  kv["step2_max_iter"] = std::to_string(cfg.step2_max_iter);
  kv["outer_max_iter"] = std::to_string(cfg.outer_max_iter);
  kv["printed_phi_denominator"] = cfg.printed_phi_denominator ? "true" : "false";
  kv["constant_dual_step"] = cfg.constant_dual_step ? "true" : "false";
  return kv;
}

}  // namespace lge
