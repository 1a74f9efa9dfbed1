#include "safel2o/safeguards.hpp"

#include <algorithm>
#include <cstdio>

#include "safel2o/errors.hpp"

namespace safel2o {

namespace {

double parse_positive_real(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("safeguard: cannot parse " + what + " from '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("safeguard: trailing junk in '" + text + "'");
  return value;
}

}  // namespace

SafeguardConfig parse_safeguard(const std::string& text, double alpha) {
  if (!(alpha >= 0.0) || !(alpha < 1.0)) throw ConfigError("safeguard: alpha must lie in [0, 1)");
  SafeguardConfig c;
  c.alpha = alpha;
  std::string name = text, arg;
  if (auto colon = text.find(':'); colon != std::string::npos) {
    name = text.substr(0, colon);
    arg = text.substr(colon + 1);
  }
  auto need_arg = [&](const char* what) {
    if (arg.empty()) throw ConfigError("safeguard: '" + name + "' needs a parameter, e.g. '" +
                                       name + ":" + what + "'");
  };
  auto no_arg = [&] {
    if (!arg.empty()) throw ConfigError("safeguard: '" + name + "' takes no parameter");
  };
  if (name == "gs" || name == "ema") {
    need_arg(name == "gs" ? "0.5" : "0.25");
    c.kind = name == "gs" ? SafeguardKind::GeometricSequence
                          : SafeguardKind::ExponentialMovingAverage;
    c.theta = parse_positive_real(arg, "theta");
    if (!(c.theta > 0.0) || !(c.theta < 1.0))
      throw ConfigError("safeguard: theta must lie in (0, 1)");
  } else if (name == "rt") {
    no_arg();
    c.kind = SafeguardKind::RecentTerm;
  } else if (name == "aa") {
    no_arg();
    c.kind = SafeguardKind::ArithmeticAverage;
  } else if (name == "rm") {
    need_arg("3");
    c.kind = SafeguardKind::RecentMax;
    double w = parse_positive_real(arg, "window");
    c.window = static_cast<int>(w);
    if (c.window < 1 || double(c.window) != w)
      throw ConfigError("safeguard: window must be a positive integer");
  } else {
    throw ConfigError("safeguard: unknown scheme '" + name + "' (expected gs|rt|aa|ema|rm)");
  }
  return c;
}

std::string to_string(const SafeguardConfig& c) {
  char buf[64];
  switch (c.kind) {
    case SafeguardKind::GeometricSequence:
      std::snprintf(buf, sizeof buf, "gs:%g", c.theta);
      return buf;
    case SafeguardKind::RecentTerm: return "rt";
    case SafeguardKind::ArithmeticAverage: return "aa";
    case SafeguardKind::ExponentialMovingAverage:
      std::snprintf(buf, sizeof buf, "ema:%g", c.theta);
      return buf;
    case SafeguardKind::RecentMax:
      std::snprintf(buf, sizeof buf, "rm:%d", c.window);
      return buf;
  }
  throw ConfigError("unknown safeguard kind");
}

SafeguardState::SafeguardState(const SafeguardConfig& config, double initial_residual)
    : config_(config), mu_(initial_residual) {
  if (!(initial_residual >= 0.0))
    throw ConfigError("safeguard: initial residual must be nonnegative");
  if (!(config.alpha >= 0.0) || !(config.alpha < 1.0))
    throw ConfigError("safeguard: alpha must lie in [0, 1)");
  if ((config.kind == SafeguardKind::GeometricSequence ||
       config.kind == SafeguardKind::ExponentialMovingAverage) &&
      (!(config.theta > 0.0) || !(config.theta < 1.0)))
    throw ConfigError("safeguard: theta must lie in (0, 1)");
  if (config.kind == SafeguardKind::RecentMax && config.window < 1)
    throw ConfigError("safeguard: window must be a positive integer");
}

bool SafeguardState::check(double candidate_residual) const {
  return candidate_residual <= config_.alpha * mu_;
}

void SafeguardState::update(double kept_residual) {
  if (!check(kept_residual)) return;  // no sufficient descent: mu stays put
  switch (config_.kind) {
    case SafeguardKind::GeometricSequence:
      mu_ *= config_.theta;
      break;
    case SafeguardKind::RecentTerm:
      mu_ = kept_residual;
      break;
    case SafeguardKind::ArithmeticAverage:
      mu_ = (kept_residual + double(accept_count_) * mu_) / double(accept_count_ + 1);
      ++accept_count_;
      break;
    case SafeguardKind::ExponentialMovingAverage:
      mu_ = config_.theta * kept_residual + (1.0 - config_.theta) * mu_;
      break;
    case SafeguardKind::RecentMax:
      window_.push_back(kept_residual);
      if (static_cast<int>(window_.size()) > config_.window) window_.pop_front();
      mu_ = *std::max_element(window_.begin(), window_.end());
      break;
  }
}

}  // namespace safel2o
