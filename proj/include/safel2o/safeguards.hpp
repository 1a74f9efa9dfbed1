#pragma once

#include <deque>
#include <string>

#include "safel2o/types.hpp"

namespace safel2o {

// Update rules for the safeguard reference value mu.
enum class SafeguardKind {
  GeometricSequence,        // accept: mu <- theta * mu
  RecentTerm,               // accept: mu <- r
  ArithmeticAverage,        // accept: mu <- (r + count * mu) / (count + 1), count++
  ExponentialMovingAverage, // accept: mu <- theta * r + (1 - theta) * mu
  RecentMax,                // accept: push r into a window of size w, mu <- max(window)
};

struct SafeguardConfig {
  SafeguardKind kind = SafeguardKind::GeometricSequence;
  double alpha = 0.99;  // acceptance slack, in [0, 1)
  double theta = 0.5;   // contraction/mixing weight, in (0, 1); gs and ema only
  int window = 1;       // recent-max window length, >= 1
};

// Parses "gs:<theta>", "rt", "aa", "ema:<theta>", "rm:<window>"; alpha is
// carried separately. Malformed specs raise ConfigError.
SafeguardConfig parse_safeguard(const std::string& text, double alpha = 0.99);
std::string to_string(const SafeguardConfig& config);

// Tracks mu across a safeguarded run. A candidate is acceptable when its
// residual r satisfies r <= alpha * mu (ties accepted). `update` is called
// once per iteration with the residual of whichever iterate was kept
// (candidate or fallback step); it applies the scheme's rule when that
// residual satisfies the same descent test and leaves mu unchanged
// otherwise. mu never increases, whatever the residual stream.
class SafeguardState {
 public:
  SafeguardState(const SafeguardConfig& config, double initial_residual);

  bool check(double candidate_residual) const;
  void update(double kept_residual);
  double mu() const { return mu_; }
  const SafeguardConfig& config() const { return config_; }

 private:
  SafeguardConfig config_;
  double mu_ = 0.0;
  long accept_count_ = 0;          // arithmetic average denominator state
  std::deque<double> window_;      // recent-max memory, most recent at the back
};

}  // namespace safel2o
