#pragma once

#include <cmath>

#include "nulldb/error.hpp"

namespace nulldb {

// Continuous density annotation attached to a marked null.  All sampling
// goes through the inverse CDF so that one uniform draw maps to exactly
// one sample, which keeps independently produced draws reproducible.
struct Distribution {
  enum class Kind { Normal, Uniform, Exponential };
  Kind kind = Kind::Normal;
  double a = 0.0; // normal: mu, uniform: lower, exponential: lambda
  double b = 1.0; // normal: sigma, uniform: upper, exponential: unused

  static Distribution normal(double mu, double sigma) {
    if (!std::isfinite(mu) || !std::isfinite(sigma) || sigma <= 0.0)
      fail(ErrKind::Config, "normal distribution needs finite mu and sigma > 0");
    return {Kind::Normal, mu, sigma};
  }
  static Distribution uniform(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
      fail(ErrKind::Config, "uniform distribution needs finite bounds with lo < hi");
    return {Kind::Uniform, lo, hi};
  }
  static Distribution exponential(double lambda) {
    if (!std::isfinite(lambda) || lambda <= 0.0)
      fail(ErrKind::Config, "exponential distribution needs lambda > 0");
    return {Kind::Exponential, lambda, 0.0};
  }

  friend bool operator==(const Distribution& x, const Distribution& y) {
    return x.kind == y.kind && x.a == y.a && x.b == y.b;
  }
};

double dist_cdf(const Distribution& d, double x);
// p must lie in (0, 1); the result is always finite.
double dist_quantile(const Distribution& d, double p);

} // namespace nulldb
