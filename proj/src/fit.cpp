#include "hsnn/fit.hpp"

#include <cmath>
#include <limits>

#include "hsnn/types.hpp"

namespace hsnn {

std::string fit_family_to_string(FitFamily f) {
  return f == FitFamily::Gamma ? "gamma" : "lognormal";
}

double digamma(double x) {
  require(x > 0.0, "digamma: argument must be positive");
  double result = 0.0;
  while (x < 10.0) {  // shift up where the asymptotic series is accurate
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x, inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv;
  result -= inv2 * (1.0 / 12.0 -
                    inv2 * (1.0 / 120.0 -
                            inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
  return result;
}

double trigamma(double x) {
  require(x > 0.0, "trigamma: argument must be positive");
  double result = 0.0;
  while (x < 10.0) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x, inv2 = inv * inv;
  result += inv * (1.0 + 0.5 * inv +
                   inv2 * (1.0 / 6.0 -
                           inv2 * (1.0 / 30.0 -
                                   inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0 - inv2 * 5.0 / 66.0)))));
  return result;
}

namespace {

void check_samples(const std::vector<double>& samples, const char* who) {
  require(samples.size() >= 2, std::string(who) + ": need at least 2 samples");
  for (std::size_t i = 0; i < samples.size(); ++i)
    require(std::isfinite(samples[i]) && samples[i] > 0.0,
            std::string(who) + ": sample " + std::to_string(i) + " is not a positive real");
}

struct Moments {
  double mean = 0.0, var = 0.0, mean_log = 0.0, var_log = 0.0;
};

Moments moments_of(const std::vector<double>& samples) {
  Moments m;
  const double n = static_cast<double>(samples.size());
  for (double x : samples) {
    m.mean += x;
    m.mean_log += std::log(x);
  }
  m.mean /= n;
  m.mean_log /= n;
  for (double x : samples) {
    m.var += (x - m.mean) * (x - m.mean);
    m.var_log += (std::log(x) - m.mean_log) * (std::log(x) - m.mean_log);
  }
  m.var /= n;  // population variance: the MLE
  m.var_log /= n;
  return m;
}

}  // namespace

FitResult fit_lognormal(const std::vector<double>& samples) {
  check_samples(samples, "fit_lognormal");
  const Moments m = moments_of(samples);
  FitResult r;
  r.family = FitFamily::Lognormal;
  r.n = static_cast<int>(samples.size());
  r.scale = std::exp(m.mean_log);
  r.shape = std::sqrt(m.var_log);
  if (r.shape == 0.0) {
    r.degenerate = true;
    r.log_likelihood = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  constexpr double kLogTwoPi = 1.8378770664093453;
  double ll = 0.0;
  const double s2 = m.var_log;
  for (double x : samples) {
    const double z = std::log(x) - m.mean_log;
    ll += -std::log(x * r.shape) - 0.5 * kLogTwoPi - z * z / (2.0 * s2);
  }
  r.log_likelihood = ll;
  return r;
}

double gamma_log_likelihood(const std::vector<double>& samples, double shape, double scale) {
  require(shape > 0.0 && scale > 0.0, "gamma_log_likelihood: parameters must be positive");
  double ll = 0.0;
  for (double x : samples)
    ll += (shape - 1.0) * std::log(x) - x / scale - shape * std::log(scale) - std::lgamma(shape);
  return ll;
}

FitResult fit_gamma(const std::vector<double>& samples) {
  check_samples(samples, "fit_gamma");
  const Moments m = moments_of(samples);
  require(m.var > 0.0, "fit_gamma: degenerate constant sample");

  const double s = std::log(m.mean) - m.mean_log;  // > 0 by Jensen unless constant
  require(s > 0.0, "fit_gamma: degenerate sample (zero log-gap)");

  FitResult r;
  r.family = FitFamily::Gamma;
  r.n = static_cast<int>(samples.size());

  const double k_mom = m.mean * m.mean / m.var;
  double k = k_mom;
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    const double f = std::log(k) - digamma(k) - s;
    const double fp = 1.0 / k - trigamma(k);
    double next = k - f / fp;
    if (next <= 0.0) next = 0.5 * k;  // damped step keeps the iterate positive
    if (std::abs(next - k) <= 1e-12 * std::max(1.0, k)) {
      k = next;
      converged = true;
      break;
    }
    k = next;
  }
  if (!converged) k = k_mom;  // flagged fallback
  r.converged = converged;
  r.shape = k;
  r.scale = m.mean / k;
  r.log_likelihood = gamma_log_likelihood(samples, r.shape, r.scale);
  return r;
}

double sample_skewness(const std::vector<double>& samples) {
  require(samples.size() >= 2, "sample_skewness: need at least 2 samples");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= samples.size();
  double m2 = 0.0, m3 = 0.0;
  for (double x : samples) {
    const double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= samples.size();
  m3 /= samples.size();
  require(m2 > 0.0, "sample_skewness: degenerate constant sample");
  return m3 / std::pow(m2, 1.5);
}

}  // namespace hsnn
