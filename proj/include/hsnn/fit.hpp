#pragma once

#include <string>
#include <vector>

namespace hsnn {

enum class FitFamily { Gamma, Lognormal };
std::string fit_family_to_string(FitFamily f);

/// Zero-location two-parameter fit. For the lognormal, shape is the log-space
/// standard deviation and scale the median; for the gamma, the usual (k, theta).
struct FitResult {
  FitFamily family;
  double shape = 0.0;
  double scale = 0.0;
  double log_likelihood = 0.0;
  int n = 0;
  bool converged = true;   ///< gamma Newton fell back to moments when false
  bool degenerate = false; ///< all samples equal (lognormal shape 0)
};

/// Closed-form maximum likelihood: shape = population std of logs,
/// scale = exp(mean of logs).
FitResult fit_lognormal(const std::vector<double>& samples);

/// Maximum likelihood via Newton iteration on log(k) - psi(k) = log(mean) -
/// mean(log), started from the method-of-moments estimate; falls back to
/// moments (flagged) if 100 iterations do not converge.
FitResult fit_gamma(const std::vector<double>& samples);

double gamma_log_likelihood(const std::vector<double>& samples, double shape, double scale);

// exposed for direct testing
double digamma(double x);
double trigamma(double x);

/// Population skewness m3 / m2^(3/2).
double sample_skewness(const std::vector<double>& samples);

}  // namespace hsnn
