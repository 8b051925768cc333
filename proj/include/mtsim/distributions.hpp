#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mtsim/random.hpp"

namespace mtsim {

enum class Family { Normal, DoubleExponential, GeneralizedGaussian };

std::string to_string(Family family);

/// Symmetric null distribution of the generalized Gaussian family.
///
/// The base law has density proportional to exp(-|x|^gamma / gamma); a
/// variate of the model is `scale` times a base variate. Normal is gamma=2,
/// DoubleExponential is gamma=1, both with closed-form evaluation paths.
/// Immutable; every member function is pure.
class NullModel {
 public:
  static NullModel normal(double scale = 1.0);
  static NullModel double_exponential(double scale = 1.0);
  /// Laplace calibrated to unit variance (scale 1/sqrt(2)).
  static NullModel unit_variance_laplace();
  static NullModel generalized_gaussian(double gamma, double scale = 1.0);

  Family family() const { return family_; }
  double gamma() const { return gamma_; }
  double scale() const { return scale_; }

  /// Short CLI/CSV name: normal, laplace, gg.
  std::string name() const;

  /// P(X >= x).
  double survival(double x) const;
  /// log P(X >= x), accurate where survival() underflows.
  double log_survival(double x) const;
  /// Inverse of survival(): the x with P(X >= x) = p, for p in (0,1).
  double quantile(double p) const;

  double sample(RandomStream& rng) const;
  std::vector<double> sample(RandomStream& rng, std::size_t count) const;

  friend bool operator==(const NullModel&, const NullModel&) = default;

 private:
  NullModel(Family family, double gamma, double scale);

  Family family_;
  double gamma_;
  double scale_;
  double log_gamma_shape_;  // log Gamma(1/gamma), GG path only
};

namespace detail {

// Standard normal upper tail and its logarithm.
double normal_survival(double x);
double normal_log_survival(double x);
// x with normal_survival(x) = p (Wichura AS241 plus one Newton step).
double normal_quantile(double p);

// Regularized upper incomplete gamma Q(a, z) and log Q(a, z), a > 0, z >= 0.
// The overloads taking log_gamma_a skip the lgamma evaluation.
double log_gamma_q(double a, double z, double log_gamma_a);
double log_gamma_q(double a, double z);
double gamma_q(double a, double z, double log_gamma_a);
double gamma_q(double a, double z);

}  // namespace detail

}  // namespace mtsim
