#include "mtsim/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "mtsim/errors.hpp"

namespace mtsim {

namespace {

constexpr double kLogHalf = -std::numbers::ln2;
// Beyond this |x| the normal tail is evaluated from the Mills ratio in
// log-space.
constexpr double kNormalAsymptoticCut = 8.0;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(what) + " requires a finite argument");
  }
}

// Mills ratio R(x) = Psi(x) / phi(x) for x > 0 via its continued fraction
// 1/(x + 1/(x + 2/(x + 3/(x + ...)))), modified Lentz.
double mills_ratio(double x) {
  constexpr double tiny = 1e-300;
  double f = x;
  double c = x;
  double d = 0.0;
  for (int k = 1; k < 500; ++k) {
    const double a = k;
    d = x + a * d;
    if (d == 0.0) d = tiny;
    c = x + a / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 / f;
}

// Continued fraction for Q(a, z), valid for z >= a + 1 (modified Lentz).
double gamma_q_continued_fraction(double a, double z) {
  constexpr double tiny = 1e-300;
  double b = z + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h;
}

// Lower regularized incomplete gamma P(a, z) by its power series, z < a + 1.
double gamma_p_series(double a, double z, double log_gamma_a) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    term *= z / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-z + a * std::log(z) - log_gamma_a);
}

}  // namespace

namespace detail {

double normal_log_survival(double x) {
  if (x > kNormalAsymptoticCut) {
    constexpr double log_sqrt_2pi = 0.91893853320467274178;
    return -0.5 * x * x - log_sqrt_2pi + std::log(mills_ratio(x));
  }
  if (x < 0.0) return std::log1p(-normal_survival(-x));
  return std::log(0.5 * std::erfc(x / std::numbers::sqrt2));
}

double normal_survival(double x) {
  if (x > kNormalAsymptoticCut) return std::exp(normal_log_survival(x));
  if (x < -kNormalAsymptoticCut) return 1.0 - normal_survival(-x);
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double normal_quantile(double p) {
  // Wichura (1988), algorithm AS241 PPND16, evaluated for the lower tail
  // probability p; the upper-tail quantile is its negation.
  const double qq = p - 0.5;
  double z;
  if (std::abs(qq) <= 0.425) {
    const double r = 0.180625 - qq * qq;
    z = qq *
        (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
              67265.770927008700853) * r + 45921.953931549871457) * r +
            13731.693765509461125) * r + 1971.5909503065514427) * r +
          133.14166789178437745) * r + 3.387132872796366608) /
        (((((((5226.495278852545925 * r + 28729.085735721942674) * r +
              39307.89580009271061) * r + 21213.794301586595867) * r +
            5394.1960214247511077) * r + 687.1870074920579083) * r +
          42.313330701600911252) * r + 1.0);
  } else {
    double r = qq < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    if (r <= 5.0) {
      r -= 1.6;
      z = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                0.24178072517745061177) * r + 1.27045825245236838258) * r +
              3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                0.0151986665636164571966) * r + 0.14810397642748007459) * r +
              0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
    } else {
      r -= 5.0;
      z = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                0.0012426609473880784386) * r + 0.026532189526576123093) * r +
              0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
              0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
    }
    if (qq < 0.0) z = -z;
  }
  return -z;
}

double log_gamma_q(double a, double z, double log_gamma_a) {
  if (z <= 0.0) return 0.0;
  if (z < a + 1.0) return std::log1p(-gamma_p_series(a, z, log_gamma_a));
  return -z + a * std::log(z) - log_gamma_a +
         std::log(gamma_q_continued_fraction(a, z));
}

double log_gamma_q(double a, double z) { return log_gamma_q(a, z, std::lgamma(a)); }

double gamma_q(double a, double z) { return gamma_q(a, z, std::lgamma(a)); }

double gamma_q(double a, double z, double lg) {
  if (z <= 0.0) return 1.0;
  if (z < a + 1.0) return 1.0 - gamma_p_series(a, z, lg);
  return std::exp(log_gamma_q(a, z, lg));
}

}  // namespace detail

std::string to_string(Family family) {
  switch (family) {
    case Family::Normal: return "normal";
    case Family::DoubleExponential: return "laplace";
    case Family::GeneralizedGaussian: return "gg";
  }
  return "unknown";
}

NullModel::NullModel(Family family, double gamma, double scale)
    : family_(family), gamma_(gamma), scale_(scale), log_gamma_shape_(0.0) {
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
    throw ValidationError("gamma must be a finite value >= 1");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ValidationError("scale must be a finite positive value");
  }
  if (family_ == Family::GeneralizedGaussian) log_gamma_shape_ = std::lgamma(1.0 / gamma_);
}

NullModel NullModel::normal(double scale) { return {Family::Normal, 2.0, scale}; }

NullModel NullModel::double_exponential(double scale) {
  return {Family::DoubleExponential, 1.0, scale};
}

NullModel NullModel::unit_variance_laplace() {
  return double_exponential(1.0 / std::numbers::sqrt2);
}

NullModel NullModel::generalized_gaussian(double gamma, double scale) {
  return {Family::GeneralizedGaussian, gamma, scale};
}

std::string NullModel::name() const { return to_string(family_); }

double NullModel::log_survival(double x) const {
  require_finite(x, "log_survival");
  const double u = x / scale_;
  switch (family_) {
    case Family::Normal:
      return detail::normal_log_survival(u);
    case Family::DoubleExponential:
      return u >= 0.0 ? kLogHalf - u : std::log1p(-0.5 * std::exp(u));
    case Family::GeneralizedGaussian: {
      const double a = 1.0 / gamma_;
      const double z = std::pow(std::abs(u), gamma_) / gamma_;
      const double log_q = detail::log_gamma_q(a, z, log_gamma_shape_);
      return u >= 0.0 ? kLogHalf + log_q : std::log1p(-0.5 * std::exp(log_q));
    }
  }
  return 0.0;
}

double NullModel::survival(double x) const {
  require_finite(x, "survival");
  const double u = x / scale_;
  switch (family_) {
    case Family::Normal:
      return detail::normal_survival(u);
    case Family::DoubleExponential:
      return u >= 0.0 ? 0.5 * std::exp(-u) : 1.0 - 0.5 * std::exp(u);
    case Family::GeneralizedGaussian: {
      const double z = std::pow(std::abs(u), gamma_) / gamma_;
      const double tail = 0.5 * detail::gamma_q(1.0 / gamma_, z, log_gamma_shape_);
      return u >= 0.0 ? tail : 1.0 - tail;
    }
  }
  return 0.0;
}

double NullModel::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile requires p in (0,1)");
  switch (family_) {
    case Family::Normal:
      return scale_ * detail::normal_quantile(p);
    case Family::DoubleExponential:
      return scale_ * (p <= 0.5 ? -std::log(2.0 * p) : std::log(2.0 * (1.0 - p)));
    case Family::GeneralizedGaussian:
      break;
  }
  if (p > 0.5) return -quantile(1.0 - p);
  if (p == 0.5) return 0.0;

  // Bracketed bisection on log_survival, which is strictly decreasing.
  const double target = std::log(p);
  double lo = 0.0;
  double hi = scale_;
  while (log_survival(hi) > target) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (log_survival(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double NullModel::sample(RandomStream& rng) const {
  if (family_ == Family::Normal) return scale_ * rng.normal();
  return quantile(rng.uniform_open());
}

std::vector<double> NullModel::sample(RandomStream& rng, std::size_t count) const {
  std::vector<double> out(count);
  for (auto& x : out) x = sample(rng);
  return out;
}

}  // namespace mtsim
