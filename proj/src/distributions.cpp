#include "carlasso/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "carlasso/error.hpp"

namespace carlasso {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorKind::DomainError,
                std::string(what) + " must be positive and finite, got " + std::to_string(v));
  }
}

// N(0,1) conditioned on > a, a >= 0.
double std_truncated_tail(RngStream& rng, double a) {
  if (a <= 5.0) {
    double tail = norm_sf(a);
    return -norm_quantile(rng.uniform_open() * tail);
  }
  const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    double z = a - std::log(rng.uniform_open()) / rate;
    double d = z - rate;
    if (std::log(rng.uniform_open()) <= -0.5 * d * d) return z;
  }
}

// N(0,1) conditioned on > a, any a.
double std_truncated_lower(RngStream& rng, double a) {
  if (a >= 0.0) return std_truncated_tail(rng, a);
  if (a < -5.0) {
    for (;;) {
      double z = standard_normal(rng);
      if (z > a) return z;
    }
  }
  double lo = norm_cdf(a);
  double u = lo + rng.uniform_open() * (1.0 - lo);
  return norm_quantile(u);
}

double gig_standard(RngStream& rng, double lambda, double omega) {
  // Density of x proportional to x^(lambda-1) exp(-omega (x + 1/x) / 2),
  // lambda >= 0, omega > 0.
  const double root = std::sqrt(omega * omega + lambda * lambda);
  const double alpha = omega * omega / (root + lambda);

  auto psi = [&](double x) {
    return -alpha * (std::cosh(x) - 1.0) - lambda * (std::expm1(x) - x);
  };
  auto dpsi = [&](double x) { return -alpha * std::sinh(x) - lambda * std::expm1(x); };

  double t, s;
  double x = -psi(1.0);
  if (x >= 0.5 && x <= 2.0) {
    t = 1.0;
  } else if (x > 2.0) {
    t = std::sqrt(2.0 / (alpha + lambda));
  } else {
    t = std::log(4.0 / (alpha + 2.0 * lambda));
  }
  x = -psi(-1.0);
  if (x >= 0.5 && x <= 2.0) {
    s = 1.0;
  } else if (x > 2.0) {
    s = std::sqrt(4.0 / (alpha * std::cosh(1.0) + lambda));
  } else {
    double s1 = std::log1p(1.0 / alpha + std::sqrt(1.0 / (alpha * alpha) + 2.0 / alpha));
    s = lambda > 0.0 ? std::min(1.0 / lambda, s1) : s1;
  }

  const double eta = -psi(t);
  const double zeta = -dpsi(t);
  const double theta = -psi(-s);
  const double xi = dpsi(-s);
  const double p = 1.0 / xi;
  const double r = 1.0 / zeta;
  const double td = t - r * eta;
  const double sd = s - p * theta;
  const double q = td + sd;
  const double total = p + q + r;

  double y;
  for (;;) {
    double u = rng.uniform();
    double v = rng.uniform_open();
    double w = rng.uniform();
    double chi;
    if (u < q / total) {
      y = -sd + q * v;
      chi = 1.0;
    } else if (u < (q + r) / total) {
      y = td - r * std::log(v);
      chi = std::exp(-eta - zeta * (y - t));
    } else {
      y = -sd + p * std::log(v);
      chi = std::exp(-theta + xi * (y + s));
    }
    if (w * chi <= std::exp(psi(y))) break;
  }
  const double ratio = lambda / omega;
  return (ratio + std::sqrt(1.0 + ratio * ratio)) * std::exp(y);
}

long long poisson_ptrs(RngStream& rng, double lam) {
  const double slam = std::sqrt(lam);
  const double loglam = std::log(lam);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = rng.uniform() - 0.5;
    double v = rng.uniform_open();
    double us = 0.5 - std::fabs(u);
    double k = std::floor((2.0 * a / us + b) * u + lam + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<long long>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -lam + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<long long>(k);
    }
  }
}

}  // namespace

double norm_cdf(double x) { return 0.5 * boost::math::erfc(-x / kSqrt2); }

double norm_sf(double x) { return 0.5 * boost::math::erfc(x / kSqrt2); }

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw Error(ErrorKind::DomainError, "probability outside [0, 1]");
  }
  return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

double standard_normal(RngStream& rng) {
  // Marsaglia polar method; the second variate of the pair is discarded so
  // the stream carries no hidden cache.
  for (;;) {
    double u = 2.0 * rng.uniform() - 1.0;
    double v = 2.0 * rng.uniform() - 1.0;
    double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double normal(RngStream& rng, double mean, double sd) { return mean + sd * standard_normal(rng); }

double exponential(RngStream& rng, double rate) {
  require_positive(rate, "exponential rate");
  return -std::log(rng.uniform_open()) / rate;
}

double gamma(RngStream& rng, double shape, double rate) {
  require_positive(shape, "gamma shape");
  require_positive(rate, "gamma rate");
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a + 1) * U^(1/a)
    double g = gamma(rng, shape + 1.0, 1.0);
    return g * std::exp(std::log(rng.uniform_open()) / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = rng.uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double laplace(RngStream& rng, double rate) {
  double e = exponential(rng, rate);
  return (rng.next_u64() >> 63) ? e : -e;
}

double inverse_gaussian(RngStream& rng, double mean, double shape) {
  require_positive(mean, "inverse-Gaussian mean");
  require_positive(shape, "inverse-Gaussian shape");
  double nu = standard_normal(rng);
  double y = nu * nu;
  if (y == 0.0) return mean;
  // Smaller root of the quadratic, written without cancellation:
  // x = 4 shape y / (sqrt(y^2 + 4 shape y / mean) + y)^2.
  double root = std::sqrt(y * y + 4.0 * shape * y / mean) + y;
  double x = 4.0 * shape * y / (root * root);
  if (rng.uniform() <= mean / (mean + x)) return x;
  return mean * (mean / x);
}

double gig(RngStream& rng, double p, double a, double b) {
  require_positive(a, "GIG a");
  if (!(b >= 0.0) || !std::isfinite(b) || !std::isfinite(p)) {
    throw Error(ErrorKind::DomainError, "GIG requires finite p and b >= 0");
  }
  if (b == 0.0) {
    if (!(p > 0.0)) throw Error(ErrorKind::DomainError, "GIG with b == 0 requires p > 0");
    return gamma(rng, p, 0.5 * a);
  }
  const double omega = std::sqrt(a * b);
  const double scale = std::sqrt(b / a);
  if (p >= 0.0) return scale * gig_standard(rng, p, omega);
  // X ~ GIG(-p) => 1/X ~ GIG(p) on the standard scale.
  return scale / gig_standard(rng, -p, omega);
}

double truncated_normal_lower(RngStream& rng, double mean, double sd, double lower) {
  require_positive(sd, "truncated-normal sd");
  return mean + sd * std_truncated_lower(rng, (lower - mean) / sd);
}

double truncated_normal_upper(RngStream& rng, double mean, double sd, double upper) {
  require_positive(sd, "truncated-normal sd");
  return mean - sd * std_truncated_lower(rng, (mean - upper) / sd);
}

long long poisson(RngStream& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw Error(ErrorKind::DomainError, "Poisson mean must be finite and >= 0");
  }
  if (mean > 1e18) throw Error(ErrorKind::DomainError, "Poisson mean too large for an integer count");
  if (mean == 0.0) return 0;
  if (mean >= 10.0) return poisson_ptrs(rng, mean);
  const double limit = std::exp(-mean);
  long long k = 0;
  double prod = rng.uniform_open();
  while (prod > limit) {
    ++k;
    prod *= rng.uniform_open();
  }
  return k;
}

std::vector<long long> multinomial(RngStream& rng, long long total,
                                   std::span<const double> probs) {
  std::vector<double> cum(probs.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (!(probs[j] >= 0.0)) throw Error(ErrorKind::DomainError, "negative multinomial weight");
    acc += probs[j];
    cum[j] = acc;
  }
  if (!(acc > 0.0)) throw Error(ErrorKind::DomainError, "multinomial weights sum to zero");
  std::vector<long long> counts(probs.size(), 0);
  for (long long t = 0; t < total; ++t) {
    double u = rng.uniform() * acc;
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()),
                                          probs.size() - 1);
    ++counts[j];
  }
  return counts;
}

}  // namespace carlasso
