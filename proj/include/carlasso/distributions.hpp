#pragma once

#include <span>
#include <vector>

#include "carlasso/rng.hpp"

// Univariate variate generators. Every generator draws only through
// RngStream::next_u64(), so for a fixed stream the sequence of consumed
// integers is platform independent. Floating-point transforms use libm
// (log, exp, sqrt, cosh) and Boost.Math erfc/erfc_inv.

namespace carlasso {

double norm_cdf(double x);
/// Upper tail 1 - Phi(x), accurate for large x.
double norm_sf(double x);
double norm_quantile(double p);

double standard_normal(RngStream& rng);
double normal(RngStream& rng, double mean, double sd);
double exponential(RngStream& rng, double rate);

/// Gamma with shape/rate parametrisation (Marsaglia-Tsang).
double gamma(RngStream& rng, double shape, double rate);

/// Double exponential with density (rate/2) exp(-rate |x|).
double laplace(RngStream& rng, double rate);

/// Inverse-Gaussian IG(mean, shape) by the Michael-Schucany-Haas
/// transformation with root selection. Throws DomainError unless both
/// parameters are positive and finite.
double inverse_gaussian(RngStream& rng, double mean, double shape);

/// Generalised inverse Gaussian with density proportional to
/// x^(p-1) exp(-(a x + b / x) / 2), a > 0, b >= 0 (b == 0 requires p > 0
/// and reduces to Gamma(p, a/2)).
///
/// Uses Devroye's (2014) rejection method on the log scale: the log-density
/// psi of log(x) is concave, and the hat is flat on [-s', t'] with
/// exponential tails tangent to psi at -s and t. The expected number of
/// iterations is uniformly bounded (below 2.7 over the whole parameter
/// space), so no iteration cap is needed.
double gig(RngStream& rng, double p, double a, double b);

/// N(mean, sd^2) truncated to (lower, inf).
///
/// On the standardised scale: bound below -5 uses plain rejection from
/// N(0,1) (acceptance > 1 - 3e-7); bound in [-5, 0) uses inversion through
/// Phi; bound in [0, 5] uses inversion through the upper tail 1 - Phi;
/// bound above 5 uses Robert's (1995) translated-exponential rejection with
/// the optimal rate (a + sqrt(a^2 + 4)) / 2.
double truncated_normal_lower(RngStream& rng, double mean, double sd, double lower);

/// N(mean, sd^2) truncated to (-inf, upper].
double truncated_normal_upper(RngStream& rng, double mean, double sd, double upper);

/// Poisson: multiplication method below mean 10, Hormann's PTRS otherwise.
long long poisson(RngStream& rng, double mean);

/// Multinomial(total, probs); probs need not be normalised. O(total * k).
std::vector<long long> multinomial(RngStream& rng, long long total,
                                   std::span<const double> probs);

}  // namespace carlasso
