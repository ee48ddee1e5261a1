#pragma once

#include "carlasso/model.hpp"
#include "carlasso/rng.hpp"

namespace carlasso {

/// One Gibbs sweep of CAR-LASSO (scalar shrinkage rates), in place.
///
/// Fixed scan: (1) tau2_B | B, lambda_beta; (2) B column by column;
/// (3) mu; (4) Omega by column partition; (5) tau2_Omega | Omega;
/// (6) lambda_beta | B and lambda_Omega | Omega with the tau2 blocks
/// integrated out, each immediately followed by a fresh tau2 draw so the
/// pair is an exact joint draw. The latent block is read, never written.
///
/// Throws InvalidArgument if `state.adaptive` is set, NumericalBreakdown on
/// Cholesky failure (after jitter) or a non-finite parameter.
void sweep_carlasso(ChainState& state, const DesignMatrices& design, const Hyperparams& hyper,
                    RngStream& rng);

/// Adaptive CAR-LASSO: same scan, but step (6) draws one rate per
/// coefficient and per off-diagonal of Omega, Gamma(r + 1, delta + |coef|),
/// plus one shared rate for the diagonal exponential prior.
void sweep_caralasso(ChainState& state, const DesignMatrices& design, const Hyperparams& hyper,
                     RngStream& rng);

/// Bayesian graphical LASSO: mu, Omega, tau2_Omega and lambda_Omega only.
/// `state.b` must have zero rows. Both adaptive and non-adaptive states are
/// accepted.
void sweep_bglasso(ChainState& state, const Matrix& y, const Hyperparams& hyper, RngStream& rng);

/// Dispatches on `state.adaptive`.
void sweep(ChainState& state, const DesignMatrices& design, const Hyperparams& hyper, RngStream& rng);

namespace detail {

/// Data summaries the Gaussian full conditionals need.
struct SufficientStats {
  int n = 0;
  Matrix xtx;  // p x p
  Vector xt1;  // p
  Matrix xtz;  // p x k
  Matrix ztz;  // k x k
  Vector zsum;  // k
};

SufficientStats sufficient_stats(const Matrix& x, const Matrix& z);

void update_tau2_b(ChainState& s, RngStream& rng);
void update_b(ChainState& s, const SufficientStats& st, const Matrix& sigma, RngStream& rng);
void update_mu(ChainState& s, const SufficientStats& st, const Matrix& sigma,
               const Eigen::LLT<Matrix>& omega_llt, double mu_prior_precision, RngStream& rng);
void update_omega(ChainState& s, const SufficientStats& st, RngStream& rng);
void update_tau2_omega(ChainState& s, RngStream& rng);
void update_lambdas(ChainState& s, const Hyperparams& hyper, bool with_beta, RngStream& rng);

/// tau2 | coefficient, rate for the Laplace scale mixture
/// (1 / tau2 ~ IG(rate / |coef|, rate^2); Gamma(1/2, rate^2 / 2) at 0).
double draw_tau2(double coef, double rate, RngStream& rng);

}  // namespace detail

}  // namespace carlasso
