#pragma once

#include "carlasso/model.hpp"
#include "carlasso/rng.hpp"

namespace carlasso {

/// Exact Gibbs update of the probit latents: each z_ij is redrawn from its
/// Gaussian conditional given the rest of row i, truncated to (0, inf) when
/// y_ij = 1 and (-inf, 0] when y_ij = 0.
void update_latent_probit(ChainState& state, const DesignMatrices& design, RngStream& rng);

/// One random-walk Metropolis step per latent under y_ij ~ Poisson(exp(z_ij)).
/// `adapt` enables Robbins-Monro tuning of mh_step (burn-in only).
void update_latent_log(ChainState& state, const DesignMatrices& design, RngStream& rng, bool adapt);

/// One random-walk Metropolis step per latent under
/// y_i ~ Multinomial(sum_j y_ij, softmax(z_i1, ..., z_i,k-1, 0)); the last
/// response is the reference with logit fixed at 0.
void update_latent_logit(ChainState& state, const DesignMatrices& design, RngStream& rng, bool adapt);

/// Dispatch on design.link; no-op for the identity link.
void update_latent(ChainState& state, const DesignMatrices& design, RngStream& rng, bool adapt);

/// Probabilities softmax(logits..., 0): size logits.size() + 1, sums to one.
Vector softmax_with_reference(const Eigen::Ref<const Vector>& logits);

/// Batch length and target acceptance of the Metropolis tuning.
inline constexpr int kMhBatch = 50;
inline constexpr double kMhTargetAcceptance = 0.44;

}  // namespace carlasso
