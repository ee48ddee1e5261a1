#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carlasso/ingest.hpp"
#include "carlasso/types.hpp"

namespace carlasso {

struct Hyperparams {
  LinkCode link = LinkCode::Identity;
  bool adaptive = false;
  // Gamma(shape r, rate delta) hyperpriors on the LASSO rates.
  double r_beta = 1.0;
  double delta_beta = 0.01;
  double r_omega = 1.0;
  double delta_omega = 0.01;
  // Precision of an N(0, I / kappa) prior on mu; 0 is the flat prior.
  double mu_prior_precision = 0.0;
  int n_iter = 5000;
  int n_burn_in = 1000;
  int thin_by = 10;
  std::uint64_t seed = 42;

  /// Throws InvalidArgument when an invariant is broken.
  void validate() const;
};

/// Full state of one chain.
///
/// Parametrisation: row i of the Gaussian block satisfies
///   z_i ~ N(Omega^{-1} (mu + B^T x_i), Omega^{-1}),
/// so B holds response-predictor conditional effects and the off-diagonals
/// of Omega the response-response ones.
struct ChainState {
  bool adaptive = false;
  Matrix omega;       // k_eff x k_eff, SPD
  Matrix b;           // p x k_eff
  Vector mu;          // k_eff
  Matrix z;           // n x k_eff latent block; empty under the identity link
  Matrix tau2_b;      // p x k_eff
  Matrix tau2_omega;  // k_eff x k_eff symmetric; off-diagonals used, diagonal fixed at 1
  // 1x1 when not adaptive. Adaptive: lambda_beta is p x k_eff; lambda_omega
  // is k_eff x k_eff with per-edge rates off the diagonal and the shared
  // diagonal-exponential rate on every diagonal entry.
  Matrix lambda_beta;
  Matrix lambda_omega;
  // Metropolis state for log/logit links (n x k_eff), empty otherwise.
  Matrix mh_step;
  Matrix mh_accepts;       // acceptances in the current adaptation batch
  int mh_batch_sweeps = 0;  // sweeps in the current batch
  int mh_batches = 0;       // completed batches
  long long mh_proposals = 0;  // running totals, reset by the driver after burn-in
  long long mh_accepted = 0;

  int k_eff() const { return static_cast<int>(omega.rows()); }
  int p() const { return static_cast<int>(b.rows()); }

  double lambda_beta_at(int j, int l) const { return adaptive ? lambda_beta(j, l) : lambda_beta(0, 0); }
  double lambda_omega_at(int i, int j) const { return adaptive ? lambda_omega(i, j) : lambda_omega(0, 0); }
  /// Exponential rate on the diagonal is lambda_diag / 2.
  double lambda_diag() const { return lambda_omega(0, 0); }
};

/// Response block the Gaussian core sees: Z for latent links, Y otherwise.
const Matrix& gaussian_block(const ChainState& state, const DesignMatrices& design);

/// Deterministic starting point: Omega = I, B = 0, tau2 = 1, lambdas = 1,
/// Z from the link-specific rule, mu = column means of the Gaussian block.
ChainState init_state(const DesignMatrices& design, const Hyperparams& hyper);

/// Checks dimensions, symmetry (1e-12), Cholesky of Omega and positivity of
/// all scales. Throws DimensionMismatch / NotSPD / DomainError.
void check_state(const ChainState& state, const DesignMatrices& design);

/// Stored draws of one parameter block: rows are draws, columns are the
/// flattened entries with stable labels such as `omega[1,2]`.
struct DrawBlock {
  std::vector<std::string> labels;
  Matrix values;
};

struct PosteriorDraws {
  int k_eff = 0;
  int p = 0;
  bool adaptive = false;
  DrawBlock omega;  // upper triangle incl. diagonal, column-major
  DrawBlock b;      // vec(B), column-major
  DrawBlock mu;
  DrawBlock lambda_beta;
  DrawBlock lambda_omega;

  PosteriorDraws() = default;
  PosteriorDraws(int k_eff, int p, bool adaptive, int capacity);

  int draw_count() const { return static_cast<int>(omega.values.rows()); }
  /// Writes `state` into row `row` (must be < capacity).
  void store(int row, const ChainState& state);

  Matrix omega_at(int draw) const;
  Matrix b_at(int draw) const;

  /// Concatenates draws of several chains with identical shapes.
  static PosteriorDraws pool(const std::vector<PosteriorDraws>& chains);
};

/// Entrywise posterior summary of a vector/matrix-valued parameter.
struct EntrySummary {
  Matrix mean;
  Matrix lower;
  Matrix upper;
  Matrix ess;
};

struct FitMetadata {
  std::string formula;
  LinkCode link = LinkCode::Identity;
  bool adaptive = false;
  std::uint64_t seed = 0;
  int n_iter = 0;
  int n_burn_in = 0;
  int thin_by = 1;
  int chains = 1;
  int n = 0;
  double r_beta = 0, delta_beta = 0, r_omega = 0, delta_omega = 0;
  std::vector<std::string> response_labels;  // all k responses
  std::vector<std::string> latent_labels;    // k_eff (reference dropped for logit)
  std::vector<std::string> predictor_labels;
  double runtime_seconds = 0.0;  // not written to summary.json
};

struct CarlassoOut {
  FitMetadata meta;
  double ci_level = 0.90;
  int draw_count = 0;
  EntrySummary omega;
  EntrySummary b;
  EntrySummary mu;  // k_eff x 1
  EntrySummary partial_correlation;
  EntrySummary lambda_beta;
  EntrySummary lambda_omega;
};

}  // namespace carlasso
