#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "carlasso/ingest.hpp"
#include "carlasso/types.hpp"

namespace carlasso {

struct SimulationConfig {
  int k = 3;  // raw responses (the logit reference included)
  int p = 2;
  int n = 100;
  LinkCode link = LinkCode::Identity;
  std::uint64_t seed = 1;
  /// Fraction of B entries set to +-1; the rest are 0.
  double active_fraction = 0.5;
  /// Off-diagonal of the tridiagonal (AR(1)) precision with unit diagonal.
  double omega_offdiag = 0.4;
  /// Multinomial row total under the logit link.
  int total = 200;
  /// Optional overrides of the generated truth (k_eff x k_eff, p x k_eff, k_eff).
  std::optional<Matrix> omega;
  std::optional<Matrix> b;
  std::optional<Vector> mu;

  void validate() const;
};

struct SimulatedData {
  DataTable table;  // columns y1..yk then x1..xp
  Matrix omega;
  Matrix b;
  Vector mu;
  Matrix z;  // latent Gaussian block
  std::string formula;
};

/// x_i ~ N(0, I_p); z_i ~ N(Omega^{-1}(mu + B^T x_i), Omega^{-1}); y from the
/// link (identity: y = z; probit: 1[z > 0]; log: Poisson(exp z); logit:
/// Multinomial(total, softmax(z, 0))). mu defaults to 0 except under the log
/// link, where it is Omega 1 * log(10) so the latent means sit at log(10).
SimulatedData simulate(const SimulationConfig& config);

/// {"link", "seed", "k", "p", "n", "omega", "b", "mu"} with matrices as nested rows.
std::string truth_to_json(const SimulationConfig& config, const SimulatedData& data);

}  // namespace carlasso
