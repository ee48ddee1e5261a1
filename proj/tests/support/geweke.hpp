#pragma once

// Joint-distribution (Geweke 2004) checks for the samplers.
//
// Marginal-conditional side: parameters drawn straight from the prior.
// Successive-conditional side: alternate one sampler sweep (latent update
// included) with a fresh draw of the data given the parameters. Both sides
// target the same joint, so test-function means must agree.

#include <cstdint>
#include <string>
#include <vector>

#include "carlasso/model.hpp"
#include "carlasso/rng.hpp"

namespace carlasso::testing {

struct GewekeSetup {
  std::string name;
  LinkCode link = LinkCode::Identity;
  bool adaptive = false;
  bool bglasso = false;
  int k_raw = 3;
  int p = 2;
  int n = 5;
  int logit_total = 20;
  Hyperparams hyper;
  int draws = 10000;
  /// Successive-conditional cycles (sweep + data redraw) per recorded draw.
  int cycles_per_draw = 10;
  int burn_in = 1000;
  std::uint64_t seed = 1;
};

/// Informative hyperparameters that keep the successive chain mixing well.
Hyperparams geweke_hyper(bool adaptive, LinkCode link);

struct GewekeStat {
  std::string name;
  double prior_mean = 0.0;
  double chain_mean = 0.0;
  double z = 0.0;
};

struct GewekeResult {
  std::vector<GewekeStat> stats;
  double seconds = 0.0;
  double max_abs_z() const;
};

GewekeResult run_geweke(const GewekeSetup& setup);

/// Prior draw of every parameter block (tau2 from its conditional).
ChainState sample_prior_state(const GewekeSetup& setup, RngStream& rng);

/// Standard error of a chain mean from non-overlapping batch means.
double batch_means_se(const std::vector<double>& chain, int batches = 50);

/// Standard error of a chain mean, sd / sqrt(ESS) with Geyer's initial
/// positive sequence (independent of the library's estimator).
double ips_se(const std::vector<double>& chain);

}  // namespace carlasso::testing
