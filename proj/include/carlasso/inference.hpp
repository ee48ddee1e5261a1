#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carlasso/ingest.hpp"
#include "carlasso/model.hpp"

namespace carlasso {

struct FitRequest {
  std::string formula;
  /// Either a CSV path or an in-memory table; the table wins if both are set.
  std::string data_path;
  std::optional<DataTable> table;
  Hyperparams hyper;
  double ci_level = 0.90;
  int chains = 1;
  /// Worker threads for chains; 0 reads CARLASSO_THREADS (default: hardware).
  int threads = 0;
  /// Called with (chain index, sweeps done, total sweeps) about every 10%.
  std::function<void(int, int, int)> progress;

  void validate() const;
};

struct ChainDiagnostics {
  double mh_acceptance = 0.0;   // post-burn-in, log/logit links only
  Matrix mh_step_after_burn_in;  // frozen afterwards
  ChainState final_state;
};

struct FitResult {
  CarlassoOut out;
  std::vector<PosteriorDraws> chains;
  std::vector<ChainDiagnostics> diagnostics;
  DesignMatrices design;
};

/// parse -> validate -> build_design -> per chain: init, burn-in (latent
/// update with Metropolis tuning, then sweep), n_iter sweeps storing every
/// thin_by-th state -> summaries. Chain c uses RngStream(seed, c), so the
/// result does not depend on the thread count.
FitResult fit(const FitRequest& request);

/// Runs one chain on an already built design.
PosteriorDraws run_chain(const DesignMatrices& design, const Hyperparams& hyper, int chain_index,
                         ChainDiagnostics* diagnostics = nullptr,
                         const std::function<void(int, int)>& progress = {});

/// ESS = N / (1 + 2 sum rho_t), autocorrelations summed in adjacent pairs
/// until the first pair with a negative sum (Geyer's initial positive
/// sequence). A zero-variance chain has ESS = N. Result is clamped to (0, N].
/// Throws TooFewDraws below 10 draws.
double effective_sample_size(std::span<const double> chain);

/// Linear interpolation between order statistics (R type 7).
double quantile_sorted(std::span<const double> sorted, double prob);

/// Entrywise means, equal-tailed intervals at `level`, and ESS (summed
/// across chains). Partial-correlation draws are derived from each stored
/// Omega. `meta` is copied into the result.
CarlassoOut summarize(const std::vector<PosteriorDraws>& chains, double level, const FitMetadata& meta = {});
CarlassoOut summarize(const PosteriorDraws& draws, double level, const FitMetadata& meta = {});

}  // namespace carlasso
