#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "carlasso/inference.hpp"
#include "carlasso/model.hpp"
#include "carlasso/rng.hpp"

namespace carlasso {

/// Parameter blocks written per chain, in file order.
inline constexpr const char* kDrawBlocks[] = {"omega", "b", "mu", "lambda_beta", "lambda_omega"};

/// Writes `<block>.csv` for every block plus `meta.json` into `dir` (created
/// if needed). Each CSV has a leading 1-based `draw` column followed by the
/// block's labels; numbers use the shortest round-trip form.
void write_draws(const std::filesystem::path& dir, const PosteriorDraws& draws, const FitMetadata& meta,
                 int chain_index);

/// Reads a directory written by write_draws. Throws CorruptChain naming the
/// offending file on a missing file, bad header, ragged or non-finite
/// content, or row counts that disagree between blocks.
PosteriorDraws read_draws(const std::filesystem::path& dir);

std::string metadata_to_json(const FitMetadata& meta);
FitMetadata metadata_from_json(const std::string& text);

/// Summary document: metadata, then `<block>_mean`, `<block>_ci` and
/// `<block>_ess` for omega, b, mu, partial_correlation, lambda_beta and
/// lambda_omega, each a labelled matrix {"rows", "cols", "values"}.
/// Runtime is excluded so the document is reproducible byte for byte.
std::string summary_to_json(const CarlassoOut& out);
CarlassoOut summary_from_json(const std::string& text);

/// Complete chain state (and optionally the RNG) with exact doubles.
std::string state_to_json(const ChainState& state, const RngStream* rng = nullptr);
ChainState state_from_json(const std::string& text, std::optional<RngStream>* rng = nullptr);

/// Fit output directory layout:
///   summary.json, timing.json, chain_<c>/ (one per chain, 1-based).
/// Everything is staged in a sibling temp directory and renamed into place;
/// an existing non-empty `out_dir` is an IoError unless `force`.
void write_fit_output(const std::filesystem::path& out_dir, const FitResult& result, bool force);

struct LoadedFit {
  CarlassoOut summary;
  std::vector<PosteriorDraws> chains;
};

/// Reads summary.json and every chain directory listed in it.
LoadedFit read_fit_output(const std::filesystem::path& out_dir);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace carlasso
