#include "carlasso/inference.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "carlasso/error.hpp"
#include "carlasso/formula.hpp"
#include "carlasso/linalg.hpp"
#include "carlasso/links.hpp"
#include "carlasso/samplers.hpp"

namespace carlasso {

namespace {

constexpr int kMinDraws = 10;

int thread_budget(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CARLASSO_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Column-wise summary of a draws x entries matrix, with per-chain ESS summed.
struct ColumnSummary {
  Vector mean, lower, upper, ess;
};

ColumnSummary summarize_columns(const std::vector<const Matrix*>& per_chain, double level) {
  const Eigen::Index cols = per_chain.front()->cols();
  Eigen::Index total = 0;
  for (const auto* m : per_chain) total += m->rows();
  ColumnSummary out;
  out.mean.resize(cols);
  out.lower.resize(cols);
  out.upper.resize(cols);
  out.ess.resize(cols);
  std::vector<double> pooled(static_cast<std::size_t>(total));
  const double tail = 0.5 * (1.0 - level);
  for (Eigen::Index c = 0; c < cols; ++c) {
    std::size_t at = 0;
    double ess = 0.0;
    for (const auto* m : per_chain) {
      std::vector<double> one(static_cast<std::size_t>(m->rows()));
      for (Eigen::Index r = 0; r < m->rows(); ++r) one[static_cast<std::size_t>(r)] = (*m)(r, c);
      ess += one.size() >= static_cast<std::size_t>(kMinDraws) ? effective_sample_size(one)
                                                               : static_cast<double>(one.size());
      std::copy(one.begin(), one.end(), pooled.begin() + static_cast<std::ptrdiff_t>(at));
      at += one.size();
    }
    double sum = 0.0;
    for (double v : pooled) sum += v;
    out.mean(c) = sum / static_cast<double>(total);
    std::sort(pooled.begin(), pooled.end());
    out.lower(c) = quantile_sorted(pooled, tail);
    out.upper(c) = quantile_sorted(pooled, 1.0 - tail);
    // Rounding in the mean can step outside a degenerate interval.
    out.mean(c) = std::clamp(out.mean(c), pooled.front(), pooled.back());
    out.ess(c) = ess;
  }
  return out;
}

EntrySummary reshape_symmetric(const ColumnSummary& cs, int k, bool with_diag) {
  EntrySummary e;
  for (Matrix* m : {&e.mean, &e.lower, &e.upper, &e.ess}) *m = Matrix::Zero(k, k);
  const Vector* src[] = {&cs.mean, &cs.lower, &cs.upper, &cs.ess};
  Matrix* dst[] = {&e.mean, &e.lower, &e.upper, &e.ess};
  for (int t = 0; t < 4; ++t) {
    int c = 0;
    for (int j = 0; j < k; ++j) {
      for (int i = 0; i <= j; ++i) {
        if (i == j && !with_diag) continue;
        (*dst[t])(i, j) = (*src[t])(c);
        (*dst[t])(j, i) = (*src[t])(c);
        ++c;
      }
    }
  }
  return e;
}

EntrySummary reshape_colmajor(const ColumnSummary& cs, int rows, int cols) {
  EntrySummary e;
  e.mean = Eigen::Map<const Matrix>(cs.mean.data(), rows, cols);
  e.lower = Eigen::Map<const Matrix>(cs.lower.data(), rows, cols);
  e.upper = Eigen::Map<const Matrix>(cs.upper.data(), rows, cols);
  e.ess = Eigen::Map<const Matrix>(cs.ess.data(), rows, cols);
  return e;
}

// Upper-triangle partial-correlation draws (off-diagonal only), column-major.
Matrix partial_correlation_draws(const PosteriorDraws& d) {
  const int k = d.k_eff;
  Matrix out(d.draw_count(), k * (k - 1) / 2);
  for (int r = 0; r < d.draw_count(); ++r) {
    Matrix pc = partial_correlations(d.omega_at(r));
    int c = 0;
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < j; ++i) out(r, c++) = pc(i, j);
  }
  return out;
}

}  // namespace

void FitRequest::validate() const {
  hyper.validate();
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw Error(ErrorKind::InvalidArgument, "ci_level must lie in (0, 1)");
  if (chains < 1) throw Error(ErrorKind::InvalidArgument, "chains must be >= 1");
  if (hyper.n_iter / hyper.thin_by < kMinDraws) {
    throw Error(ErrorKind::InsufficientDraws,
                "floor(n_iter / thin_by) = " + std::to_string(hyper.n_iter / hyper.thin_by) +
                    " stored draws; at least " + std::to_string(kMinDraws) + " are required");
  }
}

double quantile_sorted(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw Error(ErrorKind::TooFewDraws, "quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double effective_sample_size(std::span<const double> chain) {
  const std::size_t n = chain.size();
  if (n < static_cast<std::size_t>(kMinDraws)) {
    throw Error(ErrorKind::TooFewDraws, "effective sample size needs at least 10 draws");
  }
  double mean = 0.0;
  for (double v : chain) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> c(n);
  double c0 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = chain[i] - mean;
    c0 += c[i] * c[i];
  }
  const double dn = static_cast<double>(n);
  if (!(c0 > 1e-300 * dn)) return dn;
  auto rho = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += c[i] * c[i + lag];
    return s / c0;
  };
  double pair_sum = 0.0;  // sum of Gamma_m = rho_2m + rho_2m+1 over accepted pairs
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    const double gamma_m = (m == 0 ? 1.0 : rho(2 * m)) + rho(2 * m + 1);
    if (gamma_m < 0.0) break;
    pair_sum += gamma_m;
  }
  const double tau = std::max(-1.0 + 2.0 * pair_sum, 1.0 / dn);
  return std::clamp(dn / tau, std::numeric_limits<double>::min(), dn);
}

CarlassoOut summarize(const std::vector<PosteriorDraws>& chains, double level, const FitMetadata& meta) {
  if (chains.empty() || chains.front().draw_count() == 0) {
    throw Error(ErrorKind::TooFewDraws, "no draws to summarize");
  }
  const PosteriorDraws& first = chains.front();
  const int k = first.k_eff;
  const int p = first.p;
  CarlassoOut out;
  out.meta = meta;
  out.ci_level = level;
  for (const auto& c : chains) out.draw_count += c.draw_count();

  auto gather = [&](auto member) {
    std::vector<const Matrix*> v;
    for (const auto& c : chains) v.push_back(&(c.*member).values);
    return v;
  };
  out.omega = reshape_symmetric(summarize_columns(gather(&PosteriorDraws::omega), level), k, true);
  out.b = reshape_colmajor(summarize_columns(gather(&PosteriorDraws::b), level), p, k);
  out.mu = reshape_colmajor(summarize_columns(gather(&PosteriorDraws::mu), level), k, 1);

  std::vector<Matrix> pcor;
  for (const auto& c : chains) pcor.push_back(partial_correlation_draws(c));
  if (k >= 2) {
    std::vector<const Matrix*> ptrs;
    for (const auto& m : pcor) ptrs.push_back(&m);
    out.partial_correlation = reshape_symmetric(summarize_columns(ptrs, level), k, false);
  } else {
    for (Matrix* m : {&out.partial_correlation.mean, &out.partial_correlation.lower,
                      &out.partial_correlation.upper, &out.partial_correlation.ess}) {
      *m = Matrix::Zero(k, k);
    }
  }
  out.partial_correlation.mean.diagonal().setOnes();
  out.partial_correlation.lower.diagonal().setOnes();
  out.partial_correlation.upper.diagonal().setOnes();
  out.partial_correlation.ess.diagonal().setConstant(out.draw_count);

  auto lb = summarize_columns(gather(&PosteriorDraws::lambda_beta), level);
  auto lo = summarize_columns(gather(&PosteriorDraws::lambda_omega), level);
  if (first.adaptive) {
    out.lambda_beta = reshape_colmajor(lb, p, k);
    // Off-diagonal per-edge rates, then the shared diagonal rate.
    const Eigen::Index m = lo.mean.size() - 1;
    ColumnSummary off{lo.mean.head(m), lo.lower.head(m), lo.upper.head(m), lo.ess.head(m)};
    out.lambda_omega = reshape_symmetric(off, k, false);
    out.lambda_omega.mean.diagonal().setConstant(lo.mean(m));
    out.lambda_omega.lower.diagonal().setConstant(lo.lower(m));
    out.lambda_omega.upper.diagonal().setConstant(lo.upper(m));
    out.lambda_omega.ess.diagonal().setConstant(lo.ess(m));
  } else {
    out.lambda_beta = reshape_colmajor(lb, 1, 1);
    out.lambda_omega = reshape_colmajor(lo, 1, 1);
  }
  return out;
}

CarlassoOut summarize(const PosteriorDraws& draws, double level, const FitMetadata& meta) {
  return summarize(std::vector<PosteriorDraws>{draws}, level, meta);
}

PosteriorDraws run_chain(const DesignMatrices& design, const Hyperparams& hyper, int chain_index,
                         ChainDiagnostics* diagnostics, const std::function<void(int, int)>& progress) {
  ChainState state = init_state(design, hyper);
  RngStream rng(hyper.seed, static_cast<std::uint64_t>(chain_index));
  const int total = hyper.n_burn_in + hyper.n_iter;
  const int n_save = hyper.n_iter / hyper.thin_by;
  PosteriorDraws draws(state.k_eff(), state.p(), hyper.adaptive, n_save);
  const int tick = std::max(1, total / 10);
  int done = 0;
  auto step = [&](bool adapt) {
    update_latent(state, design, rng, adapt);
    sweep(state, design, hyper, rng);
    ++done;
    if (progress && (done % tick == 0 || done == total)) progress(done, total);
  };
  for (int it = 0; it < hyper.n_burn_in; ++it) step(true);
  state.mh_proposals = 0;
  state.mh_accepted = 0;
  if (diagnostics) diagnostics->mh_step_after_burn_in = state.mh_step;
  int saved = 0;
  for (int it = 0; it < hyper.n_iter; ++it) {
    step(false);
    if ((it + 1) % hyper.thin_by == 0 && saved < n_save) draws.store(saved++, state);
  }
  if (diagnostics) {
    diagnostics->mh_acceptance = state.mh_proposals
                                     ? static_cast<double>(state.mh_accepted) / static_cast<double>(state.mh_proposals)
                                     : 0.0;
    diagnostics->final_state = state;
  }
  return draws;
}

FitResult fit(const FitRequest& request) {
  const auto t0 = std::chrono::steady_clock::now();
  request.validate();
  const FormulaSpec spec = parse_formula(request.formula);
  const DataTable table = request.table ? *request.table : read_csv(request.data_path);
  const BoundFormula bound = validate_against_table(spec, table);
  if (table.n_rows() < 2) {
    throw Error(ErrorKind::InvalidArgument, "at least 2 data rows are required, got " + std::to_string(table.n_rows()));
  }
  FitResult result;
  result.design = build_design(table, bound, request.hyper.link);
  const DesignMatrices& design = result.design;

  const int n_chains = request.chains;
  result.chains.resize(static_cast<std::size_t>(n_chains));
  result.diagnostics.resize(static_cast<std::size_t>(n_chains));
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::mutex progress_mutex;
  auto worker = [&] {
    for (int c = next++; c < n_chains; c = next++) {
      try {
        std::function<void(int, int)> cb;
        if (request.progress) {
          cb = [&, c](int done, int total) {
            std::lock_guard lock(progress_mutex);
            request.progress(c, done, total);
          };
        }
        result.chains[static_cast<std::size_t>(c)] =
            run_chain(design, request.hyper, c, &result.diagnostics[static_cast<std::size_t>(c)], cb);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const int n_threads = std::min(thread_budget(request.threads), n_chains);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  FitMetadata meta;
  meta.formula = render(spec);
  meta.link = request.hyper.link;
  meta.adaptive = request.hyper.adaptive;
  meta.seed = request.hyper.seed;
  meta.n_iter = request.hyper.n_iter;
  meta.n_burn_in = request.hyper.n_burn_in;
  meta.thin_by = request.hyper.thin_by;
  meta.chains = n_chains;
  meta.n = design.n();
  meta.r_beta = request.hyper.r_beta;
  meta.delta_beta = request.hyper.delta_beta;
  meta.r_omega = request.hyper.r_omega;
  meta.delta_omega = request.hyper.delta_omega;
  meta.response_labels = design.y_labels;
  meta.latent_labels.assign(design.y_labels.begin(),
                            design.y_labels.begin() + effective_k(design.link, design.k()));
  meta.predictor_labels = design.x_labels;
  result.out = summarize(result.chains, request.ci_level, meta);
  result.out.meta.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace carlasso
