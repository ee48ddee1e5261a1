// Command-line front end: fit, summary, graph, simulate.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "carlasso/chain_io.hpp"
#include "carlasso/error.hpp"
#include "carlasso/graph.hpp"
#include "carlasso/inference.hpp"
#include "carlasso/simulate.hpp"

namespace fs = std::filesystem;
using namespace carlasso;

namespace {

// Raised for bad flag values found after CLI11 parsing; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kLinks{"identity", "probit", "log", "logit"};
const std::vector<std::string> kFormats{"dot", "graphml", "json"};

const CLI::Validator kOpenUnit(
    [](std::string& v) -> std::string {
      double x = 0.0;
      if (!CLI::detail::lexical_cast(v, x) || !(x > 0.0 && x < 1.0)) return "value must lie strictly between 0 and 1";
      return {};
    },
    "(0, 1)");

struct FitArgs {
  std::string formula, data, out;
  std::string link = "identity";
  bool adaptive = false, force = false, quiet = false;
  Hyperparams hyper;
  double ci_level = 0.90;
  int chains = 1;
};

struct SummaryArgs {
  std::string fit;
  std::optional<double> ci_level;
  bool json = false;
};

struct GraphArgs {
  std::string fit, out;
  std::string format = "dot";
  double ci_level = 0.90;
  std::optional<double> min_abs_weight;
  double alpha_frac = 0.5;
};

struct SimulateArgs {
  SimulationConfig cfg;
  std::string link = "identity";
  std::string out, truth;
};

int cmd_fit(const FitArgs& a) {
  FitRequest req;
  req.formula = a.formula;
  req.data_path = a.data;
  req.hyper = a.hyper;
  req.hyper.link = *parse_link(a.link);
  req.hyper.adaptive = a.adaptive;
  req.ci_level = a.ci_level;
  req.chains = a.chains;
  try {
    req.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) throw UsageError(e.what());
    throw;
  }
  if (!a.quiet) {
    req.progress = [](int chain, int done, int total) {
      std::fprintf(stderr, "fit: chain %d %3d%% (%d/%d sweeps)\n", chain + 1,
                   static_cast<int>(100LL * done / total), done, total);
    };
  }
  const FitResult res = fit(req);
  write_fit_output(a.out, res, a.force);
  if (!a.quiet) {
    std::fprintf(stderr, "fit: %d stored draws written to %s\n", res.out.draw_count, a.out.c_str());
  }
  return 0;
}

void print_matrix(const std::string& title, const Matrix& m, const std::vector<std::string>& rows,
                  const std::vector<std::string>& cols) {
  std::printf("%s\n%-18s", title.c_str(), "");
  for (const auto& c : cols) std::printf(" %12.12s", c.c_str());
  std::printf("\n");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::printf("%-18.18s", rows[static_cast<std::size_t>(i)].c_str());
    for (Eigen::Index j = 0; j < m.cols(); ++j) std::printf(" %12.5g", m(i, j));
    std::printf("\n");
  }
  std::printf("\n");
}

int cmd_summary(const SummaryArgs& a) {
  LoadedFit lf = read_fit_output(a.fit);
  CarlassoOut out = a.ci_level ? summarize(lf.chains, *a.ci_level, lf.summary.meta) : lf.summary;
  if (a.json) {
    std::cout << summary_to_json(out);
    return 0;
  }
  const auto& m = out.meta;
  std::printf("formula: %s\nlink: %s  adaptive: %s  draws: %d  chains: %d  ci_level: %g\n\n", m.formula.c_str(),
              std::string(to_string(m.link)).c_str(), m.adaptive ? "true" : "false", out.draw_count, m.chains,
              out.ci_level);
  print_matrix("Omega (posterior mean)", out.omega.mean, m.latent_labels, m.latent_labels);
  print_matrix("B (posterior mean)", out.b.mean, m.predictor_labels, m.latent_labels);
  print_matrix("partial correlation (posterior mean)", out.partial_correlation.mean, m.latent_labels, m.latent_labels);
  return 0;
}

int cmd_graph(const GraphArgs& a) {
  LoadedFit lf = read_fit_output(a.fit);
  const CarlassoOut out = summarize(lf.chains, a.ci_level, lf.summary.meta);
  GraphOptions opt;
  opt.min_abs_weight = a.min_abs_weight;
  opt.alpha_frac = a.alpha_frac;
  const ChainGraph g = build_graph(out, opt);
  export_graph(g, *parse_graph_format(a.format), a.out);
  std::size_t n_resp = 0, inc_rr = 0, inc_pr = 0;
  for (const auto& n : g.nodes) n_resp += n.kind == NodeKind::Response;
  for (const auto& e : g.edges) {
    if (!e.included) continue;
    (e.kind == EdgeKind::RespResp ? inc_rr : inc_pr) += 1;
  }
  std::printf("nodes: %zu (%zu response, %zu predictor)\nedges: %zu included of %zu (%zu resp_resp, %zu pred_resp)\n",
              g.nodes.size(), n_resp, g.nodes.size() - n_resp, inc_rr + inc_pr, g.edges.size(), inc_rr, inc_pr);
  return 0;
}

int cmd_simulate(SimulateArgs a) {
  a.cfg.link = *parse_link(a.link);
  try {
    a.cfg.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const SimulatedData d = simulate(a.cfg);
  std::string truth = a.truth;
  if (truth.empty()) truth = (fs::path(a.out).replace_extension("").string()) + ".truth.json";
  // Stage both files, then move them into place together.
  const std::string tmp_csv = a.out + ".partial", tmp_truth = truth + ".partial";
  try {
    write_csv(d.table, tmp_csv);
    write_text_file(tmp_truth, truth_to_json(a.cfg, d));
    fs::rename(tmp_csv, a.out);
    fs::rename(tmp_truth, truth);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp_csv, ec);
    fs::remove(tmp_truth, ec);
    throw;
  }
  std::printf("wrote %s (%d rows) and %s\nformula: %s\n", a.out.c_str(), a.cfg.n, truth.c_str(), d.formula.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian chain graph LASSO samplers"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  FitArgs fa;
  auto* fit_cmd = app.add_subcommand("fit", "Run the sampler and write chain files plus summary.json");
  fit_cmd->add_option("--formula", fa.formula, "Model formula, e.g. \"y1 + y2 ~ x1 + x2\"")->required();
  fit_cmd->add_option("--data", fa.data, "CSV file with a header row")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--out", fa.out, "Output directory")->required();
  fit_cmd->add_option("--link", fa.link, "Response link")->check(CLI::IsMember(kLinks));
  fit_cmd->add_flag("--adaptive", fa.adaptive, "Per-edge shrinkage rates (default: off)");
  fit_cmd->add_option("--n-iter", fa.hyper.n_iter, "Sweeps after burn-in")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--burn-in", fa.hyper.n_burn_in, "Burn-in sweeps")->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--thin", fa.hyper.thin_by, "Store every thin-th sweep")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--seed", fa.hyper.seed, "Random seed");
  fit_cmd->add_option("--r-beta", fa.hyper.r_beta, "Gamma shape of the B shrinkage rate")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--delta-beta", fa.hyper.delta_beta, "Gamma rate of the B shrinkage rate")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--r-omega", fa.hyper.r_omega, "Gamma shape of the Omega shrinkage rate")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--delta-omega", fa.hyper.delta_omega, "Gamma rate of the Omega shrinkage rate")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--ci-level", fa.ci_level, "Credible interval level")->check(kOpenUnit);
  fit_cmd->add_option("--chains", fa.chains, "Independent chains (threads capped by CARLASSO_THREADS)")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_flag("--force", fa.force, "Replace an existing output directory (default: off)");
  fit_cmd->add_flag("--quiet", fa.quiet, "No progress output (default: off)");

  SummaryArgs sa;
  auto* summary_cmd = app.add_subcommand("summary", "Print posterior summaries of a fit");
  summary_cmd->add_option("--fit", sa.fit, "Fit output directory")->required();
  summary_cmd->add_option("--ci-level", sa.ci_level, "Recompute intervals at this level (default: as fitted)")
      ->check(kOpenUnit);
  summary_cmd->add_flag("--json", sa.json, "Print the summary JSON document (default: off)");

  GraphArgs ga;
  auto* graph_cmd = app.add_subcommand("graph", "Export the chain graph of a fit");
  graph_cmd->add_option("--fit", ga.fit, "Fit output directory")->required();
  graph_cmd->add_option("--out", ga.out, "Output file")->required();
  graph_cmd->add_option("--format", ga.format, "Export format")->check(CLI::IsMember(kFormats));
  graph_cmd->add_option("--ci-level", ga.ci_level, "Edge kept when its interval excludes 0")->check(kOpenUnit);
  graph_cmd->add_option("--min-abs-weight", ga.min_abs_weight, "Keep edges by |posterior mean| instead (default: off)")
      ->check(CLI::NonNegativeNumber);
  graph_cmd->add_option("--alpha-frac", ga.alpha_frac, "Centrality damping as a fraction of 1/spectral radius")
      ->check(kOpenUnit);

  SimulateArgs ma;
  auto* sim_cmd = app.add_subcommand("simulate", "Write synthetic data and its ground truth");
  sim_cmd->add_option("--k", ma.cfg.k, "Responses (logit: including the reference)");
  sim_cmd->add_option("--p", ma.cfg.p, "Predictors");
  sim_cmd->add_option("--n", ma.cfg.n, "Rows");
  sim_cmd->add_option("--link", ma.link, "Response link")->check(CLI::IsMember(kLinks));
  sim_cmd->add_option("--seed", ma.cfg.seed, "Random seed");
  sim_cmd->add_option("--active-fraction", ma.cfg.active_fraction, "Fraction of nonzero (+-1) B entries");
  sim_cmd->add_option("--omega-offdiag", ma.cfg.omega_offdiag, "Off-diagonal of the tridiagonal precision");
  sim_cmd->add_option("--total", ma.cfg.total, "Multinomial row total (logit)");
  sim_cmd->add_option("--out", ma.out, "Data CSV path")->required();
  sim_cmd->add_option("--truth", ma.truth, "Ground-truth JSON path (default: <out>.truth.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(fa);
    if (summary_cmd->parsed()) return cmd_summary(sa);
    if (graph_cmd->parsed()) return cmd_graph(ga);
    if (sim_cmd->parsed()) return cmd_simulate(ma);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\nRun with --help for usage.\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.describe().c_str());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
