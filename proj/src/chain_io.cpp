#include "carlasso/chain_io.hpp"

#include <unistd.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "carlasso/error.hpp"
#include "carlasso/ingest.hpp"
#include "text_util.hpp"

namespace carlasso {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <class D>
auto& block_of(D& d, std::string_view name) {
  if (name == "omega") return d.omega;
  if (name == "b") return d.b;
  if (name == "mu") return d.mu;
  if (name == "lambda_beta") return d.lambda_beta;
  return d.lambda_omega;
}

Json matrix_json(const Matrix& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.size(); ++i) data.push_back(m.data()[i]);
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from(const Json& j) {
  Matrix m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != m.size()) {
    throw Error(ErrorKind::DimensionMismatch, "matrix data length does not match its shape");
  }
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = data[static_cast<std::size_t>(i)].get<double>();
  return m;
}

Json labelled(const Matrix& m, const std::vector<std::string>& rows, const std::vector<std::string>& cols) {
  Json values = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    values.push_back(std::move(row));
  }
  return Json{{"rows", rows}, {"cols", cols}, {"values", std::move(values)}};
}

Matrix unlabelled(const Json& j) {
  const auto& values = j.at("values");
  const auto rows = static_cast<Eigen::Index>(j.at("rows").size());
  const auto cols = static_cast<Eigen::Index>(j.at("cols").size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(i, c) = values.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(c)).get<double>();
  return m;
}

Json metadata_json(const FitMetadata& m) {
  return Json{
      {"formula", m.formula},
      {"link", std::string(to_string(m.link))},
      {"adaptive", m.adaptive},
      {"seed", m.seed},
      {"n_iter", m.n_iter},
      {"n_burn_in", m.n_burn_in},
      {"thin_by", m.thin_by},
      {"n_iter_semantics", "n_iter sweeps after burn-in; every thin_by-th state stored"},
      {"chains", m.chains},
      {"n", m.n},
      {"hyperparameters",
       {{"r_beta", m.r_beta}, {"delta_beta", m.delta_beta}, {"r_omega", m.r_omega}, {"delta_omega", m.delta_omega}}},
      {"response_labels", m.response_labels},
      {"latent_labels", m.latent_labels},
      {"predictor_labels", m.predictor_labels},
  };
}

FitMetadata metadata_from(const Json& j) {
  FitMetadata m;
  m.formula = j.at("formula").get<std::string>();
  const auto link = parse_link(j.at("link").get<std::string>());
  if (!link) throw Error(ErrorKind::CorruptChain, "unknown link '" + j.at("link").get<std::string>() + "'");
  m.link = *link;
  m.adaptive = j.at("adaptive").get<bool>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.n_iter = j.at("n_iter").get<int>();
  m.n_burn_in = j.at("n_burn_in").get<int>();
  m.thin_by = j.at("thin_by").get<int>();
  m.chains = j.at("chains").get<int>();
  m.n = j.at("n").get<int>();
  const auto& h = j.at("hyperparameters");
  m.r_beta = h.at("r_beta").get<double>();
  m.delta_beta = h.at("delta_beta").get<double>();
  m.r_omega = h.at("r_omega").get<double>();
  m.delta_omega = h.at("delta_omega").get<double>();
  m.response_labels = j.at("response_labels").get<std::vector<std::string>>();
  m.latent_labels = j.at("latent_labels").get<std::vector<std::string>>();
  m.predictor_labels = j.at("predictor_labels").get<std::vector<std::string>>();
  return m;
}

template <class F>
auto guarded_json(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::CorruptChain, what + ": " + e.what());
  }
}

}  // namespace

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open file").in_file(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open file for writing").in_file(path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed").in_file(path.string());
}

void write_draws(const fs::path& dir, const PosteriorDraws& draws, const FitMetadata& meta, int chain_index) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create directory: " + ec.message()).in_file(dir.string());
  Json files = Json::object();
  for (const char* name : kDrawBlocks) {
    const DrawBlock& blk = block_of(draws, name);
    std::string text = "draw";
    for (const auto& l : blk.labels) text += "," + csv_field(l);
    text += '\n';
    for (Eigen::Index r = 0; r < blk.values.rows(); ++r) {
      text += std::to_string(r + 1);
      for (Eigen::Index c = 0; c < blk.values.cols(); ++c) {
        text += ',';
        text += detail::format_double(blk.values(r, c));
      }
      text += '\n';
    }
    const std::string file = std::string(name) + ".csv";
    write_text_file(dir / file, text);
    files[name] = file;
  }
  Json j{{"chain", chain_index + 1},
         {"stream_id", chain_index},
         {"k_eff", draws.k_eff},
         {"p", draws.p},
         {"adaptive", draws.adaptive},
         {"draw_count", draws.draw_count()},
         {"files", files},
         {"fit", metadata_json(meta)}};
  write_text_file(dir / "meta.json", j.dump(2) + "\n");
}

PosteriorDraws read_draws(const fs::path& dir) {
  const fs::path meta_path = dir / "meta.json";
  if (!fs::exists(meta_path)) throw Error(ErrorKind::CorruptChain, "missing chain metadata").in_file(meta_path.string());
  const Json meta = guarded_json("chain metadata " + meta_path.string(), [&] {
    return Json::parse(read_text_file(meta_path));
  });
  int k_eff = 0, p = 0, n_draws = 0;
  bool adaptive = false;
  guarded_json("chain metadata " + meta_path.string(), [&] {
    k_eff = meta.at("k_eff").get<int>();
    p = meta.at("p").get<int>();
    adaptive = meta.at("adaptive").get<bool>();
    n_draws = meta.at("draw_count").get<int>();
    return 0;
  });
  if (k_eff < 1 || p < 0 || n_draws < 0) {
    throw Error(ErrorKind::CorruptChain, "invalid dimensions in chain metadata").in_file(meta_path.string());
  }
  PosteriorDraws d(k_eff, p, adaptive, n_draws);
  for (const char* name : kDrawBlocks) {
    const fs::path path = dir / (std::string(name) + ".csv");
    auto corrupt = [&](const std::string& msg) {
      return Error(ErrorKind::CorruptChain, msg).in_file(path.string());
    };
    if (!fs::exists(path)) throw corrupt("missing draw file");
    DataTable t;
    try {
      t = parse_csv(read_text_file(path));
    } catch (const Error& e) {
      throw corrupt(std::string(e.what()));
    }
    DrawBlock& blk = block_of(d, name);
    const auto& names = t.column_names();
    if (names.size() != blk.labels.size() + 1 || names[0] != "draw" ||
        !std::equal(blk.labels.begin(), blk.labels.end(), names.begin() + 1)) {
      throw corrupt("header does not match the chain metadata");
    }
    if (t.n_rows() != static_cast<std::size_t>(n_draws)) {
      throw corrupt("expected " + std::to_string(n_draws) + " draws, found " + std::to_string(t.n_rows()));
    }
    for (std::size_t c = 0; c < names.size(); ++c) {
      if (!t.is_numeric(c)) throw corrupt("non-numeric value in column '" + names[c] + "'");
      const auto& col = std::get<DataTable::NumericColumn>(t.column(c));
      for (std::size_t r = 0; r < col.size(); ++r) {
        if (!std::isfinite(col[r])) {
          throw corrupt("missing or non-finite value in column '" + names[c] + "', draw row " + std::to_string(r + 1));
        }
        if (c == 0) {
          if (col[r] != static_cast<double>(r + 1)) throw corrupt("draw index out of sequence");
        } else {
          blk.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 1)) = col[r];
        }
      }
    }
  }
  return d;
}

std::string metadata_to_json(const FitMetadata& meta) { return metadata_json(meta).dump(2); }

FitMetadata metadata_from_json(const std::string& text) {
  return guarded_json("fit metadata", [&] { return metadata_from(Json::parse(text)); });
}

std::string summary_to_json(const CarlassoOut& out) {
  const auto& lat = out.meta.latent_labels;
  const auto& pred = out.meta.predictor_labels;
  const std::vector<std::string> one{"value"};
  std::vector<std::string> lb_rows = pred, lb_cols = lat, lo_rows = lat, lo_cols = lat;
  if (!out.meta.adaptive) {
    lb_rows = lb_cols = lo_rows = lo_cols = {"lambda"};
  }
  Json j;
  Json meta = metadata_json(out.meta);
  meta["ci_level"] = out.ci_level;
  meta["draw_count"] = out.draw_count;
  meta["edge_selection"] = "edge included when the equal-tailed credible interval excludes 0";
  j["metadata"] = meta;
  auto put = [&](const std::string& name, const EntrySummary& e, const std::vector<std::string>& rows,
                 const std::vector<std::string>& cols) {
    j[name + "_mean"] = labelled(e.mean, rows, cols);
    j[name + "_ci"] = Json{{"level", out.ci_level},
                           {"lower", labelled(e.lower, rows, cols)},
                           {"upper", labelled(e.upper, rows, cols)}};
    j[name + "_ess"] = labelled(e.ess, rows, cols);
  };
  put("omega", out.omega, lat, lat);
  put("b", out.b, pred, lat);
  put("mu", out.mu, lat, one);
  put("partial_correlation", out.partial_correlation, lat, lat);
  put("lambda_beta", out.lambda_beta, lb_rows, lb_cols);
  put("lambda_omega", out.lambda_omega, lo_rows, lo_cols);
  return j.dump(2) + "\n";
}

CarlassoOut summary_from_json(const std::string& text) {
  return guarded_json("summary", [&] {
    const Json j = Json::parse(text);
    CarlassoOut out;
    const Json& meta = j.at("metadata");
    out.meta = metadata_from(meta);
    out.ci_level = meta.at("ci_level").get<double>();
    out.draw_count = meta.at("draw_count").get<int>();
    auto get = [&](const std::string& name) {
      EntrySummary e;
      e.mean = unlabelled(j.at(name + "_mean"));
      e.lower = unlabelled(j.at(name + "_ci").at("lower"));
      e.upper = unlabelled(j.at(name + "_ci").at("upper"));
      e.ess = unlabelled(j.at(name + "_ess"));
      return e;
    };
    out.omega = get("omega");
    out.b = get("b");
    out.mu = get("mu");
    out.partial_correlation = get("partial_correlation");
    out.lambda_beta = get("lambda_beta");
    out.lambda_omega = get("lambda_omega");
    return out;
  });
}

std::string state_to_json(const ChainState& s, const RngStream* rng) {
  Json j{{"adaptive", s.adaptive},
         {"omega", matrix_json(s.omega)},
         {"b", matrix_json(s.b)},
         {"mu", matrix_json(s.mu)},
         {"z", matrix_json(s.z)},
         {"tau2_b", matrix_json(s.tau2_b)},
         {"tau2_omega", matrix_json(s.tau2_omega)},
         {"lambda_beta", matrix_json(s.lambda_beta)},
         {"lambda_omega", matrix_json(s.lambda_omega)},
         {"mh_step", matrix_json(s.mh_step)},
         {"mh_accepts", matrix_json(s.mh_accepts)},
         {"mh_batch_sweeps", s.mh_batch_sweeps},
         {"mh_batches", s.mh_batches},
         {"mh_proposals", s.mh_proposals},
         {"mh_accepted", s.mh_accepted}};
  if (rng) j["rng"] = rng->serialize();
  return j.dump();
}

ChainState state_from_json(const std::string& text, std::optional<RngStream>* rng) {
  return guarded_json("chain state", [&] {
    const Json j = Json::parse(text);
    ChainState s;
    s.adaptive = j.at("adaptive").get<bool>();
    s.omega = matrix_from(j.at("omega"));
    s.b = matrix_from(j.at("b"));
    s.mu = matrix_from(j.at("mu"));
    s.z = matrix_from(j.at("z"));
    s.tau2_b = matrix_from(j.at("tau2_b"));
    s.tau2_omega = matrix_from(j.at("tau2_omega"));
    s.lambda_beta = matrix_from(j.at("lambda_beta"));
    s.lambda_omega = matrix_from(j.at("lambda_omega"));
    s.mh_step = matrix_from(j.at("mh_step"));
    s.mh_accepts = matrix_from(j.at("mh_accepts"));
    s.mh_batch_sweeps = j.at("mh_batch_sweeps").get<int>();
    s.mh_batches = j.at("mh_batches").get<int>();
    s.mh_proposals = j.at("mh_proposals").get<long long>();
    s.mh_accepted = j.at("mh_accepted").get<long long>();
    if (rng) {
      if (j.contains("rng")) *rng = RngStream::deserialize(j.at("rng").get<std::string>());
      else rng->reset();
    }
    return s;
  });
}

void write_fit_output(const fs::path& out_dir, const FitResult& result, bool force) {
  std::error_code ec;
  const fs::path target = out_dir.has_filename() ? out_dir : out_dir.parent_path();
  if (fs::exists(target) && !(fs::is_directory(target) && fs::is_empty(target)) && !force) {
    throw Error(ErrorKind::IoError, "output directory exists and is not empty (use --force to replace it)")
        .in_file(target.string());
  }
  const fs::path parent = target.has_parent_path() ? target.parent_path() : fs::path(".");
  fs::create_directories(parent, ec);
  const fs::path stage = parent / ("." + target.filename().string() + ".partial-" + std::to_string(::getpid()));
  fs::remove_all(stage, ec);
  try {
    fs::create_directories(stage);
    write_text_file(stage / "summary.json", summary_to_json(result.out));
    Json timing{{"runtime_seconds", result.out.meta.runtime_seconds}};
    write_text_file(stage / "timing.json", timing.dump(2) + "\n");
    for (std::size_t c = 0; c < result.chains.size(); ++c) {
      write_draws(stage / ("chain_" + std::to_string(c + 1)), result.chains[c], result.out.meta, static_cast<int>(c));
    }
    if (fs::exists(target)) fs::remove_all(target);
    fs::rename(stage, target);
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(stage, ec);
    throw Error(ErrorKind::IoError, e.what()).in_file(target.string());
  } catch (...) {
    fs::remove_all(stage, ec);
    throw;
  }
}

LoadedFit read_fit_output(const fs::path& out_dir) {
  const fs::path summary_path = out_dir / "summary.json";
  if (!fs::exists(summary_path)) {
    throw Error(ErrorKind::CorruptChain, "fit directory has no summary").in_file(summary_path.string());
  }
  LoadedFit fit;
  try {
    fit.summary = summary_from_json(read_text_file(summary_path));
  } catch (const Error& e) {
    throw Error(ErrorKind::CorruptChain, e.what()).in_file(summary_path.string());
  }
  for (int c = 0; c < fit.summary.meta.chains; ++c) {
    const fs::path dir = out_dir / ("chain_" + std::to_string(c + 1));
    fit.chains.push_back(read_draws(dir));
    const auto& d = fit.chains.back();
    if (d.k_eff != static_cast<int>(fit.summary.meta.latent_labels.size()) ||
        d.p != static_cast<int>(fit.summary.meta.predictor_labels.size()) || d.adaptive != fit.summary.meta.adaptive) {
      throw Error(ErrorKind::CorruptChain, "chain shape does not match the summary").in_file((dir / "meta.json").string());
    }
  }
  return fit;
}

}  // namespace carlasso
