#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "carlasso/chain_io.hpp"
#include "carlasso/error.hpp"
#include "carlasso/formula.hpp"
#include "carlasso/graph.hpp"
#include "carlasso/inference.hpp"
#include "carlasso/linalg.hpp"
#include "carlasso/links.hpp"
#include "carlasso/samplers.hpp"
#include "carlasso/simulate.hpp"

namespace py = pybind11;
using namespace carlasso;

namespace {

LinkCode link_of(const std::string& s) {
  auto l = parse_link(s);
  if (!l) throw Error(ErrorKind::InvalidArgument, "unknown link '" + s + "'");
  return *l;
}

// Columns from a mapping name -> sequence; strings make a categorical column.
DataTable table_from(const py::dict& columns) {
  std::vector<std::string> names;
  std::vector<DataTable::Column> cols;
  for (auto item : columns) {
    names.push_back(py::cast<std::string>(item.first));
    py::sequence seq = py::reinterpret_borrow<py::sequence>(
        py::isinstance<py::array>(item.second) ? item.second.attr("tolist")() : item.second);
    bool text = false;
    for (auto v : seq) text = text || py::isinstance<py::str>(v);
    if (text) {
      DataTable::CategoricalColumn c;
      for (auto v : seq) c.push_back(v.is_none() ? std::string() : py::cast<std::string>(py::str(v)));
      cols.emplace_back(std::move(c));
    } else {
      DataTable::NumericColumn c;
      for (auto v : seq) c.push_back(v.is_none() ? std::numeric_limits<double>::quiet_NaN() : py::cast<double>(v));
      cols.emplace_back(std::move(c));
    }
  }
  return DataTable(std::move(names), std::move(cols));
}

py::dict table_to_dict(const DataTable& t) {
  py::dict out;
  for (std::size_t c = 0; c < t.n_cols(); ++c) {
    std::visit([&](const auto& col) { out[py::str(t.column_names()[c])] = py::cast(col); }, t.column(c));
  }
  return out;
}

py::dict draws_dict(const PosteriorDraws& d) {
  py::dict out;
  auto put = [&](const char* name, const DrawBlock& b) {
    out[name] = py::make_tuple(b.labels, b.values);
  };
  put("omega", d.omega);
  put("b", d.b);
  put("mu", d.mu);
  put("lambda_beta", d.lambda_beta);
  put("lambda_omega", d.lambda_omega);
  return out;
}

// Single chain driven one sweep at a time.
class Sampler {
 public:
  Sampler(const std::string& formula, const py::dict& columns, const std::string& link, bool adaptive,
          std::uint64_t seed, bool bglasso)
      : rng_(seed, 0), bglasso_(bglasso) {
    hyper_.link = link_of(link);
    hyper_.adaptive = adaptive;
    const DataTable t = table_from(columns);
    design_ = build_design(t, validate_against_table(parse_formula(formula), t), hyper_.link);
    if (bglasso_) {
      if (hyper_.link != LinkCode::Identity) throw Error(ErrorKind::InvalidArgument, "bglasso needs the identity link");
      design_.x.resize(design_.n(), 0);
    }
    state_ = init_state(design_, hyper_);
  }

  void step(int sweeps, bool adapt) {
    py::gil_scoped_release nogil;
    for (int i = 0; i < sweeps; ++i) {
      update_latent(state_, design_, rng_, adapt);
      if (bglasso_) sweep_bglasso(state_, design_.y, hyper_, rng_);
      else sweep(state_, design_, hyper_, rng_);
    }
  }

  const ChainState& state() const { return state_; }
  std::string state_json() const { return state_to_json(state_, &rng_); }

 private:
  Hyperparams hyper_;
  DesignMatrices design_;
  ChainState state_;
  RngStream rng_;
  bool bglasso_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Chain graph LASSO samplers";

  static py::exception<Error> exc(m, "CarlassoError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(exc.ptr(), e.describe().c_str());
    }
  });

  m.def("parse_formula", [](const std::string& text) {
    const auto f = parse_formula(text);
    return py::make_tuple(f.responses, f.predictors);
  }, py::arg("text"), "Returns (responses, predictors).");

  m.def(
      "fit",
      [](const std::string& formula, const py::object& data, const std::string& link, bool adaptive, int n_iter,
         int burn_in, int thin, std::uint64_t seed, int chains, double ci_level, double r_beta, double delta_beta,
         double r_omega, double delta_omega, const std::string& out, bool force) {
        FitRequest req;
        req.formula = formula;
        if (py::isinstance<py::dict>(data)) req.table = table_from(data.cast<py::dict>());
        else req.data_path = py::str(data);
        req.hyper.link = link_of(link);
        req.hyper.adaptive = adaptive;
        req.hyper.n_iter = n_iter;
        req.hyper.n_burn_in = burn_in;
        req.hyper.thin_by = thin;
        req.hyper.seed = seed;
        req.hyper.r_beta = r_beta;
        req.hyper.delta_beta = delta_beta;
        req.hyper.r_omega = r_omega;
        req.hyper.delta_omega = delta_omega;
        req.chains = chains;
        req.ci_level = ci_level;
        FitResult res;
        {
          py::gil_scoped_release nogil;
          res = fit(req);
          if (!out.empty()) write_fit_output(out, res, force);
        }
        py::list draws;
        for (const auto& c : res.chains) draws.append(draws_dict(c));
        return py::make_tuple(summary_to_json(res.out), draws, res.out.meta.runtime_seconds);
      },
      py::arg("formula"), py::arg("data"), py::arg("link") = "identity", py::arg("adaptive") = false,
      py::arg("n_iter") = 5000, py::arg("burn_in") = 1000, py::arg("thin") = 10, py::arg("seed") = 42,
      py::arg("chains") = 1, py::arg("ci_level") = 0.90, py::arg("r_beta") = 1.0, py::arg("delta_beta") = 0.01,
      py::arg("r_omega") = 1.0, py::arg("delta_omega") = 0.01, py::arg("out") = "", py::arg("force") = false,
      "Runs the sampler. Returns (summary JSON, per-chain draws, runtime seconds).");

  m.def("load_summary", [](const std::string& fit_dir, std::optional<double> ci_level) {
    LoadedFit lf = read_fit_output(fit_dir);
    return summary_to_json(ci_level ? summarize(lf.chains, *ci_level, lf.summary.meta) : lf.summary);
  }, py::arg("fit_dir"), py::arg("ci_level") = py::none());

  m.def(
      "graph",
      [](const std::string& fit_dir, const std::string& format, double ci_level, std::optional<double> min_abs_weight,
         double alpha_frac) {
        LoadedFit lf = read_fit_output(fit_dir);
        GraphOptions opt;
        opt.min_abs_weight = min_abs_weight;
        opt.alpha_frac = alpha_frac;
        const ChainGraph g = build_graph(summarize(lf.chains, ci_level, lf.summary.meta), opt);
        const auto f = parse_graph_format(format);
        if (!f) throw Error(ErrorKind::InvalidArgument, "unknown graph format '" + format + "'");
        return *f == GraphFormat::Dot ? render_dot(g) : *f == GraphFormat::GraphML ? render_graphml(g) : render_json(g);
      },
      py::arg("fit_dir"), py::arg("format") = "json", py::arg("ci_level") = 0.90,
      py::arg("min_abs_weight") = py::none(), py::arg("alpha_frac") = 0.5);

  m.def(
      "simulate",
      [](int k, int p, int n, const std::string& link, std::uint64_t seed, double active_fraction,
         double omega_offdiag, int total) {
        SimulationConfig cfg{.k = k, .p = p, .n = n, .link = link_of(link), .seed = seed,
                             .active_fraction = active_fraction, .omega_offdiag = omega_offdiag, .total = total};
        const SimulatedData d = simulate(cfg);
        py::dict truth;
        truth["omega"] = d.omega;
        truth["b"] = d.b;
        truth["mu"] = d.mu;
        return py::make_tuple(table_to_dict(d.table), d.formula, truth);
      },
      py::arg("k") = 3, py::arg("p") = 2, py::arg("n") = 100, py::arg("link") = "identity", py::arg("seed") = 1,
      py::arg("active_fraction") = 0.5, py::arg("omega_offdiag") = 0.4, py::arg("total") = 200,
      "Returns (columns, formula, truth).");

  m.def("effective_sample_size", [](const std::vector<double>& v) { return effective_sample_size(v); });
  m.def("partial_correlations", &partial_correlations, py::arg("omega"));
  m.def("alpha_centrality", [](const Matrix& a, double alpha_frac) { return alpha_centrality(a, alpha_frac); },
        py::arg("adjacency"), py::arg("alpha_frac") = 0.5);

  py::class_<Sampler>(m, "Sampler", "One chain advanced sweep by sweep.")
      .def(py::init<const std::string&, const py::dict&, const std::string&, bool, std::uint64_t, bool>(),
           py::arg("formula"), py::arg("columns"), py::arg("link") = "identity", py::arg("adaptive") = false,
           py::arg("seed") = 42, py::arg("bglasso") = false)
      .def("step", &Sampler::step, py::arg("sweeps") = 1, py::arg("adapt") = false)
      .def_property_readonly("omega", [](const Sampler& s) { return s.state().omega; })
      .def_property_readonly("b", [](const Sampler& s) { return s.state().b; })
      .def_property_readonly("mu", [](const Sampler& s) { return s.state().mu; })
      .def_property_readonly("z", [](const Sampler& s) { return s.state().z; })
      .def_property_readonly("lambda_beta", [](const Sampler& s) { return s.state().lambda_beta; })
      .def_property_readonly("lambda_omega", [](const Sampler& s) { return s.state().lambda_omega; })
      .def("state_json", &Sampler::state_json);
}
