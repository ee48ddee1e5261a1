#include "carlasso/graph.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "carlasso/chain_io.hpp"
#include "carlasso/error.hpp"
#include "text_util.hpp"

namespace carlasso {

namespace {

using Json = nlohmann::ordered_json;

bool excludes_zero(double lower, double upper) { return lower > 0.0 || upper < 0.0; }

std::string_view sign_of(double w) { return w > 0.0 ? "positive" : (w < 0.0 ? "negative" : "zero"); }

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

double max_abs_included(const ChainGraph& g) {
  double m = 0.0;
  for (const auto& e : g.edges)
    if (e.included) m = std::max(m, std::fabs(e.weight));
  return m;
}

// Affine map of response sizes onto [0.5, 1.5]; predictors and equal sizes get 1.
std::vector<double> node_widths(const ChainGraph& g) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& n : g.nodes) {
    if (n.kind != NodeKind::Response) continue;
    lo = std::min(lo, n.size);
    hi = std::max(hi, n.size);
  }
  std::vector<double> w;
  for (const auto& n : g.nodes) {
    if (n.kind == NodeKind::Response && hi > lo) w.push_back(0.5 + (n.size - lo) / (hi - lo));
    else w.push_back(1.0);
  }
  return w;
}

}  // namespace

std::string_view to_string(NodeKind kind) { return kind == NodeKind::Response ? "response" : "predictor"; }
std::string_view to_string(EdgeKind kind) { return kind == EdgeKind::RespResp ? "resp_resp" : "pred_resp"; }

std::optional<GraphFormat> parse_graph_format(std::string_view text) {
  if (text == "dot") return GraphFormat::Dot;
  if (text == "graphml") return GraphFormat::GraphML;
  if (text == "json") return GraphFormat::Json;
  return std::nullopt;
}

std::size_t ChainGraph::included_edge_count() const {
  return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [](const auto& e) { return e.included; }));
}

Vector alpha_centrality(const Matrix& a, double alpha_frac, const Vector& e_in) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw Error(ErrorKind::DimensionMismatch, "adjacency must be square");
  if (!(alpha_frac > 0.0 && alpha_frac < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha_frac must lie in (0, 1)");
  if (n > 0 && (a.array() < 0.0).any()) throw Error(ErrorKind::DomainError, "adjacency must be nonnegative");
  const Vector e = e_in.size() == 0 ? Vector::Ones(n) : e_in;
  if (e.size() != n) throw Error(ErrorKind::DimensionMismatch, "exogenous vector length must match the adjacency");
  if (n > 0 && !(e.array() > 0.0).all()) throw Error(ErrorKind::DomainError, "exogenous vector must be positive");
  if (n == 0) return e;
  const double rho = Eigen::EigenSolver<Matrix>(a, false).eigenvalues().cwiseAbs().maxCoeff();
  if (!(rho > 0.0)) return e;
  const Matrix m = Matrix::Identity(n, n) - (alpha_frac / rho) * a.transpose();
  Eigen::FullPivLU<Matrix> lu(m);
  if (!lu.isInvertible()) throw Error(ErrorKind::SingularSystem, "centrality system is singular");
  return lu.solve(e);
}

ChainGraph build_graph(const CarlassoOut& out, const GraphOptions& options) {
  const auto& responses = out.meta.response_labels;
  const auto& latent = out.meta.latent_labels;
  const auto& predictors = out.meta.predictor_labels;
  const auto k = static_cast<Eigen::Index>(latent.size());
  if (out.partial_correlation.mean.rows() != k || out.b.mean.cols() != k ||
      out.b.mean.rows() != static_cast<Eigen::Index>(predictors.size())) {
    throw Error(ErrorKind::DimensionMismatch, "summary shapes do not match its labels");
  }
  auto keep = [&](double mean, double lower, double upper) {
    if (mean == 0.0) return false;
    if (options.min_abs_weight) return std::fabs(mean) >= *options.min_abs_weight;
    return excludes_zero(lower, upper);
  };

  ChainGraph g;
  Matrix adj = Matrix::Zero(static_cast<Eigen::Index>(responses.size()), static_cast<Eigen::Index>(responses.size()));
  for (Eigen::Index j = 1; j < k; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const double w = out.partial_correlation.mean(i, j);
      const bool inc = keep(w, out.partial_correlation.lower(i, j), out.partial_correlation.upper(i, j));
      g.edges.push_back({latent[static_cast<std::size_t>(i)], latent[static_cast<std::size_t>(j)], EdgeKind::RespResp, w, inc});
      if (inc) adj(i, j) = adj(j, i) = std::fabs(w);
    }
  }
  for (Eigen::Index l = 0; l < k; ++l) {
    for (Eigen::Index j = 0; j < out.b.mean.rows(); ++j) {
      const double w = out.b.mean(j, l);
      g.edges.push_back({predictors[static_cast<std::size_t>(j)], latent[static_cast<std::size_t>(l)],
                         EdgeKind::PredResp, w, keep(w, out.b.lower(j, l), out.b.upper(j, l))});
    }
  }
  const Vector size = alpha_centrality(adj, options.alpha_frac);
  for (std::size_t i = 0; i < responses.size(); ++i) {
    g.nodes.push_back({responses[i], NodeKind::Response, size(static_cast<Eigen::Index>(i))});
  }
  for (const auto& p : predictors) g.nodes.push_back({p, NodeKind::Predictor, 1.0});
  return g;
}

std::string render_dot(const ChainGraph& g) {
  const auto widths = node_widths(g);
  const double wmax = max_abs_included(g);
  std::string s = "digraph carlasso {\n  node [fontname=\"Helvetica\", fixedsize=true];\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    s += "  " + dot_quote(n.name) + " [shape=" + (n.kind == NodeKind::Response ? "circle" : "triangle") +
         ", width=" + detail::format_double(widths[i]) + ", kind=\"" + std::string(to_string(n.kind)) +
         "\", size=" + detail::format_double(n.size) + "];\n";
  }
  for (const auto& e : g.edges) {
    if (!e.included) continue;
    const double pen = 1.0 + 4.0 * std::fabs(e.weight) / wmax;
    s += "  " + dot_quote(e.from) + " -> " + dot_quote(e.to) + " [color=\"" +
         (e.weight > 0.0 ? "#D62728" : "#1F77B4") + "\", penwidth=" + detail::format_double(pen) +
         (e.kind == EdgeKind::RespResp ? ", dir=none" : "") + ", kind=\"" + std::string(to_string(e.kind)) +
         "\", effect=" + detail::format_double(e.weight) + ", sign=\"" + std::string(sign_of(e.weight)) + "\"];\n";
  }
  return s + "}\n";
}

std::string render_graphml(const ChainGraph& g) {
  std::string s =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      "  <key id=\"nkind\" for=\"node\" attr.name=\"kind\" attr.type=\"string\"/>\n"
      "  <key id=\"nsize\" for=\"node\" attr.name=\"size\" attr.type=\"double\"/>\n"
      "  <key id=\"nshape\" for=\"node\" attr.name=\"shape\" attr.type=\"string\"/>\n"
      "  <key id=\"ekind\" for=\"edge\" attr.name=\"kind\" attr.type=\"string\"/>\n"
      "  <key id=\"eweight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
      "  <key id=\"esign\" for=\"edge\" attr.name=\"sign\" attr.type=\"string\"/>\n"
      "  <key id=\"ecolor\" for=\"edge\" attr.name=\"color\" attr.type=\"string\"/>\n"
      "  <graph id=\"carlasso\" edgedefault=\"undirected\">\n";
  for (const auto& n : g.nodes) {
    s += "    <node id=\"" + xml_escape(n.name) + "\">\n";
    s += "      <data key=\"nkind\">" + std::string(to_string(n.kind)) + "</data>\n";
    s += "      <data key=\"nsize\">" + detail::format_double(n.size) + "</data>\n";
    s += std::string("      <data key=\"nshape\">") + (n.kind == NodeKind::Response ? "circle" : "triangle") +
         "</data>\n    </node>\n";
  }
  for (const auto& e : g.edges) {
    if (!e.included) continue;
    s += "    <edge source=\"" + xml_escape(e.from) + "\" target=\"" + xml_escape(e.to) + "\" directed=\"" +
         (e.kind == EdgeKind::PredResp ? "true" : "false") + "\">\n";
    s += "      <data key=\"ekind\">" + std::string(to_string(e.kind)) + "</data>\n";
    s += "      <data key=\"eweight\">" + detail::format_double(e.weight) + "</data>\n";
    s += "      <data key=\"esign\">" + std::string(sign_of(e.weight)) + "</data>\n";
    s += std::string("      <data key=\"ecolor\">") + (e.weight > 0.0 ? "#D62728" : "#1F77B4") +
         "</data>\n    </edge>\n";
  }
  return s + "  </graph>\n</graphml>\n";
}

std::string render_json(const ChainGraph& g) {
  Json nodes = Json::array(), edges = Json::array();
  for (const auto& n : g.nodes) {
    nodes.push_back({{"name", n.name},
                     {"kind", to_string(n.kind)},
                     {"shape", n.kind == NodeKind::Response ? "circle" : "triangle"},
                     {"size", n.size}});
  }
  for (const auto& e : g.edges) {
    edges.push_back({{"from", e.from},
                     {"to", e.to},
                     {"kind", to_string(e.kind)},
                     {"weight", e.weight},
                     {"sign", sign_of(e.weight)},
                     {"included", e.included}});
  }
  return Json{{"nodes", nodes}, {"edges", edges}}.dump(2) + "\n";
}

ChainGraph parse_graph_json(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    ChainGraph g;
    for (const auto& n : j.at("nodes")) {
      const auto kind = n.at("kind").get<std::string>();
      if (kind != "response" && kind != "predictor") throw Error(ErrorKind::InvalidArgument, "unknown node kind '" + kind + "'");
      g.nodes.push_back({n.at("name").get<std::string>(), kind == "response" ? NodeKind::Response : NodeKind::Predictor,
                         n.at("size").get<double>()});
    }
    for (const auto& e : j.at("edges")) {
      const auto kind = e.at("kind").get<std::string>();
      if (kind != "resp_resp" && kind != "pred_resp") throw Error(ErrorKind::InvalidArgument, "unknown edge kind '" + kind + "'");
      g.edges.push_back({e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                         kind == "resp_resp" ? EdgeKind::RespResp : EdgeKind::PredResp, e.at("weight").get<double>(),
                         e.at("included").get<bool>()});
    }
    return g;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed graph JSON: ") + ex.what());
  }
}

void export_graph(const ChainGraph& graph, GraphFormat format, const std::string& path) {
  switch (format) {
    case GraphFormat::Dot: write_text_file(path, render_dot(graph)); return;
    case GraphFormat::GraphML: write_text_file(path, render_graphml(graph)); return;
    case GraphFormat::Json: write_text_file(path, render_json(graph)); return;
  }
}

}  // namespace carlasso
