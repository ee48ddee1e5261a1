#pragma once

#include <optional>
#include <string>
#include <vector>

#include "carlasso/model.hpp"

namespace carlasso {

enum class NodeKind { Response, Predictor };
enum class EdgeKind { RespResp, PredResp };
enum class GraphFormat { Dot, GraphML, Json };

std::string_view to_string(NodeKind kind);
std::string_view to_string(EdgeKind kind);
std::optional<GraphFormat> parse_graph_format(std::string_view text);

struct GraphNode {
  std::string name;
  NodeKind kind = NodeKind::Response;
  double size = 1.0;
  bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
  std::string from;
  std::string to;
  EdgeKind kind = EdgeKind::RespResp;
  double weight = 0.0;
  bool included = false;
  bool operator==(const GraphEdge&) const = default;
};

/// Responses (circles) first in data order, then expanded predictors
/// (triangles). Every candidate edge is listed; `included` marks the ones
/// that survive selection.
struct ChainGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  bool operator==(const ChainGraph&) const = default;

  std::size_t included_edge_count() const;
};

struct GraphOptions {
  /// Select edges by |posterior mean| >= threshold instead of the CI rule.
  std::optional<double> min_abs_weight;
  double alpha_frac = 0.5;
};

/// resp_resp weights are posterior-mean partial correlations, pred_resp
/// weights posterior-mean B entries. An edge is included when its
/// equal-tailed interval (at out.ci_level) excludes 0, or by threshold when
/// options.min_abs_weight is set; a zero weight is never included. Response
/// sizes are alpha-centralities on the absolute included resp_resp weights.
/// Under the logit link the reference response is an isolated node.
ChainGraph build_graph(const CarlassoOut& out, const GraphOptions& options = {});

/// x = (I - a A^T)^{-1} e with a = alpha_frac / rho(A) (a = 0 when rho(A) = 0).
/// An empty `e` means all ones.
Vector alpha_centrality(const Matrix& adjacency, double alpha_frac = 0.5, const Vector& e = Vector());

std::string render_dot(const ChainGraph& graph);
std::string render_graphml(const ChainGraph& graph);
std::string render_json(const ChainGraph& graph);
ChainGraph parse_graph_json(const std::string& text);

void export_graph(const ChainGraph& graph, GraphFormat format, const std::string& path);

}  // namespace carlasso
