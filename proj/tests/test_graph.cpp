#include <doctest.h>

#include <cmath>
#include <regex>

#include "carlasso/distributions.hpp"
#include "carlasso/error.hpp"
#include "carlasso/graph.hpp"
#include "carlasso/inference.hpp"
#include "carlasso/linalg.hpp"
#include "carlasso/simulate.hpp"

using namespace carlasso;

namespace {

EntrySummary entries(const Matrix& mean, double half_width) {
  EntrySummary e;
  e.mean = mean;
  e.lower = mean.array() - half_width;
  e.upper = mean.array() + half_width;
  e.ess = Matrix::Ones(mean.rows(), mean.cols());
  return e;
}

// Two responses, one predictor; intervals of the given half width.
CarlassoOut two_by_one(double pc, double b1, double b2, double half_width) {
  CarlassoOut out;
  out.meta.response_labels = out.meta.latent_labels = {"r1", "r2"};
  out.meta.predictor_labels = {"p1"};
  Matrix pcm(2, 2);
  pcm << 1, pc, pc, 1;
  out.partial_correlation = entries(pcm, half_width);
  Matrix b(1, 2);
  b << b1, b2;
  out.b = entries(b, half_width);
  return out;
}

int count(const std::string& text, const std::string& needle) {
  int c = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++c;
  return c;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("partial correlations") {
  CHECK(partial_correlations(Matrix::Identity(3, 3)).isIdentity());
  Matrix w(2, 2);
  w << 1, 0.5, 0.5, 1;
  CHECK(partial_correlations(w)(0, 1) == doctest::Approx(-0.5));
  RngStream rng(1);
  for (int rep = 0; rep < 1000; ++rep) {
    Matrix a(5, 5);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = standard_normal(rng);
    Matrix spd = a * a.transpose() + 0.05 * Matrix::Identity(5, 5);
    Matrix pc = partial_correlations(spd);
    REQUIRE((pc.array().abs() <= 1.0 + 1e-15).all());
    REQUIRE((pc - pc.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    REQUIRE(pc.diagonal().isOnes());
  }
  Matrix bad(2, 2);
  bad << 1, 2, 2, 1;
  try {
    partial_correlations(bad);
    FAIL("expected NotSPD");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotSPD);
  }
}

TEST_CASE("alpha-centrality") {
  CHECK(alpha_centrality(Matrix::Zero(3, 3)).isOnes());
  Matrix pair(2, 2);
  pair << 0, 0.7, 0.7, 0;
  Vector x = alpha_centrality(pair);
  CHECK(x(0) == doctest::Approx(x(1)));

  // Star: hub 0, leaves 1 and 2. With a = 0.5 / sqrt(2),
  // x0 = 1 + 2 a x1 and x1 = 1 + a x0.
  Matrix star(3, 3);
  star << 0, 1, 1, 1, 0, 0, 1, 0, 0;
  const double a = 0.5 / std::sqrt(2.0);
  const double hub = (1.0 + 2.0 * a) / (1.0 - 2.0 * a * a);
  const double leaf = 1.0 + a * hub;
  Vector s = alpha_centrality(star);
  CHECK(s(0) == doctest::Approx(hub).epsilon(1e-12));
  CHECK(s(1) == doctest::Approx(leaf).epsilon(1e-12));
  CHECK(s(2) == doctest::Approx(leaf).epsilon(1e-12));
  CHECK(s(0) > s(1));

  RngStream rng(2);
  for (int rep = 0; rep < 200; ++rep) {
    Matrix m(4, 4);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform() < 0.5 ? 0.0 : rng.uniform();
    Vector e = Vector::Constant(4, 0.5) + Vector::Ones(4) * rng.uniform();
    REQUIRE((alpha_centrality(m, 0.9, e).array() >= e.minCoeff() - 1e-12).all());
  }
  CHECK_THROWS_AS(alpha_centrality(-star), Error);
  CHECK_THROWS_AS(alpha_centrality(star, 1.0), Error);
  CHECK_THROWS_AS(alpha_centrality(Matrix::Zero(2, 3)), Error);
}

TEST_CASE("intervals decide inclusion") {
  auto wide = build_graph(two_by_one(0.3, 0.2, -0.1, 1.0));
  CHECK(wide.included_edge_count() == 0);
  CHECK(wide.edges.size() == 3);
  CHECK(wide.nodes[0].size == wide.nodes[1].size);

  auto narrow = build_graph(two_by_one(0.3, 0.2, -0.1, 0.05));
  CHECK(narrow.included_edge_count() == 3);
  auto zero = build_graph(two_by_one(0.0, 0.0, -0.1, 0.0));
  CHECK(zero.included_edge_count() == 1);

  GraphOptions opt;
  opt.min_abs_weight = 0.15;
  auto thr = build_graph(two_by_one(0.3, 0.2, -0.1, 1.0), opt);
  CHECK(thr.included_edge_count() == 2);
}

TEST_CASE("node roster and sizes") {
  auto g = build_graph(two_by_one(0.3, 0.2, -0.1, 0.05));
  REQUIRE(g.nodes.size() == 3);
  CHECK(g.nodes[0].kind == NodeKind::Response);
  CHECK(g.nodes[2].kind == NodeKind::Predictor);
  CHECK(g.nodes[2].size == 1.0);
  for (const auto& n : g.nodes) CHECK(n.size > 0.0);
}

TEST_CASE("DOT encoding") {
  auto g = build_graph(two_by_one(0.3, 0.2, -0.1, 0.05));
  const std::string dot = render_dot(g);
  CHECK(dot.rfind("digraph", 0) == 0);
  CHECK(count(dot, "shape=circle") == 2);
  CHECK(count(dot, "shape=triangle") == 1);
  CHECK(count(dot, "color=\"#D62728\"") == 2);
  CHECK(count(dot, "color=\"#1F77B4\"") == 1);
  CHECK(dot.find("penwidth=5") != std::string::npos);

  auto empty = build_graph(two_by_one(0.3, 0.2, -0.1, 1.0));
  const std::string edot = render_dot(empty);
  CHECK(edot.find("->") == std::string::npos);
  CHECK(count(edot, "shape=") == 3);
  CHECK(edot.back() == '\n');
}

TEST_CASE("GraphML carries the same attributes") {
  auto g = build_graph(two_by_one(0.3, 0.2, -0.1, 0.05));
  const std::string xml = render_graphml(g);
  CHECK(xml.find("<graphml") != std::string::npos);
  CHECK(count(xml, "<node ") == 3);
  CHECK(count(xml, "<edge ") == 3);
  for (const char* key : {"\"kind\"", "\"weight\"", "\"sign\"", "\"size\""}) CHECK(xml.find(key) != std::string::npos);
}

TEST_CASE("JSON export round-trips") {
  for (double hw : {0.05, 1.0}) {
    auto g = build_graph(two_by_one(-0.35, 0.123456789012345, -0.1, hw));
    CHECK(parse_graph_json(render_json(g)) == g);
  }
  CHECK_THROWS_AS(parse_graph_json("{\"nodes\": 3}"), Error);
}

TEST_CASE("higher levels include a subset of edges") {
  SimulationConfig cfg{.k = 4, .p = 2, .n = 80, .seed = 3};
  auto sim = simulate(cfg);
  FitRequest req;
  req.formula = sim.formula;
  req.table = sim.table;
  req.hyper.n_iter = 1000;
  req.hyper.n_burn_in = 200;
  req.hyper.thin_by = 2;
  auto res = fit(req);
  std::vector<ChainGraph> graphs;
  for (double level : {0.5, 0.8, 0.9, 0.99, 0.999}) graphs.push_back(build_graph(summarize(res.chains, level, res.out.meta)));
  for (std::size_t g = 1; g < graphs.size(); ++g) {
    for (std::size_t e = 0; e < graphs[g].edges.size(); ++e) {
      if (graphs[g].edges[e].included) CHECK(graphs[g - 1].edges[e].included);
    }
  }
  CHECK(graphs.front().included_edge_count() > graphs.back().included_edge_count());
}

TEST_CASE("logit reference is an isolated response node") {
  SimulationConfig cfg{.k = 3, .p = 1, .n = 40, .link = LinkCode::Logit, .seed = 4};
  auto sim = simulate(cfg);
  FitRequest req;
  req.formula = sim.formula;
  req.table = sim.table;
  req.hyper.link = LinkCode::Logit;
  req.hyper.n_iter = 200;
  req.hyper.n_burn_in = 50;
  auto g = build_graph(fit(req).out);
  CHECK(g.nodes.size() == 4);
  for (const auto& e : g.edges) CHECK(e.to != "y3");
  CHECK(g.nodes[2].name == "y3");
  CHECK(g.nodes[2].size > 0.0);
}

TEST_CASE("graph format names") {
  CHECK(parse_graph_format("dot") == GraphFormat::Dot);
  CHECK(parse_graph_format("graphml") == GraphFormat::GraphML);
  CHECK(parse_graph_format("json") == GraphFormat::Json);
  CHECK_FALSE(parse_graph_format("svg"));
}

}
