#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "carlasso/chain_io.hpp"
#include "carlasso/distributions.hpp"
#include "carlasso/error.hpp"
#include "carlasso/linalg.hpp"
#include "carlasso/samplers.hpp"
#include "support/fixtures.hpp"
#include "support/geweke.hpp"

using namespace carlasso;
using carlasso::testing::raw_design;

namespace {

bool same_state(const ChainState& a, const ChainState& b) {
  return a.omega == b.omega && a.b == b.b && a.mu == b.mu && a.tau2_b == b.tau2_b &&
         a.tau2_omega == b.tau2_omega && a.lambda_beta == b.lambda_beta && a.lambda_omega == b.lambda_omega;
}

Matrix gaussian_rows(const Matrix& omega, int n, RngStream& rng) {
  const Eigen::LLT<Matrix> llt(omega);
  Matrix y(n, omega.rows());
  for (int i = 0; i < n; ++i) {
    Vector e(omega.rows());
    for (Eigen::Index j = 0; j < e.size(); ++j) e(j) = standard_normal(rng);
    y.row(i) = llt.matrixU().solve(e).transpose();
  }
  return y;
}

DesignMatrices small_problem(int n, int k, int p, std::uint64_t seed) {
  RngStream rng(seed, 99);
  Matrix x(n, p), y(n, k);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = standard_normal(rng);
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = standard_normal(rng);
  if (p > 0) y.col(0) += 0.8 * x.col(0);
  return raw_design(y, x, LinkCode::Identity);
}

}  // namespace

TEST_SUITE("samplers") {

TEST_CASE("sweeps are deterministic for a fixed seed") {
  for (bool adaptive : {false, true}) {
    auto d = small_problem(20, 3, 2, 5);
    Hyperparams h{.adaptive = adaptive};
    ChainState a = init_state(d, h), b = init_state(d, h);
    RngStream ra(11), rb(11);
    for (int it = 0; it < 50; ++it) {
      sweep(a, d, h, ra);
      sweep(b, d, h, rb);
    }
    CHECK(same_state(a, b));
    CHECK(ra == rb);
  }
}

TEST_CASE("serialize, restore, sweep matches the in-memory sweep") {
  auto d = small_problem(15, 3, 2, 6);
  for (bool adaptive : {false, true}) {
    Hyperparams h{.adaptive = adaptive};
    ChainState s = init_state(d, h);
    RngStream rng(3);
    for (int it = 0; it < 20; ++it) sweep(s, d, h, rng);
    const std::string text = state_to_json(s, &rng);
    std::optional<RngStream> restored_rng;
    ChainState restored = state_from_json(text, &restored_rng);
    REQUIRE(restored_rng.has_value());
    CHECK(same_state(s, restored));
    sweep(s, d, h, rng);
    sweep(restored, d, h, *restored_rng);
    CHECK(same_state(s, restored));
  }
}

TEST_CASE("k = 1 posterior mean of omega matches quadrature") {
  // After integrating mu (flat) and the rate lambda ~ Gamma(r, delta):
  // p(w | y) ~ w^{(n+1)/2} exp(-w S / 2) (delta + w / 2)^{-(r+1)}.
  RngStream gen(21);
  const int n = 12;
  Matrix y(n, 1);
  for (int i = 0; i < n; ++i) y(i, 0) = 1.0 + 0.9 * standard_normal(gen);
  const double ybar = y.mean();
  const double ss = (y.array() - ybar).square().sum();
  Hyperparams h;
  auto dens = [&](double w) {
    return std::pow(w, (n + 1) / 2.0) * std::exp(-w * ss / 2.0) * std::pow(h.delta_omega + w / 2.0, -(h.r_omega + 1.0));
  };
  const double z0 = carlasso::testing::simpson(dens, 0.0, 50.0);
  const double oracle = carlasso::testing::simpson([&](double w) { return w * dens(w); }, 0.0, 50.0) / z0;

  auto d = raw_design(y, Matrix::Zero(n, 0), LinkCode::Identity);
  ChainState s = init_state(d, h);
  RngStream rng(8);
  double acc = 0.0;
  const int sweeps = 50000;
  for (int it = 0; it < 1000; ++it) sweep_carlasso(s, d, h, rng);
  for (int it = 0; it < sweeps; ++it) {
    sweep_carlasso(s, d, h, rng);
    acc += s.omega(0, 0);
  }
  CHECK(acc / sweeps == doctest::Approx(oracle).epsilon(0.02));
}

TEST_CASE("graphical lasso recovers a partial correlation of 0.5") {
  Matrix omega(2, 2);
  omega << 1.0, -0.5, -0.5, 1.0;
  std::vector<double> estimates;
  for (int rep = 0; rep < 20; ++rep) {
    RngStream gen(100 + rep);
    Matrix y = gaussian_rows(omega, 500, gen);
    auto d = raw_design(y, Matrix::Zero(500, 0), LinkCode::Identity);
    Hyperparams h;
    ChainState s = init_state(d, h);
    RngStream rng(rep + 1);
    double acc = 0.0;
    for (int it = 0; it < 300; ++it) sweep_bglasso(s, y, h, rng);
    for (int it = 0; it < 1000; ++it) {
      sweep_bglasso(s, y, h, rng);
      acc += partial_correlations(s.omega)(0, 1);
    }
    estimates.push_back(acc / 1000);
  }
  std::nth_element(estimates.begin(), estimates.begin() + 10, estimates.end());
  CHECK(std::abs(estimates[10] - 0.5) < 0.1);
}

TEST_CASE("no-data chains reproduce the prior") {
  using carlasso::testing::GewekeSetup;
  struct Case {
    const char* name;
    bool adaptive, bglasso;
  };
  for (const Case c : {Case{"carlasso", false, false}, Case{"caralasso", true, false}, Case{"bglasso", false, true}}) {
    GewekeSetup g;
    g.name = c.name;
    g.adaptive = c.adaptive;
    g.bglasso = c.bglasso;
    g.p = c.bglasso ? 0 : 2;
    g.n = 0;
    g.hyper = carlasso::testing::geweke_hyper(c.adaptive, LinkCode::Identity);
    g.draws = 5000;
    g.seed = 77;
    auto res = carlasso::testing::run_geweke(g);
    for (const auto& st : res.stats) {
      INFO(c.name << " " << st.name << " prior " << st.prior_mean << " chain " << st.chain_mean);
      const bool named = st.name == "omega[1,2]" || st.name == "b[1,1]" || st.name == "lambda_beta[1,1]" ||
                         st.name == "lambda_omega[1,2]";
      CHECK(std::abs(st.z) < (named ? 3.0 : 4.0));
    }
  }
}

TEST_CASE("random small problems keep Omega SPD and finite") {
  RngStream pick(2024);
  long sweeps = 0;
  while (sweeps < 10000) {
    const int k = 1 + static_cast<int>(pick.uniform() * 4);
    const int p = static_cast<int>(pick.uniform() * 4);
    const int n = 2 + static_cast<int>(pick.uniform() * 8);
    const bool adaptive = pick.uniform() < 0.5;
    const bool bglasso = pick.uniform() < 0.25;
    auto d = small_problem(n, k, bglasso ? 0 : p, pick.next_u64());
    Hyperparams h{.adaptive = adaptive};
    ChainState s = init_state(d, h);
    RngStream rng(pick.next_u64());
    for (int it = 0; it < 100; ++it, ++sweeps) {
      if (bglasso) sweep_bglasso(s, d.y, h, rng);
      else sweep(s, d, h, rng);
      REQUIRE(Eigen::LLT<Matrix>(s.omega).info() == Eigen::Success);
      REQUIRE((s.omega - s.omega.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
      REQUIRE(s.omega.allFinite());
      REQUIRE(s.b.allFinite());
      REQUIRE(s.mu.allFinite());
    }
    CHECK_NOTHROW(check_state(s, d));
  }
}

TEST_CASE("kernel and state flags must agree") {
  auto d = small_problem(10, 2, 1, 1);
  Hyperparams h{.adaptive = true};
  ChainState s = init_state(d, h);
  RngStream rng(1);
  CHECK_THROWS_AS(sweep_carlasso(s, d, h, rng), Error);
  ChainState t = init_state(d, Hyperparams{});
  CHECK_THROWS_AS(sweep_caralasso(t, d, Hyperparams{}, rng), Error);
  CHECK_THROWS_AS(sweep_bglasso(t, d.y, Hyperparams{}, rng), Error);
}

TEST_CASE("tau2 conditional at zero coefficient") {
  // At coef = 0 the conditional is Gamma(1/2, rate^2 / 2), mean 1 / rate^2.
  RngStream rng(4);
  double acc = 0.0;
  const int m = 200000;
  for (int i = 0; i < m; ++i) acc += detail::draw_tau2(0.0, 2.0, rng);
  CHECK(acc / m == doctest::Approx(0.25).epsilon(0.01));
}

}
