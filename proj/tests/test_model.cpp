#include <doctest.h>

#include "carlasso/error.hpp"
#include "carlasso/model.hpp"
#include "support/fixtures.hpp"

using namespace carlasso;
using carlasso::testing::raw_design;

TEST_SUITE("model") {

TEST_CASE("identity start is Omega = I and B = 0") {
  Matrix y(3, 2);
  y << 1, 2, 3, 4, 5, 6;
  Matrix x = Matrix::Ones(3, 1);
  Hyperparams h;
  auto s = init_state(raw_design(y, x, LinkCode::Identity), h);
  CHECK(s.omega.isApprox(Matrix::Identity(2, 2)));
  CHECK(s.b.isZero());
  CHECK(s.z.size() == 0);
  CHECK(s.mu(0) == doctest::Approx(3.0));
  CHECK(s.mu(1) == doctest::Approx(4.0));
  CHECK(s.lambda_beta.size() == 1);
  CHECK(s.tau2_b.isOnes());
}

TEST_CASE("logit drops the reference response") {
  Matrix y = Matrix::Constant(4, 5, 3.0);
  auto s = init_state(raw_design(y, Matrix::Zero(4, 2), LinkCode::Logit), Hyperparams{.link = LinkCode::Logit});
  CHECK(s.omega.rows() == 4);
  CHECK(s.z.cols() == 4);
  CHECK(s.b.cols() == 4);
  CHECK(s.mh_step.rows() == 4);
}

TEST_CASE("probit latents start at the class quartile") {
  Matrix y(2, 1);
  y << 1, 0;
  auto s = init_state(raw_design(y, Matrix::Zero(2, 0), LinkCode::Probit), Hyperparams{.link = LinkCode::Probit});
  CHECK(s.z(0, 0) == doctest::Approx(0.674).epsilon(1e-3));
  CHECK(s.z(1, 0) == doctest::Approx(-0.674).epsilon(1e-3));
}

TEST_CASE("log latents start at log(y + 1/2)") {
  Matrix y(1, 2);
  y << 0, 9.5;
  auto s = init_state(raw_design(y, Matrix::Zero(1, 0), LinkCode::Log), Hyperparams{.link = LinkCode::Log});
  CHECK(s.z(0, 0) == doctest::Approx(std::log(0.5)));
  CHECK(s.z(0, 1) == doctest::Approx(std::log(10.0)));
}

TEST_CASE("adaptive start carries rate matrices") {
  Matrix y = Matrix::Random(5, 3);
  auto s = init_state(raw_design(y, Matrix::Random(5, 2), LinkCode::Identity), Hyperparams{.adaptive = true});
  CHECK(s.lambda_beta.rows() == 2);
  CHECK(s.lambda_beta.cols() == 3);
  CHECK(s.lambda_omega.rows() == 3);
  CHECK_NOTHROW(check_state(s, raw_design(y, Matrix::Random(5, 2), LinkCode::Identity)));
}

TEST_CASE("init_state is deterministic") {
  Matrix y = Matrix::Constant(3, 3, 2.0);
  y(1, 2) = 7;
  auto d = raw_design(y, Matrix::Ones(3, 1), LinkCode::Logit);
  Hyperparams h{.link = LinkCode::Logit};
  auto a = init_state(d, h), b = init_state(d, h);
  CHECK(a.z == b.z);
  CHECK(a.mu == b.mu);
}

TEST_CASE("link mismatch is a dimension error") {
  Matrix y = Matrix::Ones(2, 2);
  try {
    init_state(raw_design(y, Matrix::Zero(2, 0), LinkCode::Identity), Hyperparams{.link = LinkCode::Log});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
}

TEST_CASE("effective k") {
  for (int k = 2; k <= 10; ++k) {
    CHECK(effective_k(LinkCode::Logit, k) == k - 1);
    CHECK(effective_k(LinkCode::Identity, k) == k);
    CHECK(effective_k(LinkCode::Probit, k) == k);
    CHECK(effective_k(LinkCode::Log, k) == k);
  }
}

TEST_CASE("hyperparameter invariants") {
  CHECK_NOTHROW(Hyperparams{}.validate());
  CHECK_THROWS_AS(Hyperparams{.r_beta = 0.0}.validate(), Error);
  CHECK_THROWS_AS(Hyperparams{.delta_omega = -1.0}.validate(), Error);
  CHECK_THROWS_AS(Hyperparams{.n_iter = 0}.validate(), Error);
  CHECK_THROWS_AS(Hyperparams{.n_burn_in = -1}.validate(), Error);
  CHECK_THROWS_AS(Hyperparams{.thin_by = 0}.validate(), Error);
}

TEST_CASE("stored draws keep the upper triangle and vec(B)") {
  Matrix y = Matrix::Random(4, 2);
  auto s = init_state(raw_design(y, Matrix::Random(4, 3), LinkCode::Identity), Hyperparams{});
  s.omega << 2, -0.5, -0.5, 3;
  s.b << 1, 2, 3, 4, 5, 6;
  PosteriorDraws d(2, 3, false, 2);
  d.store(0, s);
  d.store(1, s);
  CHECK(d.draw_count() == 2);
  CHECK(d.omega.labels == std::vector<std::string>{"omega[1,1]", "omega[1,2]", "omega[2,2]"});
  CHECK(d.b.labels[1] == "b[2,1]");
  CHECK(d.omega_at(1) == s.omega);
  CHECK(d.b_at(0) == s.b);
  auto pooled = PosteriorDraws::pool({d, d});
  CHECK(pooled.draw_count() == 4);
}

}
