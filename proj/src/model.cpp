#include "carlasso/model.hpp"

#include <cmath>

#include "carlasso/error.hpp"

namespace carlasso {

namespace {

// Standard normal quartile; probit latents start at +-0.674 by class.
constexpr double kProbitStart = 0.674;
constexpr double kInitialMhStep = 2.4;

std::string idx2(const char* name, int i, int j) {
  return std::string(name) + "[" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "]";
}

}  // namespace

void Hyperparams::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be positive");
    }
  };
  positive(r_beta, "r_beta");
  positive(delta_beta, "delta_beta");
  positive(r_omega, "r_omega");
  positive(delta_omega, "delta_omega");
  if (!(mu_prior_precision >= 0.0) || !std::isfinite(mu_prior_precision)) {
    throw Error(ErrorKind::InvalidArgument, "mu_prior_precision must be >= 0");
  }
  if (n_iter <= 0) throw Error(ErrorKind::InvalidArgument, "n_iter must be positive");
  if (n_burn_in < 0) throw Error(ErrorKind::InvalidArgument, "n_burn_in must be >= 0");
  if (thin_by < 1) throw Error(ErrorKind::InvalidArgument, "thin_by must be >= 1");
}

const Matrix& gaussian_block(const ChainState& state, const DesignMatrices& design) {
  return design.link == LinkCode::Identity ? design.y : state.z;
}

ChainState init_state(const DesignMatrices& design, const Hyperparams& hyper) {
  if (design.link != hyper.link) {
    throw Error(ErrorKind::DimensionMismatch, "design was built for a different link");
  }
  const int n = design.n();
  const int k = design.k();
  const int p = design.p();
  if (design.x.rows() != n) throw Error(ErrorKind::DimensionMismatch, "X and Y row counts differ");
  if (k < 1 || (hyper.link == LinkCode::Logit && k < 2)) {
    throw Error(ErrorKind::DimensionMismatch, "too few responses for the link");
  }
  const int ke = effective_k(hyper.link, k);

  ChainState s;
  s.adaptive = hyper.adaptive;
  s.omega = Matrix::Identity(ke, ke);
  s.b = Matrix::Zero(p, ke);
  s.tau2_b = Matrix::Ones(p, ke);
  s.tau2_omega = Matrix::Ones(ke, ke);
  if (hyper.adaptive) {
    s.lambda_beta = Matrix::Ones(p, ke);
    s.lambda_omega = Matrix::Ones(ke, ke);
  } else {
    s.lambda_beta = Matrix::Ones(1, 1);
    s.lambda_omega = Matrix::Ones(1, 1);
  }

  const Matrix& y = design.y;
  switch (hyper.link) {
    case LinkCode::Identity:
      break;
    case LinkCode::Probit:
      s.z = (y.array() > 0.5).select(Matrix::Constant(n, k, kProbitStart),
                                     Matrix::Constant(n, k, -kProbitStart));
      break;
    case LinkCode::Log:
      s.z = (y.array() + 0.5).log().matrix();
      break;
    case LinkCode::Logit: {
      s.z.resize(n, ke);
      for (int i = 0; i < n; ++i) {
        const double ref = std::log(y(i, k - 1) + 0.5);
        for (int j = 0; j < ke; ++j) s.z(i, j) = std::log(y(i, j) + 0.5) - ref;
      }
      break;
    }
  }
  if (hyper.link == LinkCode::Log || hyper.link == LinkCode::Logit) {
    s.mh_step = Matrix::Constant(n, ke, kInitialMhStep);
    s.mh_accepts = Matrix::Zero(n, ke);
  }

  const Matrix& g = gaussian_block(s, design);
  s.mu = n > 0 ? Vector(g.colwise().mean().transpose()) : Vector::Zero(ke);
  return s;
}

void check_state(const ChainState& s, const DesignMatrices& design) {
  const int ke = s.k_eff();
  if (ke != effective_k(design.link, design.k()) || s.omega.cols() != ke || s.b.rows() != design.p() ||
      s.b.cols() != ke || s.mu.size() != ke || s.tau2_b.rows() != s.b.rows() || s.tau2_b.cols() != ke ||
      s.tau2_omega.rows() != ke || s.tau2_omega.cols() != ke) {
    throw Error(ErrorKind::DimensionMismatch, "chain state does not match the design");
  }
  if (design.link != LinkCode::Identity && (s.z.rows() != design.n() || s.z.cols() != ke)) {
    throw Error(ErrorKind::DimensionMismatch, "latent block does not match the design");
  }
  if (s.adaptive) {
    if (s.lambda_beta.rows() != s.b.rows() || s.lambda_beta.cols() != ke || s.lambda_omega.rows() != ke ||
        s.lambda_omega.cols() != ke) {
      throw Error(ErrorKind::DimensionMismatch, "adaptive shrinkage matrices have wrong shape");
    }
  } else if (s.lambda_beta.size() != 1 || s.lambda_omega.size() != 1) {
    throw Error(ErrorKind::DimensionMismatch, "non-adaptive shrinkage must be scalar");
  }
  if ((s.omega - s.omega.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorKind::NotSPD, "Omega is not symmetric");
  }
  Eigen::LLT<Matrix> llt(s.omega);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::NotSPD, "Omega is not positive definite");
  auto all_positive = [](const Matrix& m) { return m.size() == 0 || (m.array() > 0.0).all(); };
  if (!all_positive(s.tau2_b) || !all_positive(s.tau2_omega) || !all_positive(s.lambda_beta) ||
      !all_positive(s.lambda_omega)) {
    throw Error(ErrorKind::DomainError, "auxiliary scales and shrinkage rates must be positive");
  }
}

PosteriorDraws::PosteriorDraws(int k_eff_, int p_, bool adaptive_, int capacity)
    : k_eff(k_eff_), p(p_), adaptive(adaptive_) {
  for (int j = 0; j < k_eff; ++j)
    for (int i = 0; i <= j; ++i) omega.labels.push_back(idx2("omega", i, j));
  for (int l = 0; l < k_eff; ++l)
    for (int j = 0; j < p; ++j) b.labels.push_back(idx2("b", j, l));
  for (int l = 0; l < k_eff; ++l) mu.labels.push_back("mu[" + std::to_string(l + 1) + "]");
  if (adaptive) {
    for (int l = 0; l < k_eff; ++l)
      for (int j = 0; j < p; ++j) lambda_beta.labels.push_back(idx2("lambda_beta", j, l));
    for (int j = 0; j < k_eff; ++j)
      for (int i = 0; i < j; ++i) lambda_omega.labels.push_back(idx2("lambda_omega", i, j));
    lambda_omega.labels.push_back("lambda_omega_diag");
  } else {
    lambda_beta.labels.push_back("lambda_beta");
    lambda_omega.labels.push_back("lambda_omega");
  }
  for (DrawBlock* blk : {&omega, &b, &mu, &lambda_beta, &lambda_omega}) {
    blk->values = Matrix::Zero(capacity, static_cast<Eigen::Index>(blk->labels.size()));
  }
}

void PosteriorDraws::store(int row, const ChainState& s) {
  int c = 0;
  for (int j = 0; j < k_eff; ++j)
    for (int i = 0; i <= j; ++i) omega.values(row, c++) = s.omega(i, j);
  c = 0;
  for (int l = 0; l < k_eff; ++l)
    for (int j = 0; j < p; ++j) b.values(row, c++) = s.b(j, l);
  for (int l = 0; l < k_eff; ++l) mu.values(row, l) = s.mu(l);
  if (adaptive) {
    c = 0;
    for (int l = 0; l < k_eff; ++l)
      for (int j = 0; j < p; ++j) lambda_beta.values(row, c++) = s.lambda_beta(j, l);
    c = 0;
    for (int j = 0; j < k_eff; ++j)
      for (int i = 0; i < j; ++i) lambda_omega.values(row, c++) = s.lambda_omega(i, j);
    lambda_omega.values(row, c) = s.lambda_diag();
  } else {
    lambda_beta.values(row, 0) = s.lambda_beta(0, 0);
    lambda_omega.values(row, 0) = s.lambda_omega(0, 0);
  }
}

Matrix PosteriorDraws::omega_at(int draw) const {
  Matrix m(k_eff, k_eff);
  int c = 0;
  for (int j = 0; j < k_eff; ++j)
    for (int i = 0; i <= j; ++i) {
      m(i, j) = omega.values(draw, c);
      m(j, i) = omega.values(draw, c);
      ++c;
    }
  return m;
}

Matrix PosteriorDraws::b_at(int draw) const {
  Matrix m(p, k_eff);
  int c = 0;
  for (int l = 0; l < k_eff; ++l)
    for (int j = 0; j < p; ++j) m(j, l) = b.values(draw, c++);
  return m;
}

PosteriorDraws PosteriorDraws::pool(const std::vector<PosteriorDraws>& chains) {
  if (chains.empty()) return {};
  int total = 0;
  for (const auto& c : chains) {
    if (c.k_eff != chains[0].k_eff || c.p != chains[0].p || c.adaptive != chains[0].adaptive) {
      throw Error(ErrorKind::DimensionMismatch, "cannot pool chains of different shapes");
    }
    total += c.draw_count();
  }
  PosteriorDraws out(chains[0].k_eff, chains[0].p, chains[0].adaptive, total);
  int row = 0;
  for (const auto& c : chains) {
    const int d = c.draw_count();
    out.omega.values.middleRows(row, d) = c.omega.values;
    out.b.values.middleRows(row, d) = c.b.values;
    out.mu.values.middleRows(row, d) = c.mu.values;
    out.lambda_beta.values.middleRows(row, d) = c.lambda_beta.values;
    out.lambda_omega.values.middleRows(row, d) = c.lambda_omega.values;
    row += d;
  }
  return out;
}

}  // namespace carlasso
