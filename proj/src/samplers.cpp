#include "carlasso/samplers.hpp"

#include <cmath>
#include <vector>

#include "carlasso/distributions.hpp"
#include "carlasso/error.hpp"
#include "carlasso/linalg.hpp"

namespace carlasso {

namespace detail {

SufficientStats sufficient_stats(const Matrix& x, const Matrix& z) {
  SufficientStats st;
  st.n = static_cast<int>(z.rows());
  st.xtx = x.transpose() * x;
  st.xt1 = x.colwise().sum().transpose();
  st.xtz = x.transpose() * z;
  st.ztz = z.transpose() * z;
  st.zsum = z.colwise().sum().transpose();
  return st;
}

double draw_tau2(double coef, double rate, RngStream& rng) {
  const double mean = rate / std::fabs(coef);
  if (coef == 0.0 || !std::isfinite(mean)) return gamma(rng, 0.5, 0.5 * rate * rate);
  return 1.0 / inverse_gaussian(rng, mean, rate * rate);
}

void update_tau2_b(ChainState& s, RngStream& rng) {
  for (Eigen::Index l = 0; l < s.b.cols(); ++l)
    for (Eigen::Index j = 0; j < s.b.rows(); ++j)
      s.tau2_b(j, l) = draw_tau2(s.b(j, l), s.lambda_beta_at(int(j), int(l)), rng);
}

void update_b(ChainState& s, const SufficientStats& st, const Matrix& sigma, RngStream& rng) {
  const Eigen::Index p = s.b.rows();
  const Eigen::Index k = s.b.cols();
  if (p == 0) return;
  Matrix gb = st.xtx * s.b;
  const Vector sigma_mu = sigma * s.mu;
  for (Eigen::Index l = 0; l < k; ++l) {
    Matrix prec = sigma(l, l) * st.xtx;
    prec.diagonal().array() += s.tau2_b.col(l).array().inverse();
    Vector h = st.xtz.col(l) - st.xt1 * sigma_mu(l) - (gb * sigma.col(l) - gb.col(l) * sigma(l, l));
    auto llt = cholesky_with_jitter(prec, "B column precision");
    s.b.col(l) = sample_gaussian_canonical(llt, h, rng);
    gb.col(l) = st.xtx * s.b.col(l);
  }
}

void update_mu(ChainState& s, const SufficientStats& st, const Matrix& sigma,
               const Eigen::LLT<Matrix>& omega_llt, double mu_prior_precision, RngStream& rng) {
  const Eigen::Index k = s.mu.size();
  const Vector bx = s.b.transpose() * st.xt1;
  if (mu_prior_precision == 0.0) {
    if (st.n == 0) throw Error(ErrorKind::InvalidArgument, "flat prior on mu needs at least one observation");
    const double n = st.n;
    // Precision n Sigma: mean (Omega zsum - B^T X^T 1) / n, covariance Omega / n.
    Vector e(k);
    for (Eigen::Index i = 0; i < k; ++i) e(i) = standard_normal(rng);
    s.mu = (s.omega * st.zsum - bx) / n + (omega_llt.matrixL() * e) / std::sqrt(n);
    return;
  }
  Matrix prec = static_cast<double>(st.n) * sigma;
  prec.diagonal().array() += mu_prior_precision;
  Vector h = st.zsum - sigma * bx;
  auto llt = cholesky_with_jitter(prec, "mu precision");
  s.mu = sample_gaussian_canonical(llt, h, rng);
}

void update_omega(ChainState& s, const SufficientStats& st, RngStream& rng) {
  const int k = s.k_eff();
  const double n = st.n;
  const Matrix& sm = st.ztz;
  // H = sum_i eta_i eta_i^T with eta_i = mu + B^T x_i.
  const Vector bx = s.b.transpose() * st.xt1;
  Matrix hm = n * s.mu * s.mu.transpose() + s.mu * bx.transpose() + bx * s.mu.transpose() +
              s.b.transpose() * st.xtx * s.b;
  hm = 0.5 * (hm + hm.transpose());
  const double lam_d = s.lambda_diag();
  const double shape = 0.5 * n + 1.0;

  if (k == 1) {
    s.omega(0, 0) = gig(rng, shape, sm(0, 0) + lam_d, std::max(hm(0, 0), 0.0));
    return;
  }

  std::vector<int> idx(k - 1);
  Matrix o11(k - 1, k - 1), h11(k - 1, k - 1);
  Vector w(k - 1), s12(k - 1), h12(k - 1), u(k);
  for (int j = 0; j < k; ++j) {
    for (int a = 0, c = 0; a < k; ++a)
      if (a != j) idx[c++] = a;
    for (int b = 0; b < k - 1; ++b) {
      for (int a = 0; a < k - 1; ++a) {
        o11(a, b) = s.omega(idx[a], idx[b]);
        h11(a, b) = hm(idx[a], idx[b]);
      }
      w(b) = s.omega(idx[b], j);
      s12(b) = sm(idx[b], j);
      h12(b) = hm(idx[b], j);
    }
    auto o11_llt = cholesky_with_jitter(o11, "Omega sub-block");
    const Matrix o11_inv = spd_inverse(o11_llt);
    Vector c = o11_inv * w;
    const double gam = s.omega(j, j) - w.dot(c);
    if (!(gam > 0.0)) throw Error(ErrorKind::NumericalBreakdown, "Schur complement of Omega is not positive");

    // Off-diagonal column given the Schur complement.
    const double diag_rate = sm(j, j) + lam_d;
    Matrix prec = diag_rate * o11_inv + (o11_inv * h11 * o11_inv) / gam;
    prec = 0.5 * (prec + prec.transpose());
    for (int a = 0; a < k - 1; ++a) prec(a, a) += 1.0 / s.tau2_omega(idx[a], j);
    Vector h = -s12 + o11_inv * h12 / gam;
    auto prec_llt = cholesky_with_jitter(prec, "Omega column precision");
    w = sample_gaussian_canonical(prec_llt, h, rng);

    // Schur complement given the new column: GIG(n/2 + 1, s_jj + lambda, u' H u).
    c = o11_inv * w;
    for (int a = 0; a < k - 1; ++a) u(idx[a]) = -c(a);
    u(j) = 1.0;
    const double q = std::max(u.dot(hm * u), 0.0);
    const double gam_new = gig(rng, shape, diag_rate, q);

    for (int a = 0; a < k - 1; ++a) {
      s.omega(idx[a], j) = w(a);
      s.omega(j, idx[a]) = w(a);
    }
    s.omega(j, j) = gam_new + w.dot(c);
  }
}

void update_tau2_omega(ChainState& s, RngStream& rng) {
  const int k = s.k_eff();
  for (int j = 1; j < k; ++j) {
    for (int i = 0; i < j; ++i) {
      double t = draw_tau2(s.omega(i, j), s.lambda_omega_at(i, j), rng);
      s.tau2_omega(i, j) = t;
      s.tau2_omega(j, i) = t;
    }
  }
}

void update_lambdas(ChainState& s, const Hyperparams& hyper, bool with_beta, RngStream& rng) {
  const int k = s.k_eff();
  const Eigen::Index pk = s.b.size();
  double offdiag_abs = 0.0;
  for (int j = 1; j < k; ++j)
    for (int i = 0; i < j; ++i) offdiag_abs += std::fabs(s.omega(i, j));
  const double diag_half = 0.5 * s.omega.trace();

  if (!s.adaptive) {
    if (with_beta) {
      s.lambda_beta(0, 0) = gamma(rng, hyper.r_beta + static_cast<double>(pk),
                                  hyper.delta_beta + s.b.cwiseAbs().sum());
      update_tau2_b(s, rng);
    }
    s.lambda_omega(0, 0) = gamma(rng, hyper.r_omega + 0.5 * k * (k + 1), hyper.delta_omega + offdiag_abs + diag_half);
    update_tau2_omega(s, rng);
    return;
  }

  if (with_beta) {
    for (Eigen::Index l = 0; l < s.b.cols(); ++l)
      for (Eigen::Index j = 0; j < s.b.rows(); ++j)
        s.lambda_beta(j, l) = gamma(rng, hyper.r_beta + 1.0, hyper.delta_beta + std::fabs(s.b(j, l)));
    update_tau2_b(s, rng);
  }
  for (int j = 1; j < k; ++j) {
    for (int i = 0; i < j; ++i) {
      double v = gamma(rng, hyper.r_omega + 1.0, hyper.delta_omega + std::fabs(s.omega(i, j)));
      s.lambda_omega(i, j) = v;
      s.lambda_omega(j, i) = v;
    }
  }
  const double d = gamma(rng, hyper.r_omega + k, hyper.delta_omega + diag_half);
  s.lambda_omega.diagonal().setConstant(d);
  update_tau2_omega(s, rng);
}

}  // namespace detail

namespace {

void require_finite(const ChainState& s) {
  auto finite = [](const Matrix& m) { return m.size() == 0 || m.allFinite(); };
  if (!finite(s.omega) || !finite(s.b) || !s.mu.allFinite() || !finite(s.tau2_b) || !finite(s.tau2_omega) ||
      !finite(s.lambda_beta) || !finite(s.lambda_omega)) {
    throw Error(ErrorKind::NumericalBreakdown, "sweep produced a non-finite parameter");
  }
}

void run_sweep(ChainState& s, const Matrix& x, const Matrix& z, const Hyperparams& hyper, bool with_beta,
               RngStream& rng) {
  using namespace detail;
  if (z.cols() != s.k_eff() || x.rows() != z.rows() || (with_beta && x.cols() != s.p())) {
    throw Error(ErrorKind::DimensionMismatch, "state and data dimensions disagree");
  }
  const SufficientStats st = sufficient_stats(x, z);
  if (with_beta) update_tau2_b(s, rng);
  {
    auto omega_llt = cholesky_with_jitter(s.omega, "Omega");
    const Matrix sigma = spd_inverse(omega_llt);
    if (with_beta) update_b(s, st, sigma, rng);
    update_mu(s, st, sigma, omega_llt, hyper.mu_prior_precision, rng);
  }
  update_omega(s, st, rng);
  update_tau2_omega(s, rng);
  update_lambdas(s, hyper, with_beta, rng);
  require_finite(s);
#ifndef NDEBUG
  if ((s.omega - s.omega.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorKind::NumericalBreakdown, "Omega lost symmetry");
  }
#endif
}

}  // namespace

void sweep_carlasso(ChainState& state, const DesignMatrices& design, const Hyperparams& hyper, RngStream& rng) {
  if (state.adaptive) throw Error(ErrorKind::InvalidArgument, "sweep_carlasso needs a non-adaptive state");
  run_sweep(state, design.x, gaussian_block(state, design), hyper, true, rng);
}

void sweep_caralasso(ChainState& state, const DesignMatrices& design, const Hyperparams& hyper, RngStream& rng) {
  if (!state.adaptive) throw Error(ErrorKind::InvalidArgument, "sweep_caralasso needs an adaptive state");
  run_sweep(state, design.x, gaussian_block(state, design), hyper, true, rng);
}

void sweep_bglasso(ChainState& state, const Matrix& y, const Hyperparams& hyper, RngStream& rng) {
  if (state.b.rows() != 0) throw Error(ErrorKind::InvalidArgument, "bGlasso state must not carry predictors");
  const Matrix no_x(y.rows(), 0);
  run_sweep(state, no_x, y, hyper, false, rng);
}

void sweep(ChainState& state, const DesignMatrices& design, const Hyperparams& hyper, RngStream& rng) {
  if (state.adaptive) sweep_caralasso(state, design, hyper, rng);
  else sweep_carlasso(state, design, hyper, rng);
}

}  // namespace carlasso
