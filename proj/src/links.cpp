#include "carlasso/links.hpp"

#include <algorithm>
#include <cmath>

#include "carlasso/distributions.hpp"
#include "carlasso/error.hpp"

namespace carlasso {

namespace {

// eta_i = mu + B^T x_i, stacked as rows.
Matrix natural_parameters(const ChainState& s, const DesignMatrices& d) {
  Matrix eta = d.x * s.b;
  eta.rowwise() += s.mu.transpose();
  return eta;
}

// Mean of z_ij given the other coordinates of row i.
double conditional_mean(const ChainState& s, const Matrix& eta, Eigen::Index i, Eigen::Index j) {
  const double wjj = s.omega(j, j);
  const double others = s.omega.row(j).dot(s.z.row(i)) - wjj * s.z(i, j);
  return (eta(i, j) - others) / wjj;
}

void require_link(const DesignMatrices& d, LinkCode link, const ChainState& s) {
  if (d.link != link) throw Error(ErrorKind::InvalidArgument, "design link does not match the latent update");
  if (s.z.rows() != d.n() || s.z.cols() != s.k_eff()) {
    throw Error(ErrorKind::DimensionMismatch, "latent block does not match the design");
  }
}

double log_sum_exp_with_zero(const Eigen::Ref<const Eigen::RowVectorXd>& z) {
  const double m = std::max(0.0, z.maxCoeff());
  return m + std::log(std::exp(-m) + (z.array() - m).exp().sum());
}

void record_mh(ChainState& s, Eigen::Index i, Eigen::Index j, bool accepted, bool adapt) {
  ++s.mh_proposals;
  if (accepted) ++s.mh_accepted;
  if (adapt && accepted) s.mh_accepts(i, j) += 1.0;
}

void end_of_sweep_adaptation(ChainState& s, bool adapt) {
  if (!adapt) return;
  if (++s.mh_batch_sweeps < kMhBatch) return;
  ++s.mh_batches;
  const double delta = std::min(0.05, 1.0 / std::sqrt(static_cast<double>(s.mh_batches)));
  for (Eigen::Index j = 0; j < s.mh_step.cols(); ++j) {
    for (Eigen::Index i = 0; i < s.mh_step.rows(); ++i) {
      const double rate = s.mh_accepts(i, j) / kMhBatch;
      s.mh_step(i, j) *= std::exp(rate > kMhTargetAcceptance ? delta : -delta);
    }
  }
  s.mh_accepts.setZero();
  s.mh_batch_sweeps = 0;
}

}  // namespace

Vector softmax_with_reference(const Eigen::Ref<const Vector>& logits) {
  const Eigen::Index m = logits.size();
  const double mx = m > 0 ? std::max(0.0, logits.maxCoeff()) : 0.0;
  Vector out(m + 1);
  out.head(m) = (logits.array() - mx).exp();
  out(m) = std::exp(-mx);
  out /= out.sum();
  return out;
}

void update_latent_probit(ChainState& s, const DesignMatrices& d, RngStream& rng) {
  require_link(d, LinkCode::Probit, s);
  const Matrix eta = natural_parameters(s, d);
  for (Eigen::Index i = 0; i < s.z.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.z.cols(); ++j) {
      const double m = conditional_mean(s, eta, i, j);
      const double sd = 1.0 / std::sqrt(s.omega(j, j));
      s.z(i, j) = d.y(i, j) > 0.5 ? truncated_normal_lower(rng, m, sd, 0.0)
                                  : truncated_normal_upper(rng, m, sd, 0.0);
    }
  }
}

void update_latent_log(ChainState& s, const DesignMatrices& d, RngStream& rng, bool adapt) {
  require_link(d, LinkCode::Log, s);
  const Matrix eta = natural_parameters(s, d);
  for (Eigen::Index i = 0; i < s.z.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.z.cols(); ++j) {
      const double wjj = s.omega(j, j);
      const double y = d.y(i, j);
      const double m = conditional_mean(s, eta, i, j);
      const double cur = s.z(i, j);
      const double prop = cur + s.mh_step(i, j) / std::sqrt(wjj + y) * standard_normal(rng);
      // Written in increments so huge counts do not cancel catastrophically.
      const double dz = prop - cur;
      const double log_ratio = y * dz - std::exp(cur) * std::expm1(dz) - 0.5 * wjj * dz * (prop + cur - 2.0 * m);
      const bool accept = std::log(rng.uniform_open()) < log_ratio;
      if (accept) s.z(i, j) = prop;
      record_mh(s, i, j, accept, adapt);
    }
  }
  end_of_sweep_adaptation(s, adapt);
}

void update_latent_logit(ChainState& s, const DesignMatrices& d, RngStream& rng, bool adapt) {
  require_link(d, LinkCode::Logit, s);
  const Matrix eta = natural_parameters(s, d);
  const Eigen::Index k = d.y.cols();
  for (Eigen::Index i = 0; i < s.z.rows(); ++i) {
    const double total = d.y.row(i).sum();
    for (Eigen::Index j = 0; j < s.z.cols(); ++j) {
      const double wjj = s.omega(j, j);
      const double y = d.y(i, j);
      const double phat = (y + 0.5) / (total + 0.5 * static_cast<double>(k));
      const double curvature = total * phat * (1.0 - phat);
      const double m = conditional_mean(s, eta, i, j);
      const double cur = s.z(i, j);
      const double prop = cur + s.mh_step(i, j) / std::sqrt(wjj + curvature) * standard_normal(rng);

      const double lse_cur = log_sum_exp_with_zero(s.z.row(i));
      s.z(i, j) = prop;
      const double lse_prop = log_sum_exp_with_zero(s.z.row(i));
      const double log_ratio = y * (prop - cur) - total * (lse_prop - lse_cur) -
                               0.5 * wjj * ((prop - m) * (prop - m) - (cur - m) * (cur - m));
      const bool accept = std::log(rng.uniform_open()) < log_ratio;
      if (!accept) s.z(i, j) = cur;
      record_mh(s, i, j, accept, adapt);
    }
  }
  end_of_sweep_adaptation(s, adapt);
}

void update_latent(ChainState& s, const DesignMatrices& d, RngStream& rng, bool adapt) {
  switch (d.link) {
    case LinkCode::Identity: return;
    case LinkCode::Probit: update_latent_probit(s, d, rng); return;
    case LinkCode::Log: update_latent_log(s, d, rng, adapt); return;
    case LinkCode::Logit: update_latent_logit(s, d, rng, adapt); return;
  }
}

}  // namespace carlasso
