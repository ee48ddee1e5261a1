#include "carlasso/linalg.hpp"

#include <cmath>
#include <string>

#include "carlasso/distributions.hpp"
#include "carlasso/error.hpp"

namespace carlasso {

Eigen::LLT<Matrix> cholesky_with_jitter(const Matrix& m, std::string_view what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() == Eigen::Success) return llt;
  const double jitter = 1e-10 * m.trace() / static_cast<double>(m.rows());
  Matrix work = m;
  for (int attempt = 0; attempt < 3; ++attempt) {
    if (!(jitter > 0.0) || !std::isfinite(jitter)) break;
    work.diagonal().array() += jitter;
    llt.compute(work);
    if (llt.info() == Eigen::Success) return llt;
  }
  throw Error(ErrorKind::NumericalBreakdown,
              "Cholesky factorisation of " + std::string(what) + " failed after jitter retries");
}

Matrix spd_inverse(const Eigen::LLT<Matrix>& llt) {
  const Eigen::Index n = llt.matrixLLT().rows();
  return llt.solve(Matrix::Identity(n, n));
}

Vector sample_gaussian_canonical(const Eigen::LLT<Matrix>& precision, const Vector& h, RngStream& rng) {
  const Eigen::Index n = h.size();
  // P = L L^T: x = L^{-T} (L^{-1} h + e) has mean P^{-1} h and covariance P^{-1}.
  Vector w = precision.matrixL().solve(h);
  for (Eigen::Index i = 0; i < n; ++i) w(i) += standard_normal(rng);
  return precision.matrixU().solve(w);
}

Matrix partial_correlations(const Matrix& omega) {
  if (omega.rows() != omega.cols()) throw Error(ErrorKind::NotSPD, "matrix is not square");
  if (omega.size() > 0 && (omega - omega.transpose()).cwiseAbs().maxCoeff() >
                              1e-10 * (1.0 + omega.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::NotSPD, "matrix is not symmetric");
  }
  Eigen::LLT<Matrix> llt(omega);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::NotSPD, "matrix is not positive definite");
  const Eigen::Index k = omega.rows();
  Vector inv_sd = omega.diagonal().array().rsqrt();
  Matrix out(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < k; ++i) {
      out(i, j) = i == j ? 1.0 : -omega(i, j) * inv_sd(i) * inv_sd(j);
    }
  }
  return out;
}

}  // namespace carlasso
