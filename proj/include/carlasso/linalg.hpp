#pragma once

#include <string_view>

#include "carlasso/rng.hpp"
#include "carlasso/types.hpp"

namespace carlasso {

/// Cholesky factorisation with the jitter policy used throughout the
/// samplers: on failure add 1e-10 * trace / dim to the diagonal and retry,
/// at most three times, then throw NumericalBreakdown naming `what`.
Eigen::LLT<Matrix> cholesky_with_jitter(const Matrix& m, std::string_view what);

/// Inverse of an SPD matrix through its Cholesky factor.
Matrix spd_inverse(const Eigen::LLT<Matrix>& llt);

/// Draw from N(P^{-1} h, P^{-1}) given the Cholesky factor of P.
Vector sample_gaussian_canonical(const Eigen::LLT<Matrix>& precision, const Vector& h, RngStream& rng);

/// Partial correlations -omega_ij / sqrt(omega_ii omega_jj) with unit
/// diagonal. Throws NotSPD unless `omega` is symmetric positive definite.
Matrix partial_correlations(const Matrix& omega);

}  // namespace carlasso
