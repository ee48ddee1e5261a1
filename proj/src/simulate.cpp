#include "carlasso/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "carlasso/distributions.hpp"
#include "carlasso/error.hpp"
#include "carlasso/linalg.hpp"
#include "carlasso/links.hpp"
#include "carlasso/rng.hpp"

namespace carlasso {

namespace {

nlohmann::ordered_json rows_json(const Matrix& m) {
  auto out = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

void SimulationConfig::validate() const {
  if (k < 1 || p < 0 || n < 1) throw Error(ErrorKind::InvalidArgument, "simulation needs k >= 1, p >= 0, n >= 1");
  if (link == LinkCode::Logit && k < 2) throw Error(ErrorKind::InvalidArgument, "the logit link needs k >= 2");
  if (!(active_fraction >= 0.0 && active_fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "active fraction must lie in [0, 1]");
  }
  if (link == LinkCode::Logit && total < 1) throw Error(ErrorKind::InvalidArgument, "logit row total must be >= 1");
}

SimulatedData simulate(const SimulationConfig& cfg) {
  cfg.validate();
  const int ke = effective_k(cfg.link, cfg.k);
  RngStream rng(cfg.seed, 0);
  SimulatedData out;

  if (cfg.omega) {
    out.omega = *cfg.omega;
  } else {
    out.omega = Matrix::Identity(ke, ke);
    for (int i = 0; i + 1 < ke; ++i) out.omega(i, i + 1) = out.omega(i + 1, i) = cfg.omega_offdiag;
  }
  if (out.omega.rows() != ke || out.omega.cols() != ke) throw Error(ErrorKind::DimensionMismatch, "omega override has the wrong shape");
  const auto llt = cholesky_with_jitter(out.omega, "simulation Omega");
  const Matrix sigma = spd_inverse(llt);

  if (cfg.b) {
    out.b = *cfg.b;
    if (out.b.rows() != cfg.p || out.b.cols() != ke) throw Error(ErrorKind::DimensionMismatch, "B override has the wrong shape");
  } else {
    out.b = Matrix::Zero(cfg.p, ke);
    std::vector<Eigen::Index> cells(static_cast<std::size_t>(out.b.size()));
    std::iota(cells.begin(), cells.end(), 0);
    // Partial Fisher-Yates with our own uniforms keeps the draw portable.
    const auto n_active = static_cast<std::size_t>(std::lround(cfg.active_fraction * static_cast<double>(cells.size())));
    for (std::size_t i = 0; i < n_active; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(cells.size() - i));
      std::swap(cells[i], cells[j]);
      out.b.data()[cells[i]] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    }
  }
  if (cfg.mu) {
    out.mu = *cfg.mu;
    if (out.mu.size() != ke) throw Error(ErrorKind::DimensionMismatch, "mu override has the wrong length");
  } else if (cfg.link == LinkCode::Log) {
    out.mu = out.omega * Vector::Constant(ke, std::log(10.0));
  } else {
    out.mu = Vector::Zero(ke);
  }

  Matrix x(cfg.n, cfg.p);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = standard_normal(rng);
  out.z.resize(cfg.n, ke);
  const Matrix chol_sigma = Eigen::LLT<Matrix>(sigma).matrixL();
  for (int i = 0; i < cfg.n; ++i) {
    Vector e(ke);
    for (int j = 0; j < ke; ++j) e(j) = standard_normal(rng);
    const Vector eta = out.mu + out.b.transpose() * x.row(i).transpose();
    out.z.row(i) = (sigma * eta + chol_sigma * e).transpose();
  }

  Matrix y(cfg.n, cfg.k);
  for (int i = 0; i < cfg.n; ++i) {
    switch (cfg.link) {
      case LinkCode::Identity: y.row(i) = out.z.row(i); break;
      case LinkCode::Probit:
        for (int j = 0; j < cfg.k; ++j) y(i, j) = out.z(i, j) > 0.0 ? 1.0 : 0.0;
        break;
      case LinkCode::Log:
        for (int j = 0; j < cfg.k; ++j) y(i, j) = static_cast<double>(poisson(rng, std::exp(out.z(i, j))));
        break;
      case LinkCode::Logit: {
        const Vector probs = softmax_with_reference(out.z.row(i).transpose());
        const auto counts = multinomial(rng, cfg.total, std::span<const double>(probs.data(), probs.size()));
        for (int j = 0; j < cfg.k; ++j) y(i, j) = static_cast<double>(counts[static_cast<std::size_t>(j)]);
        break;
      }
    }
  }

  std::vector<std::string> names;
  std::vector<DataTable::Column> cols;
  std::string lhs, rhs;
  for (int j = 0; j < cfg.k; ++j) {
    names.push_back("y" + std::to_string(j + 1));
    cols.emplace_back(DataTable::NumericColumn(y.col(j).data(), y.col(j).data() + cfg.n));
    lhs += (j ? " + " : "") + names.back();
  }
  for (int j = 0; j < cfg.p; ++j) {
    names.push_back("x" + std::to_string(j + 1));
    cols.emplace_back(DataTable::NumericColumn(x.col(j).data(), x.col(j).data() + cfg.n));
    rhs += (j ? " + " : "") + names.back();
  }
  out.table = DataTable(std::move(names), std::move(cols));
  out.formula = lhs + " ~ " + rhs;
  return out;
}

std::string truth_to_json(const SimulationConfig& cfg, const SimulatedData& d) {
  nlohmann::ordered_json j{{"link", std::string(to_string(cfg.link))},
                           {"seed", cfg.seed},
                           {"k", cfg.k},
                           {"p", cfg.p},
                           {"n", cfg.n},
                           {"formula", d.formula},
                           {"omega", rows_json(d.omega)},
                           {"b", rows_json(d.b)},
                           {"mu", rows_json(d.mu)}};
  if (cfg.link == LinkCode::Logit) j["total"] = cfg.total;
  return j.dump(2) + "\n";
}

}  // namespace carlasso
