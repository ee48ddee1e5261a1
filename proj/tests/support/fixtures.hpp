#pragma once

#include <string>
#include <vector>

#include "carlasso/ingest.hpp"
#include "carlasso/model.hpp"

namespace carlasso::testing {

/// Design built straight from matrices (no centring or scaling).
inline DesignMatrices raw_design(const Matrix& y, const Matrix& x, LinkCode link) {
  DesignMatrices d;
  d.y = y;
  d.x = x;
  d.link = link;
  d.x_means = Vector::Zero(x.cols());
  d.x_scales = Vector::Ones(x.cols());
  d.y_centering = Vector::Zero(y.cols());
  for (Eigen::Index j = 0; j < y.cols(); ++j) d.y_labels.push_back("y" + std::to_string(j + 1));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    d.x_labels.push_back("x" + std::to_string(j + 1));
    d.x_is_dummy.push_back(false);
    d.x_source.push_back(static_cast<std::size_t>(j));
  }
  return d;
}

/// Composite Simpson rule on [a, b] with an even number of panels.
template <class F>
double simpson(F f, double a, double b, int panels = 20000) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace carlasso::testing
