#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace carlasso {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Observation model for the responses.
enum class LinkCode { Identity, Probit, Log, Logit };

std::string_view to_string(LinkCode link);
std::optional<LinkCode> parse_link(std::string_view text);

/// Dimension of the latent Gaussian block: the logit link drops the last
/// (reference) response.
inline int effective_k(LinkCode link, int k) { return link == LinkCode::Logit ? k - 1 : k; }

}  // namespace carlasso
