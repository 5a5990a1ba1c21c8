#include "sivo/infotheory.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>

#include "sivo/error.hpp"

namespace sivo {
namespace {

double log2_of(double x) { return std::log(x) * kBitsPerNat; }

Eigen::MatrixXd select_block(const Eigen::Ref<const Eigen::MatrixXd>& m,
                             std::span<const Eigen::Index> idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) out(r, c) = m(idx[r], idx[c]);
  }
  return out;
}

}  // namespace

void check_distribution(std::span<const double> probabilities) {
  if (probabilities.empty()) throw InvalidDistribution("empty distribution");
  double sum = 0.0;
  for (double p : probabilities) {
    if (!std::isfinite(p) || p < 0.0) {
      throw InvalidDistribution("probability " + std::to_string(p) +
                                " is negative or not finite");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    throw InvalidDistribution("probabilities sum to " + std::to_string(sum));
  }
}

DiscreteDistribution::DiscreteDistribution(std::vector<double> probabilities)
    : probabilities_(std::move(probabilities)) {
  check_distribution(probabilities_);
}

GaussianBelief::GaussianBelief(Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  if (covariance_.rows() != mean_.size() || covariance_.cols() != mean_.size()) {
    throw InvalidArgument("covariance dimension does not match the mean");
  }
  check_spd(covariance_);
}

void check_spd(const Eigen::Ref<const Eigen::MatrixXd>& cov, double tol) {
  if (cov.rows() != cov.cols() || cov.rows() == 0) {
    throw NotPositiveDefinite("covariance must be square and non-empty");
  }
  if (!cov.allFinite()) throw NotPositiveDefinite("covariance is not finite");
  for (Eigen::Index r = 0; r < cov.rows(); ++r) {
    for (Eigen::Index c = r + 1; c < cov.cols(); ++c) {
      const double scale = std::max({1.0, std::abs(cov(r, c)), std::abs(cov(c, r))});
      if (std::abs(cov(r, c) - cov(c, r)) > tol * scale) {
        throw NotPositiveDefinite("covariance is not symmetric");
      }
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("covariance is not positive definite");
  }
}

double discrete_entropy(std::span<const double> probabilities) {
  check_distribution(probabilities);
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * log2_of(p);
  }
  return h;
}

double discrete_entropy(const DiscreteDistribution& d) {
  return discrete_entropy(d.probabilities());
}

double log_det_spd(const Eigen::Ref<const Eigen::MatrixXd>& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("matrix is not positive definite");
  }
  const auto diag = llt.matrixLLT().diagonal();
  double ld = 0.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!(diag[i] > 0.0)) throw NotPositiveDefinite("singular factor");
    ld += std::log(diag[i]);
  }
  return 2.0 * ld;
}

double gaussian_entropy(const Eigen::Ref<const Eigen::MatrixXd>& cov) {
  check_spd(cov);
  const double n = static_cast<double>(cov.rows());
  const double log_2pie = std::log(2.0 * std::numbers::pi * std::numbers::e);
  return 0.5 * (n * log_2pie + log_det_spd(cov)) * kBitsPerNat;
}

double gaussian_entropy(const GaussianBelief& g) {
  return gaussian_entropy(g.covariance());
}

double discrete_mutual_information(const Eigen::Ref<const Eigen::MatrixXd>& joint) {
  if (joint.size() == 0) throw InvalidDistribution("empty joint table");
  double total = 0.0;
  for (Eigen::Index r = 0; r < joint.rows(); ++r) {
    for (Eigen::Index c = 0; c < joint.cols(); ++c) {
      const double p = joint(r, c);
      if (!std::isfinite(p) || p < 0.0) {
        throw InvalidDistribution("joint probability is negative or not finite");
      }
      total += p;
    }
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    throw InvalidDistribution("joint probabilities sum to " + std::to_string(total));
  }
  const Eigen::VectorXd px = joint.rowwise().sum();
  const Eigen::RowVectorXd py = joint.colwise().sum();
  double mi = 0.0;
  for (Eigen::Index r = 0; r < joint.rows(); ++r) {
    for (Eigen::Index c = 0; c < joint.cols(); ++c) {
      const double p = joint(r, c);
      if (p > 0.0) mi += p * log2_of(p / (px[r] * py[c]));
    }
  }
  return std::max(mi, 0.0);
}

double gaussian_mutual_information(const Eigen::Ref<const Eigen::MatrixXd>& cov,
                                   std::span<const Eigen::Index> a) {
  check_spd(cov);
  const Eigen::Index n = cov.rows();
  std::vector<bool> in_a(static_cast<std::size_t>(n), false);
  for (Eigen::Index i : a) {
    if (i < 0 || i >= n || in_a[static_cast<std::size_t>(i)]) {
      throw InvalidArgument("partition index out of range or repeated");
    }
    in_a[static_cast<std::size_t>(i)] = true;
  }
  std::vector<Eigen::Index> b;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!in_a[static_cast<std::size_t>(i)]) b.push_back(i);
  }
  if (a.empty() || b.empty()) throw InvalidArgument("partition blocks must be non-empty");

  const double ld = log_det_spd(select_block(cov, a)) +
                    log_det_spd(select_block(cov, b)) - log_det_spd(cov);
  return 0.5 * ld * kBitsPerNat;
}

double gaussian_mutual_information(const Eigen::Ref<const Eigen::MatrixXd>& cov,
                                   Eigen::Index split) {
  if (split <= 0 || split >= cov.rows()) {
    throw InvalidArgument("split must leave both blocks non-empty");
  }
  check_spd(cov);
  const Eigen::Index m = cov.rows() - split;
  const double ld = log_det_spd(cov.topLeftCorner(split, split)) +
                    log_det_spd(cov.bottomRightCorner(m, m)) - log_det_spd(cov);
  return 0.5 * ld * kBitsPerNat;
}

double gaussian_mutual_information(const GaussianBelief& g, Eigen::Index split) {
  return gaussian_mutual_information(g.covariance(), split);
}

}  // namespace sivo
