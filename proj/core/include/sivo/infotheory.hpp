#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace sivo {

/// Converts natural-log quantities to bits. Every entropy and mutual
/// information value in the library is reported in bits via this constant;
/// no other translation unit should take a logarithm of a probability or a
/// determinant.
inline constexpr double kBitsPerNat = 1.4426950408889634;  // 1 / ln 2

/// Probability-sum tolerance shared by every distribution check.
inline constexpr double kProbabilityTolerance = 1e-9;

/// Probability mass function. Validated on construction; never renormalized.
class DiscreteDistribution {
 public:
  /// Throws InvalidDistribution when a probability is negative or not finite,
  /// or the sum differs from 1 by more than kProbabilityTolerance.
  explicit DiscreteDistribution(std::vector<double> probabilities);

  std::span<const double> probabilities() const { return probabilities_; }
  std::size_t size() const { return probabilities_.size(); }
  double operator[](std::size_t i) const { return probabilities_[i]; }

 private:
  std::vector<double> probabilities_;
};

/// Validates a raw probability vector without constructing a distribution.
void check_distribution(std::span<const double> probabilities);

/// Multivariate Gaussian with a symmetric positive-definite covariance.
class GaussianBelief {
 public:
  /// Throws NotPositiveDefinite when the covariance is asymmetric beyond
  /// 1e-9 or fails a Cholesky factorization.
  GaussianBelief(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  Eigen::Index dimension() const { return mean_.size(); }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
};

/// Shannon entropy in bits with 0 log 0 := 0.
double discrete_entropy(const DiscreteDistribution& d);
double discrete_entropy(std::span<const double> probabilities);

/// log(det(cov)) in nats from an LLT factorization.
/// Throws NotPositiveDefinite when the factorization fails.
double log_det_spd(const Eigen::Ref<const Eigen::MatrixXd>& cov);

/// 0.5 log2((2 pi e)^n det(cov)).
double gaussian_entropy(const GaussianBelief& g);
double gaussian_entropy(const Eigen::Ref<const Eigen::MatrixXd>& cov);

/// Mutual information of a joint probability table, in bits.
/// Throws InvalidDistribution on negative entries or a bad total.
double discrete_mutual_information(const Eigen::Ref<const Eigen::MatrixXd>& joint);

/// 0.5 log2(det(S_aa) det(S_bb) / det(S)) where `a` lists the indices of
/// the first block and b is its complement.
double gaussian_mutual_information(const Eigen::Ref<const Eigen::MatrixXd>& cov,
                                   std::span<const Eigen::Index> a);
/// Leading-block split: a = [0, split), b = [split, n).
double gaussian_mutual_information(const Eigen::Ref<const Eigen::MatrixXd>& cov,
                                   Eigen::Index split);
double gaussian_mutual_information(const GaussianBelief& g, Eigen::Index split);

/// Throws NotPositiveDefinite unless `cov` is symmetric within `tol`
/// (relative to max(1, |entry|)) and Cholesky-factorizable.
void check_spd(const Eigen::Ref<const Eigen::MatrixXd>& cov, double tol = 1e-9);

}  // namespace sivo
