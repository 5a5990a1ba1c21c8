#include "sivo/estimator.hpp"

#include <Eigen/Cholesky>

#include "sivo/error.hpp"
#include "sivo/infotheory.hpp"

namespace sivo {
namespace {

constexpr int kMaxHalvings = 20;


double measurement_cost(std::span<const PoseMeasurement> measurements,
                        std::span<const Eigen::LLT<Matrix3d>> noise_llt,
                        const Pose3& pose) {
  double cost = 0.0;
  for (std::size_t i = 0; i < measurements.size(); ++i) {
    const Vector3d r = measurements[i].z - measurements[i].model(pose).predicted;
    cost += r.dot(noise_llt[i].solve(r));
  }
  return cost;
}

}  // namespace

void PoseBelief::validate() const { check_spd(covariance); }

void symmetrize_and_check(Matrix6d& covariance) {
  covariance = 0.5 * (covariance + covariance.transpose()).eval();
  check_spd(covariance);
}

PoseBelief predict(const PoseBelief& belief, const MotionPrior& prior) {
  const Matrix6d ad = adjoint(prior.increment);
  PoseBelief out;
  out.pose = compose(prior.increment, belief.pose);
  out.covariance = ad * belief.covariance * ad.transpose() + prior.process_noise;
  symmetrize_and_check(out.covariance);
  return out;
}

PoseMeasurement make_stereo_measurement(const CameraRig& rig,
                                        const StereoMeasurement& measurement) {
  PoseMeasurement m;
  m.z = measurement.observation.pixels;
  m.noise = measurement.observation.noise;
  m.model = [rig, p_w = measurement.landmark](const Pose3& pose) {
    return Linearization{project_stereo(rig, pose, p_w), jacobian_wrt_pose(rig, pose, p_w)};
  };
  return m;
}

UpdateResult update_with_stats(const PoseBelief& belief,
                               std::span<const PoseMeasurement> measurements,
                               const EstimatorOptions& options) {
  if (measurements.empty()) throw InvalidArgument("update needs at least one measurement");
  belief.validate();

  std::vector<Eigen::LLT<Matrix3d>> noise_llt;
  noise_llt.reserve(measurements.size());
  for (const auto& m : measurements) {
    noise_llt.emplace_back(m.noise);
    if (noise_llt.back().info() != Eigen::Success) {
      throw NotPositiveDefinite("measurement noise is not positive definite");
    }
  }
  const Matrix6d prior_information =
      Eigen::LLT<Matrix6d>(belief.covariance).solve(Matrix6d::Identity());

  // The unknown is xi with T = exp(xi) * T_prior, so the prior term is
  // exactly quadratic and measurement Jacobians pick up J_l(xi).
  const auto pose_at = [&](const Vector6d& xi) { return compose(exp_se3(xi), belief.pose); };
  const auto total_cost = [&](const Vector6d& xi) {
    return xi.dot(prior_information * xi) +
           measurement_cost(measurements, noise_llt, pose_at(xi));
  };

  UpdateResult result;
  Vector6d xi = Vector6d::Zero();
  double cost = total_cost(xi);
  int increases = 0;

  const auto measurement_information = [&](const Pose3& pose, const Matrix6d& jl,
                                           Vector6d* gradient) {
    Matrix6d info = Matrix6d::Zero();
    for (std::size_t i = 0; i < measurements.size(); ++i) {
      const Linearization lin = measurements[i].model(pose);
      const Matrix36d j = lin.jacobian * jl;
      const Matrix36d wj = noise_llt[i].solve(j);
      info += j.transpose() * wj;
      if (gradient) *gradient += wj.transpose() * (measurements[i].z - lin.predicted);
    }
    return info;
  };

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    Vector6d gradient = -prior_information * xi;
    const Matrix6d information =
        prior_information + measurement_information(pose_at(xi), se3_left_jacobian(xi), &gradient);
    Vector6d step = information.ldlt().solve(gradient);
    if (!step.allFinite()) throw NotPositiveDefinite("singular Gauss-Newton system");
    if (step.norm() < options.step_tolerance) {
      result.converged = true;
      break;
    }

    // Cost decrease predicted by the quadratic model (gradient here is -g/2).
    const double predicted_decrease = 2.0 * step.dot(gradient) - step.dot(information * step);
    const auto rises = [&](double c) { return c > cost + 1e-10 * (1.0 + cost); };
    Vector6d candidate = xi + step;
    double candidate_cost = total_cost(candidate);
    if (rises(candidate_cost)) {
      // Nothing left to gain at numerical resolution.
      if (predicted_decrease <= 1e-10 * (1.0 + cost)) {
        result.converged = true;
        break;
      }
      if (++increases >= options.max_consecutive_increases) {
        throw DivergedUpdate("cost increased for " + std::to_string(increases) +
                             " consecutive iterations");
      }
      for (int h = 0; h < kMaxHalvings && rises(candidate_cost); ++h) {
        step *= 0.5;
        candidate = xi + step;
        candidate_cost = total_cost(candidate);
      }
      if (rises(candidate_cost)) continue;  // stay put; counts as an increase
    } else {
      increases = 0;
    }

    xi = candidate;
    cost = candidate_cost;
    if (step.norm() < options.step_tolerance) {
      result.converged = true;
      break;
    }
  }

  // Information about xi, transported to the left tangent space at the
  // posterior pose: delta = J_l(xi) d_xi.
  const Pose3 pose = pose_at(xi);
  const Matrix6d jl = se3_left_jacobian(xi);
  const Matrix6d xi_information = prior_information + measurement_information(pose, jl, nullptr);
  const Matrix6d xi_covariance = xi_information.ldlt().solve(Matrix6d::Identity());

  result.belief.pose = pose;
  result.belief.covariance = jl * xi_covariance * jl.transpose();
  symmetrize_and_check(result.belief.covariance);
  return result;
}

PoseBelief update(const PoseBelief& belief, std::span<const PoseMeasurement> measurements,
                  const EstimatorOptions& options) {
  return update_with_stats(belief, measurements, options).belief;
}

PoseBelief update(const PoseBelief& belief, const CameraRig& rig,
                  std::span<const StereoMeasurement> measurements,
                  const EstimatorOptions& options) {
  std::vector<PoseMeasurement> generic;
  generic.reserve(measurements.size());
  for (const auto& m : measurements) generic.push_back(make_stereo_measurement(rig, m));
  return update(belief, generic, options);
}

PoseBelief update_single(const PoseBelief& belief, const PoseMeasurement& measurement,
                         const EstimatorOptions& options) {
  return update(belief, std::span<const PoseMeasurement>(&measurement, 1), options);
}

}  // namespace sivo
