#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sivo/geometry.hpp"

namespace sivo {

/// World-from-camera poses keyed by strictly increasing frame index
/// (KITTI odometry convention).
struct TrajectoryRecord {
  struct Entry {
    std::size_t frame = 0;
    Pose3 world_from_camera;
  };
  std::vector<Entry> entries;
  /// 1-based line numbers whose rotation was re-orthonormalized on parse.
  std::vector<std::size_t> reorthonormalized_lines;

  /// Builds a record from camera-from-world poses, frame k = index k.
  static TrajectoryRecord from_camera_poses(const std::vector<Pose3>& camera_from_world);
};

/// Parses 12 reals per line (row-major 3x4 [R|t]); line k is frame k. Blank
/// lines are skipped but still advance the line counter.
/// Throws MalformedLine or NonRigidRotation (drift above 1e-3).
TrajectoryRecord parse_kitti_poses(std::string_view text);

/// Writes one line per entry; shortest round-trip decimal representation,
/// '\n' line endings, independent of the global locale.
std::string write_kitti_poses(const TrajectoryRecord& record);

struct LengthError {
  double length = 0.0;  ///< metres
  double translation_error_percent = 0.0;
  double rotation_error_deg_per_m = 0.0;
  std::size_t segments = 0;
};

struct ErrorReport {
  /// Means over the evaluated lengths; empty when no length had a segment.
  std::optional<double> translation_error_percent;
  std::optional<double> rotation_error_deg_per_m;
  std::vector<LengthError> per_length;
  /// Lengths dropped because the trajectory was too short for them.
  std::vector<double> dropped_lengths;
  std::optional<std::size_t> map_points_baseline;
  std::optional<std::size_t> map_points_test;
  std::optional<double> map_reduction_percent;
};

struct KittiErrorOptions {
  std::vector<double> lengths{100, 200, 300, 400, 500, 600, 700, 800};
  std::size_t stride = 1;  ///< subsequence start-frame step
};

/// Relative-pose error over fixed-length subsequences. For each start frame
/// and length L the end is the first frame whose accumulated ground-truth
/// distance reaches L; E = inverse(gt_rel) * est_rel; errors are |t_E| / L
/// and angle(R_E) / L. Each length is averaged over its segments, then the
/// lengths are averaged. Only frames present in both records are used.
/// Throws NoOverlap when fewer than two frames are shared.
ErrorReport kitti_errors(const TrajectoryRecord& gt, const TrajectoryRecord& est,
                         const KittiErrorOptions& options = {});

/// 100 * (1 - test / baseline). Throws ZeroBaseline.
double map_reduction(std::size_t baseline, std::size_t test);

/// Serializes a report as JSON text.
std::string to_json(const ErrorReport& report);

}  // namespace sivo
