#include "sivo/kitti.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/LU>
#include <nlohmann/json.hpp>

#include "sivo/error.hpp"
#include "sivo/format.hpp"

namespace sivo {
namespace {

constexpr double kReorthonormalizeDrift = 1e-6;
constexpr double kMaxDrift = 1e-3;

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace

TrajectoryRecord TrajectoryRecord::from_camera_poses(
    const std::vector<Pose3>& camera_from_world) {
  TrajectoryRecord record;
  record.entries.reserve(camera_from_world.size());
  for (std::size_t k = 0; k < camera_from_world.size(); ++k) {
    record.entries.push_back({k, inverse(camera_from_world[k])});
  }
  return record;
}

TrajectoryRecord parse_kitti_poses(std::string_view text) {
  TrajectoryRecord record;
  std::size_t line_no = 0;
  std::size_t frame = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    const auto tokens = split_whitespace(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 12) {
      throw MalformedLine(line_no, "expected 12 values, found " + std::to_string(tokens.size()));
    }
    double v[12];
    for (std::size_t i = 0; i < 12; ++i) {
      if (!parse_number(tokens[i], v[i])) {
        throw MalformedLine(line_no, "'" + std::string(tokens[i]) + "' is not a finite number");
      }
    }
    Matrix3d r;
    r << v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10];
    const Vector3d t(v[3], v[7], v[11]);

    const double drift = std::max(Rotation3::orthonormality_error(r),
                                  std::abs(r.determinant() - 1.0));
    if (drift > kMaxDrift) {
      throw NonRigidRotation("line " + std::to_string(line_no) + ": rotation drift " +
                             std::to_string(drift));
    }
    Rotation3 rot;
    if (drift > kReorthonormalizeDrift) {
      rot = Rotation3::nearest(r);
      record.reorthonormalized_lines.push_back(line_no);
    } else {
      rot = Rotation3::from_matrix(r, kReorthonormalizeDrift);
    }
    record.entries.push_back({frame++, Pose3{rot, t}});
  }
  return record;
}

std::string write_kitti_poses(const TrajectoryRecord& record) {
  std::string out;
  for (const auto& e : record.entries) {
    const Eigen::Matrix4d m = e.world_from_camera.matrix();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) {
        if (r != 0 || c != 0) out += ' ';
        out += format_number(m(r, c));
      }
    }
    out += '\n';
  }
  return out;
}

ErrorReport kitti_errors(const TrajectoryRecord& gt, const TrajectoryRecord& est,
                         const KittiErrorOptions& options) {
  if (options.stride == 0) throw InvalidArgument("stride must be at least 1");

  // Frames present in both records, in order.
  std::vector<const Pose3*> gt_poses, est_poses;
  {
    std::size_t i = 0, j = 0;
    while (i < gt.entries.size() && j < est.entries.size()) {
      if (gt.entries[i].frame < est.entries[j].frame) {
        ++i;
      } else if (est.entries[j].frame < gt.entries[i].frame) {
        ++j;
      } else {
        gt_poses.push_back(&gt.entries[i++].world_from_camera);
        est_poses.push_back(&est.entries[j++].world_from_camera);
      }
    }
  }
  if (gt_poses.size() < 2) throw NoOverlap("trajectories share fewer than two frames");

  std::vector<double> dist(gt_poses.size(), 0.0);
  for (std::size_t k = 1; k < gt_poses.size(); ++k) {
    dist[k] = dist[k - 1] + (gt_poses[k]->translation - gt_poses[k - 1]->translation).norm();
  }

  constexpr double kRadToDeg = 180.0 / std::numbers::pi;
  ErrorReport report;
  double t_sum = 0.0, r_sum = 0.0;
  for (double length : options.lengths) {
    LengthError le;
    le.length = length;
    double t_acc = 0.0, r_acc = 0.0;
    std::size_t last = 0;
    for (std::size_t first = 0; first < gt_poses.size(); first += options.stride) {
      // End indices are monotone in the start index.
      last = std::max(last, first);
      while (last < dist.size() && dist[last] < dist[first] + length) ++last;
      if (last >= dist.size()) break;

      const Pose3 gt_rel = compose(inverse(*gt_poses[first]), *gt_poses[last]);
      const Pose3 est_rel = compose(inverse(*est_poses[first]), *est_poses[last]);
      ++le.segments;
      // acos near 1 turns rounding into ~1e-8 rad; identical motion is exact.
      if (gt_rel.matrix() == est_rel.matrix()) continue;
      const Pose3 e = compose(inverse(gt_rel), est_rel);
      t_acc += e.translation.norm() / length;
      r_acc += rotation_angle(e.rotation) / length;
    }
    if (le.segments == 0) {
      report.dropped_lengths.push_back(length);
      continue;
    }
    le.translation_error_percent = 100.0 * t_acc / static_cast<double>(le.segments);
    le.rotation_error_deg_per_m = kRadToDeg * r_acc / static_cast<double>(le.segments);
    t_sum += le.translation_error_percent;
    r_sum += le.rotation_error_deg_per_m;
    report.per_length.push_back(le);
  }
  if (!report.per_length.empty()) {
    const auto n = static_cast<double>(report.per_length.size());
    report.translation_error_percent = t_sum / n;
    report.rotation_error_deg_per_m = r_sum / n;
  }
  return report;
}

double map_reduction(std::size_t baseline, std::size_t test) {
  if (baseline == 0) throw ZeroBaseline("baseline map has no points");
  return 100.0 * (1.0 - static_cast<double>(test) / static_cast<double>(baseline));
}

std::string to_json(const ErrorReport& report) {
  using nlohmann::json;
  const auto opt = [](const auto& v) -> json { return v ? json(*v) : json(nullptr); };
  json j;
  j["translation_error_percent"] = opt(report.translation_error_percent);
  j["rotation_error_deg_per_m"] = opt(report.rotation_error_deg_per_m);
  j["per_length"] = json::array();
  for (const auto& le : report.per_length) {
    j["per_length"].push_back({{"length_m", le.length},
                               {"translation_error_percent", le.translation_error_percent},
                               {"rotation_error_deg_per_m", le.rotation_error_deg_per_m},
                               {"segments", le.segments}});
  }
  j["dropped_lengths_m"] = report.dropped_lengths;
  j["map_points_baseline"] = opt(report.map_points_baseline);
  j["map_points_test"] = opt(report.map_points_test);
  j["map_reduction_percent"] = opt(report.map_reduction_percent);
  return j.dump(2) + "\n";
}

}  // namespace sivo
