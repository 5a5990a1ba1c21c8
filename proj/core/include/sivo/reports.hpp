#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "sivo/selection.hpp"
#include "sivo/sim.hpp"

namespace sivo {

/// One line of the per-frame selection report.
struct SelectionReportRow {
  std::size_t frame = 0;
  LandmarkId candidate = 0;
  double mutual_information_bits = 0.0;
  double classification_entropy_bits = 0.0;
  double delta_h_bits = 0.0;
  bool selected = false;
  RejectionReason reason = RejectionReason::None;
};

inline constexpr std::string_view kSelectionReportHeader =
    "frame,candidate,mi_bits,entropy_bits,delta_h_bits,verdict,reason";

/// CSV with kSelectionReportHeader; verdict is `selected` or `rejected`.
std::string write_selection_report(const std::vector<FrameRecord>& frames);

/// Throws MalformedLine on a bad header, field count, number or label.
std::vector<SelectionReportRow> parse_selection_report(std::string_view text);

/// Number of distinct candidates selected at least once.
std::size_t count_map_points(const std::vector<SelectionReportRow>& rows);

}  // namespace sivo
