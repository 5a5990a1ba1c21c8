#include "sivo/reports.hpp"

#include <charconv>
#include <set>

#include "sivo/error.hpp"
#include "sivo/format.hpp"

namespace sivo {
namespace {

RejectionReason parse_reason(std::string_view s, std::size_t line_no) {
  for (auto r : {RejectionReason::None, RejectionReason::DynamicClass,
                 RejectionReason::BelowThreshold, RejectionReason::BehindCamera,
                 RejectionReason::CapExceeded}) {
    if (to_string(r) == s) return r;
  }
  throw MalformedLine(line_no, "unknown rejection reason '" + std::string(s) + "'");
}

}  // namespace

std::string write_selection_report(const std::vector<FrameRecord>& frames) {
  std::string out(kSelectionReportHeader);
  out += '\n';
  for (const auto& f : frames) {
    for (const auto& s : f.scores) {
      out += std::to_string(f.frame);
      out += ',' + std::to_string(s.candidate_id);
      out += ',' + format_number(s.mutual_information_bits);
      out += ',' + format_number(s.classification_entropy_bits);
      out += ',' + format_number(s.delta_h_bits);
      out += s.selected ? ",selected," : ",rejected,";
      out += to_string(s.reason);
      out += '\n';
    }
  }
  return out;
}

std::vector<SelectionReportRow> parse_selection_report(std::string_view text) {
  std::vector<SelectionReportRow> rows;
  std::size_t line_no = 0;
  bool have_header = false;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!have_header) {
      if (line != kSelectionReportHeader) throw MalformedLine(line_no, "unexpected header");
      have_header = true;
      continue;
    }

    std::vector<std::string_view> f;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 7) throw MalformedLine(line_no, "expected 7 fields");

    SelectionReportRow row;
    const auto int_ok = [](std::string_view s, auto& v) {
      const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
      return r.ec == std::errc() && r.ptr == s.data() + s.size();
    };
    if (!int_ok(f[0], row.frame) || !int_ok(f[1], row.candidate) ||
        !parse_number(f[2], row.mutual_information_bits) ||
        !parse_number(f[3], row.classification_entropy_bits) ||
        !parse_number(f[4], row.delta_h_bits)) {
      throw MalformedLine(line_no, "bad numeric field");
    }
    if (f[5] == "selected") {
      row.selected = true;
    } else if (f[5] != "rejected") {
      throw MalformedLine(line_no, "verdict must be selected or rejected");
    }
    row.reason = parse_reason(f[6], line_no);
    rows.push_back(row);
  }
  if (!have_header) throw MalformedLine(line_no, "missing header");
  return rows;
}

std::size_t count_map_points(const std::vector<SelectionReportRow>& rows) {
  std::set<LandmarkId> ids;
  for (const auto& r : rows) {
    if (r.selected) ids.insert(r.candidate);
  }
  return ids.size();
}

}  // namespace sivo
