#include "sivo/semantics_io.hpp"

#include <charconv>
#include <vector>

#include "sivo/error.hpp"
#include "sivo/format.hpp"

namespace sivo {
namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_index(std::string_view s, T& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

SemanticTable parse_semantics_csv(std::string_view text) {
  std::map<FeatureKey, std::map<std::uint64_t, DiscreteDistribution>> grouped;
  std::size_t num_classes = 0;
  std::size_t line_no = 0;
  bool have_header = false;

  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line == "\r") continue;

    const auto fields = split_csv(line);
    if (!have_header) {
      if (fields.size() < 4 || fields[0] != "frame" || fields[1] != "feature" ||
          fields[2] != "sample") {
        throw MalformedLine(line_no, "expected header frame,feature,sample,p_0,...");
      }
      for (std::size_t i = 3; i < fields.size(); ++i) {
        if (fields[i] != "p_" + std::to_string(i - 3)) {
          throw MalformedLine(line_no, "probability columns must be p_0..p_{C-1}");
        }
      }
      num_classes = fields.size() - 3;
      have_header = true;
      continue;
    }

    if (fields.size() != num_classes + 3) {
      throw InconsistentC("line " + std::to_string(line_no) + ": " +
                          std::to_string(fields.size() - std::min<std::size_t>(fields.size(), 3)) +
                          " probabilities, header declares " + std::to_string(num_classes));
    }
    FeatureKey key;
    std::uint64_t sample = 0;
    if (!parse_index(fields[0], key.frame) || !parse_index(fields[1], key.feature) ||
        !parse_index(fields[2], sample)) {
      throw MalformedLine(line_no, "frame, feature and sample must be non-negative integers");
    }
    std::vector<double> p(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c) {
      if (!parse_number(fields[c + 3], p[c])) {
        throw MalformedLine(line_no, "'" + std::string(fields[c + 3]) + "' is not a number");
      }
    }
    try {
      auto [it, inserted] = grouped[key].emplace(sample, DiscreteDistribution(std::move(p)));
      if (!inserted) throw MalformedLine(line_no, "duplicate sample index");
    } catch (const InvalidDistribution& e) {
      throw InvalidDistribution("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw MalformedLine(line_no, "missing header");

  SemanticTable table;
  for (auto& [key, samples] : grouped) {
    std::vector<DiscreteDistribution> ordered;
    ordered.reserve(samples.size());
    for (auto& [idx, d] : samples) ordered.push_back(std::move(d));
    table.emplace(key, aggregate_mc(ordered));
  }
  return table;
}

std::string write_semantics_csv(const SemanticTable& table) {
  std::size_t num_classes = table.empty() ? 0 : table.begin()->second.num_classes();
  std::string out = "frame,feature,sample";
  for (std::size_t c = 0; c < num_classes; ++c) out += ",p_" + std::to_string(c);
  out += '\n';
  for (const auto& [key, belief] : table) {
    if (belief.num_classes() != num_classes) {
      throw InconsistentC("beliefs have different class counts");
    }
    for (std::size_t n = 0; n < belief.samples.size(); ++n) {
      out += std::to_string(key.frame) + ',' + std::to_string(key.feature) + ',' +
             std::to_string(n);
      for (double p : belief.samples[n].probabilities()) out += ',' + format_number(p);
      out += '\n';
    }
  }
  return out;
}

}  // namespace sivo
