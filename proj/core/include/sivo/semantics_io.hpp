#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "sivo/semantics.hpp"

namespace sivo {

struct FeatureKey {
  std::size_t frame = 0;
  std::uint64_t feature = 0;
  auto operator<=>(const FeatureKey&) const = default;
};

using SemanticTable = std::map<FeatureKey, SemanticBelief>;

/// Reads per-sample class probabilities produced offline by a segmentation
/// network. Header: `frame,feature,sample,p_0,...,p_{C-1}`. Rows sharing
/// (frame, feature) are aggregated in ascending sample order; sample indices
/// need not be contiguous.
/// Throws MalformedLine, InvalidDistribution (with the line number) or
/// InconsistentC.
SemanticTable parse_semantics_csv(std::string_view text);

/// Inverse of parse_semantics_csv; samples are numbered from 0.
std::string write_semantics_csv(const SemanticTable& table);

}  // namespace sivo
