#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sivo/infotheory.hpp"

namespace sivo {

enum class Mobility { Static, Dynamic };

struct SemanticClass {
  int id = 0;
  std::string name;
  Mobility mobility = Mobility::Static;
};

/// Immutable list of classes with dense ids 0..C-1.
class Taxonomy {
 public:
  /// Throws InvalidArgument unless ids are exactly 0..C-1 in order and names
  /// are unique.
  explicit Taxonomy(std::vector<SemanticClass> classes);

  /// The 15-class street-scene taxonomy: nine static classes (road through
  /// terrain) followed by six dynamic ones (sky through void).
  static const Taxonomy& street15();

  std::size_t size() const { return classes_.size(); }
  const SemanticClass& at(int id) const;
  bool is_static(int id) const { return at(id).mobility == Mobility::Static; }
  /// Throws InvalidArgument for an unknown name.
  int id_of(std::string_view name) const;
  const std::vector<SemanticClass>& classes() const { return classes_; }

 private:
  std::vector<SemanticClass> classes_;
};

/// Monte-Carlo dropout belief for one feature.
struct SemanticBelief {
  std::vector<DiscreteDistribution> samples;
  Eigen::VectorXd aggregate;  ///< elementwise mean of samples
  Eigen::VectorXd variance;   ///< per-class population variance over samples
  double entropy_bits = 0.0;  ///< entropy of the aggregate
  int argmax_class = 0;       ///< lowest id wins ties

  std::size_t num_classes() const { return static_cast<std::size_t>(aggregate.size()); }
  std::size_t num_samples() const { return samples.size(); }
};

/// exp(y_c) / sum exp(y), evaluated after subtracting max(y).
DiscreteDistribution softmax(std::span<const double> logits);

/// Averages N forward-pass distributions into a belief.
/// Throws EmptySampleSet or LengthMismatch.
SemanticBelief aggregate_mc(std::span<const DiscreteDistribution> samples);

/// Entropy in bits of the sample-averaged class distribution.
double classification_entropy(const SemanticBelief& belief);

/// True iff the belief's argmax class is static in `taxonomy`.
bool is_admissible(const SemanticBelief& belief,
                   const Taxonomy& taxonomy = Taxonomy::street15());

/// Single one-hot sample; zero entropy.
SemanticBelief certain_belief(int class_id, std::size_t num_classes);

}  // namespace sivo
