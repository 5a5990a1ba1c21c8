#include "sivo/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "sivo/error.hpp"

namespace sivo {

Taxonomy::Taxonomy(std::vector<SemanticClass> classes) : classes_(std::move(classes)) {
  if (classes_.empty()) throw InvalidArgument("taxonomy has no classes");
  std::unordered_set<std::string> names;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i].id != static_cast<int>(i)) {
      throw InvalidArgument("taxonomy ids must be dense and ordered");
    }
    if (!names.insert(classes_[i].name).second) {
      throw InvalidArgument("duplicate class name '" + classes_[i].name + "'");
    }
  }
}

const Taxonomy& Taxonomy::street15() {
  static const Taxonomy taxonomy([] {
    const std::vector<std::pair<const char*, Mobility>> entries = {
        {"road", Mobility::Static},
        {"sidewalk", Mobility::Static},
        {"building", Mobility::Static},
        {"wall_fence", Mobility::Static},
        {"pole", Mobility::Static},
        {"traffic_light", Mobility::Static},
        {"traffic_sign", Mobility::Static},
        {"vegetation", Mobility::Static},
        {"terrain", Mobility::Static},
        {"sky", Mobility::Dynamic},
        {"person_rider", Mobility::Dynamic},
        {"car", Mobility::Dynamic},
        {"truck_bus", Mobility::Dynamic},
        {"motorcycle_bicycle", Mobility::Dynamic},
        {"void", Mobility::Dynamic},
    };
    std::vector<SemanticClass> classes;
    for (const auto& [name, mobility] : entries) {
      classes.push_back({static_cast<int>(classes.size()), name, mobility});
    }
    return classes;
  }());
  return taxonomy;
}

const SemanticClass& Taxonomy::at(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= classes_.size()) {
    throw InvalidArgument("class id " + std::to_string(id) + " out of range");
  }
  return classes_[static_cast<std::size_t>(id)];
}

int Taxonomy::id_of(std::string_view name) const {
  for (const auto& c : classes_) {
    if (c.name == name) return c.id;
  }
  throw InvalidArgument("unknown class '" + std::string(name) + "'");
}

DiscreteDistribution softmax(std::span<const double> logits) {
  if (logits.empty()) throw InvalidArgument("softmax of an empty vector");
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - top);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return DiscreteDistribution(std::move(p));
}

SemanticBelief aggregate_mc(std::span<const DiscreteDistribution> samples) {
  if (samples.empty()) throw EmptySampleSet("no Monte-Carlo samples");
  const std::size_t c = samples.front().size();
  for (const auto& s : samples) {
    if (s.size() != c) throw LengthMismatch("samples have different class counts");
  }

  const auto n = static_cast<double>(samples.size());
  SemanticBelief belief;
  belief.samples.assign(samples.begin(), samples.end());
  belief.aggregate = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c));
  for (const auto& s : samples) {
    belief.aggregate += Eigen::Map<const Eigen::VectorXd>(s.probabilities().data(),
                                                          belief.aggregate.size());
  }
  belief.aggregate /= n;

  belief.variance = Eigen::VectorXd::Zero(belief.aggregate.size());
  for (const auto& s : samples) {
    const Eigen::Map<const Eigen::VectorXd> p(s.probabilities().data(),
                                              belief.aggregate.size());
    belief.variance += (p - belief.aggregate).cwiseAbs2();
  }
  belief.variance /= n;

  // First maximal index, so ties resolve to the lowest class id.
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < belief.aggregate.size(); ++i) {
    if (belief.aggregate[i] > belief.aggregate[best]) best = i;
  }
  belief.argmax_class = static_cast<int>(best);
  belief.entropy_bits = classification_entropy(belief);
  return belief;
}

double classification_entropy(const SemanticBelief& belief) {
  // The mean of valid distributions can drift from 1 by a few ulps per
  // sample; that is still far inside the probability tolerance.
  return discrete_entropy(
      std::span<const double>(belief.aggregate.data(), belief.num_classes()));
}

bool is_admissible(const SemanticBelief& belief, const Taxonomy& taxonomy) {
  return taxonomy.is_static(belief.argmax_class);
}

SemanticBelief certain_belief(int class_id, std::size_t num_classes) {
  if (class_id < 0 || static_cast<std::size_t>(class_id) >= num_classes) {
    throw InvalidArgument("class id out of range");
  }
  std::vector<double> p(num_classes, 0.0);
  p[static_cast<std::size_t>(class_id)] = 1.0;
  const DiscreteDistribution d(std::move(p));
  return aggregate_mc(std::span<const DiscreteDistribution>(&d, 1));
}

}  // namespace sivo
