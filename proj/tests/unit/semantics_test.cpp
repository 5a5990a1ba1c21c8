#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "sivo/error.hpp"
#include "sivo/semantics.hpp"

namespace sivo {
namespace {

std::vector<DiscreteDistribution> random_samples(std::size_t n, std::size_t c,
                                                 std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(0.5);
  std::vector<DiscreteDistribution> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> p(c);
    double sum = 0.0;
    for (double& x : p) sum += (x = gamma(rng) + 1e-12);
    for (double& x : p) x /= sum;
    // Absorb rounding so the sum check never trips.
    double rest = 1.0;
    for (std::size_t k = 0; k + 1 < c; ++k) rest -= p[k];
    p.back() = std::max(rest, 0.0);
    out.emplace_back(p);
  }
  return out;
}

TEST(Softmax, Examples) {
  const std::vector<double> zeros{0, 0, 0};
  const DiscreteDistribution u = softmax(zeros);
  for (double p : u.probabilities()) EXPECT_NEAR(p, 1.0 / 3, 1e-15);

  const std::vector<double> saturated{1000, 0};
  const DiscreteDistribution s = softmax(saturated);
  EXPECT_NEAR(s[0], 1.0, 1e-12);
  EXPECT_NEAR(s[1], 0.0, 1e-12);

  const std::vector<double> ln2{std::log(2.0), 0};
  const DiscreteDistribution t = softmax(ln2);
  EXPECT_NEAR(t[0], 2.0 / 3, 1e-15);
  EXPECT_NEAR(t[1], 1.0 / 3, 1e-15);
}

TEST(AggregateMc, Examples) {
  const std::vector<DiscreteDistribution> disagree{DiscreteDistribution({1, 0}),
                                                   DiscreteDistribution({0, 1})};
  const SemanticBelief b = aggregate_mc(disagree);
  EXPECT_DOUBLE_EQ(b.aggregate[0], 0.5);
  EXPECT_DOUBLE_EQ(b.entropy_bits, 1.0);
  EXPECT_DOUBLE_EQ(b.variance[0], 0.25);

  const std::vector<DiscreteDistribution> same(4, DiscreteDistribution({0, 0, 1}));
  const SemanticBelief c = aggregate_mc(same);
  EXPECT_EQ(c.entropy_bits, 0.0);
  EXPECT_EQ(c.argmax_class, 2);

  const std::vector<DiscreteDistribution> soft{DiscreteDistribution({0.6, 0.4}),
                                               DiscreteDistribution({0.8, 0.2})};
  const SemanticBelief d = aggregate_mc(soft);
  EXPECT_NEAR(d.aggregate[0], 0.7, 1e-15);
  EXPECT_NEAR(d.entropy_bits, 0.8813, 1e-4);
}

TEST(AggregateMc, Errors) {
  EXPECT_THROW(aggregate_mc({}), EmptySampleSet);
  const std::vector<DiscreteDistribution> mixed{DiscreteDistribution({1, 0}),
                                                DiscreteDistribution({0, 0, 1})};
  EXPECT_THROW(aggregate_mc(mixed), LengthMismatch);
}

TEST(AggregateMc, PermutationInvariantAndConcave) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 200; ++i) {
    std::vector<DiscreteDistribution> s = random_samples(6, 15, rng);
    const SemanticBelief a = aggregate_mc(s);
    double mean_sample_entropy = 0.0;
    for (const auto& d : s) mean_sample_entropy += discrete_entropy(d) / 6.0;
    EXPECT_GE(a.entropy_bits, mean_sample_entropy - 1e-12);
    EXPECT_GE(a.entropy_bits, 0.0);
    EXPECT_LE(a.entropy_bits, std::log2(15.0) + 1e-12);

    std::shuffle(s.begin(), s.end(), rng);
    const SemanticBelief b = aggregate_mc(s);
    EXPECT_LT((a.aggregate - b.aggregate).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(a.entropy_bits, b.entropy_bits, 1e-12);
  }
}

TEST(ClassificationEntropy, Examples) {
  const std::vector<DiscreteDistribution> uniform{
      DiscreteDistribution(std::vector<double>(15, 1.0 / 15))};
  EXPECT_NEAR(classification_entropy(aggregate_mc(uniform)), std::log2(15.0), 1e-12);
  EXPECT_NEAR(classification_entropy(aggregate_mc(uniform)), 3.9069, 1e-4);
  EXPECT_EQ(classification_entropy(certain_belief(4, 15)), 0.0);
  const std::vector<DiscreteDistribution> skewed{DiscreteDistribution({0.9, 0.1})};
  EXPECT_NEAR(classification_entropy(aggregate_mc(skewed)), 0.469, 1e-3);
}

TEST(Taxonomy, Street15) {
  const Taxonomy& t = Taxonomy::street15();
  ASSERT_EQ(t.size(), 15u);
  for (const char* name : {"road", "sidewalk", "building", "wall_fence", "pole", "traffic_light",
                           "traffic_sign", "vegetation", "terrain"}) {
    EXPECT_TRUE(t.is_static(t.id_of(name))) << name;
  }
  for (const char* name :
       {"sky", "person_rider", "car", "truck_bus", "motorcycle_bicycle", "void"}) {
    EXPECT_FALSE(t.is_static(t.id_of(name))) << name;
  }
  EXPECT_THROW(t.id_of("bridge"), InvalidArgument);
  EXPECT_THROW(Taxonomy({{1, "a", Mobility::Static}}), InvalidArgument);
}

TEST(IsAdmissible, StaticVersusDynamic) {
  const Taxonomy& t = Taxonomy::street15();
  EXPECT_TRUE(is_admissible(certain_belief(t.id_of("building"), 15)));
  EXPECT_FALSE(is_admissible(certain_belief(t.id_of("car"), 15)));
}

TEST(IsAdmissible, TieGoesToLowestId) {
  const Taxonomy& t = Taxonomy::street15();
  std::vector<double> p(15, 0.0);
  p[static_cast<std::size_t>(t.id_of("building"))] = 0.5;
  p[static_cast<std::size_t>(t.id_of("car"))] = 0.5;
  const std::vector<DiscreteDistribution> s{DiscreteDistribution(p)};
  const SemanticBelief b = aggregate_mc(s);
  EXPECT_EQ(b.argmax_class, t.id_of("building"));
  EXPECT_TRUE(is_admissible(b));
}

}  // namespace
}  // namespace sivo
